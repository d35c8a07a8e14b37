#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace smallball {

using Rng = std::mt19937_64;

/// Independent child stream for (master seed, index). Deterministic, and
/// distinct indices give unrelated streams through std::seed_seq mixing.
inline Rng child_stream(std::uint64_t seed, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                      0x5bd1e995u};
    return Rng(seq);
}

/// Uniform on the open interval (0,1); never returns 0 or 1.
inline double uniform_open(Rng& rng) {
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

inline double std_exponential(Rng& rng) { return -std::log(uniform_open(rng)); }

inline double std_normal(Rng& rng) {
    // Marsaglia polar method; stateless so draws do not depend on call history
    // outside the stream itself.
    for (;;) {
        const double u = 2.0 * uniform_open(rng) - 1.0;
        const double v = 2.0 * uniform_open(rng) - 1.0;
        const double s = u * u + v * v;
        if (s > 0.0 && s < 1.0) {
            return u * std::sqrt(-2.0 * std::log(s) / s);
        }
    }
}

/// log of a Gamma(shape, 1) variate. Works for shapes so small that the
/// variate itself underflows (shape 1e-8 has median ~ 10^(-3e7)).
inline double log_gamma_variate(double shape, Rng& rng) {
    if (shape >= 1.0) {
        std::gamma_distribution<double> g(shape, 1.0);
        return std::log(g(rng));
    }
    // G_a = G_{a+1} * U^{1/a}
    std::gamma_distribution<double> g(shape + 1.0, 1.0);
    return std::log(g(rng)) + std::log(uniform_open(rng)) / shape;
}

}  // namespace smallball
