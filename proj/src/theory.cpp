#include "smallball/theory.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "smallball/errors.hpp"
#include "smallball/specfun.hpp"
#include "smallball/talbot.hpp"

namespace smallball {

namespace {

constexpr double kPi = std::numbers::pi;

double series_factor() { return 32.0 / (kPi * kPi * kPi) * alternating_cubed_series(); }

double invert_laplace_E_nodes(const SubordinatorSpec& spec, double a, double t, int nodes) {
    auto F = [&](std::complex<double> s) {
        const std::complex<double> psi = laplace_exponent(spec, s);
        return psi / (s * (psi + a));
    };
    return talbot_invert(F, t, nodes);
}

}  // namespace

std::string to_string(Regime regime) { return regime == Regime::Strong ? "strong" : "weak"; }

AsymptoticPrediction theorem_constant(const TimeChangeSpec& tc, double T) {
    validate(tc);
    if (!tc.is_single()) throw DomainError("theorem_constant: mixtures are not supported (use mixture_constant)");
    if (!(T > 0.0)) throw DomainError("theorem_constant: T must be positive");
    const auto& c = tc.components.front();
    // E_c(t) = c E(t) is the inverse of D(u/c), whose tail is nu/c.
    const double tail = levy_tail(c.subordinator, T) / c.weight;
    return {2.0, tail * series_factor(), Regime::Strong, "(32/pi^3) nu(T,inf) sum (-1)^(k-1)/(2k-1)^3"};
}

double nane_constant(double beta) {
    if (!(beta > 0.0 && beta < 1.0)) throw DomainError("beta must lie in (0,1)");
    return 32.0 * std::tgamma(beta) * std::sin(beta * kPi) / std::pow(kPi, 4) * alternating_cubed_series();
}

double laplace_transform_rhs(const SubordinatorSpec& spec, double s, double a) {
    validate(spec);
    if (!(s > 0.0)) throw DomainError("laplace_transform_rhs: s must be positive");
    if (!(a > 0.0)) throw DomainError("laplace_transform_rhs: a must be positive");
    const double psi = laplace_exponent(spec, s);
    return psi / s / (psi + a);
}

double invert_laplace_E(const SubordinatorSpec& spec, double a, double t) {
    validate(spec);
    if (!(a > 0.0)) throw DomainError("invert_laplace_E: a must be positive");
    if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("invert_laplace_E: t must be positive");
    const double v32 = invert_laplace_E_nodes(spec, a, t, 32);
    const double v48 = invert_laplace_E_nodes(spec, a, t, 48);
    if (!(std::abs(v32 - v48) <= 1e-6 * std::abs(v48))) {
        throw NumericError("invert_laplace_E: Talbot estimates with 32 and 48 nodes disagree");
    }
    return v32;
}

LaplaceReport verify_laplace_identity(const SubordinatorSpec& spec, double a, const std::vector<double>& s_list,
                                      std::size_t n_paths, double step_h, double t_max, const MonteCarlo& mc) {
    validate(spec);
    if (!(a > 0.0)) throw DomainError("verify_laplace_identity: a must be positive");
    if (s_list.empty()) throw DomainError("verify_laplace_identity: s list must be nonempty");
    if (!(step_h > 0.0)) throw DomainError("verify_laplace_identity: step_h must be positive");
    if (n_paths < 2) throw DomainError("verify_laplace_identity: need at least two paths");
    for (double s : s_list) {
        if (!(s > 0.0)) throw DomainError("verify_laplace_identity: s must be positive");
        if (!(s * t_max >= 20.0)) throw DomainError("verify_laplace_identity: need s * t_max >= 20 for every s");
    }

    constexpr std::size_t n = kLaplaceGridPoints;
    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double r = static_cast<double>(i) / static_cast<double>(n - 1);
        t[i] = t_max * r * r;
    }
    t.back() = t_max;
    // Trapezoid weights times e^{-s t_i}, one row per s.
    const std::size_t k = s_list.size();
    std::vector<double> w(k * n, 0.0);
    for (std::size_t j = 0; j < k; ++j) {
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const double half = 0.5 * (t[i + 1] - t[i]);
            w[j * n + i] += half * std::exp(-s_list[j] * t[i]);
            w[j * n + i + 1] += half * std::exp(-s_list[j] * t[i + 1]);
        }
    }

    const Stable* stable = std::get_if<Stable>(&spec.family);
    const bool closed_form = stable != nullptr && spec.drift == 0.0;
    std::vector<const FirstPassageTable*> tables(n, nullptr);
    if (!closed_form) {
        for (std::size_t i = 1; i < n; ++i) tables[i] = &FirstPassageTable::cached(spec, t[i]);
    }
    std::vector<double> t_pow(n, 0.0);
    if (closed_form) {
        for (std::size_t i = 1; i < n; ++i) t_pow[i] = std::pow(t[i], stable->beta);
    }

    auto grid = [&](double e) { return step_h * (std::floor(e / step_h) + 1.0); };
    const Moments m = replicate_moments(n_paths, k, mc, [&](Rng& rng, double* out) {
        std::fill(out, out + k, 0.0);
        double stable_factor = 0.0;
        double u = 0.0;
        if (closed_form) {
            stable_factor = std::pow(sample_increment(spec, 1.0, rng), -stable->beta);
        } else {
            u = uniform_open(rng);
        }
        for (std::size_t i = 0; i < n; ++i) {
            double e = 0.0;
            if (i > 0) e = grid(closed_form ? t_pow[i] * stable_factor : tables[i]->quantile(u));
            const double g = std::exp(-a * e);
            for (std::size_t j = 0; j < k; ++j) out[j] += w[j * n + i] * g;
        }
    });

    LaplaceReport report;
    report.a = a;
    report.t_max = t_max;
    report.n_paths = n_paths;
    report.step_h = step_h;
    for (std::size_t j = 0; j < k; ++j) {
        LaplaceCheck c;
        c.s = s_list[j];
        c.mc_integral = m.mean[j];
        c.mc_stderr = m.std_error[j];
        c.rhs = laplace_transform_rhs(spec, s_list[j], a);
        c.relative_deviation = std::abs(c.mc_integral - c.rhs) / c.rhs;
        c.tail_bound = std::exp(-s_list[j] * t_max) / s_list[j];
        report.checks.push_back(c);
    }
    return report;
}

double predicted_exponent(const OuterSpec& outer, double tc_sigma) {
    validate(outer);
    if (!(tc_sigma > 0.0)) throw DomainError("predicted_exponent: sigma must be positive");
    return tc_sigma / self_similarity_index(outer);
}

AsymptoticPrediction mixture_constant(const TimeChangeSpec& tc, double T) {
    validate(tc);
    if (!(T > 0.0)) throw DomainError("mixture_constant: T must be positive");
    double constant = 1.0;
    for (std::size_t j = 0; j < tc.components.size(); ++j) {
        constant *= levy_tail(tc.components[j].subordinator, T) / tc.components[j].weight;
        constant /= static_cast<double>(j + 1);
    }
    return {static_cast<double>(tc.sigma()), constant, Regime::Strong, "(1/m!) prod nu_j(T,inf)/c_j"};
}

AsymptoticPrediction small_ball_prediction(const OuterSpec& outer, const TimeChangeSpec& tc, double T) {
    validate(outer);
    validate(tc);
    if (std::holds_alternative<BrownianMotion>(outer) && tc.is_single()) return theorem_constant(tc, T);
    return {predicted_exponent(outer, static_cast<double>(tc.sigma())), std::nullopt, Regime::WeakOrder,
            "sigma/H"};
}

}  // namespace smallball
