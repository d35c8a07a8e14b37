#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "smallball/errors.hpp"

namespace smallball {

/// Fixed-Talbot inversion (Abate-Valko) of a Laplace transform F at t > 0:
///
///   f(t) ~ (r/M) [ F(r) e^{rt}/2 + sum_{k=1}^{M-1} Re( e^{t s_k} F(s_k) (1 + i sigma_k) ) ],
///   s_k = r theta_k (cot theta_k + i),  theta_k = k pi / M,  r = 2M / (5t),
///   sigma_k = theta_k + (theta_k cot theta_k - 1) cot theta_k.
///
/// F must be analytic to the right of the deformed contour (branch cuts on
/// the negative real axis are fine). In double precision M = 32 leaves a
/// roundoff floor near 1e-11 relative to the transform scale.
struct TalbotRule {
    std::vector<std::complex<double>> nodes;
    std::vector<std::complex<double>> weights;  // f(t) ~ sum Re(weights[k] F(nodes[k]))
};

inline TalbotRule talbot_rule(double t, int M = 32) {
    if (!(t > 0.0) || std::isinf(t)) throw DomainError("talbot: t must be positive and finite");
    if (M < 2) throw DomainError("talbot: need at least two nodes");
    TalbotRule rule;
    rule.nodes.reserve(M);
    rule.weights.reserve(M);
    const double r = 2.0 * M / (5.0 * t);
    rule.nodes.emplace_back(r, 0.0);
    rule.weights.emplace_back(0.5 * r / M * std::exp(r * t), 0.0);
    for (int k = 1; k < M; ++k) {
        const double theta = k * std::numbers::pi / M;
        const double cot = 1.0 / std::tan(theta);
        const std::complex<double> s(r * theta * cot, r * theta);
        const double sigma = theta + (theta * cot - 1.0) * cot;
        rule.nodes.push_back(s);
        rule.weights.push_back(r / M * std::exp(t * s) * std::complex<double>(1.0, sigma));
    }
    return rule;
}

template <class Transform>
double talbot_invert(Transform&& F, double t, int M = 32) {
    const TalbotRule rule = talbot_rule(t, M);
    double sum = 0.0;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
        sum += std::real(rule.weights[k] * F(rule.nodes[k]));
    }
    return sum;
}

/// exp(z) - 1 without cancellation for small |z|.
inline std::complex<double> complex_expm1(std::complex<double> z) {
    if (std::abs(z) > 0.5) return std::exp(z) - 1.0;
    std::complex<double> term = z;
    std::complex<double> sum = z;
    for (int n = 2; n < 30; ++n) {
        term *= z / static_cast<double>(n);
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
}

}  // namespace smallball
