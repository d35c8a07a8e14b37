#pragma once

#include <cstddef>

namespace smallball {

/// Partial sum of an infinite series together with a bound on what was
/// left out.
struct SeriesResult {
    double value = 0.0;
    std::size_t terms_used = 0;
    double truncation_bound = 0.0;  // |exact - value| <= truncation_bound (up to rounding)
};

/// Mittag-Leffler function E_beta(z) = sum z^n / Gamma(n beta + 1) on the
/// negative real axis, beta in (0,1], z <= 0. Relative accuracy ~1e-12.
///
/// |z| <= 1 uses the power series. Further out the series cancels
/// catastrophically (for beta = 0.3, z = -5 the largest term is ~e^211), so
/// the value is computed from the complete-monotonicity representation
///
///   E_beta(-t^beta) = int_0^inf e^{-rt} K_beta(r) dr,
///   K_beta(r) = sin(beta pi) r^{beta-1} / (pi (r^{2beta} + 2 r^beta cos(beta pi) + 1)).
///
/// Throws DomainError outside the domain.
double mittag_leffler(double beta, double z);

/// Upper incomplete gamma function Gamma(z, x) = int_x^inf e^{-u} u^{z-1} du
/// for any real z and x > 0. Throws DomainError if x <= 0.
double upper_incomplete_gamma(double z, double x);

/// P(sup_{0<=t<=1} |W(t)| <= eps) for standard Brownian motion W.
///
/// For eps <= 1 this is Chung's series
///   (4/pi) sum_{k>=1} (-1)^{k-1}/(2k-1) exp(-(2k-1)^2 pi^2 / (8 eps^2)),
/// truncated once the next term drops below 1e-16 of the partial sum. For
/// eps > 1 that series needs O(eps) terms, so the reflection-principle dual
///   1 - 4 sum_{k>=0} (-1)^k Phi_bar((2k+1) eps)
/// is summed instead. The value is clamped to [0,1].
SeriesResult chung_series(double eps);

/// sum_{k>=1} (-1)^{k-1} / (2k-1)^3 = pi^3/32, to 1e-14 absolute.
double alternating_cubed_series();

/// First n terms of the series above with the alternating-series bound
/// 1/(2n+1)^3 on the remainder.
SeriesResult alternating_cubed_partial(std::size_t n_terms);

}  // namespace smallball
