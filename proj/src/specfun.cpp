#include "smallball/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "smallball/errors.hpp"

namespace smallball {

namespace {

constexpr double kPi = std::numbers::pi;

double mittag_leffler_series(double beta, double z) {
    // |z| <= 1: the largest term is 1, so no cancellation beyond a few ulps.
    const double log_abs_z = std::log(-z);
    double sum = 1.0;
    for (int n = 1; n < 400; ++n) {
        const double magnitude = std::exp(n * log_abs_z - std::lgamma(n * beta + 1.0));
        const double term = (n % 2 == 0) ? magnitude : -magnitude;
        sum += term;
        if (magnitude < 1e-18 * std::abs(sum)) break;
    }
    return sum;
}

double mittag_leffler_integral(double beta, double x) {
    // E_beta(-x) = sin(beta pi)/(beta pi x) int_0^inf exp(-v^{1/beta}) / D(v/x) dv
    // with D(w) = w^2 + 2 w cos(beta pi) + 1 >= sin^2(beta pi).
    const double c = std::cos(beta * kPi);
    const double s = std::sin(beta * kPi);
    const double inv_beta = 1.0 / beta;
    auto integrand = [&](double v) {
        const double w = v / x;
        return std::exp(-std::pow(v, inv_beta)) / (w * w + 2.0 * w * c + 1.0);
    };
    // exp(-v^{1/beta}) < 1e-19 beyond v_max.
    const double v_max = std::pow(44.0, beta);
    std::vector<double> breaks{0.0, std::min(1.0, v_max), v_max};
    if (c < 0.0) {
        // Near-pole of 1/D at w = -cos(beta pi), relative width ~ sin(beta pi).
        const double peak = -c * x;
        const double width = std::max(s * x, 1e-300);
        for (double p : {peak - 4.0 * width, peak - width, peak, peak + width, peak + 4.0 * width}) {
            if (p > 0.0 && p < v_max) breaks.push_back(p);
        }
    }
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

    double total = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        double error = 0.0;
        total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
            integrand, breaks[i], breaks[i + 1], 15, 1e-13, &error);
    }
    return s / (beta * kPi * x) * total;
}

// Gamma(z, x) for x < 1.5 and z in [-0.5, 1]:
//   Gamma(z) - gamma(z, x)
//   = (Gamma(1+z) - 1)/z - (x^z - 1)/z - x^z sum_{n>=1} (-x)^n / (n! (z+n)).
// Each piece is well conditioned for z near 0, and the z = 0 limit is E_1(x).
double incomplete_gamma_small_x(double z, double x) {
    const double log_x = std::log(x);
    double gamma_part;
    double power_part;
    if (z == 0.0) {
        gamma_part = -std::numbers::egamma;
        power_part = log_x;
    } else {
        gamma_part = boost::math::tgamma1pm1(z) / z;
        power_part = std::expm1(z * log_x) / z;
    }
    double series = 0.0;
    double factor = 1.0;  // (-x)^n / n!
    for (int n = 1; n < 200; ++n) {
        factor *= -x / n;
        const double term = factor / (z + n);
        series += term;
        if (std::abs(term) < 1e-18 * std::abs(series)) break;
    }
    return gamma_part - power_part - std::exp(z * log_x) * series;
}

// Continued fraction (modified Lentz) for Gamma(z, x); converges for every
// real z when x > 0, quickly once x is moderate.
double incomplete_gamma_continued_fraction(double z, double x) {
    constexpr double tiny = 1e-300;
    double b = x + 1.0 - z;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 10000; ++i) {
        const double an = -i * (i - z);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return std::exp(-x + z * std::log(x)) * h;
}

}  // namespace

double mittag_leffler(double beta, double z) {
    if (!(beta > 0.0 && beta <= 1.0)) throw DomainError("mittag_leffler: beta must lie in (0,1]");
    if (!(z <= 0.0) || std::isinf(z)) throw DomainError("mittag_leffler: z must be finite and <= 0");
    if (z == 0.0) return 1.0;
    if (beta == 1.0) return std::exp(z);
    if (z >= -1.0) return mittag_leffler_series(beta, z);
    return mittag_leffler_integral(beta, -z);
}

double upper_incomplete_gamma(double z, double x) {
    if (!(x > 0.0) || std::isinf(x)) throw DomainError("upper_incomplete_gamma: x must be positive");
    if (!std::isfinite(z)) throw DomainError("upper_incomplete_gamma: z must be finite");
    if (z > 1.0) return boost::math::tgamma(z, x);
    if (x >= 1.5) return incomplete_gamma_continued_fraction(z, x);
    if (z >= -0.5) return incomplete_gamma_small_x(z, x);

    // Lift z into [-0.5, 0.5) and recur back down with
    //   Gamma(w, x) = (Gamma(w+1, x) - x^w e^{-x}) / w,   |w| > 0.5 on the way.
    const int lift = static_cast<int>(std::ceil(-0.5 - z));
    double value = incomplete_gamma_small_x(z + lift, x);
    for (int k = lift - 1; k >= 0; --k) {
        const double w = z + k;
        value = (value - std::exp(w * std::log(x) - x)) / w;
    }
    return value;
}

SeriesResult chung_series(double eps) {
    if (!(eps > 0.0)) throw DomainError("chung_series: eps must be positive");
    SeriesResult out;
    if (std::isinf(eps)) {
        out.value = 1.0;
        out.terms_used = 1;
        return out;
    }
    if (eps <= 1.0) {
        const double a = kPi * kPi / (8.0 * eps * eps);
        auto term = [&](std::size_t k) {
            const double odd = 2.0 * static_cast<double>(k) - 1.0;
            const double sign = (k % 2 == 1) ? 1.0 : -1.0;
            return sign * (4.0 / kPi) / odd * std::exp(-odd * odd * a);
        };
        double sum = term(1);
        std::size_t k = 1;
        double next = term(2);
        while (std::abs(next) > 1e-16 * std::abs(sum) && k < 1000) {
            sum += next;
            ++k;
            next = term(k + 1);
        }
        out.value = std::clamp(sum, 0.0, 1.0);
        out.terms_used = k;
        out.truncation_bound = std::abs(next);
        return out;
    }
    // 1 - 4 sum_{k>=0} (-1)^k Phi_bar((2k+1) eps)
    auto tail = [&](std::size_t k) {
        const double odd = 2.0 * static_cast<double>(k) + 1.0;
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        return sign * 2.0 * std::erfc(odd * eps / std::numbers::sqrt2);
    };
    double sum = 1.0 - tail(0);
    std::size_t k = 1;
    double next = tail(1);
    while (std::abs(next) > 1e-16 * std::abs(sum) && k < 1000) {
        sum -= next;
        ++k;
        next = tail(k);
    }
    out.value = std::clamp(sum, 0.0, 1.0);
    out.terms_used = k;
    out.truncation_bound = std::abs(next);
    return out;
}

double alternating_cubed_series() {
    // Backward summation of 2e5 terms plus the Euler half-term estimate of
    // the alternating remainder; residual error is far below 1e-14.
    constexpr std::size_t n = 200000;
    auto a = [](std::size_t k) {
        const double odd = 2.0 * static_cast<double>(k) - 1.0;
        return 1.0 / (odd * odd * odd);
    };
    double sum = 0.0;
    for (std::size_t k = n; k >= 1; --k) {
        sum += (k % 2 == 1) ? a(k) : -a(k);
    }
    // Remainder starts with term n+1, whose sign is (-1)^n = +1 for even n.
    return sum + 0.5 * a(n + 1);
}

SeriesResult alternating_cubed_partial(std::size_t n_terms) {
    if (n_terms == 0) throw DomainError("alternating_cubed_partial: need at least one term");
    double sum = 0.0;
    for (std::size_t k = n_terms; k >= 1; --k) {
        const double odd = 2.0 * static_cast<double>(k) - 1.0;
        const double t = 1.0 / (odd * odd * odd);
        sum += (k % 2 == 1) ? t : -t;
    }
    const double next_odd = 2.0 * static_cast<double>(n_terms) + 1.0;
    return {sum, n_terms, 1.0 / (next_odd * next_odd * next_odd)};
}

}  // namespace smallball
