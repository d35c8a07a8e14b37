#pragma once

#include <optional>
#include <string>
#include <vector>

#include "smallball/outer.hpp"
#include "smallball/parallel.hpp"
#include "smallball/subordinator.hpp"
#include "smallball/time_change.hpp"

namespace smallball {

enum class Regime { Strong, WeakOrder };

std::string to_string(Regime regime);

/// Asymptotic law C eps^exponent. Strong predictions carry the constant C;
/// weak-order ones only the exponent.
struct AsymptoticPrediction {
    double exponent = 0.0;
    std::optional<double> constant;
    Regime regime = Regime::WeakOrder;
    std::string source;
};

/// P(sup_{0<=t<=T} |W(E(t))| <= eps) ~ C eps^2 with
/// C = (32/pi^3) nu(T, inf) sum (-1)^{k-1}/(2k-1)^3 for a single inverse
/// subordinator. Throws DomainError for mixtures.
AsymptoticPrediction theorem_constant(const TimeChangeSpec& tc, double T);

/// 32 Gamma(beta) sin(beta pi)/pi^4 times the alternating cubed series; the
/// constant for an inverse beta-stable time change at T = 1.
double nane_constant(double beta);

/// psi(s) / (s (psi(s) + a)), the Laplace transform in t of E[exp(-a E(t))].
double laplace_transform_rhs(const SubordinatorSpec& spec, double s, double a);

/// E[exp(-a E(t))] by fixed-Talbot inversion of laplace_transform_rhs with
/// 32 nodes. Throws NumericError if a 48-node evaluation differs by more
/// than 1e-6.
double invert_laplace_E(const SubordinatorSpec& spec, double a, double t);

struct LaplaceCheck {
    double s = 0.0;
    double mc_integral = 0.0;  // trapezoid of e^{-st} E[exp(-a E(t))] over [0, t_max]
    double mc_stderr = 0.0;
    double rhs = 0.0;
    double relative_deviation = 0.0;  // |mc_integral - rhs| / rhs
    double tail_bound = 0.0;          // e^{-s t_max}/s, the omitted part of the integral
};

struct LaplaceReport {
    double a = 0.0;
    double t_max = 0.0;
    std::size_t n_paths = 0;
    double step_h = 0.0;
    std::vector<LaplaceCheck> checks;
};

inline constexpr std::size_t kLaplaceGridPoints = 512;

/// Monte Carlo check of the Laplace identity. g(t) = E[exp(-a E(t))] is
/// estimated on 512 points t_i = t_max (i/511)^2, clustered near 0 where g
/// has an algebraic or logarithmic cusp, with E(t_i) for all i drawn from
/// one uniform (or one stable variate) per replicate. Requires
/// s t_max >= 20 for every s.
LaplaceReport verify_laplace_identity(const SubordinatorSpec& spec, double a, const std::vector<double>& s_list,
                                      std::size_t n_paths, double step_h, double t_max, const MonteCarlo& mc);

/// sigma / H: P(sup_{0<=t<=T} |X(E(t))| <= eps) ~= eps^{sigma/H}.
double predicted_exponent(const OuterSpec& outer, double tc_sigma);

/// P(E(T) <= eps) ~ (1/m!) prod_j nu_j(T, inf)/c_j eps^m.
AsymptoticPrediction mixture_constant(const TimeChangeSpec& tc, double T);

/// Prediction for P(sup_{0<=t<=T} |X(E(t))| <= eps): strong for Brownian X
/// under a single inverse subordinator, weak order otherwise.
AsymptoticPrediction small_ball_prediction(const OuterSpec& outer, const TimeChangeSpec& tc, double T);

}  // namespace smallball
