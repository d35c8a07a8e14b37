#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "smallball/outer.hpp"
#include "smallball/parallel.hpp"
#include "smallball/subordinator.hpp"
#include "smallball/time_change.hpp"

namespace smallball {

enum class Estimator { Direct, ConditionalBM, TimeChangeCDF };

/// "direct", "conditional" or "cdf".
std::string to_string(Estimator estimator);

struct Interval {
    double lower = 0.0;
    double upper = 0.0;
};

/// Monte Carlo estimate of a small-ball probability.
struct MCEstimate {
    double eps = 0.0;
    double p_hat = 0.0;
    double std_error = 0.0;
    std::size_t n_paths = 0;
    Estimator estimator = Estimator::Direct;
    std::size_t grid_points = 1;
    double step_h = 0.0;
    /// Upper bound on E_h(T) - E(T) >= 0 from rounding first passages up to
    /// the h-grid (h times the sum of mixture weights).
    double e_shift_bound = 0.0;
    /// 95% Wilson score interval, present when p_hat < 1e-3. For the
    /// conditional estimator it is conservative: a [0,1]-valued variable has
    /// variance at most p(1-p).
    std::optional<Interval> wilson;
};

/// 95% Wilson score interval for a proportion.
Interval wilson_interval(double p_hat, std::size_t n, double z = 1.959963984540054);

/// P(sup_{0<=t<=T} |W(E(t))| <= eps) = E[S(eps / sqrt(E(T)))], S the Chung
/// series, averaged over first-passage draws shared by every eps.
std::vector<MCEstimate> estimate_conditional_bm(const TimeChangeSpec& tc, double T, const std::vector<double>& eps_list,
                                                std::size_t n_paths, double step_h, const MonteCarlo& mc);

/// Where the supremum of |X(E(t))| is taken.
enum class DirectSup {
    /// E is continuous and nondecreasing, so sup_t |X(E(t))| = sup_{0<=u<=E(T)} |X(u)|;
    /// X is sampled on n_grid uniform points of [0, E(T)].
    OperationalGrid,
    /// E on n_grid uniform points of [0, T], X at the resulting E values. X is
    /// then seen only where E moves between t-grid points, which biases the
    /// estimate upward heavily for jumpy D.
    TimeGrid,
};

/// Indicator estimate of P(sup_{0<=t<=T} |X(E(t))| <= eps) for any outer X.
std::vector<MCEstimate> estimate_direct(const OuterSpec& outer, const TimeChangeSpec& tc, double T,
                                        const std::vector<double>& eps_list, std::size_t n_paths, std::size_t n_grid,
                                        double step_h, const MonteCarlo& mc,
                                        DirectSup sup = DirectSup::OperationalGrid);

/// Indicator estimate of P(E(T) <= eps) with first passages shared across eps.
std::vector<MCEstimate> estimate_time_change_cdf(const TimeChangeSpec& tc, double T, const std::vector<double>& eps_list,
                                                 std::size_t n_paths, double step_h, const MonteCarlo& mc);

struct DiagnosticPoint {
    double a = 0.0;
    double value = 0.0;
    double std_error = 0.0;
};

/// phi_T(a) = a E[exp(-a E(T))]. Requires a h sum(c_j) <= 0.01 for every a;
/// throws DomainError otherwise.
std::vector<DiagnosticPoint> tauberian_diagnostic(const TimeChangeSpec& tc, double T, const std::vector<double>& a_list,
                                                  std::size_t n_paths, double step_h, const MonteCarlo& mc);

/// phi_{T,theta,sigma}(a) = a^{theta sigma} E[exp(-a E(T)^{1/theta})], the
/// supremum of |E(t) - E(s)| over [0,T]^2 being E(T) for nondecreasing E.
/// Requires a (h sum(c_j))^{1/theta} <= 0.01 for every a.
std::vector<DiagnosticPoint> weak_order_diagnostic(const TimeChangeSpec& tc, double T, double theta, double sigma,
                                                   const std::vector<double>& a_list, std::size_t n_paths,
                                                   double step_h, const MonteCarlo& mc);

struct PropEPoint {
    double eps = 0.0;
    double ratio = 0.0;
    double std_error = 0.0;
};

/// P(D(eps) >= T) / eps from one exact increment per replicate.
std::vector<PropEPoint> prop_e_check(const SubordinatorSpec& spec, double T, const std::vector<double>& eps_list,
                                     std::size_t n_paths, const MonteCarlo& mc);

struct FitPoint {
    double eps = 0.0;
    double p_hat = 0.0;
    double std_error = 0.0;
};

struct PowerLawFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    double intercept_stderr = 0.0;
};

/// Weighted least squares of log p on log eps with weights (p/stderr)^2
/// (ordinary least squares if some stderr is 0). Throws DomainError when
/// fewer than 3 points are given, some p_hat is outside (0,1), or all eps
/// coincide.
PowerLawFit fit_power_law(const std::vector<FitPoint>& points);

std::vector<FitPoint> fit_points(const std::vector<MCEstimate>& estimates);

}  // namespace smallball
