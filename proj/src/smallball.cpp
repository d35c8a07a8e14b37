#include "smallball/smallball.hpp"

#include <algorithm>
#include <cmath>

#include "smallball/errors.hpp"
#include "smallball/specfun.hpp"

namespace smallball {

namespace {

void require_eps_list(const std::vector<double>& eps_list) {
    if (eps_list.empty()) throw DomainError("eps list must be nonempty");
    for (double e : eps_list) {
        if (!(e > 0.0)) throw DomainError("eps values must be positive");
    }
}

void require_estimator_paths(std::size_t n_paths) {
    if (n_paths < 100) throw DomainError("n_paths must be at least 100");
}

void require_common(const TimeChangeSpec& tc, double T, std::size_t n_paths, double step_h) {
    validate(tc);
    if (!(T > 0.0) || !std::isfinite(T)) throw DomainError("T must be positive");
    if (n_paths < 2) throw DomainError("need at least two paths");
    if (!(step_h > 0.0)) throw DomainError("step_h must be positive");
}

double weight_sum(const TimeChangeSpec& tc) {
    double w = 0.0;
    for (const auto& c : tc.components) w += c.weight;
    return w;
}

std::vector<MCEstimate> to_estimates(const Moments& m, const std::vector<double>& eps_list, std::size_t n_paths,
                                     Estimator estimator, std::size_t grid_points, double step_h, double e_shift) {
    std::vector<MCEstimate> out;
    out.reserve(eps_list.size());
    for (std::size_t j = 0; j < eps_list.size(); ++j) {
        MCEstimate e;
        e.eps = eps_list[j];
        e.p_hat = std::clamp(m.mean[j], 0.0, 1.0);
        e.std_error = m.std_error[j];
        e.n_paths = n_paths;
        e.estimator = estimator;
        e.grid_points = grid_points;
        e.step_h = step_h;
        e.e_shift_bound = e_shift;
        if (e.p_hat < 1e-3) e.wilson = wilson_interval(e.p_hat, n_paths);
        out.push_back(e);
    }
    return out;
}

}  // namespace

std::string to_string(Estimator estimator) {
    switch (estimator) {
        case Estimator::Direct: return "direct";
        case Estimator::ConditionalBM: return "conditional";
        case Estimator::TimeChangeCDF: return "cdf";
    }
    return "unknown";
}

Interval wilson_interval(double p_hat, std::size_t n, double z) {
    if (n == 0) throw DomainError("wilson_interval: n must be positive");
    const double nd = static_cast<double>(n);
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nd;
    const double centre = (p_hat + z2 / (2.0 * nd)) / denom;
    const double half = z / denom * std::sqrt(std::max(0.0, p_hat * (1.0 - p_hat) / nd + z2 / (4.0 * nd * nd)));
    const double lower = p_hat <= 0.0 ? 0.0 : std::max(0.0, centre - half);
    const double upper = p_hat >= 1.0 ? 1.0 : std::min(1.0, centre + half);
    return {lower, upper};
}

std::vector<MCEstimate> estimate_conditional_bm(const TimeChangeSpec& tc, double T, const std::vector<double>& eps_list,
                                                std::size_t n_paths, double step_h, const MonteCarlo& mc) {
    require_common(tc, T, n_paths, step_h);
    require_estimator_paths(n_paths);
    require_eps_list(eps_list);
    const std::size_t k = eps_list.size();
    const Moments m = replicate_moments(n_paths, k, mc, [&](Rng& rng, double* out) {
        const double e = sample_E_T(tc, T, step_h, rng);
        const double root = std::sqrt(e);
        for (std::size_t j = 0; j < k; ++j) {
            out[j] = root > 0.0 ? chung_series(eps_list[j] / root).value : 1.0;
        }
    });
    return to_estimates(m, eps_list, n_paths, Estimator::ConditionalBM, 1, step_h, step_h * weight_sum(tc));
}

std::vector<MCEstimate> estimate_direct(const OuterSpec& outer, const TimeChangeSpec& tc, double T,
                                        const std::vector<double>& eps_list, std::size_t n_paths, std::size_t n_grid,
                                        double step_h, const MonteCarlo& mc, DirectSup sup) {
    require_common(tc, T, n_paths, step_h);
    require_estimator_paths(n_paths);
    require_eps_list(eps_list);
    validate(outer);
    if (n_grid < 64) throw DomainError("n_grid must be at least 64");
    if (sup == DirectSup::TimeGrid && n_grid > kDenseCovarianceCap &&
        (std::holds_alternative<FractionalBM>(outer) || std::holds_alternative<IteratedFBM>(outer))) {
        throw ResourceError("n_grid exceeds the dense covariance cap");
    }
    std::vector<double> t_grid;
    if (sup == DirectSup::TimeGrid) {
        t_grid.resize(n_grid);
        for (std::size_t i = 0; i < n_grid; ++i) {
            t_grid[i] = T * static_cast<double>(i) / static_cast<double>(n_grid - 1);
        }
        t_grid.back() = T;
    }
    const std::size_t k = eps_list.size();
    const Moments m = replicate_moments(n_paths, k, mc, [&](Rng& rng, double* out) {
        std::vector<double> x;
        if (sup == DirectSup::OperationalGrid) {
            const double e = sample_E_T(tc, T, step_h, rng);
            x = sample_uniform_path(outer, n_grid, e / static_cast<double>(n_grid - 1), rng);
        } else {
            const TimeChangeSample s = sample_E_at(tc, t_grid, step_h, rng);
            x = sample_at_times(outer, s.e_values, rng);
        }
        double peak = 0.0;
        for (double v : x) peak = std::max(peak, std::abs(v));
        for (std::size_t j = 0; j < k; ++j) out[j] = peak <= eps_list[j] ? 1.0 : 0.0;
    });
    return to_estimates(m, eps_list, n_paths, Estimator::Direct, n_grid, step_h, step_h * weight_sum(tc));
}

std::vector<MCEstimate> estimate_time_change_cdf(const TimeChangeSpec& tc, double T, const std::vector<double>& eps_list,
                                                 std::size_t n_paths, double step_h, const MonteCarlo& mc) {
    require_common(tc, T, n_paths, step_h);
    require_estimator_paths(n_paths);
    require_eps_list(eps_list);
    const std::size_t k = eps_list.size();
    const Moments m = replicate_moments(n_paths, k, mc, [&](Rng& rng, double* out) {
        const double e = sample_E_T(tc, T, step_h, rng);
        for (std::size_t j = 0; j < k; ++j) out[j] = e <= eps_list[j] ? 1.0 : 0.0;
    });
    return to_estimates(m, eps_list, n_paths, Estimator::TimeChangeCDF, 1, step_h, step_h * weight_sum(tc));
}

std::vector<DiagnosticPoint> weak_order_diagnostic(const TimeChangeSpec& tc, double T, double theta, double sigma,
                                                   const std::vector<double>& a_list, std::size_t n_paths,
                                                   double step_h, const MonteCarlo& mc) {
    require_common(tc, T, n_paths, step_h);
    if (!(theta > 0.0) || !(sigma > 0.0)) throw DomainError("theta and sigma must be positive");
    if (a_list.empty()) throw DomainError("a list must be nonempty");
    const double shift = std::pow(step_h * weight_sum(tc), 1.0 / theta);
    for (double a : a_list) {
        if (!(a > 0.0)) throw DomainError("a values must be positive");
        if (a * shift > 0.01) {
            throw DomainError("step_h too coarse: need a * (h sum c)^(1/theta) <= 0.01 for every a");
        }
    }
    const std::size_t k = a_list.size();
    const Moments m = replicate_moments(n_paths, k, mc, [&](Rng& rng, double* out) {
        const double e = sample_E_T(tc, T, step_h, rng);
        const double v = std::pow(e, 1.0 / theta);
        for (std::size_t j = 0; j < k; ++j) out[j] = std::exp(-a_list[j] * v);
    });
    std::vector<DiagnosticPoint> out;
    for (std::size_t j = 0; j < k; ++j) {
        const double scale = std::pow(a_list[j], theta * sigma);
        out.push_back({a_list[j], scale * m.mean[j], scale * m.std_error[j]});
    }
    return out;
}

std::vector<DiagnosticPoint> tauberian_diagnostic(const TimeChangeSpec& tc, double T, const std::vector<double>& a_list,
                                                  std::size_t n_paths, double step_h, const MonteCarlo& mc) {
    return weak_order_diagnostic(tc, T, 1.0, 1.0, a_list, n_paths, step_h, mc);
}

std::vector<PropEPoint> prop_e_check(const SubordinatorSpec& spec, double T, const std::vector<double>& eps_list,
                                     std::size_t n_paths, const MonteCarlo& mc) {
    validate(spec);
    if (!(T > 0.0)) throw DomainError("T must be positive");
    if (n_paths < 2) throw DomainError("need at least two paths");
    require_eps_list(eps_list);
    const std::size_t k = eps_list.size();
    const Moments m = replicate_moments(n_paths, k, mc, [&](Rng& rng, double* out) {
        for (std::size_t j = 0; j < k; ++j) out[j] = sample_increment(spec, eps_list[j], rng) >= T ? 1.0 : 0.0;
    });
    std::vector<PropEPoint> out;
    for (std::size_t j = 0; j < k; ++j) {
        out.push_back({eps_list[j], m.mean[j] / eps_list[j], m.std_error[j] / eps_list[j]});
    }
    return out;
}

PowerLawFit fit_power_law(const std::vector<FitPoint>& points) {
    if (points.size() < 3) throw DomainError("fit_power_law: need at least 3 points");
    bool weighted = true;
    for (const auto& p : points) {
        if (!(p.eps > 0.0)) throw DomainError("fit_power_law: eps must be positive");
        if (!(p.p_hat > 0.0 && p.p_hat < 1.0)) throw DomainError("fit_power_law: degenerate p_hat (must lie in (0,1))");
        if (!(p.std_error > 0.0)) weighted = false;
    }
    const double first = points.front().eps;
    if (std::all_of(points.begin(), points.end(), [&](const FitPoint& p) { return p.eps == first; })) {
        throw DomainError("fit_power_law: degenerate eps (all equal)");
    }
    const std::size_t n = points.size();
    std::vector<double> x(n), y(n), w(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = std::log(points[i].eps);
        y[i] = std::log(points[i].p_hat);
        const double rel = points[i].std_error / points[i].p_hat;
        w[i] = weighted ? 1.0 / (rel * rel) : 1.0;
    }
    double sw = 0.0, sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sw += w[i];
        sx += w[i] * x[i];
        sy += w[i] * y[i];
    }
    const double xbar = sx / sw;
    const double ybar = sy / sw;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += w[i] * (x[i] - xbar) * (x[i] - xbar);
        sxy += w[i] * (x[i] - xbar) * (y[i] - ybar);
    }
    PowerLawFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = ybar - fit.slope * xbar;
    double scale = 1.0;  // residual variance for the unweighted fit
    if (!weighted) {
        double rss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = y[i] - fit.intercept - fit.slope * x[i];
            rss += r * r;
        }
        scale = n > 2 ? rss / static_cast<double>(n - 2) : 0.0;
    }
    fit.slope_stderr = std::sqrt(scale / sxx);
    fit.intercept_stderr = std::sqrt(scale * (1.0 / sw + xbar * xbar / sxx));
    return fit;
}

std::vector<FitPoint> fit_points(const std::vector<MCEstimate>& estimates) {
    std::vector<FitPoint> out;
    out.reserve(estimates.size());
    for (const auto& e : estimates) out.push_back({e.eps, e.p_hat, e.std_error});
    return out;
}

}  // namespace smallball
