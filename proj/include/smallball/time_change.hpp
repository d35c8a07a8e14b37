#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "smallball/random.hpp"
#include "smallball/subordinator.hpp"

namespace smallball {

struct TimeChangeComponent {
    SubordinatorSpec subordinator;
    double weight = 1.0;
};

/// E = sum_j c_j E_j over independent inverse subordinators E_j. The
/// small-ball order sigma of E equals the number of components.
struct TimeChangeSpec {
    std::vector<TimeChangeComponent> components;

    std::size_t sigma() const { return components.size(); }
    bool is_single() const { return components.size() == 1; }
};

/// Throws DomainError on an empty list, a nonpositive weight or an invalid
/// subordinator.
void validate(const TimeChangeSpec& spec);

TimeChangeSpec single(const SubordinatorSpec& spec);

/// "stable:beta=0.5" for a single unit-weight component, otherwise
/// "mix:[spec*weight;spec*weight]".
std::string to_string(const TimeChangeSpec& spec);

struct TimeChangeSample {
    std::vector<double> times;
    std::vector<double> e_values;
    double grid_h = 0.0;
    double sup_M = 0.0;
    double inf_N = 0.0;
};

/// h k* with k* = min{k : values[k] > t}. Throws CoverageError when the path
/// never exceeds t.
double invert_path(const MonotonePath& path, double t);

inline constexpr std::size_t kDefaultPathCap = 100000000;

/// E at sorted times >= 0 from grid paths of every component, extended by
/// doubling until they pass max(times). Throws ResourceError once a path
/// would exceed max_points grid points.
TimeChangeSample sample_E_at(const TimeChangeSpec& spec, const std::vector<double>& times,
                             double step_h, Rng& rng, std::size_t max_points = kDefaultPathCap);

/// Same law as the last entry of sample_E_at(spec, {T}, step_h), drawn from
/// the exact first-passage law of each component and rounded to the grid:
/// h (floor(E_j/h) + 1).
double sample_E_T(const TimeChangeSpec& spec, double T, double step_h, Rng& rng);

/// Grid first-passage index k* = min{k : D(k h) > T} of one subordinator.
/// Returned as a double since k* may exceed 2^53 only for absurd inputs.
double sample_first_passage_index(const SubordinatorSpec& spec, double T, double step_h, Rng& rng);

/// Continuous first-passage time E(T) = inf{u : D(u) > T} of one subordinator.
double sample_first_passage(const SubordinatorSpec& spec, double T, Rng& rng);

/// P(E(T) <= u) = P(D(u) > T) for one subordinator, by Laplace inversion.
double first_passage_cdf(const SubordinatorSpec& spec, double T, double u);

/// Tabulated law of E(T) for one subordinator and level T: the distribution
/// function G(u) = P(D(u) > T) is inverted numerically on log-spaced nodes
/// and sampled by inverse transform. Tables are immutable once built.
class FirstPassageTable {
public:
    FirstPassageTable(const SubordinatorSpec& spec, double T);

    double cdf(double u) const;
    /// u with cdf(u) = p, for p in (0,1).
    double quantile(double p) const;
    std::size_t size() const { return log_u_.size(); }

    /// Shared instance per (spec, T); safe for concurrent callers.
    static const FirstPassageTable& cached(const SubordinatorSpec& spec, double T);

private:
    double hermite(std::size_t i, double x) const;

    std::vector<double> log_u_;
    std::vector<double> log_g_;
    std::vector<double> slope_;  // d log G / d log u
    double u_cap_;               // G(u) = 1 for u >= u_cap_ (finite only with drift)
};

}  // namespace smallball
