#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "smallball/random.hpp"

namespace smallball {

/// Positive beta-stable subordinator, psi(s) = s^beta.
struct Stable {
    double beta = 0.5;
};

/// Exponentially tilted stable subordinator, psi(s) = (s + lambda)^beta - lambda^beta.
struct TemperedStable {
    double beta = 0.5;
    double lambda = 1.0;
};

/// Gamma subordinator with shape rate c and scale rate b, psi(s) = c log(1 + s/b).
struct Gamma {
    double c = 1.0;
    double b = 1.0;
};

using SubordinatorFamily = std::variant<Stable, TemperedStable, Gamma>;

/// A subordinator: one of the families above plus a linear drift term
/// (psi gains drift * s). All families have infinite Levy measure.
struct SubordinatorSpec {
    SubordinatorFamily family = Stable{};
    double drift = 0.0;
};

/// Throws DomainError naming the offending parameter.
void validate(const SubordinatorSpec& spec);

SubordinatorSpec make_stable(double beta, double drift = 0.0);
SubordinatorSpec make_tempered(double beta, double lambda, double drift = 0.0);
SubordinatorSpec make_gamma(double c, double b, double drift = 0.0);

/// Canonical spec string, e.g. "tempered:beta=0.5,lambda=1"; drift is
/// appended only when nonzero.
std::string to_string(const SubordinatorSpec& spec);

bool operator==(const SubordinatorSpec& a, const SubordinatorSpec& b);

/// psi(s) for s > 0, drift included.
double laplace_exponent(const SubordinatorSpec& spec, double s);

/// Principal-branch continuation of psi off the real axis. Analytic on
/// C minus a cut along the negative real axis (shifted to (-inf,-lambda] or
/// (-inf,-b] for the tempered and gamma families).
std::complex<double> laplace_exponent(const SubordinatorSpec& spec, std::complex<double> s);

/// Levy tail nu(T, inf). Drift does not contribute.
double levy_tail(const SubordinatorSpec& spec, double T);

/// Mean of D(1); infinite for the stable family.
double mean_rate(const SubordinatorSpec& spec);

/// One draw from the law of D(dt), strictly positive.
double sample_increment(const SubordinatorSpec& spec, double dt, Rng& rng);

/// Grid path D(k h), k = 0..n-1, strictly increasing with values[0] = 0.
class MonotonePath {
public:
    /// Throws DomainError unless step_h > 0, values[0] == 0 and values are
    /// strictly increasing and finite.
    MonotonePath(double step_h, std::vector<double> values);

    double step_h() const { return step_h_; }
    const std::vector<double>& values() const { return values_; }
    std::size_t size() const { return values_.size(); }
    double back() const { return values_.back(); }

    /// Appends n exact increments (the path keeps growing strictly).
    void extend(const SubordinatorSpec& spec, std::size_t n, Rng& rng);

private:
    MonotonePath() = default;
    friend MonotonePath sample_path(const SubordinatorSpec&, double, double, Rng&);

    double step_h_ = 0.0;
    std::vector<double> values_;
};

/// ceil(u_max/h) + 1 grid points. Increments that round away against the
/// running total are nudged up by one ulp so the path stays strictly
/// increasing. Throws ResourceError past 1e9 points or on allocation failure.
MonotonePath sample_path(const SubordinatorSpec& spec, double u_max, double step_h, Rng& rng);

}  // namespace smallball
