#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "smallball/random.hpp"

namespace smallball {

struct BrownianMotion {};

struct FractionalBM {
    double H = 0.5;
};

/// X = W_{H_n} o ... o W_{H_1}: H_1 drives the innermost clock.
struct IteratedFBM {
    std::vector<double> H;
};

/// Symmetric alpha-stable Levy process, E exp(iu X(t)) = exp(-t kappa^alpha |u|^alpha).
struct SymmetricStable {
    double alpha = 2.0;
    double kappa = 1.0;
};

/// X = S_{alpha1}(Y(t)) with Y a two-sided symmetric alpha2-stable process
/// (kappa = 1 for both).
struct IteratedStable {
    double alpha1 = 2.0;
    double alpha2 = 2.0;
};

using OuterSpec = std::variant<BrownianMotion, FractionalBM, IteratedFBM, SymmetricStable, IteratedStable>;

/// Throws DomainError naming the offending parameter.
void validate(const OuterSpec& spec);

/// Canonical CLI form, e.g. "fbm:H=0.75".
std::string to_string(const OuterSpec& spec);

/// Self-similarity index H.
double self_similarity_index(const OuterSpec& spec);

/// Small-deviation order tau: -log P(sup_{[0,1]} |X| <= eps) ~ or ~= eps^{-tau}.
double small_deviation_order(const OuterSpec& spec);

struct IteratedConstants {
    double tau_n = 0.0;
    double c_n = 0.0;
};

/// tau_n = 1 / sum_i prod_{j>=i} H_j and the recursion
///   c_1 = c_{H_1},
///   c_j = (1 + tau_{j-1}) [c_{j-1}^{1/tau_{j-1}} 2 c_{H_j} / tau_{j-1}]^{tau_{j-1}/(1+tau_{j-1})}.
/// H values must lie in (0,1] (1 is accepted as a degenerate bound).
IteratedConstants iterated_fbm_constants(const std::vector<double>& H, const std::vector<double>& cH);

inline constexpr std::size_t kDenseCovarianceCap = 8192;

/// Exact joint draw of X at sorted (possibly negative, possibly repeated)
/// times. Negative times use an independent copy of X run at |t|.
/// Gaussian families factor the covariance matrix (cached per H and time
/// set); throws ResourceError above kDenseCovarianceCap distinct times and
/// NumericError if the factorization fails even after 1e-12 jitter.
std::vector<double> sample_at_times(const OuterSpec& spec, const std::vector<double>& times, Rng& rng);

/// One-sided path X(k dt), k = 0..n-1, with uniform-grid fast paths
/// (independent increments, circulant embedding for fBm).
std::vector<double> sample_uniform_path(const OuterSpec& spec, std::size_t n, double dt, Rng& rng);

/// Covariance (|s|^{2H} + |t|^{2H} - |s-t|^{2H}) / 2 of one side of fBm.
double fbm_covariance(double H, double s, double t);

/// Symmetric alpha-stable variate with E exp(iuX) = exp(-|u|^alpha).
double symmetric_stable_variate(double alpha, Rng& rng);

}  // namespace smallball
