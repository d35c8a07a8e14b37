#include "smallball/outer.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <numeric>
#include <shared_mutex>
#include <sstream>
#include <tuple>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include "smallball/errors.hpp"
#include "smallball/format.hpp"

namespace smallball {

namespace {

constexpr double kPi = std::numbers::pi;

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_hurst(double H) {
    if (!(H > 0.0 && H < 1.0)) throw DomainError("H must lie in (0,1)");
}

void require_alpha(double alpha, const char* name) {
    if (!(alpha > 0.0 && alpha <= 2.0)) throw DomainError(std::string(name) + " must lie in (0,2]");
}

// ---- dense Gaussian factorization cache -------------------------------------

struct CovarianceKey {
    double H;
    std::vector<double> times;
    bool operator<(const CovarianceKey& o) const { return std::tie(H, times) < std::tie(o.H, o.times); }
};

constexpr std::size_t kCacheMaxDimension = 2048;
constexpr std::size_t kCacheMaxEntries = 64;

std::shared_ptr<const Eigen::MatrixXd> fbm_factor(double H, const std::vector<double>& times) {
    static std::shared_mutex mutex;
    static std::map<CovarianceKey, std::shared_ptr<const Eigen::MatrixXd>> cache;
    const bool cacheable = times.size() <= kCacheMaxDimension;
    CovarianceKey key{H, cacheable ? times : std::vector<double>{}};
    if (cacheable) {
        std::shared_lock lock(mutex);
        const auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }

    const Eigen::Index n = static_cast<Eigen::Index>(times.size());
    Eigen::MatrixXd cov(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) {
            cov(i, j) = cov(j, i) = fbm_covariance(H, times[i], times[j]);
        }
    }
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) {
        cov.diagonal().array() += 1e-12 * cov.diagonal().maxCoeff();
        llt.compute(cov);
        if (llt.info() != Eigen::Success) throw NumericError("fBm covariance factorization failed");
    }
    auto factor = std::make_shared<const Eigen::MatrixXd>(llt.matrixL());

    if (cacheable) {
        std::unique_lock lock(mutex);
        if (cache.size() >= kCacheMaxEntries) cache.clear();
        cache.emplace(std::move(key), factor);
    }
    return factor;
}

// sqrt(lambda_k / m) of the circulant embedding of unit-step fractional
// Gaussian noise with `half` lags, m = 2 half.
std::shared_ptr<const std::vector<double>> circulant_root(double H, std::size_t half) {
    static std::shared_mutex mutex;
    static std::map<std::pair<double, std::size_t>, std::shared_ptr<const std::vector<double>>> cache;
    const auto key = std::make_pair(H, half);
    {
        std::shared_lock lock(mutex);
        const auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    const std::size_t m = 2 * half;
    auto gamma = [H](double k) {
        return 0.5 * (std::pow(std::abs(k + 1.0), 2 * H) - 2.0 * std::pow(std::abs(k), 2 * H) +
                      std::pow(std::abs(k - 1.0), 2 * H));
    };
    std::vector<std::complex<double>> row(m);
    for (std::size_t k = 0; k <= half; ++k) row[k] = gamma(static_cast<double>(k));
    for (std::size_t k = half + 1; k < m; ++k) row[k] = gamma(static_cast<double>(m - k));
    std::vector<std::complex<double>> eig;
    Eigen::FFT<double> fft;
    fft.fwd(eig, row);
    double largest = 0.0;
    for (const auto& e : eig) largest = std::max(largest, e.real());
    auto root = std::make_shared<std::vector<double>>(m);
    for (std::size_t k = 0; k < m; ++k) {
        double lambda = eig[k].real();
        if (lambda < -1e-10 * largest) throw NumericError("circulant embedding is not nonnegative definite");
        (*root)[k] = std::sqrt(std::max(lambda, 0.0) / static_cast<double>(m));
    }
    std::unique_lock lock(mutex);
    auto [it, inserted] = cache.try_emplace(key, std::move(root));
    return it->second;
}

// ---- one side of a non-iterated process at sorted distinct times > 0 ---------

std::vector<double> sample_side(const OuterSpec& spec, const std::vector<double>& times, Rng& rng) {
    std::vector<double> out(times.size());
    if (times.empty()) return out;
    std::visit(Overloaded{
                   [&](const BrownianMotion&) {
                       double prev_t = 0.0;
                       double x = 0.0;
                       for (std::size_t i = 0; i < times.size(); ++i) {
                           x += std::sqrt(times[i] - prev_t) * std_normal(rng);
                           out[i] = x;
                           prev_t = times[i];
                       }
                   },
                   [&](const FractionalBM& f) {
                       if (times.size() > kDenseCovarianceCap) {
                           throw ResourceError("fBm: more distinct times than the dense covariance cap");
                       }
                       const auto factor = fbm_factor(f.H, times);
                       Eigen::VectorXd z(static_cast<Eigen::Index>(times.size()));
                       for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = std_normal(rng);
                       const Eigen::VectorXd x = factor->triangularView<Eigen::Lower>() * z;
                       for (std::size_t i = 0; i < times.size(); ++i) out[i] = x(static_cast<Eigen::Index>(i));
                   },
                   [&](const SymmetricStable& f) {
                       double prev_t = 0.0;
                       double x = 0.0;
                       for (std::size_t i = 0; i < times.size(); ++i) {
                           x += f.kappa * std::pow(times[i] - prev_t, 1.0 / f.alpha) * symmetric_stable_variate(f.alpha, rng);
                           out[i] = x;
                           prev_t = times[i];
                       }
                   },
                   [&](const IteratedFBM&) {},
                   [&](const IteratedStable&) {},
               },
               spec);
    return out;
}

// X at arbitrary (unsorted, repeated) points, sampled once per distinct value.
std::vector<double> sample_at_points(const OuterSpec& spec, const std::vector<double>& points, Rng& rng) {
    std::vector<double> sorted(points);
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    const std::vector<double> values = sample_at_times(spec, sorted, rng);
    std::vector<double> out(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto it = std::lower_bound(sorted.begin(), sorted.end(), points[i]);
        out[i] = values[static_cast<std::size_t>(it - sorted.begin())];
    }
    return out;
}

std::vector<double> fbm_uniform_path(double H, std::size_t n, double dt, Rng& rng) {
    std::vector<double> out(n, 0.0);
    if (n <= 1) return out;
    const std::size_t steps = n - 1;
    std::size_t half = 1;
    while (half < steps) half *= 2;
    const auto root = circulant_root(H, half);
    const std::size_t m = 2 * half;
    std::vector<std::complex<double>> xi(m);
    for (std::size_t k = 0; k < m; ++k) {
        const double re = std_normal(rng);
        const double im = std_normal(rng);
        xi[k] = (*root)[k] * std::complex<double>(re, im);
    }
    std::vector<std::complex<double>> y;
    Eigen::FFT<double> fft;
    fft.fwd(y, xi);
    const double scale = std::pow(dt, H);
    double x = 0.0;
    for (std::size_t k = 0; k < steps; ++k) {
        x += scale * y[k].real();
        out[k + 1] = x;
    }
    return out;
}

}  // namespace

double fbm_covariance(double H, double s, double t) {
    const double h2 = 2.0 * H;
    return 0.5 * (std::pow(std::abs(s), h2) + std::pow(std::abs(t), h2) - std::pow(std::abs(s - t), h2));
}

double symmetric_stable_variate(double alpha, Rng& rng) {
    // Chambers-Mallows-Stuck, symmetric case.
    const double v = kPi * (uniform_open(rng) - 0.5);
    const double w = std_exponential(rng);
    if (alpha == 1.0) return std::tan(v);
    return std::sin(alpha * v) / std::pow(std::cos(v), 1.0 / alpha) *
           std::pow(std::cos((1.0 - alpha) * v) / w, (1.0 - alpha) / alpha);
}

void validate(const OuterSpec& spec) {
    std::visit(Overloaded{
                   [](const BrownianMotion&) {},
                   [](const FractionalBM& f) { require_hurst(f.H); },
                   [](const IteratedFBM& f) {
                       if (f.H.empty()) throw DomainError("iterated fBm needs at least one H");
                       for (double H : f.H) require_hurst(H);
                   },
                   [](const SymmetricStable& f) {
                       require_alpha(f.alpha, "alpha");
                       if (!(f.kappa > 0.0) || !std::isfinite(f.kappa)) throw DomainError("kappa must be positive");
                   },
                   [](const IteratedStable& f) {
                       require_alpha(f.alpha1, "a1");
                       require_alpha(f.alpha2, "a2");
                   },
               },
               spec);
}

std::string to_string(const OuterSpec& spec) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    std::visit(Overloaded{
                   [&](const BrownianMotion&) { os << "bm"; },
                   [&](const FractionalBM& f) { os << "fbm:H=" << shortest(f.H); },
                   [&](const IteratedFBM& f) {
                       os << "iterfbm:H=";
                       for (std::size_t i = 0; i < f.H.size(); ++i) os << (i ? "," : "") << shortest(f.H[i]);
                   },
                   [&](const SymmetricStable& f) { os << "stable:alpha=" << shortest(f.alpha) << ",kappa=" << shortest(f.kappa); },
                   [&](const IteratedStable& f) { os << "iterstable:a1=" << shortest(f.alpha1) << ",a2=" << shortest(f.alpha2); },
               },
               spec);
    return os.str();
}

double self_similarity_index(const OuterSpec& spec) {
    return std::visit(Overloaded{
                          [](const BrownianMotion&) { return 0.5; },
                          [](const FractionalBM& f) { return f.H; },
                          [](const IteratedFBM& f) {
                              return std::accumulate(f.H.begin(), f.H.end(), 1.0, std::multiplies<>());
                          },
                          [](const SymmetricStable& f) { return 1.0 / f.alpha; },
                          [](const IteratedStable& f) { return 1.0 / (f.alpha1 * f.alpha2); },
                      },
                      spec);
}

double small_deviation_order(const OuterSpec& spec) {
    return std::visit(Overloaded{
                          [](const BrownianMotion&) { return 2.0; },
                          [](const FractionalBM& f) { return 1.0 / f.H; },
                          [](const IteratedFBM& f) {
                              double sum = 0.0;
                              for (std::size_t i = 0; i < f.H.size(); ++i) {
                                  double prod = 1.0;
                                  for (std::size_t j = i; j < f.H.size(); ++j) prod *= f.H[j];
                                  sum += prod;
                              }
                              return 1.0 / sum;
                          },
                          [](const SymmetricStable& f) { return f.alpha; },
                          [](const IteratedStable& f) { return f.alpha1 * f.alpha2 / (1.0 + f.alpha2); },
                      },
                      spec);
}

IteratedConstants iterated_fbm_constants(const std::vector<double>& H, const std::vector<double>& cH) {
    if (H.empty() || H.size() != cH.size()) throw DomainError("iterated_fbm_constants: need equal nonempty lists");
    for (std::size_t j = 0; j < H.size(); ++j) {
        if (!(H[j] > 0.0 && H[j] <= 1.0)) throw DomainError("iterated_fbm_constants: H must lie in (0,1]");
        if (!(cH[j] > 0.0) || !std::isfinite(cH[j])) throw DomainError("iterated_fbm_constants: constants must be positive");
    }
    // sum_{i<=j} prod_{k=i}^{j} H_k satisfies S_j = H_j (1 + S_{j-1}).
    double S = H[0];
    double tau = 1.0 / S;
    double c = cH[0];
    for (std::size_t j = 1; j < H.size(); ++j) {
        c = (1.0 + tau) * std::pow(std::pow(c, 1.0 / tau) * 2.0 * cH[j] / tau, tau / (1.0 + tau));
        S = H[j] * (1.0 + S);
        tau = 1.0 / S;
    }
    return {tau, c};
}

std::vector<double> sample_at_times(const OuterSpec& spec, const std::vector<double>& times, Rng& rng) {
    validate(spec);
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!std::isfinite(times[i])) throw DomainError("sample_at_times: times must be finite");
        if (i > 0 && times[i] < times[i - 1]) throw DomainError("sample_at_times: times must be sorted");
    }
    if (const auto* f = std::get_if<IteratedFBM>(&spec)) {
        std::vector<double> values = sample_at_times(FractionalBM{f->H.front()}, times, rng);
        for (std::size_t j = 1; j < f->H.size(); ++j) values = sample_at_points(FractionalBM{f->H[j]}, values, rng);
        return values;
    }
    if (const auto* f = std::get_if<IteratedStable>(&spec)) {
        const std::vector<double> inner = sample_at_times(SymmetricStable{f->alpha2, 1.0}, times, rng);
        return sample_at_points(SymmetricStable{f->alpha1, 1.0}, inner, rng);
    }

    // Two sides: distinct |t| for t > 0 and for t < 0, each ascending.
    std::vector<double> pos;
    std::vector<double> neg;
    for (double t : times) {
        if (t > 0.0 && (pos.empty() || pos.back() != t)) pos.push_back(t);
    }
    for (auto it = times.rbegin(); it != times.rend(); ++it) {
        if (*it < 0.0 && (neg.empty() || neg.back() != -*it)) neg.push_back(-*it);
    }
    const std::vector<double> xp = sample_side(spec, pos, rng);
    const std::vector<double> xn = sample_side(spec, neg, rng);
    std::vector<double> out(times.size(), 0.0);
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double t = times[i];
        if (t > 0.0) {
            out[i] = xp[static_cast<std::size_t>(std::lower_bound(pos.begin(), pos.end(), t) - pos.begin())];
        } else if (t < 0.0) {
            out[i] = xn[static_cast<std::size_t>(std::lower_bound(neg.begin(), neg.end(), -t) - neg.begin())];
        }
    }
    return out;
}

std::vector<double> sample_uniform_path(const OuterSpec& spec, std::size_t n, double dt, Rng& rng) {
    validate(spec);
    if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("sample_uniform_path: dt must be positive");
    std::vector<double> out(n, 0.0);
    if (n <= 1) return out;
    return std::visit(
        Overloaded{
            [&](const BrownianMotion&) {
                const double sd = std::sqrt(dt);
                for (std::size_t k = 1; k < n; ++k) out[k] = out[k - 1] + sd * std_normal(rng);
                return out;
            },
            [&](const FractionalBM& f) { return fbm_uniform_path(f.H, n, dt, rng); },
            [&](const SymmetricStable& f) {
                const double scale = f.kappa * std::pow(dt, 1.0 / f.alpha);
                for (std::size_t k = 1; k < n; ++k) out[k] = out[k - 1] + scale * symmetric_stable_variate(f.alpha, rng);
                return out;
            },
            [&](const IteratedFBM& f) {
                std::vector<double> values = fbm_uniform_path(f.H.front(), n, dt, rng);
                for (std::size_t j = 1; j < f.H.size(); ++j) values = sample_at_points(FractionalBM{f.H[j]}, values, rng);
                return values;
            },
            [&](const IteratedStable& f) {
                const double scale = std::pow(dt, 1.0 / f.alpha2);
                for (std::size_t k = 1; k < n; ++k) out[k] = out[k - 1] + scale * symmetric_stable_variate(f.alpha2, rng);
                return sample_at_points(SymmetricStable{f.alpha1, 1.0}, out, rng);
            },
        },
        spec);
}

}  // namespace smallball
