#include "smallball/time_change.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <sstream>

#include "smallball/errors.hpp"
#include "smallball/format.hpp"
#include "smallball/talbot.hpp"

namespace smallball {

namespace {

struct CdfPoint {
    double g = 0.0;      // P(D(u) > T)
    double dg_du = 0.0;  // d/du of the above
    bool valid = true;   // false once roundoff in the contour sum swamps g
};

// P(D(u) > T) and its u-derivative. With drift d, D(u) = d u + D0(u), so the
// driftless transform is inverted at x = T - d u:
//   int e^{-sx} P(D0(u) > x) dx = (1 - e^{-u psi0(s)}) / s,
//   d/du of that                = psi0(s) e^{-u psi0(s)} / s,
// and the drift adds d f_{D0(u)}(x) with int e^{-sx} f(x) dx = e^{-u psi0(s)}.
// Where e^{-u psi0} grows along the contour (Re psi0 < 0 for beta > 1/2 or
// strong tempering, x small against the scale of D0(u)), the fixed contour
// no longer resolves the transform; a 48-node evaluation flags those points.
CdfPoint passage_cdf_point(const SubordinatorSpec& driftless, double drift, double T, double u) {
    const double x = T - drift * u;
    if (x <= 0.0) return {1.0, 0.0, true};
    auto invert = [&](int nodes) {
        const TalbotRule rule = talbot_rule(x, nodes);
        double g = 0.0;
        double dg = 0.0;
        for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
            const std::complex<double> s = rule.nodes[k];
            const std::complex<double> psi = laplace_exponent(driftless, s);
            const std::complex<double> decay = std::exp(-u * psi);
            g += std::real(rule.weights[k] * (-complex_expm1(-u * psi)) / s);
            dg += std::real(rule.weights[k] * (psi * decay / s + drift * decay));
        }
        return std::pair{g, dg};
    };
    const auto [g, dg] = invert(32);
    const auto [g_check, dg_check] = invert(48);
    const bool valid = std::isfinite(g) && std::isfinite(dg) && std::isfinite(g_check) && g >= -1e-12 &&
                       g <= 1.0 + 1e-12 && std::abs(g - g_check) <= 1e-6 * std::abs(g_check) + 1e-8;
    return {std::clamp(g, 0.0, 1.0), std::max(dg, 0.0), valid};
}

SubordinatorSpec strip_drift(const SubordinatorSpec& spec) {
    SubordinatorSpec out = spec;
    out.drift = 0.0;
    return out;
}

double initial_horizon(const SubordinatorSpec& spec, double T) {
    if (std::holds_alternative<Stable>(spec.family) && spec.drift == 0.0) {
        return 4.0 * std::pow(T, std::get<Stable>(spec.family).beta);
    }
    return 4.0 * T / mean_rate(spec);
}

std::uint64_t gamma_first_passage_index(const Gamma& f, double drift, double T, double h, Rng& rng) {
    // Exact grid first passage of a gamma process: bracket by doubling, then
    // bisect with gamma bridges, D(m h) | D(lo h), D(hi h) being a Beta split.
    const double mean = f.c / f.b + drift;
    const double guess = std::ceil(4.0 * T / mean / h);
    std::uint64_t lo = 0;
    double g_lo = 0.0;
    std::uint64_t hi = guess < 1.0 ? 1 : (guess > 1e15 ? std::uint64_t{1} << 50 : static_cast<std::uint64_t>(guess));
    double g_hi = std::exp(log_gamma_variate(f.c * static_cast<double>(hi) * h, rng)) / f.b;
    auto exceeds = [&](std::uint64_t k, double g) { return drift * static_cast<double>(k) * h + g > T; };
    while (!exceeds(hi, g_hi)) {
        if (hi > (std::uint64_t{1} << 61)) throw ResourceError("gamma first passage: index overflow");
        lo = hi;
        g_lo = g_hi;
        g_hi += std::exp(log_gamma_variate(f.c * static_cast<double>(hi) * h, rng)) / f.b;
        hi *= 2;
    }
    while (hi - lo > 1) {
        const std::uint64_t mid = lo + (hi - lo) / 2;
        const double la = log_gamma_variate(f.c * static_cast<double>(mid - lo) * h, rng);
        const double lb = log_gamma_variate(f.c * static_cast<double>(hi - mid) * h, rng);
        const double split = 1.0 / (1.0 + std::exp(lb - la));
        const double g_mid = g_lo + (g_hi - g_lo) * split;
        if (exceeds(mid, g_mid)) {
            hi = mid;
            g_hi = g_mid;
        } else {
            lo = mid;
            g_lo = g_mid;
        }
    }
    return hi;
}

std::string cache_key(const SubordinatorSpec& spec, double T) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os << to_string(spec) << '|' << std::hexfloat << T;
    return os.str();
}

}  // namespace

void validate(const TimeChangeSpec& spec) {
    if (spec.components.empty()) throw DomainError("time change needs at least one component");
    for (const auto& c : spec.components) {
        validate(c.subordinator);
        if (!(c.weight > 0.0) || !std::isfinite(c.weight)) throw DomainError("mixture weights must be positive");
    }
}

TimeChangeSpec single(const SubordinatorSpec& spec) {
    validate(spec);
    return TimeChangeSpec{{TimeChangeComponent{spec, 1.0}}};
}

std::string to_string(const TimeChangeSpec& spec) {
    if (spec.is_single() && spec.components.front().weight == 1.0) {
        return to_string(spec.components.front().subordinator);
    }
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os << "mix:[";
    for (std::size_t j = 0; j < spec.components.size(); ++j) {
        if (j > 0) os << ';';
        os << to_string(spec.components[j].subordinator) << '*' << shortest(spec.components[j].weight);
    }
    os << ']';
    return os.str();
}

double invert_path(const MonotonePath& path, double t) {
    if (!(t >= 0.0)) throw DomainError("invert_path: t must be nonnegative");
    const auto& v = path.values();
    if (!(v.back() > t)) throw CoverageError("invert_path: path does not exceed t");
    const auto it = std::upper_bound(v.begin(), v.end(), t);
    return path.step_h() * static_cast<double>(it - v.begin());
}

TimeChangeSample sample_E_at(const TimeChangeSpec& spec, const std::vector<double>& times, double step_h,
                             Rng& rng, std::size_t max_points) {
    validate(spec);
    if (times.empty()) throw DomainError("sample_E_at: times must be nonempty");
    if (!(step_h > 0.0)) throw DomainError("sample_E_at: step_h must be positive");
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!(times[i] >= 0.0) || !std::isfinite(times[i])) throw DomainError("sample_E_at: times must be finite and >= 0");
        if (i > 0 && times[i] < times[i - 1]) throw DomainError("sample_E_at: times must be sorted");
    }
    const double t_max = times.back();

    TimeChangeSample out;
    out.times = times;
    out.e_values.assign(times.size(), 0.0);
    out.grid_h = step_h;
    for (const auto& component : spec.components) {
        const double u0 = std::max(initial_horizon(component.subordinator, std::max(t_max, step_h)), step_h);
        if (u0 / step_h + 1.0 > static_cast<double>(max_points)) {
            throw ResourceError("sample_E_at: path would exceed the grid point cap");
        }
        MonotonePath path = sample_path(component.subordinator, u0, step_h, rng);
        while (!(path.back() > t_max)) {
            const std::size_t add = path.size() - 1;
            if (path.size() + add > max_points) throw ResourceError("sample_E_at: path would exceed the grid point cap");
            path.extend(component.subordinator, add, rng);
        }
        for (std::size_t i = 0; i < times.size(); ++i) {
            if (times[i] > 0.0) out.e_values[i] += component.weight * invert_path(path, times[i]);
        }
    }
    out.sup_M = out.e_values.back();
    out.inf_N = 0.0;
    return out;
}

double sample_first_passage(const SubordinatorSpec& spec, double T, Rng& rng) {
    if (!(T > 0.0)) throw DomainError("first passage level T must be positive");
    if (const auto* f = std::get_if<Stable>(&spec.family); f != nullptr && spec.drift == 0.0) {
        // D(u) = u^{1/beta} S in law, so E(T) = T^beta S^{-beta}.
        const double s = sample_increment(spec, 1.0, rng);
        return std::pow(T, f->beta) * std::pow(s, -f->beta);
    }
    return FirstPassageTable::cached(spec, T).quantile(uniform_open(rng));
}

double sample_first_passage_index(const SubordinatorSpec& spec, double T, double step_h, Rng& rng) {
    if (!(T > 0.0)) throw DomainError("first passage level T must be positive");
    if (!(step_h > 0.0)) throw DomainError("step_h must be positive");
    if (const auto* f = std::get_if<Gamma>(&spec.family)) {
        return static_cast<double>(gamma_first_passage_index(*f, spec.drift, T, step_h, rng));
    }
    // D is strictly increasing, so D(k h) > T exactly when k h > E(T).
    return std::floor(sample_first_passage(spec, T, rng) / step_h) + 1.0;
}

double sample_E_T(const TimeChangeSpec& spec, double T, double step_h, Rng& rng) {
    if (!(T > 0.0)) throw DomainError("sample_E_T: T must be positive");
    if (!(step_h > 0.0)) throw DomainError("sample_E_T: step_h must be positive");
    double total = 0.0;
    for (const auto& component : spec.components) {
        total += component.weight * step_h * sample_first_passage_index(component.subordinator, T, step_h, rng);
    }
    return total;
}

double first_passage_cdf(const SubordinatorSpec& spec, double T, double u) {
    validate(spec);
    if (!(T > 0.0)) throw DomainError("first_passage_cdf: T must be positive");
    if (!(u > 0.0)) return 0.0;
    const CdfPoint p = passage_cdf_point(strip_drift(spec), spec.drift, T, u);
    if (p.valid) return p.g;
    return FirstPassageTable::cached(spec, T).cdf(u);
}

FirstPassageTable::FirstPassageTable(const SubordinatorSpec& spec, double T) {
    validate(spec);
    if (!(T > 0.0) || !std::isfinite(T)) throw DomainError("FirstPassageTable: T must be positive");
    const SubordinatorSpec core = strip_drift(spec);
    const double drift = spec.drift;
    u_cap_ = drift > 0.0 ? T / drift : std::numeric_limits<double>::infinity();

    constexpr double kStep = 1.0 / 64.0;  // nodes per decade of u
    const double factor = std::pow(10.0, kStep);
    constexpr double kLowG = 1e-17;
    constexpr double kHighTail = 1e-11;

    // Start near the median region and walk outward.
    double u_start = std::min(initial_horizon(core, T) / 4.0, 0.5 * u_cap_);
    if (!(u_start > 0.0) || !std::isfinite(u_start)) u_start = 1.0;

    struct Node {
        double u;
        CdfPoint p;
    };
    std::vector<Node> down;
    std::vector<Node> up;
    double u = u_start;
    for (int i = 0; i < 4000; ++i) {
        const CdfPoint p = passage_cdf_point(core, drift, T, u);
        if (!p.valid) {
            if (!down.empty()) break;
            u /= factor;
            continue;
        }
        down.push_back({u, p});
        if (p.g < kLowG) break;
        u /= factor;
    }
    u = u_start * factor;
    for (int i = 0; i < 4000; ++i) {
        if (u >= u_cap_) {
            up.push_back({u_cap_, {1.0, 0.0}});
            break;
        }
        const CdfPoint p = passage_cdf_point(core, drift, T, u);
        if (!p.valid) break;
        const double prev = up.empty() ? (down.empty() ? 0.0 : down.front().p.g) : up.back().p.g;
        if (!(p.g > prev)) break;  // roundoff floor reached near G = 1
        up.push_back({u, p});
        if (1.0 - p.g < kHighTail) break;
        u *= factor;
    }

    std::vector<Node> nodes(down.rbegin(), down.rend());
    nodes.insert(nodes.end(), up.begin(), up.end());
    // With drift, E(T) <= T/d surely; close the table there if the walk
    // stopped short of it.
    if (std::isfinite(u_cap_) && !nodes.empty() && nodes.back().u < u_cap_) nodes.push_back({u_cap_, {1.0, 0.0, true}});
    // Keep the strictly increasing, strictly positive part.
    for (const Node& n : nodes) {
        if (!(n.p.g > 0.0)) continue;
        const double lg = std::log(n.p.g);
        if (!log_g_.empty() && !(lg > log_g_.back())) continue;
        log_u_.push_back(std::log(n.u));
        log_g_.push_back(lg);
        slope_.push_back(n.u * n.p.dg_du / n.p.g);
    }
    if (log_u_.size() < 4) throw NumericError("FirstPassageTable: could not resolve the first-passage law");
}

double FirstPassageTable::hermite(std::size_t i, double x) const {
    const double x0 = log_u_[i];
    const double dx = log_u_[i + 1] - x0;
    const double t = (x - x0) / dx;
    const double t2 = t * t;
    const double t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * log_g_[i] + (t3 - 2 * t2 + t) * dx * slope_[i] +
           (-2 * t3 + 3 * t2) * log_g_[i + 1] + (t3 - t2) * dx * slope_[i + 1];
}

double FirstPassageTable::cdf(double u) const {
    if (!(u > 0.0)) return 0.0;
    if (u >= u_cap_) return 1.0;
    const double x = std::log(u);
    if (x <= log_u_.front()) return std::exp(log_g_.front() + slope_.front() * (x - log_u_.front()));
    if (x >= log_u_.back()) return std::exp(log_g_.back());
    const std::size_t i = static_cast<std::size_t>(std::upper_bound(log_u_.begin(), log_u_.end(), x) - log_u_.begin()) - 1;
    return std::min(1.0, std::exp(hermite(i, x)));
}

double FirstPassageTable::quantile(double p) const {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("FirstPassageTable::quantile: p must lie in (0,1)");
    const double y = std::log(p);
    if (y <= log_g_.front()) {
        const double m = slope_.front() > 0.0 ? slope_.front() : 1.0;
        return std::exp(log_u_.front() + (y - log_g_.front()) / m);
    }
    if (y >= log_g_.back()) return std::exp(log_u_.back());
    const std::size_t i = static_cast<std::size_t>(std::upper_bound(log_g_.begin(), log_g_.end(), y) - log_g_.begin()) - 1;
    // Safeguarded Newton on the Hermite piece, bracketed by its endpoints.
    double a = log_u_[i];
    double b = log_u_[i + 1];
    const double dx = b - a;
    double x = a + (y - log_g_[i]) / (log_g_[i + 1] - log_g_[i]) * dx;
    for (int iter = 0; iter < 50; ++iter) {
        const double f = hermite(i, x) - y;
        if (std::abs(f) <= 1e-14 * std::max(1.0, std::abs(y))) break;
        if (f > 0.0) b = x; else a = x;
        const double t = (x - log_u_[i]) / dx;
        const double deriv = ((6 * t * t - 6 * t) * log_g_[i] + (3 * t * t - 4 * t + 1) * dx * slope_[i] +
                              (-6 * t * t + 6 * t) * log_g_[i + 1] + (3 * t * t - 2 * t) * dx * slope_[i + 1]) / dx;
        double next = deriv > 0.0 ? x - f / deriv : 0.5 * (a + b);
        if (!(next > a && next < b)) next = 0.5 * (a + b);
        if (std::abs(next - x) <= 1e-15 * dx) {
            x = next;
            break;
        }
        x = next;
    }
    return std::min(std::exp(x), u_cap_);
}

const FirstPassageTable& FirstPassageTable::cached(const SubordinatorSpec& spec, double T) {
    static std::shared_mutex mutex;
    static std::map<std::string, std::unique_ptr<FirstPassageTable>> cache;
    const std::string key = cache_key(spec, T);
    {
        std::shared_lock lock(mutex);
        const auto it = cache.find(key);
        if (it != cache.end()) return *it->second;
    }
    auto table = std::make_unique<FirstPassageTable>(spec, T);
    std::unique_lock lock(mutex);
    auto [it, inserted] = cache.try_emplace(key, std::move(table));
    return *it->second;
}

}  // namespace smallball
