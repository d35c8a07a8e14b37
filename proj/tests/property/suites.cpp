#include "suites.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "smallball/outer.hpp"
#include "smallball/smallball.hpp"
#include "smallball/specfun.hpp"
#include "smallball/subordinator.hpp"
#include "smallball/time_change.hpp"
#include "stats.hpp"

namespace suites {

namespace {

using namespace smallball;

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

SubordinatorSpec random_subordinator(Rng& rng) {
    const double drift = prop::uniform(rng, 0.0, 1.0) < 1.0 / 3.0 ? prop::uniform(rng, 0.0, 1.0) : 0.0;
    switch (rng() % 3) {
        case 0: return make_stable(prop::uniform(rng, 0.1, 0.9), drift);
        case 1: return make_tempered(prop::uniform(rng, 0.1, 0.9), prop::log_uniform(rng, 0.1, 10.0), drift);
        default: return make_gamma(prop::log_uniform(rng, 0.2, 5.0), prop::log_uniform(rng, 0.2, 5.0), drift);
    }
}

TimeChangeSpec random_time_change(Rng& rng, std::size_t max_components) {
    TimeChangeSpec tc;
    const std::size_t m = 1 + rng() % max_components;
    for (std::size_t j = 0; j < m; ++j) {
        tc.components.push_back({random_subordinator(rng), m == 1 ? 1.0 : prop::log_uniform(rng, 0.5, 2.0)});
    }
    return tc;
}

template <class T>
bool nondecreasing(const std::vector<T>& v) {
    return std::is_sorted(v.begin(), v.end());
}

}  // namespace

prop::Report incomplete_gamma_recurrence() {
    // Gamma(1 - beta, x) = x^{-beta} e^{-x} - beta Gamma(-beta, x)
    return prop::check("incomplete-gamma recurrence", kCases, 101, [](Rng& rng) -> std::optional<std::string> {
        const double beta = prop::uniform(rng, 0.02, 0.98);
        const double x = prop::uniform(rng, 0.0, 1.0) < 0.5 ? prop::log_uniform(rng, 1e-3, 50.0)
                                                            : prop::uniform(rng, 0.0, 50.0);
        const double lhs = upper_incomplete_gamma(1.0 - beta, x);
        const double power = std::exp(-beta * std::log(x) - x);
        const double lower = upper_incomplete_gamma(-beta, x);
        const double rhs = power - beta * lower;
        const double scale = std::max({std::abs(lhs), power, std::abs(beta * lower)});
        if (std::abs(lhs - rhs) <= 1e-12 * scale) return std::nullopt;
        return "beta=" + fmt(beta) + " x=" + fmt(x) + " lhs=" + fmt(lhs) + " rhs=" + fmt(rhs);
    });
}

prop::Report chung_monotone_in_range() {
    return prop::check("chung_series monotone and in [0,1]", kCases, 102, [](Rng& rng) -> std::optional<std::string> {
        double e1;
        double e2;
        if (rng() % 2 == 0) {
            // straddle the switch between the two series at eps = 1
            e1 = prop::uniform(rng, 0.5, 1.0);
            e2 = prop::uniform(rng, 1.0, 2.0);
        } else {
            e1 = prop::log_uniform(rng, 0.03, 20.0);
            e2 = e1 * prop::log_uniform(rng, 1.0 + 1e-9, 3.0);
        }
        const double s1 = chung_series(e1).value;
        const double s2 = chung_series(e2).value;
        if (!(s1 >= 0.0 && s1 <= 1.0 && s2 >= 0.0 && s2 <= 1.0)) {
            return "out of range at eps=" + fmt(e1) + "," + fmt(e2);
        }
        if (s1 > s2) return "S(" + fmt(e1) + ")=" + fmt(s1) + " > S(" + fmt(e2) + ")=" + fmt(s2);
        const double below = chung_series(std::nextafter(1.0, 0.0)).value;
        const double above = chung_series(std::nextafter(1.0, 2.0)).value;
        if (std::abs(above - below) > 1e-14) return "jump at eps=1: " + fmt(below) + " vs " + fmt(above);
        return std::nullopt;
    });
}

prop::Report subordinator_path_strictly_increasing() {
    return prop::check("subordinator paths strictly increasing", kCases, 103, [](Rng& rng) -> std::optional<std::string> {
        const SubordinatorSpec spec = random_subordinator(rng);
        const double u_max = prop::log_uniform(rng, 0.01, 10.0);
        const auto n = static_cast<double>(10 + rng() % 50000);
        const double h = u_max / n;
        const MonotonePath path = sample_path(spec, u_max, h, rng);
        const auto& v = path.values();
        const auto expected = static_cast<std::size_t>(std::ceil(u_max / h * (1.0 - 1e-12))) + 1;
        if (v.size() != expected) return to_string(spec) + ": " + std::to_string(v.size()) + " points";
        if (v.front() != 0.0) return to_string(spec) + ": D(0) != 0";
        for (std::size_t i = 1; i < v.size(); ++i) {
            if (!(v[i] > v[i - 1]) || !std::isfinite(v[i])) {
                return to_string(spec) + ": not increasing at index " + std::to_string(i);
            }
        }
        return std::nullopt;
    });
}

prop::Report e_path_nondecreasing_from_zero() {
    return prop::check("E paths nondecreasing with E(0)=0", kCases, 104, [](Rng& rng) -> std::optional<std::string> {
        const TimeChangeSpec tc = random_time_change(rng, 3);
        const double T = prop::uniform(rng, 0.1, 3.0);
        const double h = prop::log_uniform(rng, 1e-4, 1e-2);
        std::vector<double> times{0.0};
        const std::size_t n = 2 + rng() % 40;
        for (std::size_t i = 0; i < n; ++i) times.push_back(prop::uniform(rng, 0.0, T));
        std::sort(times.begin(), times.end());
        const TimeChangeSample s = sample_E_at(tc, times, h, rng);
        if (s.e_values.size() != times.size()) return to_string(tc) + ": wrong sample size";
        if (s.e_values.front() != 0.0) return to_string(tc) + ": E(0)=" + fmt(s.e_values.front());
        if (!nondecreasing(s.e_values)) return to_string(tc) + ": E decreases";
        return std::nullopt;
    });
}

std::vector<prop::Report> self_similarity_ks() {
    struct Family {
        std::string name;
        std::function<OuterSpec(Rng&)> make;
    };
    const std::vector<Family> families{
        {"bm", [](Rng&) -> OuterSpec { return BrownianMotion{}; }},
        {"fbm", [](Rng& r) -> OuterSpec { return FractionalBM{prop::uniform(r, 0.1, 0.9)}; }},
        {"iterfbm",
         [](Rng& r) -> OuterSpec {
             std::vector<double> H(2 + r() % 2);
             for (double& x : H) x = prop::uniform(r, 0.3, 0.9);
             return IteratedFBM{H};
         }},
        {"stable",
         [](Rng& r) -> OuterSpec { return SymmetricStable{prop::uniform(r, 0.6, 2.0), prop::log_uniform(r, 0.5, 2.0)}; }},
        {"iterstable",
         [](Rng& r) -> OuterSpec { return IteratedStable{prop::uniform(r, 0.8, 2.0), prop::uniform(r, 0.8, 2.0)}; }},
    };
    constexpr double a = 4.0;
    constexpr std::size_t draws = 300;
    std::vector<prop::Report> reports;
    std::uint64_t seed = 200;
    for (const auto& family : families) {
        reports.push_back(prop::check(
            "self-similarity KS (" + family.name + ", a=4)", kCases, seed++,
            [&](Rng& rng) -> std::optional<std::string> {
                const OuterSpec spec = family.make(rng);
                const double H = self_similarity_index(spec);
                std::vector<double> times(6);
                for (double& t : times) t = prop::uniform(rng, -1.0, 1.0);
                std::sort(times.begin(), times.end());
                std::vector<double> scaled_times(times);
                for (double& t : scaled_times) t *= a;
                // sup over the time set is a path functional, so it probes
                // the joint law and not only the marginals.
                auto sup_abs = [](const std::vector<double>& x) {
                    double m = 0.0;
                    for (double v : x) m = std::max(m, std::abs(v));
                    return m;
                };
                std::vector<double> lhs(draws);
                std::vector<double> rhs(draws);
                for (std::size_t i = 0; i < draws; ++i) {
                    lhs[i] = sup_abs(sample_at_times(spec, scaled_times, rng));
                    rhs[i] = std::pow(a, H) * sup_abs(sample_at_times(spec, times, rng));
                }
                const stats::KsResult ks = stats::ks_two_sample(lhs, rhs);
                if (ks.p_value >= 0.01) return std::nullopt;
                return to_string(spec) + " p=" + fmt(ks.p_value);
            },
            8));
    }
    return reports;
}

prop::Report p_hat_monotone_under_crn() {
    return prop::check("p_hat monotone in eps under common random numbers", kCases, 105,
                       [](Rng& rng) -> std::optional<std::string> {
        const TimeChangeSpec tc = random_time_change(rng, 2);
        const double T = prop::uniform(rng, 0.2, 2.0);
        std::vector<double> eps(5);
        for (double& e : eps) e = prop::log_uniform(rng, 0.01, 2.0);
        std::sort(eps.begin(), eps.end());
        const MonteCarlo mc{rng(), 1};
        const double h = 1e-3;
        try {
        auto p_hats = [](const std::vector<MCEstimate>& est) {
            std::vector<double> p;
            for (const auto& e : est) p.push_back(e.p_hat);
            return p;
        };
        if (!nondecreasing(p_hats(estimate_conditional_bm(tc, T, eps, 200, h, mc)))) {
            return "conditional estimator, " + to_string(tc);
        }
        if (!nondecreasing(p_hats(estimate_time_change_cdf(tc, T, eps, 200, h, mc)))) {
            return "cdf estimator, " + to_string(tc);
        }
        const OuterSpec outer = rng() % 2 == 0 ? OuterSpec{FractionalBM{prop::uniform(rng, 0.2, 0.9)}}
                                               : OuterSpec{SymmetricStable{prop::uniform(rng, 0.8, 2.0), 1.0}};
        if (!nondecreasing(p_hats(estimate_direct(outer, tc, T, eps, 100, 64, h, mc)))) {
            return "direct estimator, " + to_string(outer) + " under " + to_string(tc);
        }
        } catch (const Error& e) {
            return std::string(e.what()) + " for " + to_string(tc) + " at T=" + fmt(T);
        }
        return std::nullopt;
    });
}

}  // namespace suites
