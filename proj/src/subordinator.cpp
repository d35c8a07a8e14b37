#include "smallball/subordinator.hpp"

#include <cmath>
#include <limits>
#include <new>
#include <numbers>
#include <sstream>

#include "smallball/errors.hpp"
#include "smallball/format.hpp"
#include "smallball/specfun.hpp"

namespace smallball {

namespace {

constexpr double kPi = std::numbers::pi;

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_open_unit(double beta) {
    if (!(beta > 0.0 && beta < 1.0)) throw DomainError("beta must lie in (0,1)");
}

// log of a positive stable variate with E exp(-s S) = exp(-s^beta), via
// Kanter's representation S = (A(U)/W)^{(1-beta)/beta} with Zolotarev's
//   A(u) = [sin(beta pi u)^beta sin((1-beta) pi u)^{1-beta} / sin(pi u)]^{1/(1-beta)}.
double log_positive_stable(double beta, Rng& rng) {
    const double u = uniform_open(rng);
    const double w = std_exponential(rng);
    const double numer = beta * std::log(std::sin(beta * kPi * u)) +
                         (1.0 - beta) * std::log(std::sin((1.0 - beta) * kPi * u)) -
                         std::log(std::sin(kPi * u));
    return numer / beta - (1.0 - beta) / beta * std::log(w);
}

double positive_or_min(double x) {
    return x > std::numeric_limits<double>::min() ? x : std::numeric_limits<double>::min();
}

double sample_stable(double beta, double dt, Rng& rng) {
    return positive_or_min(std::exp(log_positive_stable(beta, rng) + std::log(dt) / beta));
}

double sample_tempered(double beta, double lambda, double dt, Rng& rng) {
    // Proposal from the untilted law, accepted with probability exp(-lambda X).
    // Expected proposals per draw are exp(dt lambda^beta); long intervals are
    // split so each piece needs at most e of them.
    const double load = dt * std::pow(lambda, beta);
    const std::size_t pieces = load > 1.0 ? static_cast<std::size_t>(std::ceil(load)) : 1;
    const double piece_dt = dt / static_cast<double>(pieces);
    constexpr std::size_t kMaxProposals = 1000000;
    double total = 0.0;
    for (std::size_t p = 0; p < pieces; ++p) {
        std::size_t tries = 0;
        for (;;) {
            const double x = sample_stable(beta, piece_dt, rng);
            if (std_exponential(rng) >= lambda * x) {
                total += x;
                break;
            }
            if (++tries >= kMaxProposals) {
                throw NumericError("tempered-stable rejection sampler exceeded 1e6 proposals");
            }
        }
    }
    return positive_or_min(total);
}

double sample_gamma(double c, double b, double dt, Rng& rng) {
    return positive_or_min(std::exp(log_gamma_variate(c * dt, rng)) / b);
}

}  // namespace

void validate(const SubordinatorSpec& spec) {
    if (!(spec.drift >= 0.0) || !std::isfinite(spec.drift)) {
        throw DomainError("drift must be finite and nonnegative");
    }
    std::visit(Overloaded{
                   [](const Stable& f) { require_open_unit(f.beta); },
                   [](const TemperedStable& f) {
                       require_open_unit(f.beta);
                       if (!(f.lambda > 0.0) || !std::isfinite(f.lambda)) {
                           throw DomainError("lambda must be positive");
                       }
                   },
                   [](const Gamma& f) {
                       if (!(f.c > 0.0) || !std::isfinite(f.c)) throw DomainError("c must be positive");
                       if (!(f.b > 0.0) || !std::isfinite(f.b)) throw DomainError("b must be positive");
                   },
               },
               spec.family);
}

SubordinatorSpec make_stable(double beta, double drift) {
    SubordinatorSpec spec{Stable{beta}, drift};
    validate(spec);
    return spec;
}

SubordinatorSpec make_tempered(double beta, double lambda, double drift) {
    SubordinatorSpec spec{TemperedStable{beta, lambda}, drift};
    validate(spec);
    return spec;
}

SubordinatorSpec make_gamma(double c, double b, double drift) {
    SubordinatorSpec spec{Gamma{c, b}, drift};
    validate(spec);
    return spec;
}

std::string to_string(const SubordinatorSpec& spec) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    std::visit(Overloaded{
                   [&](const Stable& f) { os << "stable:beta=" << shortest(f.beta); },
                   [&](const TemperedStable& f) {
                       os << "tempered:beta=" << shortest(f.beta) << ",lambda=" << shortest(f.lambda);
                   },
                   [&](const Gamma& f) { os << "gamma:c=" << shortest(f.c) << ",b=" << shortest(f.b); },
               },
               spec.family);
    if (spec.drift != 0.0) os << ",drift=" << shortest(spec.drift);
    return os.str();
}

bool operator==(const SubordinatorSpec& a, const SubordinatorSpec& b) {
    if (a.drift != b.drift || a.family.index() != b.family.index()) return false;
    return std::visit(Overloaded{
                          [&](const Stable& f) { return f.beta == std::get<Stable>(b.family).beta; },
                          [&](const TemperedStable& f) {
                              const auto& g = std::get<TemperedStable>(b.family);
                              return f.beta == g.beta && f.lambda == g.lambda;
                          },
                          [&](const Gamma& f) {
                              const auto& g = std::get<Gamma>(b.family);
                              return f.c == g.c && f.b == g.b;
                          },
                      },
                      a.family);
}

double laplace_exponent(const SubordinatorSpec& spec, double s) {
    if (!(s > 0.0)) throw DomainError("laplace_exponent: s must be positive");
    const double core = std::visit(
        Overloaded{
            [&](const Stable& f) { return std::pow(s, f.beta); },
            [&](const TemperedStable& f) {
                // lambda^beta ((1 + s/lambda)^beta - 1) avoids cancellation as s -> 0.
                return std::pow(f.lambda, f.beta) * std::expm1(f.beta * std::log1p(s / f.lambda));
            },
            [&](const Gamma& f) { return f.c * std::log1p(s / f.b); },
        },
        spec.family);
    return core + spec.drift * s;
}

std::complex<double> laplace_exponent(const SubordinatorSpec& spec, std::complex<double> s) {
    const std::complex<double> core = std::visit(
        Overloaded{
            [&](const Stable& f) { return std::pow(s, f.beta); },
            [&](const TemperedStable& f) {
                return std::pow(s + f.lambda, f.beta) - std::pow(f.lambda, f.beta);
            },
            [&](const Gamma& f) { return f.c * std::log(1.0 + s / f.b); },
        },
        spec.family);
    return core + spec.drift * s;
}

double levy_tail(const SubordinatorSpec& spec, double T) {
    if (!(T > 0.0)) throw DomainError("levy_tail: T must be positive");
    return std::visit(
        Overloaded{
            [&](const Stable& f) { return std::pow(T, -f.beta) / std::tgamma(1.0 - f.beta); },
            [&](const TemperedStable& f) {
                const double lt = f.lambda * T;
                return (std::exp(-lt) * std::pow(T, -f.beta) -
                        std::pow(f.lambda, f.beta) * upper_incomplete_gamma(1.0 - f.beta, lt)) /
                       std::tgamma(1.0 - f.beta);
            },
            [&](const Gamma& f) { return f.c * upper_incomplete_gamma(0.0, f.b * T); },
        },
        spec.family);
}

double mean_rate(const SubordinatorSpec& spec) {
    const double core = std::visit(
        Overloaded{
            [](const Stable&) { return std::numeric_limits<double>::infinity(); },
            [](const TemperedStable& f) { return f.beta * std::pow(f.lambda, f.beta - 1.0); },
            [](const Gamma& f) { return f.c / f.b; },
        },
        spec.family);
    return core + spec.drift;
}

double sample_increment(const SubordinatorSpec& spec, double dt, Rng& rng) {
    if (!(dt > 0.0)) throw DomainError("sample_increment: dt must be positive");
    const double jump = std::visit(
        Overloaded{
            [&](const Stable& f) { return sample_stable(f.beta, dt, rng); },
            [&](const TemperedStable& f) { return sample_tempered(f.beta, f.lambda, dt, rng); },
            [&](const Gamma& f) { return sample_gamma(f.c, f.b, dt, rng); },
        },
        spec.family);
    return jump + spec.drift * dt;
}

MonotonePath::MonotonePath(double step_h, std::vector<double> values)
    : step_h_(step_h), values_(std::move(values)) {
    if (!(step_h_ > 0.0) || !std::isfinite(step_h_)) throw DomainError("MonotonePath: step_h must be positive");
    if (values_.empty() || values_.front() != 0.0) throw DomainError("MonotonePath: values[0] must be 0");
    for (std::size_t k = 1; k < values_.size(); ++k) {
        if (!std::isfinite(values_[k]) || !(values_[k] > values_[k - 1])) {
            throw DomainError("MonotonePath: values must be strictly increasing");
        }
    }
}

void MonotonePath::extend(const SubordinatorSpec& spec, std::size_t n, Rng& rng) {
    try {
        values_.reserve(values_.size() + n);
    } catch (const std::bad_alloc&) {
        throw ResourceError("MonotonePath: allocation failed");
    } catch (const std::length_error&) {
        throw ResourceError("MonotonePath: allocation failed");
    }
    double current = values_.back();
    for (std::size_t k = 0; k < n; ++k) {
        double next = current + sample_increment(spec, step_h_, rng);
        if (!(next > current)) next = std::nextafter(current, std::numeric_limits<double>::infinity());
        values_.push_back(next);
        current = next;
    }
}

MonotonePath sample_path(const SubordinatorSpec& spec, double u_max, double step_h, Rng& rng) {
    validate(spec);
    if (!(step_h > 0.0) || !(step_h <= u_max) || !std::isfinite(u_max)) {
        throw DomainError("sample_path: need 0 < step_h <= u_max");
    }
    const double steps = std::ceil(u_max / step_h * (1.0 - 1e-12));
    if (steps > 1e9) throw ResourceError("sample_path: more than 1e9 grid points requested");
    MonotonePath path;
    path.step_h_ = step_h;
    path.values_.push_back(0.0);
    path.extend(spec, static_cast<std::size_t>(steps), rng);
    return path;
}

}  // namespace smallball
