#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "smallball/errors.hpp"
#include "smallball/outer.hpp"
#include "stats.hpp"

using namespace smallball;

TEST_CASE("outer validation and strings") {
    CHECK_THROWS_AS(validate(OuterSpec{FractionalBM{1.0}}), DomainError);
    CHECK_THROWS_AS(validate(OuterSpec{FractionalBM{0.0}}), DomainError);
    CHECK_THROWS_AS(validate(OuterSpec{SymmetricStable{2.5, 1.0}}), DomainError);
    CHECK_THROWS_AS(validate(OuterSpec{SymmetricStable{1.5, 0.0}}), DomainError);
    CHECK_THROWS_AS(validate(OuterSpec{IteratedFBM{{}}}), DomainError);
    CHECK(to_string(OuterSpec{BrownianMotion{}}) == "bm");
    CHECK(to_string(OuterSpec{FractionalBM{0.75}}) == "fbm:H=0.75");
    CHECK(to_string(OuterSpec{IteratedFBM{{0.5, 0.5}}}) == "iterfbm:H=0.5,0.5");
    CHECK(to_string(OuterSpec{SymmetricStable{1.5, 1.0}}) == "stable:alpha=1.5,kappa=1");
    CHECK(to_string(OuterSpec{IteratedStable{1.5, 1.0}}) == "iterstable:a1=1.5,a2=1");
}

TEST_CASE("self-similarity indices and small-deviation orders") {
    CHECK(self_similarity_index(BrownianMotion{}) == 0.5);
    CHECK(self_similarity_index(FractionalBM{0.3}) == 0.3);
    CHECK(self_similarity_index(IteratedFBM{{0.5, 0.8}}) == doctest::Approx(0.4));
    CHECK(self_similarity_index(SymmetricStable{1.25, 2.0}) == doctest::Approx(0.8));
    CHECK(self_similarity_index(IteratedStable{2.0, 0.5}) == doctest::Approx(1.0));
    CHECK(small_deviation_order(BrownianMotion{}) == 2.0);
    CHECK(small_deviation_order(FractionalBM{0.75}) == doctest::Approx(4.0 / 3.0));
    CHECK(small_deviation_order(SymmetricStable{1.5, 1.0}) == 1.5);
    CHECK(small_deviation_order(IteratedFBM{{0.5, 0.5}}) == doctest::Approx(4.0 / 3.0));
    // iterated stable: alpha1 alpha2 / (1 + alpha2)
    CHECK(small_deviation_order(IteratedStable{1.5, 1.0}) == doctest::Approx(0.75));
}

TEST_CASE("iterated fBm constants") {
    const double c = std::numbers::pi * std::numbers::pi / 8.0;
    const IteratedConstants k = iterated_fbm_constants({0.5, 0.5}, {c, c});
    CHECK(std::abs(k.tau_n - 4.0 / 3.0) < 1e-12);
    CHECK(std::abs(k.c_n - 3.0 * std::numbers::pi * std::numbers::pi / 8.0) < 1e-12);
    const IteratedConstants one = iterated_fbm_constants({0.7}, {1.3});
    CHECK(one.tau_n == doctest::Approx(1.0 / 0.7));
    CHECK(one.c_n == 1.3);
    CHECK_THROWS_AS(iterated_fbm_constants({0.5}, {1.0, 2.0}), DomainError);
}

TEST_CASE("fBm covariance") {
    CHECK(fbm_covariance(0.5, 0.3, 0.7) == doctest::Approx(0.3));
    CHECK(fbm_covariance(0.75, 1.0, 1.0) == doctest::Approx(1.0));
    CHECK(fbm_covariance(0.3, 0.2, 0.9) == doctest::Approx(fbm_covariance(0.3, 0.9, 0.2)));
}

TEST_CASE("sampled fBm covariances, two-sided independence") {
    Rng rng(81);
    const std::vector<double> times{-0.6, 0.3, 1.0};
    const double H = 0.7;
    const std::size_t n = 40000;
    std::vector<double> xm(n), x1(n), x2(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto x = sample_at_times(FractionalBM{H}, times, rng);
        xm[i] = x[0];
        x1[i] = x[1];
        x2[i] = x[2];
    }
    auto cov = [&](const std::vector<double>& a, const std::vector<double>& b) {
        std::vector<double> prod(n);
        for (std::size_t i = 0; i < n; ++i) prod[i] = a[i] * b[i];
        return std::pair{stats::mean(prod), std::sqrt(stats::variance(prod) / n)};
    };
    const auto [c12, se12] = cov(x1, x2);
    CHECK(std::abs(c12 - fbm_covariance(H, 0.3, 1.0)) < 4.0 * se12);
    const auto [c22, se22] = cov(x2, x2);
    CHECK(std::abs(c22 - 1.0) < 4.0 * se22);
    const auto [cm1, sem1] = cov(xm, x1);
    CHECK(std::abs(cm1) < 4.0 * sem1);
    const auto [cmm, semm] = cov(xm, xm);
    CHECK(std::abs(cmm - std::pow(0.6, 2 * H)) < 4.0 * semm);
}

TEST_CASE("uniform fBm paths have the fBm marginal variances") {
    Rng rng(82);
    const double H = 0.3;
    const std::size_t n = 257;
    const double dt = 1.0 / 256.0;
    std::vector<double> at_quarter, at_end, incr;
    for (int r = 0; r < 20000; ++r) {
        const auto x = sample_uniform_path(FractionalBM{H}, n, dt, rng);
        REQUIRE(x.size() == n);
        CHECK(x[0] == 0.0);
        at_quarter.push_back(x[64] * x[64]);
        at_end.push_back(x[256] * x[256]);
        incr.push_back((x[256] - x[255]) * (x[256] - x[255]));
    }
    auto check_mean = [](const std::vector<double>& v, double expected) {
        CHECK(std::abs(stats::mean(v) - expected) < 4.0 * std::sqrt(stats::variance(v) / v.size()));
    };
    check_mean(at_quarter, std::pow(0.25, 2 * H));
    check_mean(at_end, 1.0);
    check_mean(incr, std::pow(dt, 2 * H));
}

TEST_CASE("symmetric stable variates") {
    Rng rng(83);
    // alpha = 1 is standard Cauchy
    std::vector<double> cauchy(20000);
    for (double& x : cauchy) x = symmetric_stable_variate(1.0, rng);
    CHECK(stats::ks_one_sample(cauchy, [](double x) { return 0.5 + std::atan(x) / std::numbers::pi; }).p_value > 1e-3);
    // alpha = 2 is N(0, 2)
    std::vector<double> normal(20000);
    for (double& x : normal) x = symmetric_stable_variate(2.0, rng);
    CHECK(stats::ks_one_sample(normal, [](double x) { return 0.5 * std::erfc(-x / 2.0); }).p_value > 1e-3);
    // characteristic function E cos(uX) = exp(-|u|^alpha)
    for (double alpha : {0.5, 1.3, 1.8}) {
        for (double u : {0.3, 1.0, 2.0}) {
            std::vector<double> c(40000);
            for (double& v : c) v = std::cos(u * symmetric_stable_variate(alpha, rng));
            INFO("alpha=" << alpha << " u=" << u);
            CHECK(std::abs(stats::mean(c) - std::exp(-std::pow(u, alpha))) < 4.0 * std::sqrt(stats::variance(c) / c.size()));
        }
    }
}

TEST_CASE("stable process scale parameter") {
    Rng rng(84);
    const double alpha = 1.5;
    const double kappa = 2.0;
    const double t = 0.7;
    std::vector<double> c(40000);
    for (double& v : c) v = std::cos(sample_at_times(SymmetricStable{alpha, kappa}, {t}, rng)[0]);
    CHECK(std::abs(stats::mean(c) - std::exp(-t * std::pow(kappa, alpha))) <
          4.0 * std::sqrt(stats::variance(c) / c.size()));
}

TEST_CASE("iterated processes compose in the stated order") {
    // X = W2(W1(t)): Var X(t) = E|W1(t)|^{2 H2} = t^{2 H1 H2} E|Z|^{2 H2}.
    Rng rng(85);
    const double H1 = 0.5;
    const double H2 = 0.8;
    const double t = 0.6;
    std::vector<double> sq(40000);
    for (double& v : sq) {
        const double x = sample_at_times(IteratedFBM{{H1, H2}}, {t}, rng)[0];
        v = x * x;
    }
    // E|Z|^{p} = 2^{p/2} Gamma((p+1)/2) / sqrt(pi)
    const double p = 2 * H2;
    const double moment = std::pow(2.0, p / 2) * std::tgamma((p + 1) / 2) / std::sqrt(std::numbers::pi);
    CHECK(std::abs(stats::mean(sq) - std::pow(t, 2 * H1 * H2) * moment) < 4.0 * std::sqrt(stats::variance(sq) / sq.size()));
}

TEST_CASE("sample_at_times contract") {
    Rng rng(86);
    const auto x = sample_at_times(FractionalBM{0.6}, {-1.0, 0.0, 0.0, 0.5}, rng);
    CHECK(x.size() == 4);
    CHECK(x[1] == 0.0);
    CHECK(x[2] == 0.0);
    CHECK_THROWS_AS(sample_at_times(BrownianMotion{}, {0.5, 0.1}, rng), DomainError);
    std::vector<double> many(kDenseCovarianceCap + 1);
    for (std::size_t i = 0; i < many.size(); ++i) many[i] = 1e-3 * static_cast<double>(i + 1);
    CHECK_THROWS_AS(sample_at_times(FractionalBM{0.6}, many, rng), ResourceError);
    CHECK_NOTHROW(sample_at_times(BrownianMotion{}, many, rng));
}
