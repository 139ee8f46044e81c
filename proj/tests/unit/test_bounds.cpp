#include <random>

#include "doctest.h"
#include "mlab/bounds.hpp"
#include "mlab/risk.hpp"

using namespace mlab;
using namespace mlab::bounds;

namespace {

// four terms written out independently
double rhs_by_hand(double n, double W, double M, double G, double th, double gam, double J, double eps, double approx) {
    const double lw = std::log(W);
    const double cover = std::abs(2 + eps) * J * gam;
    const double bias = 8 * M * (1 + eps) * lw / n;
    const double var = 8 * std::pow(G * (1 + eps) * (1 + eps) * lw / (n * std::pow(eps, th)), 1.0 / (2 - th));
    return cover + bias + var + (1 + eps) * approx;
}

}  // namespace

TEST_CASE("oracle rhs example and terms") {
    OracleParams p;
    p.n = 1000;
    p.W = 3;
    p.M = 2;
    p.Gamma = 6;
    p.theta = 1;
    p.gamma = 0.01;
    p.J = 1;
    p.eps = 1;
    p.approx_term = 0.05;
    CHECK(oracle_rhs(p) == doctest::Approx(0.37609).epsilon(1e-4));
    CHECK(oracle_rhs(p) == doctest::Approx(rhs_by_hand(1000, 3, 2, 6, 1, 0.01, 1, 1, 0.05)));
    const auto t = oracle_terms(p);
    CHECK(t.cover == doctest::Approx(0.03));
    CHECK(t.approx == doctest::Approx(0.1));
    CHECK(t.total == doctest::Approx(t.cover + t.bias + t.variance + t.approx));

    // vanishes monotonically in n when nothing else contributes
    p.gamma = 0;
    p.approx_term = 0;
    double prev = kInf;
    for (double n = 10; n <= 1e9; n *= 10) {
        p.n = n;
        const double v = oracle_rhs(p);
        CHECK(v < prev);
        prev = v;
    }
    CHECK(prev < 1e-5);

    // θ = s/(s+1), ε = 1 gives the hinge-rate shape 8(Γ·4·logW/n)^{(s+1)/(s+2)}
    for (double s : {0.0, 1.0, 3.0}) {
        OracleParams c;
        c.n = 500;
        c.W = 10;
        c.Gamma = 6 * 2.0;
        c.theta = s / (s + 1);
        c.eps = 1;
        const double shape = 8 * std::pow(c.Gamma * 4 * std::log(10.0) / 500, (s + 1) / (s + 2));
        CHECK(oracle_terms(c).variance == doctest::Approx(shape));
    }
    // ε = 0 with θ > 0 divides by zero
    OracleParams z;
    z.n = 100;
    z.theta = 0.5;
    CHECK(std::isinf(oracle_rhs(z)));
    z.theta = 0;
    CHECK(std::isfinite(oracle_rhs(z)));
}

TEST_CASE("oracle verification on small classes") {
    const auto P = dist::make_distribution(ScalarFn::coordinate(1, 0), dist::lebesgue(1), dist::NoiseProfile{1.0, 1.0, 1.0});
    const ScalarFn bayes{1, {0}, [](const double* x) { return sgn(2 * x[0] - 1); }};
    const auto r = oracle_verify({bayes}, P, 100, 50, 1);
    CHECK(r.lhs_mean == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(r.passed);

    std::vector<ScalarFn> cls{ScalarFn::constant(1, 1.0), ScalarFn::constant(1, -1.0), bayes};
    for (int k = 1; k <= 5; ++k) {
        const double th = k / 6.0;
        cls.push_back(ScalarFn{1, {0}, [th](const double* x) { return sgn(x[0] - th); }});
    }
    const auto r8 = oracle_verify(cls, P, 200, 100, 2);
    CHECK(r8.class_size == 8);
    CHECK(r8.passed);
    CHECK(r8.lhs_mean <= r8.rhs);
    CHECK(r8.eps_grid.size() == 3);
}

TEST_CASE("tail integral") {
    const auto t1 = tail_integral_bound(3, 1, 1);
    CHECK(t1.numeric == doctest::Approx(std::log(3.0) + 1).epsilon(1e-8));
    CHECK(t1.bound == doctest::Approx(2 * std::log(3.0)));
    const auto t2 = tail_integral_bound(3, 1, 2);
    const double ts = std::sqrt(std::log(3.0));
    CHECK(t2.numeric == doctest::Approx(ts + 3 * std::sqrt(M_PI) / 2 * std::erfc(ts)).epsilon(1e-8));
    CHECK(t2.numeric == doctest::Approx(1.415).epsilon(1e-3));
    CHECK(t2.bound == doctest::Approx(2.097).epsilon(1e-3));
    const auto t3 = tail_integral_bound(3, 4, 2);
    CHECK(t3.numeric == doctest::Approx(t2.numeric / 2).epsilon(1e-8));
    CHECK(t3.bound == doctest::Approx(t2.bound / 2));
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> U(0, 1);
    for (int i = 0; i < 50; ++i) {
        const auto t = tail_integral_bound(3 + 100 * U(rng), 0.1 + 5 * U(rng), 1 + U(rng));
        CHECK(t.numeric <= t.bound);
    }
}

TEST_CASE("J function and separation") {
    CHECK(j_function(0.4, 0.6) == doctest::Approx(0.2));
    CHECK(j_function(0, 0) == 0.0);
    CHECK(j_function(1, 0) == 1.0);
    for (int i = 0; i < 200; ++i)
        for (int k = 0; k < 200; ++k) {
            const double x = i / 199.0, y = k / 199.0;
            CHECK(j_function(x, y) == j_function(y, x));
            CHECK(j_function(x, y) >= -1e-15);
        }
    const auto L = dist::lebesgue(1);
    const auto a = ScalarFn::constant(1, 0.4), b = ScalarFn::constant(1, 0.6);
    CHECK(excess_sum_separation(a, b, L) == doctest::Approx(0.2));
    const auto c = ScalarFn::coordinate(1, 0);
    CHECK(excess_sum_separation(c, c, L) == doctest::Approx(0.0));
}

TEST_CASE("varshamov-gilbert codes") {
    const auto c4 = vg_code(4, 1);
    CHECK(c4.words.size() == 16);
    CHECK(c4.min_distance() == 1);
    for (int m : {9, 16, 24, 40, 64}) {
        const auto c = vg_code(m, 7);
        CHECK(static_cast<double>(c.words.size()) >= 1 + std::pow(2.0, m / 8.0));
        int md = m;
        for (std::size_t i = 0; i < c.words.size(); ++i)
            for (std::size_t j = i + 1; j < c.words.size(); ++j) {
                int h = 0;
                for (int k = 0; k < m; ++k) h += c.words[i][k] != c.words[j][k];
                md = std::min(md, h);
            }
        CHECK(md == c.min_distance());
        CHECK(md >= m / 8.0);
    }
    CHECK_THROWS_AS(vg_code(1, 1), ParameterError);
}

TEST_CASE("fano, le cam and rate exponents") {
    CHECK(fano_lower_bound(1, 0, 16, 1) == doctest::Approx(0.25));
    CHECK(fano_lower_bound(1, 0.01, 16, 1) == doctest::Approx(0.23545).epsilon(1e-4));
    CHECK(fano_lower_bound(1, 0.01, 16, 1) ==
          doctest::Approx(0.25 * (1 - (0.02 + std::sqrt(0.02)) / std::log(16.0))));
    const auto neg = fano_lower_bound_report(1, 1, 2, 10);
    CHECK(neg.raw < 0);
    CHECK(neg.clamped == 0.0);
    for (double u : {0.0, 0.1, 1.0}) CHECK(fano_lower_bound(2, u, 8, 3) <= 0.5);
    CHECK(lecam_lower_bound(1, 1) == 0.25);
    CHECK(lecam_lower_bound(1.0 / (2 * 50), 0.25) == doctest::Approx(1.0 / (32 * 50)));
    CHECK(rate_exponent(1, 0, 4, 0) == doctest::Approx(1.0 / 6));
    CHECK(rate_exponent(1, 0, 4, kInf) == 1.0);
    CHECK(rate_exponent(2, 1, 1, 0) == doctest::Approx(0.4));
}

TEST_CASE("degenerate class") {
    const auto r = degenerate_class_check(0.5, 10, 3);
    CHECK(r.passed);
    CHECK(r.max_excess == 0.0);
    CHECK(r.max_eta <= 0.5 + 1e-12);
    CHECK_THROWS_AS(degenerate_class_check(0.6, 10, 3), ParameterError);
    // a member with η above 1/2 breaks the constant -1 classifier
    const auto W = dist::make_distribution(ScalarFn::constant(2, 0.6), dist::lebesgue(2));
    CHECK(risk::excess_risk(ScalarFn::constant(2, -1.0), W, risk::Loss::zero_one).excess == doctest::Approx(0.2));
    const auto Z = dist::make_distribution(ScalarFn::constant(2, 0.0), dist::lebesgue(2));
    CHECK(risk::excess_risk(ScalarFn::constant(2, -1.0), Z, risk::Loss::zero_one).excess == 0.0);
}

TEST_CASE("lower bound pipeline") {
    const auto rows = lower_bound_pipeline({1000, 8000, 64000}, 0.0, 1.0, 10.0, 1.0, 0, 1, 1, 1, 5);
    REQUIRE(rows.size() == 3);
    for (const auto& r : rows) {
        CHECK(r.separation > 0.0);
        CHECK(r.kl > 0.0);
        CHECK(r.fano_value >= 0.0);
        CHECK(r.fano_value == doctest::Approx(std::max(0.0, r.fano_raw)));
        CHECK(r.formula_value > 0.0);
    }
    CHECK(rows[0].eps > rows[2].eps);
}
