#include <random>

#include "doctest.h"
#include "mlab/risk.hpp"

using namespace mlab;
using namespace mlab::risk;

namespace {

// η and f piecewise constant on `cells` equal cells of x_0
struct Piecewise {
    std::vector<double> eta, f;
    dist::DistributionSpec dist;
    ScalarFn fn;
};

Piecewise random_piecewise(std::mt19937_64& rng, int cells) {
    std::uniform_real_distribution<double> U(0, 1);
    Piecewise p;
    for (int i = 0; i < cells; ++i) {
        p.eta.push_back(U(rng));
        p.f.push_back(4 * U(rng) - 2);
    }
    auto eta = p.eta;
    auto f = p.f;
    auto idx = [cells](double x) { return std::min(cells - 1, static_cast<int>(x * cells)); };
    p.dist = dist::make_distribution(ScalarFn{1, {0}, [eta, idx](const double* x) { return eta[idx(x[0])]; }},
                                     dist::lebesgue(1), std::nullopt, cells);
    p.fn = ScalarFn{1, {0}, [f, idx](const double* x) { return f[idx(x[0])]; }};
    return p;
}

}  // namespace

TEST_CASE("truncation and loss values") {
    CHECK(truncate(1.0, 5.0) == 1);
    CHECK(truncate(1.0, -0.5) == -0.5);
    CHECK(truncate(2.0, -7.0) == -2);
    CHECK_THROWS_AS(truncate(0.0, 1.0), ParameterError);
    CHECK(loss_value(Loss::hinge, 0.3) == doctest::Approx(0.7));
    CHECK(loss_value(Loss::hinge, 2) == 0);
    CHECK(loss_value(Loss::logistic, 0) == doctest::Approx(0.693147).epsilon(1e-6));
    CHECK(loss_value(Loss::logistic, -800) == doctest::Approx(800));
    CHECK(pointwise_loss(Loss::zero_one, 1, 0.0) == 0.0);  // sgn(0) = +1
    CHECK(pointwise_loss(Loss::zero_one, -1, 0.0) == 1.0);
    CHECK(loss_from_string("hinge") == Loss::hinge);
    CHECK_THROWS_AS(loss_from_string("square"), ParameterError);
}

TEST_CASE("excess risk examples") {
    const auto P = dist::make_distribution(ScalarFn::constant(1, 0.3), dist::lebesgue(1));
    CHECK(excess_risk(ScalarFn::constant(1, 1.0), P, Loss::zero_one).excess == doctest::Approx(0.4));
    CHECK(excess_risk(ScalarFn::constant(1, 0.0), P, Loss::hinge).excess == doctest::Approx(0.4));
    CHECK(excess_risk(ScalarFn::constant(1, -1.0), P, Loss::zero_one).excess == doctest::Approx(0.0));
    // Bayes classifier of a varying η
    const auto Q = dist::make_distribution(ScalarFn::coordinate(1, 0), dist::lebesgue(1));
    const ScalarFn bayes{1, {0}, [](const double* x) { return sgn(2 * x[0] - 1); }};
    CHECK(excess_risk(bayes, Q, Loss::zero_one).excess == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(excess_risk(bayes, Q, Loss::hinge).excess == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(excess_risk(bayes, Q, Loss::zero_one, dist::Method::monte_carlo, 50).precision_warning);
    const auto j = to_json(excess_risk(bayes, Q, Loss::hinge));
    CHECK(j["method"] == "quadrature");
}

TEST_CASE("bayes risk identities") {
    // hinge Bayes risk = ∫(1 - |2η-1|), zero-one = ∫min(η, 1-η); η = x
    const auto Q = dist::make_distribution(ScalarFn::coordinate(1, 0), dist::lebesgue(1));
    const auto h = excess_risk(ScalarFn::constant(1, 0.0), Q, Loss::hinge, dist::Method::quadrature, 4096);
    CHECK(h.bayes_risk == doctest::Approx(0.5).epsilon(1e-6));
    const auto z = excess_risk(ScalarFn::constant(1, 1.0), Q, Loss::zero_one, dist::Method::quadrature, 4096);
    CHECK(z.bayes_risk == doctest::Approx(0.25).epsilon(1e-6));
    // logistic Bayes at η = 0 or 1 is 0
    CHECK(bayes_conditional_risk(Loss::logistic, 0.0) == 0.0);
    CHECK(bayes_conditional_risk(Loss::logistic, 1.0) == 0.0);
    CHECK(conditional_risk(Loss::logistic, 1.0, -800.0) == doctest::Approx(800.0));
}

TEST_CASE("truncation never increases hinge loss and keeps the sign") {
    for (int i = -200; i <= 200; ++i) {
        const double t = i / 20.0;
        for (int y : {-1, 1}) CHECK(loss_value(Loss::hinge, y * truncate(1, t)) <= loss_value(Loss::hinge, y * t));
    }
    std::mt19937_64 rng(4);
    for (int k = 0; k < 10; ++k) {
        auto p = random_piecewise(rng, 16);
        const double base = excess_risk(p.fn, p.dist, Loss::zero_one).excess;
        for (double F : {0.1, 1.0, 3.0}) {
            ScalarFn t{1, {0}, [&p, F](const double* x) { return truncate(F, p.fn(x)); }};
            CHECK(excess_risk(t, p.dist, Loss::zero_one).excess == doctest::Approx(base).epsilon(1e-14));
        }
    }
}

TEST_CASE("variance bound examples") {
    const auto Q = dist::make_distribution(ScalarFn::coordinate(1, 0), dist::lebesgue(1));
    const ScalarFn bayes{1, {0}, [](const double* x) { return sgn(2 * x[0] - 1); }};
    const auto r0 = variance_bound_check(bayes, Q, {1.0, 1.0, 1.0}, 1024);
    CHECK(r0.passed);
    CHECK(r0.lhs == doctest::Approx(0.0));
    std::mt19937_64 rng(2);
    for (int k = 0; k < 10; ++k) {
        auto p = random_piecewise(rng, 8);
        ScalarFn t{1, {0}, [&p](const double* x) { return truncate(1, p.fn(x)); }};
        CHECK(variance_bound_check(t, p.dist, {0.0, 1.0, 1.0}).passed);
    }
    // |2η-1| = 2ε constant, f ≡ 0: LHS = 1, RHS = 6 (2ε)^{s/(s+1)} max{1, α, 1/τ}
    const double eps = 0.1, s = 1.0;
    const auto C = dist::make_distribution(ScalarFn::constant(1, 0.5 + eps), dist::lebesgue(1));
    const auto rc = variance_bound_check(ScalarFn::constant(1, 0.0), C, {s, 1.0, 1.0}, 16);
    CHECK(rc.lhs == doctest::Approx(1.0));
    CHECK(rc.rhs == doctest::Approx(6 * std::pow(2 * eps, s / (s + 1))));
    CHECK(rc.slack == doctest::Approx(rc.rhs - 1.0));
}

TEST_CASE("comparison inequalities") {
    const auto P = dist::make_distribution(ScalarFn::constant(1, 0.3), dist::lebesgue(1));
    const auto r = comparison_check(ScalarFn::constant(1, 1.0), P);
    CHECK(r.lhs == doctest::Approx(0.4));
    CHECK(r.rhs == doctest::Approx(0.8));
    CHECK(r.passed);
    std::mt19937_64 rng(8);
    for (int k = 0; k < 30; ++k) {
        auto p = random_piecewise(rng, 50);
        CHECK(comparison_check(p.fn, p.dist).passed);
    }
}

TEST_CASE("monte carlo agrees with quadrature") {
    std::mt19937_64 rng(12);
    for (int k = 0; k < 20; ++k) {
        auto p = random_piecewise(rng, 10);
        const auto q = excess_risk(p.fn, p.dist, Loss::hinge);
        const auto m = excess_risk(p.fn, p.dist, Loss::hinge, dist::Method::monte_carlo, 100000, 100 + k);
        CHECK(std::abs(q.excess - m.excess) <= 4 * m.error_estimate + 1e-12);
    }
}

TEST_CASE("risk table matches excess_risk") {
    std::mt19937_64 rng(21);
    auto p = random_piecewise(rng, 12);
    const RiskTable t(p.dist, {0}, 120);
    CHECK(t.excess01(p.fn) == doctest::Approx(excess_risk(p.fn, p.dist, Loss::zero_one, dist::Method::quadrature, 120).excess));
    ScalarFn t1{1, {0}, [&p](const double* x) { return truncate(1, p.fn(x)); }};
    CHECK(t.excess_hinge(p.fn) == doctest::Approx(excess_risk(t1, p.dist, Loss::hinge, dist::Method::quadrature, 120).excess));
}
