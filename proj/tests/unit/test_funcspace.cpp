#include <random>

#include "doctest.h"
#include "mlab/funcspace.hpp"

using namespace mlab;
using namespace mlab::funcspace;

namespace {

CompositionalFunction identity_then(Core outer, int d) {
    CompositionalFunction f;
    f.d = d;
    f.q = 1;
    f.K = d;
    f.d_star = 1;
    f.d_lower = 1;
    f.beta = 1.0;
    f.radius = 3.0;
    std::vector<Component> l0;
    for (int k = 0; k < d; ++k) l0.push_back(holder_component(d, {k}, core_power(1, 0, 1.0, 1.0, 0.0), 1.0, 3.0));
    f.layers = {l0, {holder_component(d, {0}, outer, 1.0, 3.0)}};
    return f;
}

}  // namespace

TEST_CASE("interp1 reproduces knots and linear segments") {
    const double v[] = {0.0, 1.0, 0.5};
    CHECK(interp1(v, 3, 0.5, 0.0) == 0.0);
    CHECK(interp1(v, 3, 0.5, 0.5) == 1.0);
    CHECK(interp1(v, 3, 0.5, 1.0) == 0.5);
    CHECK(interp1(v, 3, 0.5, 0.25) == doctest::Approx(0.5));
    CHECK(interp1(v, 3, 0.5, 0.75) == doctest::Approx(0.75));
}

TEST_CASE("smoothstep endpoints and symmetry") {
    for (int order = 1; order <= 4; ++order) {
        CHECK(smoothstep(order, 0.0) == 0.0);
        CHECK(smoothstep(order, 1.0) == doctest::Approx(1.0));
        double prev = 0.0;
        for (int i = 1; i <= 100; ++i) {
            const double t = i / 100.0;
            CHECK(smoothstep(order, t) >= prev - 1e-15);
            prev = smoothstep(order, t);
            CHECK(smoothstep(order, t) + smoothstep(order, 1.0 - t) == doctest::Approx(1.0));
        }
    }
    // order 1 is the cubic 3t^2 - 2t^3
    CHECK(smoothstep(1, 0.3) == doctest::Approx(3 * 0.09 - 2 * 0.027));
}

TEST_CASE("bump plateau, support and monotone transition") {
    const BumpSpec spec{2, 0.25, 0.45, 1.0};
    const double origin[] = {0.0, 0.0};
    CHECK(bump(spec, origin) == 1.0);
    const double out[] = {0.49, 0.0};
    CHECK(bump(spec, out) == 0.0);
    const double mid[] = {0.35, -0.1};
    CHECK(bump(spec, mid) > 0.0);
    CHECK(bump(spec, mid) < 1.0);
    double prev = 1.0;
    for (int i = 0; i <= 100; ++i) {
        const double x[] = {0.5 * i / 100.0, 0.0};
        const double b = bump(spec, x);
        CHECK(b <= prev + 1e-15);
        CHECK(b >= 0.0);
        prev = b;
    }
    CHECK_THROWS_AS((BumpSpec{1, 0.3, 0.2, 1.0}.validate()), ParameterError);
}

TEST_CASE("bump_grid_sum: center value, zero code, disjoint support, naive agreement") {
    const int Q = 4;
    const BumpSpec spec{2, 0.25, 0.45, 1.5};
    GridCode code{Q, 2, std::vector<std::uint8_t>(16, 0)};
    std::mt19937_64 rng(3);
    for (auto& b : code.bits) b = rng() % 2;
    code.bits[5] = 1;
    const double amp = 0.7;
    const auto c = cell_center(Q, 2, 5);
    CHECK(cell_index(Q, 2, c.data()) == 5);
    CHECK(bump_grid_sum(code, amp, 1.5, spec, c.data()) == doctest::Approx(amp / std::pow(4.0, 1.5)));

    GridCode zero{Q, 2, std::vector<std::uint8_t>(16, 0)};
    std::uniform_real_distribution<double> U(0, 1);
    double sup = 0.0;
    for (int i = 0; i < 5000; ++i) {
        const double x[] = {U(rng), U(rng)};
        CHECK(bump_grid_sum(zero, amp, 1.5, spec, x) == 0.0);
        const double fast = bump_grid_sum(code, amp, 1.5, spec, x);
        CHECK(fast == doctest::Approx(bump_grid_sum_naive(code, amp, 1.5, spec, x)).epsilon(1e-14));
        sup = std::max(sup, fast);
        // at most one translate is nonzero
        int nonzero = 0;
        for (std::size_t a = 0; a < 16; ++a) {
            const auto ca = cell_center(Q, 2, a);
            const double z[] = {Q * (x[0] - ca[0]), Q * (x[1] - ca[1])};
            nonzero += bump(spec, z) > 0.0;
        }
        CHECK(nonzero <= 1);
    }
    CHECK(sup <= amp / std::pow(4.0, 1.5) + 1e-15);
}

TEST_CASE("bump_grid_sum integral scales with the bump mass") {
    // one active cell of two; the 1-D radial profile integrates to inner + outer
    const BumpSpec spec{1, 0.25, 0.45, 1.0};
    GridCode code{2, 1, {1, 0}};
    const double amp = 0.8;
    const int N = 200000;
    double acc = 0.0;
    for (int i = 0; i < N; ++i) {
        const double x = (i + 0.5) / N;
        acc += bump_grid_sum(code, amp, 1.0, spec, &x) / N;
    }
    CHECK(acc == doctest::Approx(amp / 2.0 * (0.25 + 0.45) / 2.0).epsilon(1e-6));
}

TEST_CASE("holder probe examples") {
    CHECK(holder_seminorm_probe(ScalarFn::constant(1, 0.3), 1.0, 33) == doctest::Approx(0.3));
    CHECK(holder_seminorm_probe(ScalarFn::coordinate(1, 0), 1.0, 33) == doctest::Approx(2.0));
    // bump translates with amplitude 1/(4 c2) stay within 3 times the unit bump norm
    const BumpSpec spec{1, 0.25, 0.45, 1.0};
    ScalarFn u{1, {0}, [spec](const double* x) {
                   const double z = x[0] - 0.5;
                   return bump(spec, &z);
               }};
    const double unorm = holder_seminorm_probe(u, 1.0, 513);
    const double c2 = 1.0 + unorm;
    GridCode code{3, 1, {1, 0, 1}};
    ScalarFn f{1, {0}, [&](const double* x) { return bump_grid_sum(code, 1.0 / (4.0 * c2), 1.0, spec, x); }};
    CHECK(holder_seminorm_probe(f, 1.0, 513) <= 3.0 * unorm);
}

TEST_CASE("eval_chom examples") {
    CompositionalFunction m;
    m.d = 2;
    m.d_star = 2;
    m.layers = {{max_component(2, {0, 1})}};
    CHECK(eval_chom(m, std::vector<double>{0.3, 0.7}) == 0.7);

    auto sq = identity_then(core_power(1, 0, 2.0, 1.0, 0.0), 2);
    CHECK(eval_chom(sq, std::vector<double>{0.5, 0.9}) == doctest::Approx(0.25));
    CHECK_THROWS_AS(eval_chom(sq, std::vector<double>{1.2, 0.5}), DomainError);

    auto bad = identity_then(core_power(1, 0, 1.0, 1.0, 0.0), 2);
    std::get<HolderComponent>(bad.layers[0][0]).core = core_constant(1, 1.5);
    CHECK_THROWS_AS(eval_chom(bad, std::vector<double>{0.2, 0.2}), RangeViolation);
}

TEST_CASE("max component equals brute-force max") {
    CompositionalFunction m;
    m.d = 4;
    m.d_star = 3;
    m.layers = {{max_component(4, {0, 2, 3})}};
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(0, 1);
    for (int i = 0; i < 10000; ++i) {
        std::vector<double> x{U(rng), U(rng), U(rng), U(rng)};
        CHECK(m.eval(x) == std::max({x[0], x[2], x[3]}));
    }
}

TEST_CASE("validate_chom") {
    auto ok = single_layer(2, {0}, core_power(1, 0, 1.0, 0.5, 0.25), 1.0, 1.0);
    CHECK(validate_chom(ok).passed);

    auto wide = ok;
    wide.d_lower = 3;
    const auto rep = validate_chom(wide);
    CHECK_FALSE(rep.passed);
    CHECK_FALSE(rep.find("dimension_condition")->passed);

    auto over = identity_then(core_power(1, 0, 1.0, 1.0, 0.0), 2);
    std::get<HolderComponent>(over.layers[0][1]).core = core_constant(1, 1.5);
    const auto r2 = validate_chom(over);
    CHECK_FALSE(r2.passed);
    const auto* range = r2.find("range");
    REQUIRE(range != nullptr);
    CHECK_FALSE(range->passed);
    CHECK(range->witness.size() == 2);

    // a core steeper than its declared radius fails the quotient probe
    auto steep = single_layer(1, {0}, core_power(1, 0, 1.0, 1.0, 0.0), 1.0, 0.5);
    CHECK_FALSE(validate_chom(steep).passed);
}

TEST_CASE("composition range holds on a grid for validated functions") {
    auto f = identity_then(core_power(1, 0, 2.0, 1.0, 0.0), 2);
    REQUIRE(validate_chom(f).passed);
    for_each_node(2, {0, 1}, 21, [&](const double* x) {
        for (const auto& c : f.layers[0]) {
            const double v = eval_component(c, x);
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
    });
}

TEST_CASE("chom json round trip with a table core") {
    std::vector<double> vals{0.1, 0.2, 0.3, 0.4, 0.5, 0.6};
    auto f = single_layer(3, {0, 2}, core_table({3, 2}, {0.5, 1.0}, vals), 1.0, 2.0, 2);
    f.d_lower = 2;
    const auto j = chom_to_json(f);
    CHECK(j["layers"][0][0]["active"][0] == 1);  // 1-based on disk
    const auto g = chom_from_json(j);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> U(0, 1);
    for (int i = 0; i < 200; ++i) {
        std::vector<double> x{U(rng), U(rng), U(rng)};
        CHECK(g.eval(x) == f.eval(x));
    }
    CHECK(chom_to_json(g) == j);
    // multilinear table value at a cell midpoint is the average of the corners
    std::vector<double> mid{0.25, 0.0, 0.5};
    CHECK(f.eval(mid) == doctest::Approx((0.1 + 0.2 + 0.4 + 0.5) / 4.0));
}
