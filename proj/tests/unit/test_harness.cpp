#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "mlab/harness.hpp"

using namespace mlab;
using namespace mlab::harness;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string tmp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("mlab_test_" + name)).string();
}

json small_config() {
    return json::parse(R"({
      "distribution": {"builtin": "margin_band", "d": 1},
      "estimator": "finite_threshold",
      "n_grid": [64, 128, 256, 512],
      "seeds_per_n": 5,
      "master_seed": 11,
      "risk": {"method": "quadrature", "resolution": 4096}
    })");
}

}  // namespace

TEST_CASE("fit_rate") {
    std::vector<std::pair<double, double>> exact;
    for (double n = 100; n <= 12800; n *= 2) exact.push_back({n, 3.0 * std::pow(n, -0.5)});
    const auto f = fit_rate(exact);
    CHECK(f.slope == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(std::exp(f.intercept) == doctest::Approx(3.0).epsilon(1e-10));
    CHECK(f.ci_halfwidth < 1e-9);
    CHECK(f.points == exact.size());

    // 95% intervals under small multiplicative noise cover the true slope most of the time
    std::mt19937_64 rng(6);
    std::normal_distribution<double> N(0, 0.01);
    int covered = 0;
    for (int t = 0; t < 100; ++t) {
        std::vector<std::pair<double, double>> pts;
        for (double n = 100; n <= 12800; n *= 2) pts.push_back({n, 2.0 * std::pow(n, -0.4) * std::exp(N(rng))});
        const auto g = fit_rate(pts);
        covered += std::abs(g.slope + 0.4) <= g.ci_halfwidth;
    }
    CHECK(covered >= 90);

    const auto c = fit_rate({{10, 0.5}, {20, 0.5}, {40, 0.5}});
    CHECK(c.slope == doctest::Approx(0.0).epsilon(1e-12));
    CHECK_THROWS_AS(fit_rate({{10, 0.5}, {20, 0.4}}), FitError);
    CHECK_THROWS_AS(fit_rate({{10, 0.5}, {20, 0.0}, {40, 0.1}}), FitError);
}

TEST_CASE("summarize recovers a synthetic law") {
    std::vector<RateRow> rows;
    const std::vector<std::size_t> ns{64, 128, 256, 512, 1024};
    // insert in scrambled order; medians are exact because every seed has the same value
    for (int k = 4; k >= 0; --k)
        for (std::size_t n : ns) {
            RateRow r;
            r.n = n;
            r.seed_index = k;
            r.estimator = "synthetic";
            r.excess01 = 0.7 * std::pow(static_cast<double>(n), -1.0 / 3.0);
            r.excess_hinge = 2 * r.excess01;
            rows.push_back(r);
        }
    const auto rep = summarize(rows, 1.0 / 3.0, std::nullopt);
    REQUIRE(rep.fit_ok);
    CHECK(rep.fit.slope == doctest::Approx(-1.0 / 3.0).epsilon(1e-6));
    CHECK(rep.ns == ns);
    CHECK(rep.passed);
    CHECK(rep.rows.front().n == 64);
    CHECK(rep.rows.front().seed_index == 0);
    const auto off = summarize(rows, 1.0, std::make_pair(-1.2, -0.8));
    CHECK_FALSE(off.passed);
}

TEST_CASE("emit_report writes csv, json and svg") {
    auto cfg = config_from_json(small_config());
    const auto rep = run_rate_experiment(cfg);
    const auto csv = tmp_path("rows.csv"), js = tmp_path("rep.json"), svg = tmp_path("plot.svg");
    emit_report(rep, csv, js, svg);
    CHECK(std::filesystem::exists(csv));
    CHECK(std::filesystem::exists(js));
    CHECK(std::filesystem::exists(svg));
    const auto text = slurp(csv);
    CHECK(text.rfind("n,seed,estimator,excess01,excess_hinge,wallclock_ms,status", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 4 * 5);
    const auto j = json::parse(slurp(js));
    CHECK(j["slope"].get<double>() == doctest::Approx(rep.fit.slope).epsilon(1e-12));
    const auto s = slurp(svg);
    CHECK(s.find("<svg") != std::string::npos);
    CHECK(s.find("</svg>") != std::string::npos);
    const auto back = read_rows_csv(csv);
    REQUIRE(back.size() == rep.rows.size());
    for (std::size_t i = 0; i < back.size(); ++i) {
        CHECK(back[i].n == rep.rows[i].n);
        CHECK(back[i].seed == rep.rows[i].seed);
        CHECK(back[i].excess01 == rep.rows[i].excess01);
        CHECK(back[i].status == rep.rows[i].status);
    }
}

TEST_CASE("results do not depend on the worker count") {
    auto cfg = config_from_json(small_config());
    std::string first;
    for (const char* w : {"1", "3"}) {
        setenv("MLAB_WORKERS", w, 1);
        const auto rep = run_rate_experiment(cfg);
        const auto path = tmp_path(std::string("det_") + w + ".csv");
        write_rows_csv(rep.rows, path);
        if (first.empty())
            first = slurp(path);
        else
            CHECK(slurp(path) == first);
    }
    unsetenv("MLAB_WORKERS");
}

TEST_CASE("config validation") {
    auto j = small_config();
    CHECK_NOTHROW(config_from_json(j).validate());
    auto few = j;
    few["n_grid"] = {64, 128, 256};
    CHECK_THROWS_AS(config_from_json(few).validate(), ParameterError);
    auto unsorted = j;
    unsorted["n_grid"] = {64, 256, 128, 512};
    CHECK_THROWS_AS(config_from_json(unsorted).validate(), ParameterError);
    auto seeds = j;
    seeds["seeds_per_n"] = 4;
    CHECK_THROWS_AS(config_from_json(seeds).validate(), ParameterError);
    auto est = j;
    est["estimator"] = "nearest_neighbour";
    CHECK_THROWS_AS(config_from_json(est).validate(), ParameterError);
}

TEST_CASE("property suites pass") {
    for (const auto& name : property_suites()) {
        const auto r = run_property_suite(name, 1);
        INFO(name << ": " << r.dump());
        CHECK(r["passed"].get<bool>());
    }
}
