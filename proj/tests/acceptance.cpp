// One PASS/FAIL line per acceptance criterion. Exit status is nonzero if any criterion fails.
// An optional argument (e.g. AC3) runs that criterion alone.
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include "mlab/bounds.hpp"
#include "mlab/dist.hpp"
#include "mlab/estimators.hpp"
#include "mlab/harness.hpp"
#include "mlab/relunet.hpp"
#include "mlab/risk.hpp"

using namespace mlab;

namespace {

int failures = 0;

void report(const char* id, bool ok, const std::string& detail) {
    std::printf("%s %s  %s\n", id, ok ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    failures += !ok;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

// piecewise constant on `cells` equal cells of the first coordinate
ScalarFn cellwise(const std::vector<double>& v, int dim = 1) {
    const int c = static_cast<int>(v.size());
    return ScalarFn{dim, {0}, [v, c](const double* x) { return v[std::min(c - 1, static_cast<int>(x[0] * c))]; }};
}

void rate_experiment(const char* id, const std::string& path, double limit_s) {
    try {
        const auto t0 = std::chrono::steady_clock::now();
        const auto cfg = harness::load_config(path);
        const auto rep = harness::run_rate_experiment(cfg);
        const double secs = seconds_since(t0);
        std::string d = rep.fit_ok ? fmt("slope %.4f", rep.fit.slope) + fmt(" +- %.4f", rep.fit.ci_halfwidth)
                                   : "fit failed: " + rep.fit_error;
        if (rep.slope_band) d += fmt(" band [%.2f,", rep.slope_band->first) + fmt(" %.2f]", rep.slope_band->second);
        d += fmt(" runtime %.1fs", secs) + fmt(" (limit %.0fs)", limit_s);
        report(id, rep.passed && secs <= limit_s, d);
    } catch (const std::exception& e) {
        report(id, false, std::string("exception: ") + e.what());
    }
}

void ac3() {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(303);
    std::uniform_real_distribution<double> U(0, 1);
    auto random_signs = [&](int cells, int count) {
        std::vector<ScalarFn> out;
        for (int k = 0; k < count; ++k) {
            std::vector<double> s(cells);
            for (auto& v : s) v = U(rng) < 0.5 ? -1.0 : 1.0;
            out.push_back(cellwise(s));
        }
        return out;
    };
    auto thresholds = [](int count) {
        std::vector<ScalarFn> out;
        for (int k = 0; k < count; ++k) {
            const double th = static_cast<double>(k) / (count - 1);
            out.push_back(ScalarFn{1, {0}, [th](const double* x) { return sgn(x[0] - th); }});
        }
        return out;
    };
    const auto linear = dist::make_distribution(ScalarFn::coordinate(1, 0), dist::lebesgue(1), dist::NoiseProfile{1.0, 1.0, 1.0});
    const auto band = dist::make_distribution(cellwise({0.2, 0.8}), dist::lebesgue(1), dist::NoiseProfile{kInf, 1.0, 0.3});
    const auto wavy = dist::make_distribution(
        ScalarFn{1, {0}, [](const double* x) { return 0.5 + 0.4 * std::sin(6.283185307179586 * x[0]); }}, dist::lebesgue(1),
        dist::NoiseProfile{0.0, 1.0, 1.0});
    // P(|x1 + x2 - 1| <= t) = 2t - t^2 <= 2t
    const auto diag = dist::make_distribution(ScalarFn{2, {0, 1}, [](const double* x) { return (x[0] + x[1]) / 2; }},
                                              dist::lebesgue(2), dist::NoiseProfile{1.0, 2.0, 1.0});
    std::vector<ScalarFn> halfplanes;
    for (int k = 0; k <= 8; ++k) {
        const double c = k / 4.0;
        halfplanes.push_back(ScalarFn{2, {0, 1}, [c](const double* x) { return sgn(x[0] + x[1] - c); }});
    }
    for (int k = 1; k <= 3; ++k) {
        const double c = k / 4.0;
        halfplanes.push_back(ScalarFn{2, {0, 1}, [c](const double* x) { return sgn(x[0] - c); }});
    }
    struct Case {
        std::string name;
        std::vector<ScalarFn> cls;
        const dist::DistributionSpec* dist;
        std::size_t n;
    };
    std::vector<Case> cases{
        {"linear/thresholds9/n50", thresholds(9), &linear, 50},
        {"linear/thresholds9/n200", thresholds(9), &linear, 200},
        {"linear/signs8/n100", random_signs(8, 8), &linear, 100},
        {"linear/signs8/n400", random_signs(8, 8), &linear, 400},
        {"band/thresholds8/n100", thresholds(8), &band, 100},
        {"band/signs16/n200", random_signs(16, 16), &band, 200},
        {"wavy/thresholds17/n100", thresholds(17), &wavy, 100},
        {"diag/halfplanes12/n150", halfplanes, &diag, 150},
        {"linear/constants/n30", {ScalarFn::constant(1, 1.0), ScalarFn::constant(1, -1.0)}, &linear, 30},
        {"band/signs32/n500", random_signs(8, 32), &band, 500},
    };
    bool ok = true;
    std::string worst;
    double worst_ratio = -1;
    for (std::size_t i = 0; i < cases.size(); ++i) {
        const auto r = bounds::oracle_verify(cases[i].cls, *cases[i].dist, cases[i].n, 500, 1000 + i);
        ok = ok && r.passed;
        const double ratio = r.lhs_mean / r.rhs;
        if (ratio > worst_ratio) {
            worst_ratio = ratio;
            worst = cases[i].name;
        }
        if (!r.passed) std::printf("  AC3 case %s failed: lhs %.5g se %.3g rhs %.5g\n", cases[i].name.c_str(), r.lhs_mean, r.lhs_se, r.rhs);
    }
    report("AC3", ok && seconds_since(t0) <= 300,
           "10 configs x 500 reps; max lhs/rhs " + fmt("%.4f", worst_ratio) + " at " + worst +
               fmt(", runtime %.1fs", seconds_since(t0)));
}

void ac4() {
    std::mt19937_64 rng(404);
    std::uniform_real_distribution<double> U(0, 1);
    const int cells = 16;
    bool ok = true;
    double max_gap = -kInf;
    for (int t = 0; t < 100; ++t) {
        const double eps = 0.125 * (0.01 + 0.99 * U(rng));
        std::vector<double> e1(cells), e2(cells);
        double qa = 0.0;
        // A is a random union of cells; half the constructions vary smoothly inside each cell
        std::vector<char> inA(cells);
        for (int c = 0; c < cells; ++c) {
            inA[c] = U(rng) < 0.5;
            if (inA[c]) {
                e1[c] = 0.5 - eps + 2 * eps * U(rng);
                e2[c] = 0.5 - eps + 2 * eps * U(rng);
                qa += 1.0 / cells;
            } else {
                e1[c] = e2[c] = 0.02 + 0.96 * U(rng);
            }
        }
        const bool smooth = t % 2 == 1;
        const double ph = 6.28 * U(rng);
        auto make = [&](const std::vector<double>& base, double sign) {
            return ScalarFn{1, {0}, [=](const double* x) {
                                const int c = std::min(cells - 1, static_cast<int>(x[0] * cells));
                                if (!smooth || !inA[c]) return base[c];
                                const double w = sign * std::sin(40.0 * x[0] + ph);
                                return 0.5 + eps * w;
                            }};
        };
        const auto a = make(e1, 1.0), b = make(e2, -1.0);
        const double kl = dist::kl_divergence(a, b, dist::lebesgue(1), 4096);
        const double bound = 18 * eps * eps * qa + 1e-6;
        ok = ok && kl <= bound;
        max_gap = std::max(max_gap, kl - bound);
    }
    bool scalar_ok = true;
    for (double eps : {0.001, 0.01, 0.05, 0.1, 0.125})
        for (int i = 0; i < 100; ++i)
            for (int k = 0; k < 100; ++k) {
                const double a1 = 0.5 - eps + 2 * eps * i / 99.0, a2 = 0.5 - eps + 2 * eps * k / 99.0;
                scalar_ok = scalar_ok && dist::kl_bernoulli(a1, a2) <= 18 * eps * eps;
            }
    report("AC4", ok && scalar_ok,
           "100 constructions, max (kl - bound) " + fmt("%.3g", max_gap) + "; scalar grid " + (scalar_ok ? "ok" : "violated"));
}

void ac5() {
    std::mt19937_64 rng(505);
    std::uniform_real_distribution<double> U(0, 1);
    const int res = 2520;  // divisible by every cell count used below
    bool ok = true;
    double max_eq_err = 0.0, min_slack = kInf;
    for (int t = 0; t < 50; ++t) {
        const int cells = 1 + static_cast<int>(rng() % 8);
        // the second half varies inside each sign cell, on three sub-cells
        const int sub = t < 25 ? 1 : 3;
        std::vector<double> e1(cells * sub), e2(cells * sub);
        for (auto& v : e1) v = U(rng);
        for (auto& v : e2) v = U(rng);
        const auto P1 = dist::make_distribution(cellwise(e1), dist::lebesgue(1));
        const auto P2 = dist::make_distribution(cellwise(e2), dist::lebesgue(1));
        const double sep = bounds::excess_sum_separation(P1.eta, P2.eta, dist::lebesgue(1), res);
        double best = kInf;
        for (unsigned pat = 0; pat < (1u << cells); ++pat) {
            std::vector<double> s(cells);
            for (int c = 0; c < cells; ++c) s[c] = (pat >> c) & 1 ? 1.0 : -1.0;
            const auto f = cellwise(s);
            const double sum = risk::excess_risk(f, P1, risk::Loss::zero_one, dist::Method::quadrature, res).excess +
                               risk::excess_risk(f, P2, risk::Loss::zero_one, dist::Method::quadrature, res).excess;
            best = std::min(best, sum);
        }
        ok = ok && sep <= best + 1e-12;
        min_slack = std::min(min_slack, best - sep);
        if (sub == 1) {
            ok = ok && std::abs(sep - best) <= 1e-9;
            max_eq_err = std::max(max_eq_err, std::abs(sep - best));
        }
    }
    report("AC5", ok, "50 pairs; min (brute - separation) " + fmt("%.3g", min_slack) +
                          ", max |diff| when constant per cell " + fmt("%.3g", max_eq_err));
}

void ac6() {
    bool ok = true;
    std::string d;
    for (std::size_t n : {4u, 16u, 64u}) {
        const auto fam = dist::build_twopoint_family(2.0, n, 1.0, 0, 1, 1, 1);
        const double aff = dist::product_affinity(fam.P0.eta, fam.P1.eta, fam.P0.marginal, n, 0, fam.P0.align);
        const auto tab = dist::quad_table(fam.P0.marginal, {&fam.P0.eta}, 0, fam.P0.align);
        double v = 0.0;  // ∫(1 - η0) dQ_n, the excess-sum floor since η1 ≡ 1
        for (std::size_t i = 0; i < tab.size(); ++i) v += tab.mass[i] * (1.0 - fam.P0.eta(tab.point(i)));
        const double target = 1.0 / (32.0 * n);
        const double realized = bounds::lecam_lower_bound(v, aff);
        const double formula = bounds::lecam_lower_bound(1.0 / (2.0 * n), 0.25);
        const bool row = aff >= 0.25 && v >= 1.0 / (2.0 * n) - 1e-12 && realized >= target - 1e-12 &&
                         std::abs(formula - target) <= 1e-12;
        ok = ok && row;
        d += "n=" + std::to_string(n) + fmt(" aff %.4f", aff) + fmt(" bound %.4g", realized) + fmt(" >= %.4g; ", target);
    }
    report("AC6", ok, d);
}

void ac7() {
    bool ok = true;
    std::size_t checked = 0;
    for (int e = 2; e <= 8; ++e) {
        const double delta = std::ldexp(1.0, -e);
        const auto net = relunet::build_threshold_net(delta);
        const double hi = 0.5 + 5 * delta / 14;
        for (int i = 0; i < 10000; ++i) {
            // covers a stretch of the negative axis and the whole unit interval
            const double t = -1.0 + 2.0 * i / 9999.0;
            const double v = net.forward(&t);
            if (t <= 0.5) {
                ok = ok && v == -1.0;
                ++checked;
            } else if (t >= hi && t <= 1.0) {
                ok = ok && v == 1.0;
                ++checked;
            }
        }
    }
    // η = x satisfies the noise condition with s = 1, α = 1
    using namespace funcspace;
    const auto ramp = single_layer(1, {0}, core_power(1, 0, 1.0, 1.0, 0.0), 1.0, 2.0);
    const auto P = dist::make_distribution(ramp, dist::lebesgue(1), dist::NoiseProfile{1.0, 1.0, 1.0});
    bool risk_ok = true;
    std::string d;
    for (double delta : {0.2, 0.1, 0.05, 0.02}) {
        const auto net = relunet::build_classifier_net(ramp, delta);
        const double ex = risk::excess_risk(net.as_scalar_fn(), P, risk::Loss::hinge, dist::Method::quadrature, 100000).excess;
        const double bound = 2 * 1.0 * std::pow(delta, 2.0);
        risk_ok = risk_ok && ex <= bound;
        d += fmt("δ=%.2f:", delta) + fmt(" %.3g", ex) + fmt("<=%.3g ", bound);
    }
    report("AC7", ok && risk_ok, std::to_string(checked) + " region points exact; excess hinge " + d);
}

void ac8() {
    const estimators::CoverParams p{0, 1, 1, 1, 1.0, 1.0, 1};
    std::vector<double> x, y;
    for (int e = 1; e <= 5; ++e) {
        const double xi = std::ldexp(1.0, -e);
        const auto net = estimators::build_covering_net(p, xi);
        x.push_back(1.0 / xi);
        y.push_back(static_cast<double>(net.log_count));
    }
    const double n = x.size();
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) mx += x[i] / n, my += y[i] / n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    const double r2 = sxy * sxy / (sxx * syy);
    report("AC8", r2 >= 0.95, fmt("slope %.3f", sxy / sxx) + fmt(" per unit 1/xi, R^2 %.5f", r2));
}

void ac9() {
    std::mt19937_64 rng(909);
    std::uniform_real_distribution<double> U(0, 1);
    bool ok = true;
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
        const double A = 3.0 * std::pow(1000.0, U(rng));
        const double a = 0.1 * std::pow(100.0, U(rng));
        const double b = 1.0 + U(rng);
        const auto t = bounds::tail_integral_bound(A, a, b);
        ok = ok && t.numeric <= t.bound;
        worst = std::max(worst, t.numeric / t.bound);
    }
    report("AC9", ok, "200 cases, max numeric/bound " + fmt("%.4f", worst));
}

void ac10() {
    std::mt19937_64 rng(1010);
    bool ok = true;
    for (int i = 0; i < 50; ++i) {
        const int m = 2 + static_cast<int>(rng() % 63);
        const auto c = bounds::vg_code(m, rng());
        int md = m;
        for (std::size_t a = 0; a < c.words.size(); ++a)
            for (std::size_t b = a + 1; b < c.words.size(); ++b) {
                int h = 0;
                for (int k = 0; k < m; ++k) h += c.words[a][k] != c.words[b][k];
                md = std::min(md, h);
            }
        ok = ok && static_cast<double>(c.words.size()) >= 1 + std::pow(2.0, m / 8.0) && md >= m / 8.0;
    }
    report("AC10", ok, "50 codes certified by direct distance recheck");
}

void ac11() {
    bool ok = true;
    std::string d;
    for (double r : {0.5, 0.3, 0.1}) {
        const auto rep = bounds::degenerate_class_check(r, 20, 1111);
        ok = ok && rep.passed && rep.max_excess == 0.0 && rep.members == 20;
        d += fmt("r=%.1f:", r) + fmt(" max eta %.3f", rep.max_eta) + fmt(" max excess %.3g; ", rep.max_excess);
    }
    report("AC11", ok, d);
}

}  // namespace

int main(int argc, char** argv) {
    const std::string only = argc > 1 ? argv[1] : "";
    const std::vector<std::pair<const char*, std::function<void()>>> steps{
        {"AC1", [] { rate_experiment("AC1", "configs/rate_s0_covering.json", 600); }},
        {"AC2", [] { rate_experiment("AC2", "configs/rate_sinf_threshold.json", 120); }},
        {"AC3", ac3}, {"AC4", ac4}, {"AC5", ac5}, {"AC6", ac6}, {"AC7", ac7},
        {"AC8", ac8}, {"AC9", ac9}, {"AC10", ac10}, {"AC11", ac11},
    };
    std::size_t ran = 0;
    for (const auto& [id, fn] : steps) {
        if (!only.empty() && only != id) continue;
        ++ran;
        try {
            fn();
        } catch (const std::exception& e) {
            report(id, false, std::string("exception: ") + e.what());
        }
    }
    if (ran == 0) {
        std::printf("unknown criterion %s\n", only.c_str());
        return 2;
    }
    std::printf("%d of %zu criteria failed\n", failures, ran);
    return failures == 0 ? 0 : 1;
}
