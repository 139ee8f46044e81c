#include "mlab/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <set>
#include <sstream>

#include <boost/math/distributions/students_t.hpp>

#include "mlab/bounds.hpp"
#include "mlab/relunet.hpp"
#include "mlab/risk.hpp"

namespace mlab::harness {

// ---------------------------------------------------------------- config

void ExperimentConfig::validate() const {
    if (n_grid.size() < 4) throw ParameterError("n_grid needs at least 4 sizes");
    for (std::size_t i = 1; i < n_grid.size(); ++i)
        if (n_grid[i] <= n_grid[i - 1]) throw ParameterError("n_grid must be strictly increasing");
    if (seeds_per_n < 5) throw ParameterError("seeds_per_n must be >= 5");
    if (estimator != "covering_net" && estimator != "gradient_erm" && estimator != "finite_threshold")
        throw ParameterError("unknown estimator: " + estimator);
    if (risk_method != "quadrature" && risk_method != "monte_carlo")
        throw ParameterError("unknown risk method: " + risk_method);
    train.validate();
}

ExperimentConfig config_from_json(const json& j) {
    ExperimentConfig c;
    c.distribution = j.at("distribution");
    c.estimator = j.value("estimator", c.estimator);
    c.n_grid = j.at("n_grid").get<std::vector<std::size_t>>();
    c.seeds_per_n = j.value("seeds_per_n", c.seeds_per_n);
    c.master_seed = j.value("master_seed", c.master_seed);
    if (j.contains("risk")) {
        c.risk_method = j["risk"].value("method", c.risk_method);
        c.resolution = j["risk"].value("resolution", c.resolution);
    }
    if (j.contains("schedule")) {
        c.a = j["schedule"].value("a", c.a);
        c.b = j["schedule"].value("b", c.b);
    }
    if (j.contains("train")) {
        const auto& t = j["train"];
        c.train.step_size = t.value("step_size", c.train.step_size);
        c.train.iterations = t.value("iterations", c.train.iterations);
        c.train.minibatch = t.value("minibatch", c.train.minibatch);
        c.train.restarts = t.value("restarts", c.train.restarts);
        c.train.hidden_layers = t.value("hidden_layers", c.train.hidden_layers);
        c.train.width = t.value("width", c.train.width);
        c.train.clip = t.value("clip", c.train.clip);
        c.train.prune = t.value("prune", c.train.prune);
    }
    if (j.contains("cover")) c.cover_cap = j["cover"].value("cap", c.cover_cap);
    c.threshold_coord = j.value("threshold_coord", c.threshold_coord);
    if (j.contains("theory")) {
        TheoryParams t;
        const auto& tj = j["theory"];
        t.beta = tj.value("beta", t.beta);
        t.q = tj.value("q", t.q);
        t.d_lower = tj.value("d_lower", t.d_lower);
        t.s = tj.contains("s") && tj["s"].is_string() ? kInf : tj.value("s", t.s);
        c.theory = t;
    }
    if (j.contains("slope_band")) c.slope_band = std::make_pair(j["slope_band"][0].get<double>(), j["slope_band"][1].get<double>());
    if (j.contains("output")) {
        c.out_csv = j["output"].value("csv", "");
        c.out_json = j["output"].value("json", "");
        c.out_plot = j["output"].value("plot", "");
    }
    c.record_wallclock = j.value("record_wallclock", false);
    c.validate();
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config " + path);
    json j;
    try {
        j = json::parse(in, nullptr, true, true);
    } catch (const json::exception& e) {
        throw ParameterError("config " + path + ": " + e.what());
    }
    return config_from_json(j);
}

// ---------------------------------------------------------------- builtin distributions

BuiltDistribution build_distribution(const json& j) {
    BuiltDistribution bd;
    if (j.contains("spec")) {
        bd.dist = dist::distribution_from_json(j["spec"]);
        if (bd.dist.noise) {
            bd.cover_s = bd.dist.noise->s;
            bd.cover_tau = bd.dist.noise->tau;
        }
        if (bd.dist.eta_chom) {
            const auto& f = *bd.dist.eta_chom;
            bd.cover = {f.q, f.K, f.d_star, f.d_lower, f.beta, f.radius, f.d};
            bd.theory = {f.beta, f.q, f.d_lower, bd.cover_s};
        }
        bd.cover.d = bd.dist.dim;
        return bd;
    }
    const std::string name = j.at("builtin");
    if (name == "flat_ramp") {
        // η = 1/2 + A sgn(u) |2u|^γ with u = x_0 - 1/2
        const int d = j.value("d", 2);
        const double A = j.value("amplitude", 0.5);
        const double g = j.value("gamma", 4.0);
        if (!(A > 0.0 && A <= 0.5) || !(g >= 1.0)) throw ParameterError("flat_ramp: need amplitude in (0,1/2], gamma >= 1");
        const double lip = 2.0 * A * g;
        const double r = j.value("r", std::max(1.0, lip));
        auto core = funcspace::core_custom(1, [A, g](const double* z) {
            const double u = z[0] - 0.5;
            return 0.5 + A * sgn(u) * std::pow(std::abs(2.0 * u), g);
        });
        auto eta = funcspace::single_layer(d, {0}, core, 1.0, r, 1);
        bd.dist = dist::make_distribution(eta, dist::lebesgue(d), dist::NoiseProfile{0.0, 1.0, 1.0});
        bd.dist.label = "flat_ramp";
        bd.theory = {1.0, 0, 1, 0.0};
        bd.cover = {0, 1, 1, 1, 1.0, r, d};
        bd.cover_s = 0.0;
        bd.cover_tau = 1.0;
        return bd;
    }
    if (name == "margin_band") {
        // η = low left of 1/2, high right of it; no mass within gap of 1/2
        const int d = j.value("d", 1);
        const double lo = j.value("low", 0.2), hi = j.value("high", 0.8);
        const double gap = j.value("gap", 0.125);
        if (!(lo < 0.5 && hi > 0.5) || !(gap > 0.0 && gap < 0.5)) throw ParameterError("margin_band: bad parameters");
        const double dens = 1.0 / (1.0 - 2.0 * gap);
        auto marg = dist::bands(d, 0, {0.0, 0.5 - gap, 0.5 + gap, 1.0}, {dens, 0.0, dens}, 0);
        auto eta = ScalarFn{d, {0}, [lo, hi](const double* x) { return x[0] < 0.5 ? lo : hi; }};
        const double tau = std::min(0.5 - lo, hi - 0.5);
        bd.dist = dist::make_distribution(eta, marg, dist::NoiseProfile{kInf, 1.0, tau});
        bd.dist.label = "margin_band";
        bd.theory = {1.0, 0, 1, kInf};
        bd.cover = {0, 1, 1, 1, 1.0, 1.0, d};
        bd.cover_s = kInf;
        bd.cover_tau = tau;
        return bd;
    }
    throw ParameterError("unknown builtin distribution: " + name);
}

// ---------------------------------------------------------------- experiment loop

namespace {

EstimatorFn make_estimator(const ExperimentConfig& cfg, const BuiltDistribution& bd) {
    if (cfg.estimator == "covering_net") {
        return [&cfg, &bd](const dist::Dataset& data, std::uint64_t) {
            return estimators::covering_net_estimator(data, bd.cover, bd.cover_s, bd.cover_tau, cfg.cover_cap).classifier;
        };
    }
    if (cfg.estimator == "finite_threshold") {
        return [&cfg](const dist::Dataset& data, std::uint64_t) {
            return estimators::threshold_estimator(data, cfg.threshold_coord).classifier;
        };
    }
    return [&cfg, &bd](const dist::Dataset& data, std::uint64_t seed) {
        const auto th = cfg.theory ? *cfg.theory : bd.theory;
        const auto budget = estimators::hyperparam_schedule(static_cast<double>(data.size()), th.beta, th.q,
                                                            th.d_lower, th.s, cfg.a, cfg.b);
        auto tc = cfg.train;
        tc.seed = seed;
        const auto net = estimators::erm_gradient(data, budget, risk::Loss::hinge, tc);
        return net.as_scalar_fn();
    };
}

std::string sanitize(std::string s) {
    std::replace(s.begin(), s.end(), ',', ';');
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t k = v.size();
    return k % 2 ? v[k / 2] : 0.5 * (v[k / 2 - 1] + v[k / 2]);
}

}  // namespace

RateReport run_rate_experiment(const ExperimentConfig& cfg) {
    const auto bd = build_distribution(cfg.distribution);
    return run_rate_experiment(cfg, bd, make_estimator(cfg, bd));
}

RateReport run_rate_experiment(const ExperimentConfig& cfg, const BuiltDistribution& bd, const EstimatorFn& est) {
    cfg.validate();
    std::vector<RateRow> rows;
    for (std::size_t n : cfg.n_grid)
        for (int k = 0; k < cfg.seeds_per_n; ++k) {
            RateRow r;
            r.n = n;
            r.seed_index = k;
            r.seed = mix_seed(cfg.master_seed, n, static_cast<std::uint64_t>(k));
            r.estimator = cfg.estimator;
            rows.push_back(r);
        }

    std::map<std::vector<int>, std::shared_ptr<risk::RiskTable>> tables;
    std::mutex mu;
    auto table_for = [&](const std::vector<int>& coords) {
        std::lock_guard<std::mutex> lock(mu);
        auto& t = tables[coords];
        if (!t) {
            int res = dist::default_resolution(bd.dist.align, static_cast<int>(coords.size()));
            if (cfg.resolution > 0) {
                const int cap = static_cast<int>(std::floor(std::pow(4194304.0, 1.0 / std::max<std::size_t>(1, coords.size())) + 1e-9));
                res = std::min(cfg.resolution, cap);
            }
            t = std::make_shared<risk::RiskTable>(bd.dist, coords, res);
        }
        return t;
    };

    parallel_for(rows.size(), [&](std::size_t i) {
        RateRow& row = rows[i];
        const auto t0 = std::chrono::steady_clock::now();
        try {
            const auto data = dist::sample(bd.dist, row.n, row.seed);
            const ScalarFn f = est(data, row.seed);
            if (cfg.risk_method == "quadrature") {
                const auto table = table_for(union_active({&bd.dist.eta, &f}));
                row.excess01 = table->excess01(f);
                row.excess_hinge = table->excess_hinge(f);
            } else {
                const std::size_t m = cfg.resolution > 0 ? static_cast<std::size_t>(cfg.resolution) : 100000;
                const std::uint64_t es = mix_seed(row.seed, 0xe7a1);
                row.excess01 = risk::excess_risk(f, bd.dist, risk::Loss::zero_one, dist::Method::monte_carlo, m, es).excess;
                const ScalarFn t1{f.dim, f.active, [f](const double* x) { return std::clamp(f(x), -1.0, 1.0); }};
                row.excess_hinge = risk::excess_risk(t1, bd.dist, risk::Loss::hinge, dist::Method::monte_carlo, m, es).excess;
            }
        } catch (const CapacityError& e) {
            row.status = sanitize(std::string("capacity_error: ") + e.what());
        }
        if (cfg.record_wallclock)
            row.wallclock_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    });

    const auto th = cfg.theory ? *cfg.theory : bd.theory;
    return summarize(std::move(rows), bounds::rate_exponent(th.beta, th.q, th.d_lower, th.s), cfg.slope_band);
}

RateReport summarize(std::vector<RateRow> rows, double theoretical_exponent,
                     std::optional<std::pair<double, double>> slope_band) {
    std::sort(rows.begin(), rows.end(), [](const RateRow& a, const RateRow& b) {
        return a.n != b.n ? a.n < b.n : a.seed_index < b.seed_index;
    });
    RateReport rep;
    rep.theoretical_exponent = theoretical_exponent;
    rep.slope_band = slope_band;
    std::map<std::size_t, std::vector<double>> by_n;
    for (const auto& r : rows) {
        if (r.status != "ok") {
            ++rep.failures;
            continue;
        }
        by_n[r.n].push_back(r.excess01);
    }
    std::vector<std::pair<double, double>> pts;
    for (const auto& [n, v] : by_n) {
        rep.ns.push_back(n);
        double s = 0.0;
        for (double x : v) s += x;
        rep.mean.push_back(s / v.size());
        rep.median.push_back(median_of(v));
        pts.emplace_back(static_cast<double>(n), rep.median.back());
    }
    rep.rows = std::move(rows);
    try {
        rep.fit = fit_rate(pts);
        rep.fit_ok = true;
    } catch (const FitError& e) {
        rep.fit_error = e.what();
    }
    if (rep.fit_ok) {
        if (slope_band)
            rep.passed = rep.fit.slope >= slope_band->first && rep.fit.slope <= slope_band->second;
        else
            rep.passed = std::abs(rep.fit.slope + theoretical_exponent) <= rep.fit.ci_halfwidth;
    }
    return rep;
}

FitResult fit_rate(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 3) throw FitError("fit needs at least 3 points");
    const double k = static_cast<double>(points.size());
    double sx = 0.0, sy = 0.0;
    for (const auto& [n, v] : points) {
        if (!(n > 0.0) || !(v > 0.0)) throw FitError("fit needs positive n and values");
        sx += std::log(n);
        sy += std::log(v);
    }
    const double mx = sx / k, my = sy / k;
    double sxx = 0.0, sxy = 0.0;
    for (const auto& [n, v] : points) {
        sxx += (std::log(n) - mx) * (std::log(n) - mx);
        sxy += (std::log(n) - mx) * (std::log(v) - my);
    }
    if (sxx == 0.0) throw FitError("fit needs at least two distinct n");
    FitResult f;
    f.points = points.size();
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ssr = 0.0;
    for (const auto& [n, v] : points) {
        const double e = std::log(v) - (f.intercept + f.slope * std::log(n));
        ssr += e * e;
    }
    const double se = std::sqrt(ssr / (k - 2.0) / sxx);
    const boost::math::students_t t(k - 2.0);
    f.ci_halfwidth = boost::math::quantile(boost::math::complement(t, 0.025)) * se;
    return f;
}

// ---------------------------------------------------------------- output

json report_to_json(const RateReport& r) {
    json j;
    j["n"] = r.ns;
    j["mean"] = r.mean;
    j["median"] = r.median;
    j["fit_ok"] = r.fit_ok;
    if (r.fit_ok) {
        j["slope"] = r.fit.slope;
        j["intercept"] = r.fit.intercept;
        j["ci_halfwidth"] = r.fit.ci_halfwidth;
    } else {
        j["fit_error"] = r.fit_error;
    }
    j["theoretical_exponent"] = r.theoretical_exponent;
    if (r.slope_band) j["slope_band"] = {r.slope_band->first, r.slope_band->second};
    j["rows"] = r.rows.size();
    j["failures"] = r.failures;
    j["passed"] = r.passed;
    return j;
}

void write_rows_csv(const std::vector<RateRow>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "n,seed,estimator,excess01,excess_hinge,wallclock_ms,status\n" << std::setprecision(17);
    for (const auto& r : rows)
        out << r.n << ',' << r.seed << ',' << r.estimator << ',' << r.excess01 << ',' << r.excess_hinge << ','
            << r.wallclock_ms << ',' << r.status << '\n';
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<RateRow> read_rows_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    std::getline(in, line);
    std::vector<RateRow> rows;
    std::map<std::size_t, int> counter;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<std::string> c;
        while (std::getline(ss, cell, ',')) c.push_back(cell);
        if (c.size() != 7) throw std::runtime_error(path + ": malformed row: " + line);
        RateRow r;
        r.n = std::stoull(c[0]);
        r.seed = std::stoull(c[1]);
        r.estimator = c[2];
        r.excess01 = std::stod(c[3]);
        r.excess_hinge = std::stod(c[4]);
        r.wallclock_ms = std::stod(c[5]);
        r.status = c[6];
        r.seed_index = counter[r.n]++;
        rows.push_back(r);
    }
    return rows;
}

std::string render_svg(const RateReport& r) {
    const double W = 640, H = 480, L = 70, R = 20, T = 30, B = 60;
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < r.ns.size(); ++i) {
        if (r.median[i] <= 0.0) continue;
        lx.push_back(std::log10(static_cast<double>(r.ns[i])));
        ly.push_back(std::log10(r.median[i]));
    }
    double x0 = 0, x1 = 1, y0 = -1, y1 = 0;
    if (!lx.empty()) {
        x0 = *std::min_element(lx.begin(), lx.end()) - 0.1;
        x1 = *std::max_element(lx.begin(), lx.end()) + 0.1;
        y0 = *std::min_element(ly.begin(), ly.end()) - 0.3;
        y1 = *std::max_element(ly.begin(), ly.end()) + 0.3;
    }
    auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
    auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };
    std::ostringstream s;
    s << std::setprecision(6);
    s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
      << ' ' << H << "\">\n";
    s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
      << "\" stroke=\"black\"/>\n";
    s << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
    for (int e = static_cast<int>(std::ceil(x0)); e <= static_cast<int>(std::floor(x1)); ++e)
        s << "<text x=\"" << px(e) << "\" y=\"" << H - B + 20 << "\" font-size=\"12\" text-anchor=\"middle\">1e" << e
          << "</text>\n";
    for (int e = static_cast<int>(std::ceil(y0)); e <= static_cast<int>(std::floor(y1)); ++e)
        s << "<text x=\"" << L - 8 << "\" y=\"" << py(e) + 4 << "\" font-size=\"12\" text-anchor=\"end\">1e" << e
          << "</text>\n";
    s << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 15 << "\" font-size=\"14\" text-anchor=\"middle\">n</text>\n";
    s << "<text x=\"18\" y=\"" << (T + H - B) / 2 << "\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << (T + H - B) / 2 << ")\">median excess 0-1 risk</text>\n";
    for (std::size_t i = 0; i < lx.size(); ++i)
        s << "<circle cx=\"" << px(lx[i]) << "\" cy=\"" << py(ly[i]) << "\" r=\"4\" fill=\"steelblue\"/>\n";
    if (r.fit_ok && !lx.empty()) {
        const double ln10 = std::log(10.0);
        auto fy = [&](double x) { return (r.fit.intercept + r.fit.slope * x * ln10) / ln10; };
        s << "<line x1=\"" << px(x0) << "\" y1=\"" << py(fy(x0)) << "\" x2=\"" << px(x1) << "\" y2=\"" << py(fy(x1))
          << "\" stroke=\"firebrick\" stroke-width=\"2\"/>\n";
        // guide with the theoretical slope through the centre of the data
        double cx = 0, cy = 0;
        for (std::size_t i = 0; i < lx.size(); ++i) {
            cx += lx[i];
            cy += ly[i];
        }
        cx /= lx.size();
        cy /= ly.size();
        auto gy = [&](double x) { return cy - r.theoretical_exponent * (x - cx); };
        s << "<line x1=\"" << px(x0) << "\" y1=\"" << py(gy(x0)) << "\" x2=\"" << px(x1) << "\" y2=\"" << py(gy(x1))
          << "\" stroke=\"gray\" stroke-dasharray=\"6,4\"/>\n";
        s << "<text x=\"" << W - R - 5 << "\" y=\"" << T + 5 << "\" font-size=\"12\" text-anchor=\"end\">slope "
          << r.fit.slope << " +/- " << r.fit.ci_halfwidth << " (theory " << -r.theoretical_exponent << ")</text>\n";
    }
    s << "</svg>\n";
    return s.str();
}

void emit_report(const RateReport& r, const std::string& csv, const std::string& json_path, const std::string& svg) {
    if (!csv.empty()) write_rows_csv(r.rows, csv);
    if (!json_path.empty()) {
        std::ofstream out(json_path);
        if (!out) throw std::runtime_error("cannot open " + json_path);
        out << report_to_json(r).dump(2) << '\n';
        if (!out) throw std::runtime_error("write failed: " + json_path);
    }
    if (!svg.empty()) {
        std::ofstream out(svg);
        if (!out) throw std::runtime_error("cannot open " + svg);
        out << render_svg(r);
        if (!out) throw std::runtime_error("write failed: " + svg);
    }
}

// ---------------------------------------------------------------- property suites

std::vector<std::string> property_suites() {
    return {"j_function", "tail_integral", "vg_code", "fano", "degenerate", "threshold_net", "noise"};
}

json run_property_suite(const std::string& name, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    json out{{"suite", name}};
    bool ok = true;
    if (name == "j_function") {
        double worst = 0.0, asym = 0.0;
        for (int i = 0; i < 200; ++i)
            for (int k = 0; k < 200; ++k) {
                const double x = i / 199.0, y = k / 199.0;
                worst = std::min(worst, bounds::j_function(x, y));
                asym = std::max(asym, std::abs(bounds::j_function(x, y) - bounds::j_function(y, x)));
            }
        ok = worst >= -1e-15 && asym <= 1e-15;
        out["min_value"] = worst;
        out["max_asymmetry"] = asym;
    } else if (name == "tail_integral") {
        double slack = kInf;
        for (int i = 0; i < 200; ++i) {
            const double A = 3.0 + 100.0 * U(rng), a = 0.1 + 9.9 * U(rng), b = 1.0 + U(rng);
            const auto t = bounds::tail_integral_bound(A, a, b);
            slack = std::min(slack, t.bound - t.numeric);
        }
        ok = slack >= 0.0;
        out["min_slack"] = slack;
    } else if (name == "vg_code") {
        for (int i = 0; i < 50; ++i) {
            const int m = 2 + static_cast<int>(rng() % 63);
            const auto c = bounds::vg_code(m, seed + i);
            if (c.words.size() < 1.0 + std::pow(2.0, m / 8.0) || c.min_distance() < m / 8.0) ok = false;
        }
    } else if (name == "fano") {
        for (int i = 0; i < 1000; ++i) {
            const double v = U(rng), u = U(rng) * 0.1, M = 2.0 + 100.0 * U(rng), n = 1.0 + 100.0 * U(rng);
            const auto f = bounds::fano_lower_bound_report(v, u, M, n);
            if (f.clamped < 0.0 || f.raw > v / 4.0 + 1e-15) ok = false;
            if (bounds::fano_lower_bound(v, 0.0, M, n) != v / 4.0) ok = false;
        }
    } else if (name == "degenerate") {
        const auto rep = bounds::degenerate_class_check(0.5, 20, seed);
        ok = rep.passed;
        out["max_eta"] = rep.max_eta;
        out["max_excess"] = rep.max_excess;
    } else if (name == "threshold_net") {
        for (int e = 2; e <= 8; ++e) {
            const double delta = std::ldexp(1.0, -e);
            const auto net = relunet::build_threshold_net(delta);
            for (int i = 0; i <= 10000; ++i) {
                const double t = i / 10000.0;
                const double v = net.forward(&t);
                if (t <= 0.5 && v != -1.0) ok = false;
                if (t >= 0.5 + 5.0 * delta / 14.0 && v != 1.0) ok = false;
            }
        }
    } else if (name == "noise") {
        for (const char* b : {"flat_ramp", "margin_band"}) {
            const auto bd = build_distribution(json{{"builtin", b}});
            const auto rep = dist::check_noise(bd.dist, *bd.dist.noise, {0.01, 0.05, 0.1, 0.2, 0.3});
            ok = ok && rep.passed;
        }
    } else {
        throw ParameterError("unknown property suite: " + name);
    }
    out["passed"] = ok;
    return out;
}

}  // namespace mlab::harness
