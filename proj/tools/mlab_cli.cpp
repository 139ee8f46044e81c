#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "mlab/bounds.hpp"
#include "mlab/harness.hpp"

using json = nlohmann::json;
using namespace mlab;

int main(int argc, char** argv) {
    CLI::App app{"mlab: classification rate laboratory"};
    app.require_subcommand(1);

    // run
    auto* run = app.add_subcommand("run", "run a rate experiment from a JSON config");
    std::string config_path;
    run->add_option("config", config_path, "config file")->required()->check(CLI::ExistingFile);

    // verify
    auto* verify = app.add_subcommand("verify", "run a named property suite (or 'all')");
    std::string suite = "all";
    std::uint64_t vseed = 1;
    verify->add_option("suite", suite, "suite name");
    verify->add_option("--seed", vseed, "seed");

    // bounds
    auto* bnd = app.add_subcommand("bounds", "one-shot bound calculators");
    bnd->require_subcommand(1);
    auto* oracle = bnd->add_subcommand("oracle", "oracle inequality right-hand side");
    bounds::OracleParams op;
    oracle->add_option("--n", op.n)->required();
    oracle->add_option("--W", op.W)->required();
    oracle->add_option("--M", op.M);
    oracle->add_option("--Gamma", op.Gamma);
    oracle->add_option("--theta", op.theta);
    oracle->add_option("--gamma", op.gamma);
    oracle->add_option("--J", op.J);
    oracle->add_option("--eps", op.eps);
    oracle->add_option("--approx", op.approx_term);

    auto* fano = bnd->add_subcommand("fano", "Fano lower bound");
    double fv = 0, fu = 0, fM = 2, fn = 1;
    fano->add_option("--v", fv)->required();
    fano->add_option("--u", fu)->required();
    fano->add_option("--M", fM)->required();
    fano->add_option("--n", fn)->required();

    auto* lecam = bnd->add_subcommand("lecam", "Le Cam lower bound");
    double lv = 0, laff = 1;
    lecam->add_option("--v", lv)->required();
    lecam->add_option("--affinity", laff)->required();

    auto* rate = bnd->add_subcommand("rate", "minimax rate exponent");
    double rbeta = 1, rs = 0;
    int rq = 0, rd = 1;
    std::string rs_text;
    rate->add_option("--beta", rbeta);
    rate->add_option("--q", rq);
    rate->add_option("--d-lower", rd);
    rate->add_option("--s", rs_text, "number or 'inf'");

    auto* tail = bnd->add_subcommand("tail", "tail integral bound");
    double tA = 3, ta = 1, tb = 1;
    tail->add_option("--A", tA);
    tail->add_option("--a", ta);
    tail->add_option("--b", tb);

    auto* jf = bnd->add_subcommand("j", "J function");
    double jx = 0, jy = 0;
    jf->add_option("x", jx)->required();
    jf->add_option("y", jy)->required();

    auto* pipe = bnd->add_subcommand("pipeline", "lower-bound pipeline over n");
    std::vector<std::size_t> pn{1000, 4000, 16000};
    double ps = 0, palpha = 1, pLambda = 2, pbeta = 1;
    int pq = 0, pK = 1, pd = 1, pdl = 1;
    std::uint64_t pseed = 1;
    std::string pcsv;
    pipe->add_option("--n", pn)->delimiter(',');
    pipe->add_option("--s", ps);
    pipe->add_option("--alpha", palpha);
    pipe->add_option("--Lambda", pLambda);
    pipe->add_option("--beta", pbeta);
    pipe->add_option("--q", pq);
    pipe->add_option("--K", pK);
    pipe->add_option("--d", pd);
    pipe->add_option("--d-lower", pdl);
    pipe->add_option("--seed", pseed);
    pipe->add_option("--csv", pcsv);

    // plot
    auto* plot = app.add_subcommand("plot", "re-render the log-log plot from a results CSV");
    std::string csv_in, svg_out;
    double theory = 0.0;
    plot->add_option("csv", csv_in)->required()->check(CLI::ExistingFile);
    plot->add_option("svg", svg_out)->required();
    plot->add_option("--theory", theory, "theoretical rate exponent");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            const auto cfg = harness::load_config(config_path);
            const auto rep = harness::run_rate_experiment(cfg);
            harness::emit_report(rep, cfg.out_csv, cfg.out_json, cfg.out_plot);
            std::cout << harness::report_to_json(rep).dump(2) << '\n';
            return rep.passed ? 0 : 1;
        }
        if (*verify) {
            std::vector<std::string> names = suite == "all" ? harness::property_suites() : std::vector<std::string>{suite};
            bool ok = true;
            json out = json::array();
            for (const auto& n : names) {
                auto r = harness::run_property_suite(n, vseed);
                ok = ok && r["passed"].get<bool>();
                out.push_back(r);
            }
            std::cout << out.dump(2) << '\n';
            return ok ? 0 : 1;
        }
        if (*bnd) {
            json out;
            if (*oracle) {
                const auto t = bounds::oracle_terms(op);
                out = {{"cover", t.cover}, {"bias", t.bias}, {"variance", t.variance}, {"approx", t.approx}, {"total", t.total}};
            } else if (*fano) {
                const auto f = bounds::fano_lower_bound_report(fv, fu, fM, fn);
                out = {{"raw", f.raw}, {"clamped", f.clamped}};
            } else if (*lecam) {
                out = {{"value", bounds::lecam_lower_bound(lv, laff)}};
            } else if (*rate) {
                if (!rs_text.empty()) rs = rs_text == "inf" ? kInf : std::stod(rs_text);
                out = {{"exponent", bounds::rate_exponent(rbeta, rq, rd, rs)}};
            } else if (*tail) {
                const auto t = bounds::tail_integral_bound(tA, ta, tb);
                out = {{"bound", t.bound}, {"numeric", t.numeric}};
            } else if (*jf) {
                out = {{"value", bounds::j_function(jx, jy)}};
            } else if (*pipe) {
                const auto rows = bounds::lower_bound_pipeline(pn, ps, palpha, pLambda, pbeta, pq, pK, pd, pdl, pseed);
                if (!pcsv.empty()) bounds::write_pipeline_csv(rows, pcsv);
                out = json::array();
                for (const auto& r : rows)
                    out.push_back({{"n", r.n}, {"Q", r.Q}, {"M", r.M}, {"eps", r.eps}, {"separation", r.separation},
                                   {"kl", r.kl}, {"fano_raw", r.fano_raw}, {"fano_value", r.fano_value},
                                   {"formula_value", r.formula_value}});
            }
            std::cout << out.dump(2) << '\n';
            return 0;
        }
        if (*plot) {
            auto rep = harness::summarize(harness::read_rows_csv(csv_in), theory, std::nullopt);
            harness::emit_report(rep, "", "", svg_out);
            std::cout << harness::report_to_json(rep).dump(2) << '\n';
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
