#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "mlab/common.hpp"
#include "mlab/dist.hpp"
#include "mlab/estimators.hpp"

namespace mlab::harness {

using json = nlohmann::json;

struct TheoryParams {
    double beta = 1.0;
    int q = 0;
    int d_lower = 1;
    double s = 0.0;
};

struct ExperimentConfig {
    json distribution;                   // {"builtin": name, ...} or {"spec": distribution json}
    std::string estimator = "covering_net";  // covering_net | gradient_erm | finite_threshold
    std::vector<std::size_t> n_grid;
    int seeds_per_n = 5;
    std::uint64_t master_seed = 1;
    std::string risk_method = "quadrature";
    int resolution = 0;  // quadrature cells per coordinate (0: default) or MC samples
    double a = 1.0, b = 2.0;
    estimators::TrainConfig train;
    estimators::CoverParams cover;
    std::size_t cover_cap = 200000;
    int threshold_coord = 0;
    std::optional<TheoryParams> theory;           // defaults from the distribution
    std::optional<std::pair<double, double>> slope_band;
    std::string out_csv, out_json, out_plot;
    bool record_wallclock = false;

    void validate() const;
};

ExperimentConfig config_from_json(const json& j);
ExperimentConfig load_config(const std::string& path);

// A distribution plus the experiment defaults that come with it.
struct BuiltDistribution {
    dist::DistributionSpec dist;
    TheoryParams theory;
    estimators::CoverParams cover;
    double cover_s = 0.0;
    double cover_tau = 1.0;
};

// Builtins: "flat_ramp" {d, amplitude, gamma, r}, "margin_band" {d, low, high, gap}.
BuiltDistribution build_distribution(const json& j);

struct RateRow {
    std::size_t n = 0;
    int seed_index = 0;
    std::uint64_t seed = 0;
    std::string estimator;
    double excess01 = 0.0;
    double excess_hinge = 0.0;
    double wallclock_ms = 0.0;
    std::string status = "ok";
};

struct FitResult {
    double slope = 0.0, intercept = 0.0, ci_halfwidth = 0.0;
    std::size_t points = 0;
};

struct RateReport {
    std::vector<RateRow> rows;
    std::vector<std::size_t> ns;
    std::vector<double> mean, median;
    FitResult fit;
    bool fit_ok = false;
    std::string fit_error;
    double theoretical_exponent = 0.0;
    std::optional<std::pair<double, double>> slope_band;
    std::size_t failures = 0;
    bool passed = false;
};

// Returns a classifier or score function for one (dataset, seed).
using EstimatorFn = std::function<ScalarFn(const dist::Dataset&, std::uint64_t)>;

RateReport run_rate_experiment(const ExperimentConfig& cfg);
// Same loop with an explicit distribution and estimator.
RateReport run_rate_experiment(const ExperimentConfig& cfg, const BuiltDistribution& bd, const EstimatorFn& est);
// Aggregation and fitting over finished rows.
RateReport summarize(std::vector<RateRow> rows, double theoretical_exponent,
                     std::optional<std::pair<double, double>> slope_band);

// OLS of log value on log n, CI from Student t. Throws FitError on nonpositive values or < 3 points.
FitResult fit_rate(const std::vector<std::pair<double, double>>& points);

json report_to_json(const RateReport& r);
void write_rows_csv(const std::vector<RateRow>& rows, const std::string& path);
std::vector<RateRow> read_rows_csv(const std::string& path);
std::string render_svg(const RateReport& r);
// Writes the CSV, JSON summary and SVG plot. Empty paths are skipped.
void emit_report(const RateReport& r, const std::string& csv, const std::string& json_path, const std::string& svg);

// Small named property checks used by the CLI `verify` subcommand.
json run_property_suite(const std::string& name, std::uint64_t seed);
std::vector<std::string> property_suites();

}  // namespace mlab::harness
