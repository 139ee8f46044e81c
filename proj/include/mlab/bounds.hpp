#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "mlab/common.hpp"
#include "mlab/dist.hpp"

namespace mlab::bounds {

using json = nlohmann::json;

struct OracleParams {
    double n = 1;
    double W = 3;
    double M = 2;
    double Gamma = 1;
    double theta = 0;
    double gamma = 0;  // 0 means an exact cover
    double J = 1;
    double H = 0;
    double eps = 0;
    double approx_term = 0;
    void validate() const;
};

struct OracleTerms {
    double cover = 0, bias = 0, variance = 0, approx = 0, total = 0;
};

OracleTerms oracle_terms(const OracleParams& p);
double oracle_rhs(const OracleParams& p);

struct OracleReport {
    double lhs_mean = 0.0;
    double lhs_se = 0.0;
    double approx_term = 0.0;
    double rhs = 0.0;      // min over the eps grid
    double best_eps = 0.0;
    std::vector<double> eps_grid, rhs_grid;
    std::size_t class_size = 0;
    std::size_t replications = 0;
    bool passed = false;
};

// classifiers: ±1-valued functions. The ERM uses empirical hinge risk with lowest-index ties.
OracleReport oracle_verify(const std::vector<ScalarFn>& classifiers, const dist::DistributionSpec& dist,
                           std::size_t n, std::size_t replications, std::uint64_t seed, int resolution = 0);

struct TailIntegral {
    double bound = 0.0;
    double numeric = 0.0;
};

TailIntegral tail_integral_bound(double A, double a, double b);

double j_function(double x, double y);
double excess_sum_separation(const ScalarFn& eta1, const ScalarFn& eta2, const dist::MarginalSpec& marginal,
                             int resolution = 0, int align = 0);

struct VGCode {
    int m = 0;
    std::vector<std::vector<std::uint8_t>> words;
    int min_distance() const;
};

VGCode vg_code(int m, std::uint64_t seed, std::size_t max_draws = 2000000);

struct FanoValue {
    double raw = 0.0;
    double clamped = 0.0;
};

double fano_lower_bound(double v, double u, double M, double n);
FanoValue fano_lower_bound_report(double v, double u, double M, double n);
double lecam_lower_bound(double v, double affinity);
double rate_exponent(double beta, int q, int d_lower, double s);

struct DegenerateReport {
    bool passed = true;
    std::size_t members = 0;
    double max_eta = 0.0;
    double max_excess = 0.0;
};

// Random members of the r-capped class; checks the constant -1 classifier has zero excess 0-1 risk.
DegenerateReport degenerate_class_check(double r, std::size_t count, std::uint64_t seed, int d = 2);

struct PipelineRow {
    std::size_t n = 0;
    int Q = 0, M = 0;
    double eps = 0.0;
    double separation = 0.0;  // min over checked pairs of ∫J
    double kl = 0.0;          // mean KL(P_j || P_0)
    double fano_raw = 0.0;
    double fano_value = 0.0;  // clamped
    double formula_value = 0.0;  // with the family's own v and u bounds
};

std::vector<PipelineRow> lower_bound_pipeline(const std::vector<std::size_t>& n_values, double s, double alpha,
                                              double Lambda, double beta, int q, int K, int d, int d_lower,
                                              std::uint64_t seed);
void write_pipeline_csv(const std::vector<PipelineRow>& rows, const std::string& path);

}  // namespace mlab::bounds
