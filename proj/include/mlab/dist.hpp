#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "mlab/common.hpp"
#include "mlab/funcspace.hpp"

namespace mlab::dist {

using json = nlohmann::json;

struct NoiseProfile {
    double s = 0.0;  // kInf encodes s = ∞
    double alpha = 1.0;
    double tau = 1.0;  // kInf allowed
    void validate() const;
    // s/(s+1), with 1 for s = ∞
    double theta() const { return std::isinf(s) ? 1.0 : s / (s + 1.0); }
};

struct MarginalSpec {
    std::string kind = "lebesgue";  // lebesgue | density
    int dim = 1;
    ScalarFn density;               // kind == density
    double Lambda = 1.0;            // declared upper bound of the density
    int align = 0;                  // density breakpoints are multiples of 1/align (0: unknown)
    json descriptor;                // enough to rebuild the density

    double value(const double* x) const { return kind == "lebesgue" ? 1.0 : density(x); }
    std::vector<int> active() const { return kind == "lebesgue" ? std::vector<int>{} : density.active; }
};

MarginalSpec lebesgue(int dim);
// Density piecewise constant in one coordinate: value[i] on [breaks[i], breaks[i+1]).
MarginalSpec bands(int dim, int coord, std::vector<double> breaks, std::vector<double> values, int align = 0);
MarginalSpec marginal_from_json(const json& j);
json marginal_to_json(const MarginalSpec& m);

struct DistributionSpec {
    int dim = 1;
    ScalarFn eta;
    MarginalSpec marginal;
    std::optional<NoiseProfile> noise;
    std::optional<funcspace::CompositionalFunction> eta_chom;  // set when η is a compositional function
    int align = 0;  // breakpoints of η and the density are multiples of 1/align (0: unknown)
    std::string label;
};

DistributionSpec make_distribution(const funcspace::CompositionalFunction& eta, MarginalSpec marginal,
                                   std::optional<NoiseProfile> noise = std::nullopt, int align = 0);
DistributionSpec make_distribution(ScalarFn eta, MarginalSpec marginal,
                                   std::optional<NoiseProfile> noise = std::nullopt, int align = 0);
json distribution_to_json(const DistributionSpec& d);
DistributionSpec distribution_from_json(const json& j);

struct Dataset {
    int dim = 1;
    std::vector<double> x;  // row-major, size n*dim
    std::vector<int> y;     // ±1
    std::uint64_t seed = 0;

    std::size_t size() const { return y.size(); }
    const double* row(std::size_t i) const { return x.data() + i * dim; }
};

void write_csv(const Dataset& data, const std::string& path);

// Cells per listed coordinate for quadrature, honoring an alignment and a 2^22 total-cell cap.
int default_resolution(int align, int ncoords);

// Midpoint-rule table of (point, mass under the marginal). Cells of zero mass are dropped.
struct QuadTable {
    int dim = 1;
    std::vector<int> coords;
    int res = 1;
    std::vector<double> pts;   // row-major
    std::vector<double> mass;  // V(x) * cell volume
    std::size_t size() const { return mass.size(); }
    const double* point(std::size_t i) const { return pts.data() + i * dim; }
};

QuadTable quad_table_on(const MarginalSpec& m, const std::vector<int>& coords, int res);
// Table over the coordinates used by the marginal and the listed functions.
QuadTable quad_table(const MarginalSpec& m, const std::vector<const ScalarFn*>& fns, int res = 0, int align = 0);

Dataset sample(const DistributionSpec& dist, std::size_t n, std::uint64_t seed);

enum class Method { quadrature, monte_carlo };

struct NoiseRow {
    double t = 0.0;
    double measure = 0.0;
    double bound = 0.0;
    double slack = 0.0;
    double std_error = 0.0;
};

struct NoiseReport {
    bool passed = true;
    std::vector<NoiseRow> rows;
};

NoiseReport check_noise(const DistributionSpec& dist, const NoiseProfile& profile, const std::vector<double>& t_grid,
                        Method method = Method::quadrature, int resolution = 0, std::size_t mc_samples = 100000,
                        std::uint64_t seed = 1);

double radon_nikodym(double eta1, double eta2, int y);
double radon_nikodym(const ScalarFn& eta1, const ScalarFn& eta2, const double* x, int y);

// a1 log(a1/a2) + (1-a1) log((1-a1)/(1-a2)) with 0 log 0 = 0
double kl_bernoulli(double a1, double a2);
double kl_divergence(const ScalarFn& eta1, const ScalarFn& eta2, const MarginalSpec& marginal, int resolution = 0);

struct LowerBoundOptions {
    double mass_constant = 256.0;  // the 256 in min{α, (Λ-1)/(256Λ)}
    std::optional<double> tau;
    std::size_t max_words = 100000;
};

struct LowerBoundFamily {
    std::vector<DistributionSpec> members;               // M+1 entries
    std::vector<funcspace::CompositionalFunction> etas;  // same order
    std::vector<funcspace::GridCode> codes;
    std::vector<std::size_t> grid_cells;  // G_{Q,d*,Λ}, as cell indices
    int Q = 1, M = 1, m = 1;
    double eps = 0.0, c1 = 0.0, c2 = 0.0, radius = 0.0;
    double a0_volume = 0.0;  // Lebesgue measure of A0
    double a0_mass = 0.0;    // marginal mass of A0
    double Lambda = 2.0;
    funcspace::BumpSpec bump;
    NoiseProfile noise;
    int align = 0;
    double plateau_halfwidth = 0.0;  // of each D_a
};

LowerBoundFamily build_lower_bound_family(int Q, double s, double alpha, double Lambda, double beta, int q, int K,
                                          int d, int d_lower, std::uint64_t seed,
                                          const LowerBoundOptions& opt = {});
// Q = floor(n^{1/(d*+(s+2)β(1∧β)^q)}) + 1
int lower_bound_grid_size(std::size_t n, double s, double beta, int q, int d_lower);

struct TwoPointFamily {
    DistributionSpec P0, P1, P2;
    double Lambda = 2.0;
    std::size_t n = 1;
};

TwoPointFamily build_twopoint_family(double Lambda, std::size_t n, double beta, int q, int K, int d, int d_lower);

// 1 - ½‖P_{η0}^n - P_{η1}^n‖₁ for a shared marginal, by enumerating count vectors over
// the finitely many distinct (cell value, label) outcomes of the quadrature table.
double product_affinity(const ScalarFn& eta0, const ScalarFn& eta1, const MarginalSpec& marginal, std::size_t n,
                        int resolution = 0, int align = 0, std::size_t max_states = 20000000);

}  // namespace mlab::dist
