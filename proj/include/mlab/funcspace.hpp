#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "mlab/common.hpp"

namespace mlab::funcspace {

using json = nlohmann::json;

// Piecewise-linear interpolation through values at knots j*h, j = 0..npts-1.
// Points past the last knot use the last segment. Shared by table cores and the covering-net DP.
inline double interp1(const double* vals, int npts, double h, double x) {
    if (npts == 1) return vals[0];
    int j = static_cast<int>(std::floor(x / h));
    if (j < 0) j = 0;
    if (j > npts - 2) j = npts - 2;
    const double lam = (x - j * h) / h;
    return (1.0 - lam) * vals[j] + lam * vals[j + 1];
}

// Generalized smoothstep of order N (degree 2N+1): 0 at 0, 1 at 1, N flat derivatives at both ends.
double smoothstep(int order, double t);
// Order used for smoothness beta.
int smoothstep_order(double beta);

struct BumpSpec {
    int dim = 1;
    double inner_radius = 0.25;
    double outer_radius = 0.45;
    double beta = 1.0;
    void validate() const;
};

// 1 on the inner cube, 0 outside the outer cube, smoothstep in sup-norm radius between.
double bump(const BumpSpec& spec, const double* x);

// Cells of the grid G_{Q,dim} are indexed by k_0 + Q*k_1 + Q^2*k_2 + ...
// with center ((2k_i+1)/(2Q))_i.
struct GridCode {
    int Q = 1;
    int dim = 1;
    std::vector<std::uint8_t> bits;  // size Q^dim
};

std::size_t cell_index(int Q, int dim, const double* x);
std::vector<double> cell_center(int Q, int dim, std::size_t index);

double bump_grid_sum(const GridCode& code, double amplitude, double beta, const BumpSpec& spec, const double* x);
// Sums every translate; used as a reference for the single-cell evaluation.
double bump_grid_sum_naive(const GridCode& code, double amplitude, double beta, const BumpSpec& spec, const double* x);

// Grid sup norm plus max order-(beta∧1) difference quotient over node pairs.
double holder_seminorm_probe(const ScalarFn& f, double beta, int grid_resolution);

// Core function on [0,1]^dim. Serializable unless kind == "custom".
struct Core {
    std::string kind;
    int dim = 1;
    json params;
    std::function<double(const double*)> fn;

    double operator()(const double* z) const { return fn(z); }
};

Core core_constant(int dim, double c);
// bias + sum w_i z_i
Core core_linear(std::vector<double> weights, double bias);
// offset + scale * |z_coord|^exponent
Core core_power(int dim, int coord, double exponent, double scale, double offset);
// Piecewise-multilinear on knots j*spacing[i], j = 0..shape[i]-1; values indexed with axis 0 fastest.
Core core_table(std::vector<int> shape, std::vector<double> spacing, std::vector<double> values);
// Lower-bound family core: offset + w_bump * bump_grid_sum(code, amplitude) + w_ramp * ramp(z_0),
// ramp rising from 0 at ramp_lo to 1 at ramp_hi.
struct BumpFamilyParams {
    GridCode code;
    double amplitude = 0.0;
    double beta = 1.0;
    BumpSpec spec;
    double w_bump = 1.0;
    double w_ramp = 0.0;
    double ramp_lo = 0.25;
    double ramp_hi = 0.5;
    double offset = 0.0;
};
Core core_bump_family(const BumpFamilyParams& p);
double ramp(double beta, double lo, double hi, double t);
Core core_custom(int dim, std::function<double(const double*)> fn);

Core core_from_json(const json& j);
json core_to_json(const Core& c);

struct HolderComponent {
    int input_dim = 1;
    std::vector<int> active;  // 0-based into the layer input
    Core core;
    double beta = 1.0;
    double radius = 1.0;
};

struct MaxComponent {
    int input_dim = 1;
    std::vector<int> active;  // 0-based
};

using Component = std::variant<HolderComponent, MaxComponent>;

double eval_component(const Component& c, const double* z);

struct CompositionalFunction {
    int d = 1, q = 0, K = 1, d_star = 1, d_lower = 1;
    double beta = 1.0, radius = 1.0;
    std::vector<std::vector<Component>> layers;

    double eval(const double* x) const;
    double eval(const std::vector<double>& x) const { return eval(x.data()); }
    // Coordinates of x that the value depends on.
    std::vector<int> active_inputs() const;
    ScalarFn as_scalar_fn() const;
};

// Evaluates with domain and range checks. Throws DomainError / RangeViolation.
double eval_chom(const CompositionalFunction& f, const double* x);
inline double eval_chom(const CompositionalFunction& f, const std::vector<double>& x) {
    return eval_chom(f, x.data());
}

struct CheckResult {
    std::string name;
    bool passed = true;
    std::string message;
    std::vector<double> witness;
};

struct ValidationReport {
    bool passed = true;
    std::vector<CheckResult> checks;
    const CheckResult* find(const std::string& name) const;
};

ValidationReport validate_chom(const CompositionalFunction& f, int grid_resolution = 33);

json chom_to_json(const CompositionalFunction& f);
CompositionalFunction chom_from_json(const json& j);

// Convenience builders
HolderComponent holder_component(int input_dim, std::vector<int> active, Core core, double beta, double radius);
MaxComponent max_component(int input_dim, std::vector<int> active);
// q = 0, one Hölder component over the listed coordinates
CompositionalFunction single_layer(int d, std::vector<int> active, Core core, double beta, double radius, int d_star = 1);

}  // namespace mlab::funcspace
