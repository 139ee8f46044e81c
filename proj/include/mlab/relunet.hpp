#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "mlab/common.hpp"
#include "mlab/funcspace.hpp"

namespace mlab::relunet {

using json = nlohmann::json;

// Sparse row storage; every matrix built here is mostly zeros.
struct Matrix {
    int rows = 0, cols = 0;
    std::vector<std::vector<std::pair<int, double>>> r;

    Matrix() = default;
    Matrix(int rows_, int cols_) : rows(rows_), cols(cols_), r(rows_) {}
    // adds val to entry (i, j)
    void add(int i, int j, double val);
    double get(int i, int j) const;
    std::size_t nnz() const;
    double max_abs() const;
};

Matrix matmul(const Matrix& A, const Matrix& B);

// f(x) = W_L σ_{v_L} W_{L-1} … σ_{v_1} W_0 x with σ_v(z) = max(0, z - v).
// W has L+1 matrices, v has L shift vectors; v[i] belongs to the output of W[i].
struct ReluNetwork {
    int input_dim = 1;
    std::vector<Matrix> W;
    std::vector<std::vector<double>> v;

    int depth() const { return static_cast<int>(v.size()); }
    int output_dim() const { return W.back().rows; }
    std::vector<double> forward_vec(const double* x) const;
    double forward(const double* x) const;
    double forward(const std::vector<double>& x) const;
    ScalarFn as_scalar_fn() const;
};

double forward(const ReluNetwork& net, const std::vector<double>& x);

struct NetworkBudget {
    double G = 1, N = 1, S = 1, B = 1, F = kInf;
    void validate() const;
};

struct BudgetAccount {
    int depth = 0;
    int width = 0;
    std::size_t nnz = 0;
    double max_abs = 0.0;
    double sup_estimate = 0.0;
    bool within(const NetworkBudget& b) const;
};

BudgetAccount budget_of(const ReluNetwork& net, int sup_grid_resolution = 0);

json to_json(const ReluNetwork& net);
ReluNetwork network_from_json(const json& j);

// L = 0 network computing W x
ReluNetwork affine_net(const Matrix& W);
ReluNetwork zero_net(int input_dim);
// outer ∘ inner; the joint matrix is W_0(outer) · W_L(inner)
ReluNetwork compose(const ReluNetwork& outer, const ReluNetwork& inner);
// Appends `extra` layers; nonneg outputs pass through σ, others through σ(z) - σ(-z).
ReluNetwork pad_depth(const ReluNetwork& net, int extra, bool nonneg);
// Same input, outputs concatenated. Depths equalized with pad_depth.
ReluNetwork parallel(const std::vector<ReluNetwork>& nets, bool nonneg);
// Coordinatewise clamp to [0,1] of a k-vector: σ(z) - σ(z - 1)
ReluNetwork clamp01_net(int k);

int threshold_k(double delta);
ReluNetwork build_threshold_net(double delta);
// closed form of the threshold map for reference
double threshold_reference(double delta, double t);

struct ApproxOptions {
    std::size_t node_cap = 400000;    // interpolation nodes per component
    int start_cells = 1;
    int max_rounds = 200;
};

struct ApproxResult {
    ReluNetwork net;
    int cells = 0;          // grid cells per axis used by the Hölder interpolants
    double grid_error = 0;  // max |net - f| on the validation grid
};

// Validation grid: 4097 nodes per dimension for one active input, capped at 10^6 nodes overall.
double grid_sup_error(const ReluNetwork& net, const funcspace::CompositionalFunction& f);
ApproxResult approximate_chom_detailed(const funcspace::CompositionalFunction& f, double delta,
                                       const ApproxOptions& opt = {});
ReluNetwork approximate_chom(const funcspace::CompositionalFunction& f, double delta, const ApproxOptions& opt = {});

struct ClassifierNet {
    ReluNetwork net;
    ApproxResult inner;
    bool regions_ok = true;
};

ClassifierNet build_classifier_net_detailed(const funcspace::CompositionalFunction& f, double delta,
                                            const ApproxOptions& opt = {});
ReluNetwork build_classifier_net(const funcspace::CompositionalFunction& f, double delta,
                                 const ApproxOptions& opt = {});

}  // namespace mlab::relunet
