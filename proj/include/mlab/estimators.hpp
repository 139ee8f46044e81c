#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mlab/common.hpp"
#include "mlab/dist.hpp"
#include "mlab/funcspace.hpp"
#include "mlab/relunet.hpp"
#include "mlab/risk.hpp"

namespace mlab::estimators {

struct TrainConfig {
    double step_size = 0.5;
    int iterations = 400;
    std::size_t minibatch = 0;  // 0: full batch
    int restarts = 3;
    int hidden_layers = 0;      // 0: min(G, 2)
    int width = 0;              // 0: N
    bool clip = true;
    bool prune = true;
    std::uint64_t seed = 1;
    void validate() const;
};

relunet::ReluNetwork erm_gradient(const dist::Dataset& data, const relunet::NetworkBudget& budget, risk::Loss loss,
                                  const TrainConfig& cfg);
double empirical_risk(const ScalarFn& f, const dist::Dataset& data, risk::Loss loss);

relunet::NetworkBudget hyperparam_schedule(double n, double beta, int q, int d_lower, double s, double a, double b);

struct CoverParams {
    int q = 0, K = 1, d_star = 1, d_lower = 1;
    double beta = 1.0, r = 1.0;
    int d = 1;
};

// Lattice geometry of the Hölder-core grid-net at radius xi.
struct Lattice {
    double h = 1.0;     // knot spacing
    int knots = 2;      // knots j*h, j = 0..knots-1, last one at or past 1
    double dv = 0.5;    // value spacing
    int levels = 3;     // values l*dv, l = 0..levels-1
};
Lattice lattice_for(const CoverParams& p, double xi);

// Number of knot-value sequences with consecutive levels differing by at most one.
long double chain_count(int knots, int levels);
// Log-space variant for sizes beyond long double.
long double log_chain_count(int knots, int levels);

// A slot choice: a Hölder core from the grid-net over index set I, or a max over index subset.
struct ChoiceGroup {
    bool is_max = false;
    std::vector<int> indices;  // 0-based into the layer input
    long double count = 1;     // members contributed
    std::vector<std::vector<int>> tables;  // explicit level tables for d_lower >= 2
};

struct CoveringNet {
    CoverParams params;
    double xi = 1.0;
    Lattice lattice;
    // layer-major slots; each slot lists its choice groups in enumeration order
    std::vector<std::vector<ChoiceGroup>> slots;
    std::vector<int> slot_layer;
    long double log_count = 0;
    std::size_t cap = 200000;

    // count as a double (may be inf)
    double count() const { return static_cast<double>(std::exp(log_count)); }
    bool enumerable() const;
    funcspace::CompositionalFunction member(std::size_t index) const;
    std::vector<funcspace::CompositionalFunction> members() const;
    // q = 0 with a single-coordinate core: ERM by dynamic programming instead of enumeration
    bool chain_only() const;
};

CoveringNet build_covering_net(const CoverParams& params, double xi, std::size_t cap = 200000);

struct FiniteClassifierSet {
    std::vector<ScalarFn> members;
};

// sgn(2f - 1) for each f
FiniteClassifierSet classifiers_from(const std::vector<funcspace::CompositionalFunction>& fs);
ScalarFn sign_classifier(const funcspace::CompositionalFunction& f);

std::size_t erm_finite(const dist::Dataset& data, const FiniteClassifierSet& classifiers, risk::Loss loss);
std::vector<double> empirical_risks(const dist::Dataset& data, const FiniteClassifierSet& classifiers,
                                    risk::Loss loss);

struct ErmChoice {
    std::optional<funcspace::CompositionalFunction> f;  // absent for plain threshold classifiers
    ScalarFn classifier;
    double empirical_hinge = 0.0;
    std::size_t errors = 0;
};

// Exact ERM over the covering net (hinge loss of the sign classifiers, lowest index on ties).
ErmChoice erm_covering(const dist::Dataset& data, const CoveringNet& net);
// Enumerates every member; reference for erm_covering.
ErmChoice erm_covering_bruteforce(const dist::Dataset& data, const CoveringNet& net);

struct CoverProbe {
    int dim = 1;
    std::vector<int> coords;
    int points = 33;
};

std::size_t covering_number_estimate(const std::vector<ScalarFn>& members, double gamma, const CoverProbe& probe);

double covering_radius(std::size_t n, const CoverParams& params, double s, double tau);
ErmChoice covering_net_estimator(const dist::Dataset& data, const CoverParams& params, double s, double tau,
                                 std::size_t cap = 200000);

// Thresholds sgn(x_coord - θ), θ = i/(4n) for i = 0..4n, in increasing θ
ErmChoice threshold_estimator(const dist::Dataset& data, int coord);

}  // namespace mlab::estimators
