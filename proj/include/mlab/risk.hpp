#pragma once

#include <string>

#include "json.hpp"

#include "mlab/common.hpp"
#include "mlab/dist.hpp"

namespace mlab::risk {

enum class Loss { zero_one, hinge, logistic };

Loss loss_from_string(const std::string& s);
std::string to_string(Loss l);

double truncate(double F, double t);
// zero_one treats margin < 0 as a mistake; use pointwise_loss when the sign of f itself matters.
double loss_value(Loss loss, double margin);
// Loss of predicting with score fx on label y; zero_one uses sgn(fx) with sgn(0) = +1.
double pointwise_loss(Loss loss, int y, double fx);
// E[loss | x] when P(y = 1 | x) = eta
double conditional_risk(Loss loss, double eta, double fx);
double bayes_conditional_risk(Loss loss, double eta);

struct RiskReport {
    double risk = 0.0;
    double bayes_risk = 0.0;
    double excess = 0.0;
    dist::Method method = dist::Method::quadrature;
    double error_estimate = 0.0;
    bool precision_warning = false;
};

nlohmann::json to_json(const RiskReport& r);

// resolution_or_samples: quadrature cells per active coordinate (0: default) or Monte Carlo sample count.
RiskReport excess_risk(const ScalarFn& f, const dist::DistributionSpec& d, Loss loss,
                       dist::Method method = dist::Method::quadrature, std::size_t resolution_or_samples = 0,
                       std::uint64_t seed = 1);

// Precomputed quadrature for repeatedly scoring classifiers against one distribution.
class RiskTable {
public:
    RiskTable(const dist::DistributionSpec& d, const std::vector<int>& coords, int res);
    // excess 0-1 risk of f
    double excess01(const ScalarFn& f) const;
    // excess hinge risk of T_1∘f
    double excess_hinge(const ScalarFn& f) const;
    const dist::QuadTable& table() const { return tab_; }

private:
    dist::QuadTable tab_;
    std::vector<double> eta_;
};

struct PredicateReport {
    bool passed = true;
    double lhs = 0.0, rhs = 0.0, slack = 0.0;
    double lhs2 = 0.0, rhs2 = 0.0, slack2 = 0.0;  // second inequality where applicable
};

// ∫|f-g|² dP_X ≤ 6 (E^hinge(f))^{s/(s+1)} max{1, α, 1/τ}, g the Bayes classifier
PredicateReport variance_bound_check(const ScalarFn& f, const dist::DistributionSpec& d,
                                     const dist::NoiseProfile& profile, int resolution = 0);
// E(f) ≤ E^hinge(T_1∘f) and E(f) ≤ √2 (E^logistic(f))^{1/2}
PredicateReport comparison_check(const ScalarFn& f, const dist::DistributionSpec& d, int resolution = 0);

}  // namespace mlab::risk
