#include "mlab/risk.hpp"

#include <algorithm>
#include <cmath>

namespace mlab::risk {

Loss loss_from_string(const std::string& s) {
    if (s == "zero_one") return Loss::zero_one;
    if (s == "hinge") return Loss::hinge;
    if (s == "logistic") return Loss::logistic;
    throw ParameterError("unknown loss: " + s);
}

std::string to_string(Loss l) {
    switch (l) {
        case Loss::zero_one: return "zero_one";
        case Loss::hinge: return "hinge";
        case Loss::logistic: return "logistic";
    }
    return "?";
}

double truncate(double F, double t) {
    if (!(F > 0.0)) throw ParameterError("truncation level must be positive");
    return std::clamp(t, -F, F);
}

namespace {
// log(1 + e^{-t}) without overflow
double softplus_neg(double t) {
    return t > 0 ? std::log1p(std::exp(-t)) : -t + std::log1p(std::exp(t));
}
}  // namespace

double loss_value(Loss loss, double margin) {
    switch (loss) {
        case Loss::zero_one: return margin < 0.0 ? 1.0 : 0.0;
        case Loss::hinge: return std::max(0.0, 1.0 - margin);
        case Loss::logistic: return softplus_neg(margin);
    }
    return 0.0;
}

double pointwise_loss(Loss loss, int y, double fx) {
    if (loss == Loss::zero_one) return sgn(fx) == static_cast<double>(y) ? 0.0 : 1.0;
    return loss_value(loss, y * fx);
}

double conditional_risk(Loss loss, double eta, double fx) {
    if (loss == Loss::zero_one) return sgn(fx) > 0 ? 1.0 - eta : eta;
    // 0·w = 0 so infinite losses on impossible labels do not leak in
    const double a = eta == 0.0 ? 0.0 : eta * loss_value(loss, fx);
    const double b = eta == 1.0 ? 0.0 : (1.0 - eta) * loss_value(loss, -fx);
    return a + b;
}

double bayes_conditional_risk(Loss loss, double eta) {
    switch (loss) {
        case Loss::zero_one: return std::min(eta, 1.0 - eta);
        case Loss::hinge: return 1.0 - std::abs(2.0 * eta - 1.0);
        case Loss::logistic: {
            auto h = [](double p) { return p == 0.0 ? 0.0 : -p * std::log(p); };
            return h(eta) + h(1.0 - eta);
        }
    }
    return 0.0;
}

nlohmann::json to_json(const RiskReport& r) {
    return {{"risk", r.risk},
            {"bayes_risk", r.bayes_risk},
            {"excess", r.excess},
            {"method", r.method == dist::Method::quadrature ? "quadrature" : "monte_carlo"},
            {"error_estimate", r.error_estimate},
            {"precision_warning", r.precision_warning}};
}

RiskReport excess_risk(const ScalarFn& f, const dist::DistributionSpec& d, Loss loss, dist::Method method,
                       std::size_t resolution_or_samples, std::uint64_t seed) {
    RiskReport rep;
    rep.method = method;
    if (method == dist::Method::quadrature) {
        const auto tab = dist::quad_table(d.marginal, {&d.eta, &f}, static_cast<int>(resolution_or_samples), d.align);
        double risk = 0.0, bayes = 0.0, excess = 0.0;
        for (std::size_t i = 0; i < tab.size(); ++i) {
            const double eta = d.eta(tab.point(i));
            const double cr = conditional_risk(loss, eta, f(tab.point(i)));
            const double br = bayes_conditional_risk(loss, eta);
            risk += tab.mass[i] * cr;
            bayes += tab.mass[i] * br;
            excess += tab.mass[i] * (cr - br);
        }
        rep.risk = risk;
        rep.bayes_risk = bayes;
        rep.excess = excess;
        rep.error_estimate = 1e-12;
    } else {
        const std::size_t n = resolution_or_samples ? resolution_or_samples : 100000;
        rep.precision_warning = n < 100;
        const auto data = dist::sample(d, n, seed);
        double s = 0.0, s2 = 0.0, r = 0.0, b = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double eta = d.eta(data.row(i));
            const double cr = conditional_risk(loss, eta, f(data.row(i)));
            const double br = bayes_conditional_risk(loss, eta);
            r += cr;
            b += br;
            s += cr - br;
            s2 += (cr - br) * (cr - br);
        }
        const double mean = s / n;
        rep.risk = r / n;
        rep.bayes_risk = b / n;
        rep.excess = mean;
        rep.error_estimate = n > 1 ? std::sqrt(std::max(0.0, s2 / n - mean * mean) / (n - 1)) : kInf;
    }
    return rep;
}

RiskTable::RiskTable(const dist::DistributionSpec& d, const std::vector<int>& coords, int res)
    : tab_(dist::quad_table_on(d.marginal, coords, res)) {
    eta_.resize(tab_.size());
    for (std::size_t i = 0; i < tab_.size(); ++i) eta_[i] = d.eta(tab_.point(i));
}

double RiskTable::excess01(const ScalarFn& f) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < tab_.size(); ++i) {
        const double m = 2.0 * eta_[i] - 1.0;
        if (sgn(f(tab_.point(i))) != sgn(m)) acc += tab_.mass[i] * std::abs(m);
    }
    return acc;
}

double RiskTable::excess_hinge(const ScalarFn& f) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < tab_.size(); ++i) {
        const double t = std::clamp(f(tab_.point(i)), -1.0, 1.0);
        acc += tab_.mass[i] *
               (conditional_risk(Loss::hinge, eta_[i], t) - bayes_conditional_risk(Loss::hinge, eta_[i]));
    }
    return acc;
}

PredicateReport variance_bound_check(const ScalarFn& f, const dist::DistributionSpec& d,
                                     const dist::NoiseProfile& profile, int resolution) {
    const auto tab = dist::quad_table(d.marginal, {&d.eta, &f}, resolution, d.align);
    double lhs = 0.0, eh = 0.0;
    for (std::size_t i = 0; i < tab.size(); ++i) {
        const double eta = d.eta(tab.point(i));
        const double fx = std::clamp(f(tab.point(i)), -1.0, 1.0);
        const double g = sgn(2.0 * eta - 1.0);
        lhs += tab.mass[i] * (fx - g) * (fx - g);
        eh += tab.mass[i] * (conditional_risk(Loss::hinge, eta, fx) - bayes_conditional_risk(Loss::hinge, eta));
    }
    eh = std::max(eh, 0.0);
    PredicateReport rep;
    rep.lhs = lhs;
    rep.rhs = 6.0 * cpow(eh, profile.theta()) * std::max({1.0, profile.alpha, 1.0 / profile.tau});
    rep.slack = rep.rhs - rep.lhs;
    rep.passed = rep.slack >= -1e-9;
    return rep;
}

PredicateReport comparison_check(const ScalarFn& f, const dist::DistributionSpec& d, int resolution) {
    const auto tab = dist::quad_table(d.marginal, {&d.eta, &f}, resolution, d.align);
    double e01 = 0.0, eh = 0.0, el = 0.0;
    for (std::size_t i = 0; i < tab.size(); ++i) {
        const double eta = d.eta(tab.point(i));
        const double fx = f(tab.point(i));
        const double w = tab.mass[i];
        e01 += w * (conditional_risk(Loss::zero_one, eta, fx) - bayes_conditional_risk(Loss::zero_one, eta));
        const double t = std::clamp(fx, -1.0, 1.0);
        eh += w * (conditional_risk(Loss::hinge, eta, t) - bayes_conditional_risk(Loss::hinge, eta));
        el += w * (conditional_risk(Loss::logistic, eta, fx) - bayes_conditional_risk(Loss::logistic, eta));
    }
    PredicateReport rep;
    rep.lhs = e01;
    rep.rhs = eh;
    rep.slack = eh - e01;
    rep.lhs2 = e01;
    rep.rhs2 = std::sqrt(2.0) * std::sqrt(std::max(el, 0.0));
    rep.slack2 = rep.rhs2 - rep.lhs2;
    rep.passed = rep.slack >= -1e-12 && rep.slack2 >= -1e-12;
    return rep;
}

}  // namespace mlab::risk
