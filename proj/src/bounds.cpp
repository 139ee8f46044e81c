#include "mlab/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "mlab/funcspace.hpp"
#include "mlab/risk.hpp"

namespace mlab::bounds {

void OracleParams::validate() const {
    if (!(W >= 3.0)) throw ParameterError("oracle: W must be >= 3");
    if (!(n > 0.0)) throw ParameterError("oracle: n must be positive");
    if (!(M > 0.0 && Gamma > 0.0 && J > 0.0)) throw ParameterError("oracle: M, Gamma, J must be positive");
    if (!(gamma >= 0.0)) throw ParameterError("oracle: gamma must be >= 0");
    if (!(theta >= 0.0 && theta <= 1.0)) throw ParameterError("oracle: theta must lie in [0,1]");
    if (!(eps >= 0.0)) throw ParameterError("oracle: eps must be >= 0");
}

OracleTerms oracle_terms(const OracleParams& p) {
    p.validate();
    OracleTerms t;
    const double logW = std::log(p.W);
    t.cover = std::abs(2.0 + p.eps) * p.J * p.gamma;
    t.bias = 8.0 * p.M * (1.0 + p.eps) * logW / p.n;
    const double denom = p.n * cpow(p.eps, p.theta);
    const double inner = denom == 0.0 ? kInf : p.Gamma * (1.0 + p.eps) * (1.0 + p.eps) * logW / denom;
    t.variance = 8.0 * std::pow(inner, 1.0 / (2.0 - p.theta));
    t.approx = p.approx_term == 0.0 ? 0.0 : (1.0 + p.eps) * p.approx_term;
    t.total = t.cover + t.bias + t.variance + t.approx;
    return t;
}

double oracle_rhs(const OracleParams& p) { return oracle_terms(p).total; }

OracleReport oracle_verify(const std::vector<ScalarFn>& classifiers, const dist::DistributionSpec& dist,
                           std::size_t n, std::size_t replications, std::uint64_t seed, int resolution) {
    if (classifiers.empty()) throw ParameterError("oracle_verify needs a nonempty class");
    if (n == 0 || replications < 2) throw ParameterError("oracle_verify needs n >= 1 and at least 2 replications");
    std::vector<const ScalarFn*> fns{&dist.eta};
    for (const auto& c : classifiers) fns.push_back(&c);
    const auto coords = union_active(fns);
    const int res = resolution > 0 ? resolution : dist::default_resolution(dist.align, static_cast<int>(coords.size()));
    const risk::RiskTable table(dist, coords, res);

    std::vector<double> class_excess(classifiers.size());
    for (std::size_t k = 0; k < classifiers.size(); ++k) class_excess[k] = table.excess_hinge(classifiers[k]);

    std::vector<double> lhs(replications);
    parallel_for(replications, [&](std::size_t r) {
        const auto data = dist::sample(dist, n, mix_seed(seed, r));
        std::size_t best = 0;
        double best_risk = kInf;
        for (std::size_t k = 0; k < classifiers.size(); ++k) {
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                acc += risk::pointwise_loss(risk::Loss::hinge, data.y[i],
                                            std::clamp(classifiers[k](data.row(i)), -1.0, 1.0));
            if (acc < best_risk) {
                best_risk = acc;
                best = k;
            }
        }
        lhs[r] = class_excess[best];
    });

    OracleReport rep;
    rep.class_size = classifiers.size();
    rep.replications = replications;
    double s = 0.0, s2 = 0.0;
    for (double v : lhs) {
        s += v;
        s2 += v * v;
    }
    rep.lhs_mean = s / replications;
    rep.lhs_se = std::sqrt(std::max(0.0, s2 / replications - rep.lhs_mean * rep.lhs_mean) / (replications - 1));
    rep.approx_term = *std::min_element(class_excess.begin(), class_excess.end());

    const dist::NoiseProfile noise = dist.noise ? *dist.noise : dist::NoiseProfile{0.0, 1.0, 1.0};
    OracleParams p;
    p.n = static_cast<double>(n);
    p.W = std::max(3.0, static_cast<double>(classifiers.size()));
    p.M = 2.0;
    p.Gamma = 6.0 * std::max(noise.alpha, 1.0 / noise.tau);
    p.theta = noise.theta();
    p.gamma = 0.0;
    p.J = 1.0;
    p.approx_term = rep.approx_term;
    rep.eps_grid = {p.theta == 0.0 ? 0.0 : 1e-6, 0.5, 1.0};
    rep.rhs = kInf;
    for (double e : rep.eps_grid) {
        p.eps = e;
        const double v = oracle_rhs(p);
        rep.rhs_grid.push_back(v);
        if (v < rep.rhs) {
            rep.rhs = v;
            rep.best_eps = e;
        }
    }
    rep.passed = rep.lhs_mean <= rep.rhs + 3.0 * rep.lhs_se;
    return rep;
}

TailIntegral tail_integral_bound(double A, double a, double b) {
    if (!(A >= 3.0) || !(a > 0.0) || !(b >= 1.0 && b <= 2.0)) throw ParameterError("tail integral: need A>=3, a>0, b in [1,2]");
    TailIntegral out;
    const double tstar = std::pow(std::log(A) / a, 1.0 / b);
    out.bound = 2.0 * tstar;
    // below t* the integrand is 1
    auto f = [&](double t) { return A * std::exp(-a * std::pow(t, b)); };
    const double tail = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        f, tstar, std::numeric_limits<double>::infinity(), 15, 1e-12);
    out.numeric = tstar + tail;
    return out;
}

double j_function(double x, double y) {
    if (y < x) std::swap(x, y);  // exact symmetry in floating point
    return std::min(x + y, 2.0 - x - y) - std::min(x, 1.0 - x) - std::min(y, 1.0 - y);
}

double excess_sum_separation(const ScalarFn& eta1, const ScalarFn& eta2, const dist::MarginalSpec& marginal,
                             int resolution, int align) {
    const auto tab = dist::quad_table(marginal, {&eta1, &eta2}, resolution, align);
    double acc = 0.0;
    for (std::size_t i = 0; i < tab.size(); ++i) acc += tab.mass[i] * j_function(eta1(tab.point(i)), eta2(tab.point(i)));
    return acc;
}

namespace {
int hamming(const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b) {
    int d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) d += a[i] != b[i];
    return d;
}
}  // namespace

int VGCode::min_distance() const {
    int best = m;
    for (std::size_t i = 0; i < words.size(); ++i)
        for (std::size_t j = i + 1; j < words.size(); ++j) best = std::min(best, hamming(words[i], words[j]));
    return best;
}

VGCode vg_code(int m, std::uint64_t seed, std::size_t max_draws) {
    if (m < 2) throw ParameterError("vg_code needs m > 1");
    VGCode code;
    code.m = m;
    if (m <= 8) {
        for (unsigned v = 0; v < (1u << m); ++v) {
            std::vector<std::uint8_t> w(m);
            for (int i = 0; i < m; ++i) w[i] = (v >> i) & 1u;
            code.words.push_back(std::move(w));
        }
        return code;
    }
    const double target = std::ceil(1.0 + std::pow(2.0, m / 8.0));
    const int dmin = static_cast<int>(std::ceil(m / 8.0));
    std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(m)));
    std::bernoulli_distribution coin(0.5);
    code.words.emplace_back(m, 0);
    for (std::size_t draw = 0; static_cast<double>(code.words.size()) < target; ++draw) {
        if (draw >= max_draws) throw CapacityError("vg_code: retry cap exceeded for m = " + std::to_string(m));
        std::vector<std::uint8_t> w(m);
        for (auto& b : w) b = coin(rng);
        bool ok = true;
        for (const auto& u : code.words)
            if (hamming(u, w) < dmin) {
                ok = false;
                break;
            }
        if (ok) code.words.push_back(std::move(w));
    }
    if (code.min_distance() < dmin) throw CapacityError("vg_code: certificate check failed");
    return code;
}

double fano_lower_bound(double v, double u, double M, double n) {
    if (!(v >= 0.0 && u >= 0.0)) throw ParameterError("fano: v and u must be >= 0");
    if (!(M >= 2.0)) throw ParameterError("fano: M must be >= 2");
    const double nu = 2.0 * n * u;
    return v / 4.0 * (1.0 - (nu + std::sqrt(nu)) / std::log(M));
}

FanoValue fano_lower_bound_report(double v, double u, double M, double n) {
    FanoValue f;
    f.raw = fano_lower_bound(v, u, M, n);
    f.clamped = std::max(0.0, f.raw);
    return f;
}

double lecam_lower_bound(double v, double affinity) {
    if (!(v >= 0.0) || !(affinity >= 0.0 && affinity <= 1.0 + 1e-12)) throw ParameterError("lecam: bad arguments");
    return v / 4.0 * affinity;
}

double rate_exponent(double beta, int q, int d_lower, double s) {
    if (!(beta > 0.0) || q < 0 || d_lower < 1 || !(s >= 0.0)) throw ParameterError("rate_exponent: bad arguments");
    const double bm = beta * min1_pow(beta, q);
    if (std::isinf(s)) return 1.0;
    return bm / (d_lower / (s + 1.0) + (1.0 + 1.0 / (s + 1.0)) * bm);
}

DegenerateReport degenerate_class_check(double r, std::size_t count, std::uint64_t seed, int d) {
    if (r > 0.5) throw ParameterError("degenerate_class_check needs r <= 1/2");
    if (!(r >= 0.0) || d < 1) throw ParameterError("degenerate_class_check: bad arguments");
    std::mt19937_64 rng(mix_seed(seed, 0x0de9));
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const int knots = 5;
    const double h = 1.0 / (knots - 1);

    // random table core with values in [0, r], shrunk until its probed Hölder norm is at most r
    auto random_core = [&](int k) {
        std::size_t total = 1;
        for (int i = 0; i < k; ++i) total *= knots;
        std::vector<double> vals(total);
        for (auto& v : vals) v = r * U(rng);
        auto probe_of = [&](const std::vector<double>& vs) {
            const auto c = funcspace::core_table(std::vector<int>(k, knots), std::vector<double>(k, h), vs);
            std::vector<int> coords(k);
            for (int i = 0; i < k; ++i) coords[i] = i;
            return funcspace::holder_seminorm_probe(ScalarFn{k, coords, c.fn}, 1.0, k == 1 ? 65 : 17);
        };
        const double pr = probe_of(vals);
        if (pr > r && pr > 0.0)
            for (auto& v : vals) v *= r / pr;
        return funcspace::core_table(std::vector<int>(k, knots), std::vector<double>(k, h), vals);
    };

    DegenerateReport rep;
    std::vector<int> all(d);
    for (int i = 0; i < d; ++i) all[i] = i;
    const int res = d == 1 ? 1024 : (d == 2 ? 64 : 16);
    const ScalarFn minus_one = ScalarFn::constant(d, -1.0);
    for (std::size_t m = 0; m < count; ++m) {
        funcspace::CompositionalFunction f;
        f.d = d;
        f.beta = 1.0;
        f.radius = r;
        f.d_star = 1;
        if (m == 0) {
            f.layers = {{funcspace::holder_component(d, {0}, funcspace::core_constant(1, 0.0), 1.0, r)}};
        } else {
            const int k = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(std::min(2, d)));
            const int q = static_cast<int>(rng() % 2);
            const int K = 2;
            f.q = q;
            f.K = q > 0 ? K : 1;
            f.d_lower = k;
            for (int i = 0; i <= q; ++i) {
                const int in_dim = i == 0 ? d : K;
                const int outs = i < q ? K : 1;
                std::vector<funcspace::Component> layer;
                for (int o = 0; o < outs; ++o) {
                    std::vector<int> idx(all.begin(), all.begin() + std::min(k, in_dim));
                    std::shuffle(idx.begin(), idx.end(), rng);
                    idx.resize(k);
                    std::sort(idx.begin(), idx.end());
                    layer.push_back(funcspace::holder_component(in_dim, idx, random_core(k), 1.0, r));
                }
                f.layers.push_back(std::move(layer));
            }
        }
        const auto P = dist::make_distribution(f, dist::lebesgue(d));
        const risk::RiskTable table(P, all, res);
        double mx = 0.0;
        for (std::size_t i = 0; i < table.table().size(); ++i) mx = std::max(mx, f.eval(table.table().point(i)));
        rep.max_eta = std::max(rep.max_eta, mx);
        rep.max_excess = std::max(rep.max_excess, table.excess01(minus_one));
        ++rep.members;
    }
    rep.passed = rep.max_excess == 0.0;
    return rep;
}

std::vector<PipelineRow> lower_bound_pipeline(const std::vector<std::size_t>& n_values, double s, double alpha,
                                              double Lambda, double beta, int q, int K, int d, int d_lower,
                                              std::uint64_t seed) {
    std::vector<PipelineRow> rows;
    for (std::size_t n : n_values) {
        int Q = dist::lower_bound_grid_size(n, s, beta, q, d_lower);
        while (!(1.0 / Q < (Lambda - 1.0) / (9.0 * Lambda))) ++Q;
        const auto fam = dist::build_lower_bound_family(Q, s, alpha, Lambda, beta, q, K, d, d_lower, seed);
        PipelineRow row;
        row.n = n;
        row.Q = Q;
        row.M = fam.M;
        row.eps = fam.eps;
        const std::size_t checked = std::min<std::size_t>(fam.members.size(), 8);
        const auto& marg = fam.members[0].marginal;
        row.separation = kInf;
        for (std::size_t j = 0; j < checked; ++j)
            for (std::size_t k = j + 1; k < checked; ++k)
                row.separation = std::min(row.separation, excess_sum_separation(fam.members[j].eta, fam.members[k].eta,
                                                                                 marg, 0, fam.align));
        double kl = 0.0;
        for (int j = 1; j <= fam.M; ++j)
            kl += dist::kl_divergence(fam.members[j].eta, fam.members[0].eta, marg,
                                      dist::default_resolution(fam.align, d_lower));
        row.kl = kl / fam.M;
        const double Mlog = std::max(2.0, static_cast<double>(fam.M));
        const auto f = fano_lower_bound_report(row.separation, row.kl, Mlog, static_cast<double>(n));
        row.fano_raw = f.raw;
        row.fano_value = f.clamped;
        // the family's own guarantees: plateaus of differing cells give 2ε each, KL at most 18ε²Q(A0)
        const int dmin = static_cast<int>(std::ceil(fam.m / 8.0));
        const double v = 2.0 * fam.eps * fam.a0_mass * dmin / fam.m;
        const double u = 18.0 * fam.eps * fam.eps * fam.a0_mass;
        row.formula_value = fano_lower_bound_report(v, u, Mlog, static_cast<double>(n)).clamped;
        rows.push_back(row);
    }
    return rows;
}

void write_pipeline_csv(const std::vector<PipelineRow>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "n,Q,M,eps,separation,kl,fano_raw,fano_value,formula_value\n";
    out << std::setprecision(17);
    for (const auto& r : rows)
        out << r.n << ',' << r.Q << ',' << r.M << ',' << r.eps << ',' << r.separation << ',' << r.kl << ','
            << r.fano_raw << ',' << r.fano_value << ',' << r.formula_value << '\n';
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace mlab::bounds
