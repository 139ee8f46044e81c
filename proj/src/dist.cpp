#include "mlab/dist.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <memory>
#include <random>

#include "mlab/bounds.hpp"

namespace mlab::dist {

using funcspace::CompositionalFunction;

void NoiseProfile::validate() const {
    if (!(s >= 0.0)) throw ParameterError("noise exponent s must be >= 0");
    if (!(alpha > 0.0)) throw ParameterError("noise alpha must be > 0");
    if (!(tau > 0.0)) throw ParameterError("noise tau must be > 0");
    if (alpha < 1.0 && tau >= 1.0) throw ParameterError("alpha < 1 with tau >= 1 describes an empty class");
}

MarginalSpec lebesgue(int dim) {
    MarginalSpec m;
    m.kind = "lebesgue";
    m.dim = dim;
    m.Lambda = 1.0;
    m.descriptor = json{{"kind", "lebesgue"}, {"dim", dim}};
    return m;
}

MarginalSpec bands(int dim, int coord, std::vector<double> breaks, std::vector<double> values, int align) {
    if (breaks.size() != values.size() + 1) throw ParameterError("bands: need one more break than values");
    MarginalSpec m;
    m.kind = "density";
    m.dim = dim;
    m.align = align;
    m.Lambda = *std::max_element(values.begin(), values.end());
    m.descriptor = json{{"kind", "bands"}, {"dim", dim}, {"coord", coord}, {"breaks", breaks},
                        {"values", values}, {"align", align}};
    m.density = ScalarFn{dim, {coord}, [coord, breaks, values](const double* x) {
                             const double t = x[coord];
                             for (std::size_t i = 0; i < values.size(); ++i)
                                 if (t >= breaks[i] && (t < breaks[i + 1] || (i + 1 == values.size() && t <= breaks[i + 1])))
                                     return values[i];
                             return 0.0;
                         }};
    return m;
}

namespace {

MarginalSpec lower_bound_marginal(int dim, int Q, int d_lower, std::vector<std::size_t> cells, double halfwidth,
                                  double v_a0, double v_a2, double a2_start, int align) {
    MarginalSpec m;
    m.kind = "density";
    m.dim = dim;
    m.align = align;
    m.Lambda = std::max(v_a0, v_a2);
    m.descriptor = json{{"kind", "lower_bound"}, {"dim", dim}, {"Q", Q}, {"d_lower", d_lower},
                        {"cells", cells}, {"halfwidth", halfwidth}, {"v_a0", v_a0}, {"v_a2", v_a2},
                        {"a2_start", a2_start}, {"align", align}};
    std::size_t total = 1;
    for (int i = 0; i < d_lower; ++i) total *= static_cast<std::size_t>(Q);
    auto member = std::make_shared<std::vector<char>>(total, 0);
    for (auto c : cells) (*member)[c] = 1;
    std::vector<int> act(d_lower);
    for (int i = 0; i < d_lower; ++i) act[i] = i;
    m.density = ScalarFn{dim, act, [=](const double* x) {
                             if (x[0] >= a2_start) return v_a2;
                             const auto idx = funcspace::cell_index(Q, d_lower, x);
                             if (!(*member)[idx]) return 0.0;
                             const auto a = funcspace::cell_center(Q, d_lower, idx);
                             for (int i = 0; i < d_lower; ++i)
                                 if (std::abs(x[i] - a[i]) > halfwidth) return 0.0;
                             return v_a0;
                         }};
    return m;
}

}  // namespace

MarginalSpec marginal_from_json(const json& j) {
    const std::string kind = j.at("kind");
    if (kind == "lebesgue") return lebesgue(j.at("dim"));
    if (kind == "bands")
        return bands(j.at("dim"), j.at("coord"), j.at("breaks").get<std::vector<double>>(),
                     j.at("values").get<std::vector<double>>(), j.value("align", 0));
    if (kind == "lower_bound")
        return lower_bound_marginal(j.at("dim"), j.at("Q"), j.at("d_lower"),
                                    j.at("cells").get<std::vector<std::size_t>>(), j.at("halfwidth"),
                                    j.at("v_a0"), j.at("v_a2"), j.at("a2_start"), j.value("align", 0));
    throw ParameterError("unknown marginal kind: " + kind);
}

json marginal_to_json(const MarginalSpec& m) {
    if (m.descriptor.is_null()) throw ParameterError("marginal has no descriptor");
    return m.descriptor;
}

DistributionSpec make_distribution(const CompositionalFunction& eta, MarginalSpec marginal,
                                   std::optional<NoiseProfile> noise, int align) {
    DistributionSpec d = make_distribution(eta.as_scalar_fn(), std::move(marginal), noise, align);
    d.eta_chom = eta;
    return d;
}

DistributionSpec make_distribution(ScalarFn eta, MarginalSpec marginal, std::optional<NoiseProfile> noise,
                                   int align) {
    if (eta.dim != marginal.dim) throw ParameterError("eta and marginal dimensions differ");
    DistributionSpec d;
    d.dim = eta.dim;
    d.eta = std::move(eta);
    d.marginal = std::move(marginal);
    d.noise = noise;
    d.align = align ? align : d.marginal.align;
    return d;
}

json distribution_to_json(const DistributionSpec& d) {
    if (!d.eta_chom) throw ParameterError("only compositional eta can be serialized");
    json j{{"dim", d.dim}, {"eta", funcspace::chom_to_json(*d.eta_chom)}, {"marginal", marginal_to_json(d.marginal)},
           {"align", d.align}, {"label", d.label}};
    if (d.noise) {
        auto enc = [](double v) { return std::isinf(v) ? json("inf") : json(v); };
        j["noise"] = {{"s", enc(d.noise->s)}, {"alpha", d.noise->alpha}, {"tau", enc(d.noise->tau)}};
    }
    return j;
}

DistributionSpec distribution_from_json(const json& j) {
    auto dec = [](const json& v) { return v.is_string() ? kInf : v.get<double>(); };
    std::optional<NoiseProfile> noise;
    if (j.contains("noise"))
        noise = NoiseProfile{dec(j["noise"].at("s")), j["noise"].at("alpha"), dec(j["noise"].at("tau"))};
    auto d = make_distribution(funcspace::chom_from_json(j.at("eta")), marginal_from_json(j.at("marginal")), noise,
                               j.value("align", 0));
    d.label = j.value("label", "");
    return d;
}

void write_csv(const Dataset& data, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    for (int i = 0; i < data.dim; ++i) out << "x" << i + 1 << ",";
    out << "y\n";
    out.precision(17);
    for (std::size_t r = 0; r < data.size(); ++r) {
        for (int i = 0; i < data.dim; ++i) out << data.row(r)[i] << ",";
        out << data.y[r] << "\n";
    }
}

int default_resolution(int align, int ncoords) {
    if (ncoords <= 0) return 1;
    const double cap = 4194304.0;  // 2^22
    int base = ncoords <= 2 ? 512 : static_cast<int>(std::floor(std::pow(cap, 1.0 / ncoords)));
    if (align <= 0) return base;
    int mult = std::max(1, static_cast<int>(std::lround(static_cast<double>(base) / align)));
    while (mult > 1 && std::pow(static_cast<double>(align) * mult, ncoords) > cap) --mult;
    return align * mult;
}

QuadTable quad_table_on(const MarginalSpec& m, const std::vector<int>& coords, int res) {
    QuadTable t;
    t.dim = m.dim;
    t.coords = coords;
    t.res = res;
    for_each_midpoint(m.dim, coords, res, [&](const double* x, double vol) {
        const double w = m.value(x) * vol;
        if (w == 0.0) return;
        t.pts.insert(t.pts.end(), x, x + m.dim);
        t.mass.push_back(w);
    });
    return t;
}

QuadTable quad_table(const MarginalSpec& m, const std::vector<const ScalarFn*>& fns, int res, int align) {
    std::vector<const ScalarFn*> all = fns;
    if (m.kind != "lebesgue") all.push_back(&m.density);
    const auto coords = union_active(all);
    if (res <= 0) res = default_resolution(align ? align : m.align, static_cast<int>(coords.size()));
    return quad_table_on(m, coords, res);
}

Dataset sample(const DistributionSpec& dist, std::size_t n, std::uint64_t seed) {
    if (n < 1) throw ParameterError("sample size must be positive");
    Dataset data;
    data.dim = dist.dim;
    data.seed = seed;
    data.x.resize(n * dist.dim);
    data.y.resize(n);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);

    const auto& m = dist.marginal;
    if (m.kind == "lebesgue") {
        for (auto& v : data.x) v = U(rng);
    } else {
        const auto coords = m.density.active;
        const int res = default_resolution(m.align, static_cast<int>(coords.size()));
        const QuadTable tab = quad_table_on(m, coords, res);
        std::vector<double> cdf(tab.size());
        double acc = 0.0;
        for (std::size_t i = 0; i < tab.size(); ++i) cdf[i] = (acc += tab.mass[i]);
        const double half = 0.5 / res;
        for (std::size_t r = 0; r < n; ++r) {
            double* x = data.x.data() + r * dist.dim;
            for (int i = 0; i < dist.dim; ++i) x[i] = U(rng);
            const double u = U(rng) * acc;
            std::size_t c = std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin();
            if (c >= tab.size()) c = tab.size() - 1;
            const double* mid = tab.point(c);
            for (int k : coords) x[k] = mid[k] - half + 2.0 * half * U(rng);
        }
    }
    for (std::size_t r = 0; r < n; ++r) data.y[r] = U(rng) < dist.eta(data.row(r)) ? 1 : -1;
    return data;
}

NoiseReport check_noise(const DistributionSpec& dist, const NoiseProfile& profile, const std::vector<double>& t_grid,
                        Method method, int resolution, std::size_t mc_samples, std::uint64_t seed) {
    NoiseReport rep;
    const double tol_t = 1e-12;
    std::vector<double> margin;
    std::vector<double> weight;
    if (method == Method::quadrature) {
        const QuadTable tab = quad_table(dist.marginal, {&dist.eta}, resolution, dist.align);
        margin.resize(tab.size());
        weight = tab.mass;
        for (std::size_t i = 0; i < tab.size(); ++i) margin[i] = std::abs(2.0 * dist.eta(tab.point(i)) - 1.0);
    } else {
        const Dataset data = sample(dist, mc_samples, seed);
        margin.resize(data.size());
        weight.assign(data.size(), 1.0 / data.size());
        for (std::size_t i = 0; i < data.size(); ++i) margin[i] = std::abs(2.0 * dist.eta(data.row(i)) - 1.0);
    }
    for (double t : t_grid) {
        NoiseRow row;
        row.t = t;
        for (std::size_t i = 0; i < margin.size(); ++i)
            if (margin[i] <= t + tol_t) row.measure += weight[i];
        row.bound = profile.alpha * cpow(t, profile.s);
        row.slack = row.bound - row.measure;
        if (method == Method::monte_carlo) {
            const double p = row.measure;
            row.std_error = std::sqrt(std::max(p * (1.0 - p), 0.0) / margin.size());
            if (row.slack < -3.0 * row.std_error) rep.passed = false;
        } else if (row.slack < -1e-9) {
            rep.passed = false;
        }
        rep.rows.push_back(row);
    }
    return rep;
}

double radon_nikodym(double eta1, double eta2, int y) {
    if (eta1 == eta2) return 1.0;
    if (eta2 <= 0.0 || eta2 >= 1.0) throw SingularityError("reference CCP is 0 or 1 where the CCPs differ");
    return y > 0 ? eta1 / eta2 : (1.0 - eta1) / (1.0 - eta2);
}

double radon_nikodym(const ScalarFn& eta1, const ScalarFn& eta2, const double* x, int y) {
    return radon_nikodym(eta1(x), eta2(x), y);
}

double kl_bernoulli(double a1, double a2) {
    auto term = [](double p, double q) {
        if (p == 0.0) return 0.0;
        return p * std::log(p / q);
    };
    return term(a1, a2) + term(1.0 - a1, 1.0 - a2);
}

double kl_divergence(const ScalarFn& eta1, const ScalarFn& eta2, const MarginalSpec& marginal, int resolution) {
    const QuadTable tab = quad_table(marginal, {&eta1, &eta2}, resolution);
    double acc = 0.0;
    for (std::size_t i = 0; i < tab.size(); ++i) {
        const double a1 = eta1(tab.point(i)), a2 = eta2(tab.point(i));
        if (a1 == a2) continue;
        if (a2 <= 0.0 || a2 >= 1.0) throw SingularityError("KL: reference CCP is 0 or 1 where the CCPs differ");
        acc += tab.mass[i] * kl_bernoulli(a1, a2);
    }
    return acc;
}

int lower_bound_grid_size(std::size_t n, double s, double beta, int q, int d_lower) {
    const double e = d_lower + (s + 2.0) * beta * min1_pow(beta, q);
    return static_cast<int>(std::floor(std::pow(static_cast<double>(n), 1.0 / e))) + 1;
}

namespace {

using funcspace::Component;
using funcspace::Core;
using funcspace::HolderComponent;

std::vector<int> first_coords(int k) {
    std::vector<int> v(k);
    for (int i = 0; i < k; ++i) v[i] = i;
    return v;
}

// Assembles h_q∘…∘h_0 where layer 0 carries `first` in slot 0, middle layers raise slot 0 to
// the power `expo`, and the last layer adds `offset`. All other slots are zero.
CompositionalFunction stack_layers(int d, int q, int K, int d_lower, double beta, double radius, const Core& first,
                                   double expo, double offset) {
    CompositionalFunction f;
    f.d = d;
    f.q = q;
    f.K = q > 0 ? K : 1;
    f.d_star = 1;
    f.d_lower = d_lower;
    f.beta = beta;
    f.radius = radius;
    const auto idx = first_coords(d_lower);
    for (int i = 0; i <= q; ++i) {
        const int in_dim = i == 0 ? d : K;
        const int outs = i < q ? K : 1;
        std::vector<Component> layer;
        for (int k = 0; k < outs; ++k) {
            Core core;
            if (k > 0) {
                core = funcspace::core_constant(d_lower, 0.0);
            } else if (i == 0) {
                core = first;
            } else {
                core = funcspace::core_power(d_lower, 0, expo, 1.0, i == q ? offset : 0.0);
            }
            layer.push_back(funcspace::holder_component(in_dim, idx, core, beta, radius));
        }
        f.layers.push_back(std::move(layer));
    }
    return f;
}

double core_probe(const Core& c, double beta, int res) {
    return funcspace::holder_seminorm_probe(ScalarFn{c.dim, first_coords(c.dim), c.fn}, beta, res);
}

double radius_for(const std::vector<Core>& cores, double beta) {
    double r = 3.0;
    for (const auto& c : cores) {
        const int res = c.dim == 1 ? 257 : (c.dim == 2 ? 64 : 17);
        r = std::max(r, 1.0 + core_probe(c, beta, res));
    }
    return r;
}

}  // namespace

LowerBoundFamily build_lower_bound_family(int Q, double s, double alpha, double Lambda, double beta, int q, int K,
                                          int d, int d_lower, std::uint64_t seed, const LowerBoundOptions& opt) {
    if (!(Lambda > 1.0)) throw ParameterError("Lambda must exceed 1");
    if (!(1.0 / Q < (Lambda - 1.0) / (9.0 * Lambda))) throw ParameterError("need 1/Q < (Lambda-1)/(9 Lambda)");
    if (!(s >= 0.0) || std::isinf(s)) throw ParameterError("s must be finite and >= 0 (use the two-point family for s = inf)");
    if (!(alpha > 0.0) || !(beta > 0.0)) throw ParameterError("alpha and beta must be positive");
    if (d_lower < 1 || d_lower > d || q < 0 || (q > 0 && d_lower > K))
        throw ParameterError("dimension constraints violated");

    LowerBoundFamily fam;
    fam.Q = Q;
    fam.Lambda = Lambda;
    const int t0 = 1 + (s == 0.0 ? d_lower : 0);
    fam.bump = funcspace::BumpSpec{d_lower, 0.5 - (1.0 / 3.0) / t0, 0.5 - 0.25 / t0, beta};
    fam.bump.validate();
    fam.plateau_halfwidth = 1.0 / (2.0 * Q) - (1.0 / 3.0) / (Q * t0);

    // Hölder norm of the unit bump, probed on a grid over [-1/2,1/2]^{d*}
    {
        const auto spec = fam.bump;
        ScalarFn u{d_lower, first_coords(d_lower), [spec](const double* x) {
                       std::vector<double> z(spec.dim);
                       for (int i = 0; i < spec.dim; ++i) z[i] = x[i] - 0.5;
                       return funcspace::bump(spec, z.data());
                   }};
        const int res = d_lower == 1 ? 257 : (d_lower == 2 ? 64 : 17);
        fam.c2 = 1.0 + funcspace::holder_seminorm_probe(u, beta, res);
        fam.c1 = 1.0 / (4.0 * fam.c2);
    }
    const double mq = min1_pow(beta, q);
    fam.eps = 0.125 * std::pow(fam.c1 / std::pow(Q, beta), mq);

    std::size_t total = 1;
    for (int i = 0; i < d_lower; ++i) total *= static_cast<std::size_t>(Q);
    const double left = (Lambda - 1.0) / (2.0 * Lambda);
    for (std::size_t idx = 0; idx < total; ++idx) {
        const int k0 = static_cast<int>(idx % static_cast<std::size_t>(Q));
        if ((2.0 * k0 + 1.0) / (2.0 * Q) + 1.0 / (2.0 * Q) < left) fam.grid_cells.push_back(idx);
    }
    fam.m = static_cast<int>(fam.grid_cells.size());
    if (fam.m < 2) throw ParameterError("grid G_{Q,d*,Lambda} has fewer than 2 cells");
    const double Mreal = std::ceil(std::pow(2.0, std::pow(static_cast<double>(Q), d_lower) * (Lambda - 1.0) / (32.0 * Lambda)));
    if (Mreal + 1 > static_cast<double>(opt.max_words)) throw CapacityError("lower-bound family needs too many members");
    fam.M = static_cast<int>(Mreal);

    const auto code = bounds::vg_code(fam.m, seed);
    if (code.words.size() < static_cast<std::size_t>(fam.M) + 1)
        throw ParameterError("code too small for the family size");

    // marginal
    const double mass_factor = std::min(alpha, (Lambda - 1.0) / (opt.mass_constant * Lambda));
    fam.a0_mass = mass_factor * std::pow(2.0, s) * std::pow(fam.eps, s);
    fam.a0_volume = fam.m * std::pow(2.0 * fam.plateau_halfwidth, d_lower);
    const double v_a0 = fam.a0_mass / fam.a0_volume;
    const double v_a2 = Lambda * (1.0 - fam.a0_mass);
    fam.align = 12 * Q * t0;
    const auto marginal = lower_bound_marginal(d, Q, d_lower, fam.grid_cells, fam.plateau_halfwidth, v_a0, v_a2,
                                               (Lambda - 1.0) / Lambda, fam.align);
    if (marginal.Lambda > Lambda + 1e-12) throw ParameterError("lower-bound density exceeds Lambda");

    fam.noise = NoiseProfile{s, alpha, opt.tau ? *opt.tau : (alpha >= 1.0 ? 1.0 : 0.5)};
    fam.noise.validate();

    const double p = std::pow(1.0 / std::min(1.0, beta), q);
    std::vector<Core> cores;
    for (int j = 0; j <= fam.M; ++j) {
        funcspace::GridCode gc{Q, d_lower, std::vector<std::uint8_t>(total, 0)};
        for (int c = 0; c < fam.m; ++c) gc.bits[fam.grid_cells[c]] = code.words[j][c];
        fam.codes.push_back(gc);
        funcspace::BumpFamilyParams bp;
        bp.code = gc;
        bp.amplitude = fam.c1;
        bp.beta = beta;
        bp.spec = fam.bump;
        bp.w_bump = std::pow(0.25, p);
        bp.w_ramp = std::pow(0.5 + fam.eps, p);
        bp.ramp_lo = left;
        bp.ramp_hi = (Lambda - 1.0) / Lambda;
        bp.offset = q == 0 ? 0.5 - fam.eps : 0.0;
        cores.push_back(funcspace::core_bump_family(bp));
    }
    std::vector<Core> probe_set{cores.front()};
    if (q > 0) probe_set.push_back(funcspace::core_power(d_lower, 0, std::min(1.0, beta), 1.0, 0.5 - fam.eps));
    fam.radius = radius_for(probe_set, beta);

    for (int j = 0; j <= fam.M; ++j) {
        auto eta = stack_layers(d, q, K, d_lower, beta, fam.radius, cores[j], std::min(1.0, beta), 0.5 - fam.eps);
        auto P = make_distribution(eta, marginal, fam.noise, fam.align);
        P.label = "lower_bound_member_" + std::to_string(j);
        fam.etas.push_back(std::move(eta));
        fam.members.push_back(std::move(P));
    }
    return fam;
}

TwoPointFamily build_twopoint_family(double Lambda, std::size_t n, double beta, int q, int K, int d, int d_lower) {
    if (!(Lambda > 1.0)) throw ParameterError("Lambda must exceed 1");
    if (!(static_cast<double>(n) >= 1.0 / (Lambda - 1.0))) throw ParameterError("need n >= 1/(Lambda-1)");
    if (d_lower < 1 || d_lower > d || q < 0 || (q > 0 && d_lower > K))
        throw ParameterError("dimension constraints violated");
    const double lo = (Lambda - 1.0) / (2.0 * Lambda), hi = (Lambda - 1.0) / Lambda;
    int align = 0;
    for (int L = 1; L <= 4096; ++L) {
        const double a = L * lo, b = L * hi;
        if (std::abs(a - std::round(a)) < 1e-12 && std::abs(b - std::round(b)) < 1e-12) {
            align = L;
            break;
        }
    }
    const double nn = static_cast<double>(n);
    auto marginal = bands(d, 0, {0.0, lo, hi, 1.0},
                          {Lambda / (nn * (Lambda - 1.0)), 0.0, Lambda * (1.0 - 1.0 / (2.0 * nn))}, align);

    funcspace::BumpFamilyParams bp;
    bp.code = funcspace::GridCode{1, d_lower, std::vector<std::uint8_t>(1, 0)};
    bp.spec = funcspace::BumpSpec{d_lower, 0.25, 0.45, beta};
    bp.beta = beta;
    bp.w_bump = 0.0;
    bp.w_ramp = 1.0;
    bp.ramp_lo = lo;
    bp.ramp_hi = hi;
    const Core ramp_core = funcspace::core_bump_family(bp);
    const double r = radius_for({ramp_core}, beta);

    auto constant_eta = [&](double c) {
        return stack_layers(d, q, K, d_lower, beta, r,
                            funcspace::core_constant(d_lower, q == 0 ? c : 0.0), 1.0, q == 0 ? 0.0 : c);
    };
    const NoiseProfile noise{kInf, 1.0, 1.0};
    TwoPointFamily fam;
    fam.Lambda = Lambda;
    fam.n = n;
    fam.P0 = make_distribution(stack_layers(d, q, K, d_lower, beta, r, ramp_core, 1.0, 0.0), marginal, noise, align);
    fam.P1 = make_distribution(constant_eta(1.0), marginal, noise, align);
    fam.P2 = make_distribution(constant_eta(0.5), marginal, std::nullopt, align);
    fam.P0.label = "twopoint_P0";
    fam.P1.label = "twopoint_P1";
    fam.P2.label = "twopoint_P2";
    return fam;
}

double product_affinity(const ScalarFn& eta0, const ScalarFn& eta1, const MarginalSpec& marginal, std::size_t n,
                        int resolution, int align, std::size_t max_states) {
    const QuadTable tab = quad_table(marginal, {&eta0, &eta1}, resolution, align);
    std::map<std::tuple<int, long long, long long>, std::pair<double, double>> groups;
    auto key = [](double v) { return static_cast<long long>(std::llround(v * 1e12)); };
    for (std::size_t i = 0; i < tab.size(); ++i) {
        const double a = eta0(tab.point(i)), b = eta1(tab.point(i)), w = tab.mass[i];
        auto& pos = groups[{1, key(a), key(b)}];
        pos.first += w * a;
        pos.second += w * b;
        auto& neg = groups[{-1, key(a), key(b)}];
        neg.first += w * (1.0 - a);
        neg.second += w * (1.0 - b);
    }
    std::vector<double> lp, lq;
    for (const auto& [k, v] : groups) {
        if (v.first == 0.0 && v.second == 0.0) continue;
        lp.push_back(v.first > 0.0 ? std::log(v.first) : -kInf);
        lq.push_back(v.second > 0.0 ? std::log(v.second) : -kInf);
    }
    const int K = static_cast<int>(lp.size());
    // C(n+K-1, K-1) count vectors
    double states = 1.0;
    for (int i = 1; i < K; ++i) states = states * (static_cast<double>(n) + i) / i;
    if (states > static_cast<double>(max_states)) throw CapacityError("too many count vectors for exact affinity");

    const double lfact_n = std::lgamma(static_cast<double>(n) + 1.0);
    double l1 = 0.0;
    std::vector<int> c(K, 0);
    // depth-first over compositions of n into K parts
    std::function<void(int, int, double, double, double)> rec = [&](int k, int left, double lm, double sp,
                                                                     double sq) {
        if (k == K - 1) {
            const double cl = left;
            const double lmk = lm - std::lgamma(cl + 1.0);
            const double spk = left ? sp + cl * lp[k] : sp;
            const double sqk = left ? sq + cl * lq[k] : sq;
            const double a = std::isinf(spk) ? 0.0 : std::exp(lfact_n + lmk + spk);
            const double b = std::isinf(sqk) ? 0.0 : std::exp(lfact_n + lmk + sqk);
            l1 += std::abs(a - b);
            return;
        }
        for (int ck = 0; ck <= left; ++ck) {
            const double spk = ck ? sp + ck * lp[k] : sp;
            const double sqk = ck ? sq + ck * lq[k] : sq;
            rec(k + 1, left - ck, lm - std::lgamma(ck + 1.0), spk, sqk);
        }
    };
    if (K == 0) return 1.0;
    rec(0, static_cast<int>(n), 0.0, 0.0, 0.0);
    return 1.0 - 0.5 * l1;
}

}  // namespace mlab::dist
