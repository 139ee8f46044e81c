#include "mlab/funcspace.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mlab::funcspace {

namespace {

double binom(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

std::string fmt_point(const std::vector<double>& x) {
    std::ostringstream os;
    os << "(";
    for (std::size_t i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
    os << ")";
    return os.str();
}

}  // namespace

double smoothstep(int order, double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    const int N = order;
    double s = 0.0;
    for (int k = 0; k <= N; ++k) s += binom(N + k, k) * binom(2 * N + 1, N - k) * std::pow(-t, k);
    return std::pow(t, N + 1) * s;
}

int smoothstep_order(double beta) {
    return std::max(1, static_cast<int>(std::ceil(beta - 1.0)));
}

void BumpSpec::validate() const {
    if (dim < 1) throw ParameterError("bump dim must be positive");
    if (!(inner_radius > 0.0 && inner_radius < outer_radius && outer_radius <= 0.5))
        throw ParameterError("bump radii must satisfy 0 < inner < outer <= 1/2");
    if (!(beta > 0.0)) throw ParameterError("bump beta must be positive");
}

double bump(const BumpSpec& spec, const double* x) {
    double t = 0.0;
    for (int i = 0; i < spec.dim; ++i) t = std::max(t, std::abs(x[i]));
    if (t <= spec.inner_radius) return 1.0;
    if (t >= spec.outer_radius) return 0.0;
    const double u = (t - spec.inner_radius) / (spec.outer_radius - spec.inner_radius);
    return 1.0 - smoothstep(smoothstep_order(spec.beta), u);
}

std::size_t cell_index(int Q, int dim, const double* x) {
    std::size_t idx = 0, stride = 1;
    for (int i = 0; i < dim; ++i) {
        int k = static_cast<int>(std::floor(x[i] * Q));
        k = std::clamp(k, 0, Q - 1);
        idx += stride * static_cast<std::size_t>(k);
        stride *= static_cast<std::size_t>(Q);
    }
    return idx;
}

std::vector<double> cell_center(int Q, int dim, std::size_t index) {
    std::vector<double> a(dim);
    for (int i = 0; i < dim; ++i) {
        const auto k = index % static_cast<std::size_t>(Q);
        index /= static_cast<std::size_t>(Q);
        a[i] = (2.0 * static_cast<double>(k) + 1.0) / (2.0 * Q);
    }
    return a;
}

double bump_grid_sum(const GridCode& code, double amplitude, double beta, const BumpSpec& spec, const double* x) {
    const std::size_t idx = cell_index(code.Q, code.dim, x);
    if (!code.bits[idx]) return 0.0;
    const auto a = cell_center(code.Q, code.dim, idx);
    std::vector<double> u(code.dim);
    for (int i = 0; i < code.dim; ++i) u[i] = code.Q * (x[i] - a[i]);
    return amplitude / std::pow(code.Q, beta) * bump(spec, u.data());
}

double bump_grid_sum_naive(const GridCode& code, double amplitude, double beta, const BumpSpec& spec,
                           const double* x) {
    double total = 0.0;
    std::vector<double> u(code.dim);
    for (std::size_t idx = 0; idx < code.bits.size(); ++idx) {
        if (!code.bits[idx]) continue;
        const auto a = cell_center(code.Q, code.dim, idx);
        for (int i = 0; i < code.dim; ++i) u[i] = code.Q * (x[i] - a[i]);
        total += amplitude / std::pow(code.Q, beta) * bump(spec, u.data());
    }
    return total;
}

double holder_seminorm_probe(const ScalarFn& f, double beta, int grid_resolution) {
    const int k = static_cast<int>(f.active.size());
    const double e = std::min(beta, 1.0);
    std::vector<std::vector<double>> pts;
    std::vector<double> vals;
    const int res = std::max(2, grid_resolution);
    for_each_node(f.dim, f.active, k == 0 ? 1 : res, [&](const double* x) {
        pts.emplace_back(x, x + f.dim);
        vals.push_back(f(x));
    });
    double sup = 0.0;
    for (double v : vals) sup = std::max(sup, std::abs(v));
    if (k == 0) return sup;

    auto dist = [&](std::size_t a, std::size_t b) {
        double s = 0.0;
        for (int c : f.active) s += (pts[a][c] - pts[b][c]) * (pts[a][c] - pts[b][c]);
        return std::sqrt(s);
    };
    double quot = 0.0;
    const std::size_t P = pts.size();
    if (P <= 4096) {
        for (std::size_t a = 0; a < P; ++a)
            for (std::size_t b = a + 1; b < P; ++b)
                quot = std::max(quot, std::abs(vals[a] - vals[b]) / std::pow(dist(a, b), e));
    } else {
        // offsets in {0,1,2}^k against every node
        std::vector<int> off(k, 0);
        std::vector<std::vector<int>> offsets;
        while (true) {
            if (std::any_of(off.begin(), off.end(), [](int o) { return o != 0; })) offsets.push_back(off);
            int i = 0;
            for (; i < k; ++i) {
                if (++off[i] <= 2) break;
                off[i] = 0;
            }
            if (i == k) break;
        }
        std::vector<std::size_t> stride(k, 1);
        for (int i = 1; i < k; ++i) stride[i] = stride[i - 1] * res;
        for (std::size_t a = 0; a < P; ++a) {
            for (const auto& o : offsets) {
                std::size_t rem = a, b = 0;
                bool ok = true;
                for (int i = 0; i < k; ++i) {
                    const int ki = static_cast<int>(rem % res) + o[i];
                    rem /= res;
                    if (ki >= res) { ok = false; break; }
                    b += stride[i] * ki;
                }
                if (ok) quot = std::max(quot, std::abs(vals[a] - vals[b]) / std::pow(dist(a, b), e));
            }
        }
    }
    return sup + quot;
}

// ---------------------------------------------------------------- cores

Core core_constant(int dim, double c) {
    return Core{"constant", dim, json{{"value", c}}, [c](const double*) { return c; }};
}

Core core_linear(std::vector<double> weights, double bias) {
    const int dim = static_cast<int>(weights.size());
    json p{{"weights", weights}, {"bias", bias}};
    return Core{"linear", dim, p, [w = std::move(weights), bias](const double* z) {
                    double s = bias;
                    for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * z[i];
                    return s;
                }};
}

Core core_power(int dim, int coord, double exponent, double scale, double offset) {
    json p{{"coord", coord}, {"exponent", exponent}, {"scale", scale}, {"offset", offset}};
    return Core{"power", dim, p, [=](const double* z) {
                    return offset + scale * cpow(std::abs(z[coord]), exponent);
                }};
}

Core core_table(std::vector<int> shape, std::vector<double> spacing, std::vector<double> values) {
    const int dim = static_cast<int>(shape.size());
    if (spacing.empty())
        for (int s : shape) spacing.push_back(s > 1 ? 1.0 / (s - 1) : 1.0);
    std::size_t total = 1;
    for (int s : shape) total *= static_cast<std::size_t>(s);
    if (values.size() != total || spacing.size() != shape.size())
        throw ParameterError("table core: value count does not match shape");
    json p{{"shape", shape}, {"spacing", spacing}, {"values", values}};
    if (dim == 1) {
        return Core{"table", dim, p, [v = std::move(values), n = shape[0], h = spacing[0]](const double* z) {
                        return interp1(v.data(), n, h, z[0]);
                    }};
    }
    return Core{"table", dim, p, [shape, spacing, v = std::move(values), dim](const double* z) {
                    std::vector<int> lo(dim);
                    std::vector<double> lam(dim);
                    std::vector<std::size_t> stride(dim, 1);
                    for (int i = 1; i < dim; ++i) stride[i] = stride[i - 1] * shape[i - 1];
                    for (int i = 0; i < dim; ++i) {
                        if (shape[i] == 1) { lo[i] = 0; lam[i] = 0.0; continue; }
                        int j = static_cast<int>(std::floor(z[i] / spacing[i]));
                        j = std::clamp(j, 0, shape[i] - 2);
                        lo[i] = j;
                        lam[i] = (z[i] - j * spacing[i]) / spacing[i];
                    }
                    double acc = 0.0;
                    for (int corner = 0; corner < (1 << dim); ++corner) {
                        double w = 1.0;
                        std::size_t idx = 0;
                        for (int i = 0; i < dim; ++i) {
                            const int bit = (corner >> i) & 1;
                            if (shape[i] == 1 && bit) { w = 0.0; break; }
                            w *= bit ? lam[i] : 1.0 - lam[i];
                            idx += stride[i] * (lo[i] + bit);
                        }
                        if (w != 0.0) acc += w * v[idx];
                    }
                    return acc;
                }};
}

double ramp(double beta, double lo, double hi, double t) {
    return smoothstep(smoothstep_order(beta), (t - lo) / (hi - lo));
}

Core core_bump_family(const BumpFamilyParams& p) {
    json j{{"Q", p.code.Q},       {"code_dim", p.code.dim}, {"bits", p.code.bits},
           {"amplitude", p.amplitude}, {"beta", p.beta},
           {"inner_radius", p.spec.inner_radius}, {"outer_radius", p.spec.outer_radius},
           {"w_bump", p.w_bump}, {"w_ramp", p.w_ramp}, {"ramp_lo", p.ramp_lo},
           {"ramp_hi", p.ramp_hi}, {"offset", p.offset}};
    return Core{"bump_family", p.code.dim, j, [p](const double* z) {
                    double v = p.offset;
                    if (p.w_bump != 0.0) v += p.w_bump * bump_grid_sum(p.code, p.amplitude, p.beta, p.spec, z);
                    if (p.w_ramp != 0.0) v += p.w_ramp * ramp(p.beta, p.ramp_lo, p.ramp_hi, z[0]);
                    return v;
                }};
}

Core core_custom(int dim, std::function<double(const double*)> fn) {
    return Core{"custom", dim, json::object(), std::move(fn)};
}

Core core_from_json(const json& j) {
    const std::string kind = j.at("kind");
    const json& p = j.at("params");
    const int dim = j.at("dim");
    if (kind == "constant") return core_constant(dim, p.at("value"));
    if (kind == "linear") return core_linear(p.at("weights").get<std::vector<double>>(), p.at("bias"));
    if (kind == "power")
        return core_power(dim, p.at("coord"), p.at("exponent"), p.at("scale"), p.at("offset"));
    if (kind == "table")
        return core_table(p.at("shape").get<std::vector<int>>(), p.at("spacing").get<std::vector<double>>(),
                          p.at("values").get<std::vector<double>>());
    if (kind == "bump_family") {
        BumpFamilyParams b;
        b.code.Q = p.at("Q");
        b.code.dim = p.at("code_dim");
        b.code.bits = p.at("bits").get<std::vector<std::uint8_t>>();
        b.amplitude = p.at("amplitude");
        b.beta = p.at("beta");
        b.spec = BumpSpec{b.code.dim, p.at("inner_radius"), p.at("outer_radius"), b.beta};
        b.w_bump = p.at("w_bump");
        b.w_ramp = p.at("w_ramp");
        b.ramp_lo = p.at("ramp_lo");
        b.ramp_hi = p.at("ramp_hi");
        b.offset = p.at("offset");
        return core_bump_family(b);
    }
    throw ParameterError("core kind not deserializable: " + kind);
}

json core_to_json(const Core& c) {
    if (c.kind == "custom") throw ParameterError("custom cores cannot be serialized");
    return json{{"kind", c.kind}, {"dim", c.dim}, {"params", c.params}};
}

// ---------------------------------------------------------------- components

double eval_component(const Component& c, const double* z) {
    if (const auto* h = std::get_if<HolderComponent>(&c)) {
        double buf[16];
        std::vector<double> big;
        double* zz = buf;
        if (h->active.size() > 16) {
            big.resize(h->active.size());
            zz = big.data();
        }
        for (std::size_t i = 0; i < h->active.size(); ++i) zz[i] = z[h->active[i]];
        return h->core(zz);
    }
    const auto& m = std::get<MaxComponent>(c);
    double v = -kInf;
    for (int i : m.active) v = std::max(v, z[i]);
    return v;
}

namespace {

// Evaluates all layers; when check is set, throws on intermediate range violations.
double eval_layers(const CompositionalFunction& f, const double* x, bool check) {
    std::vector<double> cur(x, x + f.d), next;
    for (int i = 0; i <= f.q; ++i) {
        const auto& layer = f.layers[i];
        next.resize(layer.size());
        for (std::size_t k = 0; k < layer.size(); ++k) next[k] = eval_component(layer[k], cur.data());
        if (check && i < f.q) {
            for (std::size_t k = 0; k < next.size(); ++k)
                if (!(next[k] >= -1e-12 && next[k] <= 1.0 + 1e-12))
                    throw RangeViolation("layer " + std::to_string(i) + " output " + std::to_string(k) +
                                         " = " + std::to_string(next[k]) + " outside [0,1]");
        }
        cur.swap(next);
    }
    return cur[0];
}

}  // namespace

double CompositionalFunction::eval(const double* x) const { return eval_layers(*this, x, false); }

std::vector<int> CompositionalFunction::active_inputs() const {
    // backward propagation of dependence through the layers
    std::vector<char> need(1, 1);
    for (int i = q; i >= 0; --i) {
        const int in_dim = i == 0 ? d : K;
        std::vector<char> prev(in_dim, 0);
        for (std::size_t k = 0; k < layers[i].size(); ++k) {
            if (k < need.size() && !need[k]) continue;
            const auto& c = layers[i][k];
            if (const auto* h = std::get_if<HolderComponent>(&c)) {
                if (h->core.kind == "constant") continue;
                for (int a : h->active) prev[a] = 1;
            } else {
                for (int a : std::get<MaxComponent>(c).active) prev[a] = 1;
            }
        }
        need.swap(prev);
    }
    std::vector<int> out;
    for (int i = 0; i < d; ++i)
        if (need[i]) out.push_back(i);
    return out;
}

ScalarFn CompositionalFunction::as_scalar_fn() const {
    auto self = std::make_shared<CompositionalFunction>(*this);
    return ScalarFn{d, active_inputs(), [self](const double* x) { return self->eval(x); }};
}

double eval_chom(const CompositionalFunction& f, const double* x) {
    for (int i = 0; i < f.d; ++i)
        if (!(x[i] >= 0.0 && x[i] <= 1.0)) throw DomainError("point outside [0,1]^d");
    return eval_layers(f, x, true);
}

const CheckResult* ValidationReport::find(const std::string& name) const {
    for (const auto& c : checks)
        if (c.name == name) return &c;
    return nullptr;
}

ValidationReport validate_chom(const CompositionalFunction& f, int grid_resolution) {
    if (grid_resolution < 2) throw ParameterError("grid_resolution must be at least 2");
    ValidationReport rep;
    auto add = [&](CheckResult c) {
        if (!c.passed) rep.passed = false;
        rep.checks.push_back(std::move(c));
    };

    CheckResult dims{"dimension_condition", true, "", {}};
    if (f.d_lower > f.d || (f.q > 0 && f.d_lower > f.K)) {
        dims.passed = false;
        dims.message = "requires d_lower <= d and d_lower*q <= K*q";
    }
    add(dims);

    CheckResult st{"structure", true, "", {}};
    auto fail = [&](const std::string& m) {
        if (st.passed) st.message = m;
        st.passed = false;
    };
    if (static_cast<int>(f.layers.size()) != f.q + 1) fail("expected q+1 layers");
    for (int i = 0; i < static_cast<int>(f.layers.size()) && st.passed; ++i) {
        const int in_dim = i == 0 ? f.d : f.K;
        const std::size_t outs = i < f.q ? static_cast<std::size_t>(f.K) : 1u;
        if (f.layers[i].size() != outs) fail("layer " + std::to_string(i) + " has wrong output count");
        for (const auto& c : f.layers[i]) {
            if (const auto* h = std::get_if<HolderComponent>(&c)) {
                if (h->input_dim != in_dim) fail("component input_dim mismatch in layer " + std::to_string(i));
                if (static_cast<int>(h->active.size()) != f.d_lower) fail("Hölder component index set size != d_lower");
                if (h->core.dim != static_cast<int>(h->active.size())) fail("core dim mismatch");
                for (int a : h->active)
                    if (a < 0 || a >= in_dim) fail("Hölder index out of range");
            } else {
                const auto& m = std::get<MaxComponent>(c);
                if (m.input_dim != in_dim) fail("component input_dim mismatch in layer " + std::to_string(i));
                if (m.active.empty() || static_cast<int>(m.active.size()) > f.d_star)
                    fail("max component index set size outside [1, d_star]");
                for (int a : m.active)
                    if (a < 0 || a >= in_dim) fail("max index out of range");
            }
        }
    }
    add(st);

    CheckResult sup{"holder_sup", true, "", {}}, quo{"holder_quotient", true, "", {}};
    if (st.passed) {
        for (int i = 0; i <= f.q; ++i) {
            for (std::size_t k = 0; k < f.layers[i].size(); ++k) {
                const auto* h = std::get_if<HolderComponent>(&f.layers[i][k]);
                if (!h) continue;
                const int dim = h->core.dim;
                std::vector<int> all(dim);
                for (int a = 0; a < dim; ++a) all[a] = a;
                ScalarFn core_fn{dim, all, h->core.fn};
                double s_grid = 0.0;
                std::vector<double> worst;
                for_each_node(dim, all, grid_resolution, [&](const double* z) {
                    const double v = std::abs(h->core(z));
                    if (v > s_grid) {
                        s_grid = v;
                        worst.assign(z, z + dim);
                    }
                });
                if (s_grid > h->radius + 1e-12 && sup.passed) {
                    sup.passed = false;
                    sup.message = "layer " + std::to_string(i) + " component " + std::to_string(k) +
                                  ": sup " + std::to_string(s_grid) + " > radius at " + fmt_point(worst);
                    sup.witness = worst;
                }
                const double total = holder_seminorm_probe(core_fn, h->beta, grid_resolution);
                const double q_only = total - s_grid;
                if (q_only > h->radius + 1e-9 && quo.passed) {
                    quo.passed = false;
                    quo.message = "layer " + std::to_string(i) + " component " + std::to_string(k) +
                                  ": difference quotient " + std::to_string(q_only) + " > radius";
                }
            }
        }
    }
    add(sup);
    add(quo);

    CheckResult rng{"range", true, "", {}};
    if (st.passed && f.q > 0) {
        int per_dim = grid_resolution;
        while (per_dim > 2 && std::pow(static_cast<double>(per_dim), f.d) > 1e6) --per_dim;
        std::vector<int> all(f.d);
        for (int a = 0; a < f.d; ++a) all[a] = a;
        double worst_excess = 0.0;
        for_each_node(f.d, all, per_dim, [&](const double* x) {
            std::vector<double> cur(x, x + f.d), next;
            for (int i = 0; i < f.q; ++i) {
                next.resize(f.layers[i].size());
                for (std::size_t k = 0; k < next.size(); ++k) {
                    next[k] = eval_component(f.layers[i][k], cur.data());
                    const double ex = std::max(next[k] - 1.0, -next[k]);
                    if (ex > 1e-12 && ex > worst_excess) {
                        worst_excess = ex;
                        rng.passed = false;
                        rng.witness.assign(x, x + f.d);
                        rng.message = "layer " + std::to_string(i) + " output " + std::to_string(k) + " = " +
                                      std::to_string(next[k]) + " at " + fmt_point(rng.witness);
                    }
                }
                cur.swap(next);
            }
        });
    }
    add(rng);
    return rep;
}

// ---------------------------------------------------------------- serialization

json chom_to_json(const CompositionalFunction& f) {
    json layers = json::array();
    for (const auto& layer : f.layers) {
        json comps = json::array();
        for (const auto& c : layer) {
            if (const auto* h = std::get_if<HolderComponent>(&c)) {
                std::vector<int> idx;
                for (int a : h->active) idx.push_back(a + 1);
                comps.push_back({{"type", "holder"}, {"input_dim", h->input_dim}, {"active", idx},
                                 {"beta", h->beta}, {"radius", h->radius}, {"core", core_to_json(h->core)}});
            } else {
                const auto& m = std::get<MaxComponent>(c);
                std::vector<int> idx;
                for (int a : m.active) idx.push_back(a + 1);
                comps.push_back({{"type", "max"}, {"input_dim", m.input_dim}, {"active", idx}});
            }
        }
        layers.push_back(comps);
    }
    return json{{"d", f.d}, {"q", f.q}, {"K", f.K}, {"d_star", f.d_star}, {"d_lower", f.d_lower},
                {"beta", f.beta}, {"radius", f.radius}, {"layers", layers}};
}

CompositionalFunction chom_from_json(const json& j) {
    CompositionalFunction f;
    f.d = j.at("d");
    f.q = j.at("q");
    f.K = j.at("K");
    f.d_star = j.at("d_star");
    f.d_lower = j.at("d_lower");
    f.beta = j.at("beta");
    f.radius = j.at("radius");
    for (const auto& lj : j.at("layers")) {
        std::vector<Component> layer;
        for (const auto& cj : lj) {
            std::vector<int> idx;
            for (int a : cj.at("active")) idx.push_back(a - 1);
            if (cj.at("type") == "holder") {
                layer.push_back(HolderComponent{cj.at("input_dim"), idx, core_from_json(cj.at("core")),
                                                cj.at("beta"), cj.at("radius")});
            } else {
                layer.push_back(MaxComponent{cj.at("input_dim"), idx});
            }
        }
        f.layers.push_back(std::move(layer));
    }
    return f;
}

HolderComponent holder_component(int input_dim, std::vector<int> active, Core core, double beta, double radius) {
    return HolderComponent{input_dim, std::move(active), std::move(core), beta, radius};
}

MaxComponent max_component(int input_dim, std::vector<int> active) {
    return MaxComponent{input_dim, std::move(active)};
}

CompositionalFunction single_layer(int d, std::vector<int> active, Core core, double beta, double radius,
                                   int d_star) {
    CompositionalFunction f;
    f.d = d;
    f.q = 0;
    f.K = 1;
    f.d_star = d_star;
    f.d_lower = static_cast<int>(active.size());
    f.beta = beta;
    f.radius = radius;
    f.layers = {{holder_component(d, std::move(active), std::move(core), beta, radius)}};
    return f;
}

}  // namespace mlab::funcspace
