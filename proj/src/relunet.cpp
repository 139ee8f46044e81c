#include "mlab/relunet.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace mlab::relunet {

using funcspace::CompositionalFunction;

void Matrix::add(int i, int j, double val) {
    if (val == 0.0) return;
    for (auto& [c, x] : r[i])
        if (c == j) {
            x += val;
            return;
        }
    r[i].emplace_back(j, val);
}

double Matrix::get(int i, int j) const {
    for (const auto& [c, x] : r[i])
        if (c == j) return x;
    return 0.0;
}

std::size_t Matrix::nnz() const {
    std::size_t n = 0;
    for (const auto& row : r)
        for (const auto& e : row)
            if (e.second != 0.0) ++n;
    return n;
}

double Matrix::max_abs() const {
    double m = 0.0;
    for (const auto& row : r)
        for (const auto& e : row) m = std::max(m, std::abs(e.second));
    return m;
}

Matrix matmul(const Matrix& A, const Matrix& B) {
    if (A.cols != B.rows) throw ParameterError("matmul: dimension mismatch");
    Matrix C(A.rows, B.cols);
    std::vector<double> acc(B.cols, 0.0);
    std::vector<int> touched;
    std::vector<char> seen(B.cols, 0);
    for (int i = 0; i < A.rows; ++i) {
        touched.clear();
        for (const auto& [k, a] : A.r[i])
            for (const auto& [j, b] : B.r[k]) {
                if (!seen[j]) {
                    seen[j] = 1;
                    touched.push_back(j);
                }
                acc[j] += a * b;
            }
        std::sort(touched.begin(), touched.end());
        for (int j : touched) {
            if (acc[j] != 0.0) C.r[i].emplace_back(j, acc[j]);
            acc[j] = 0.0;
            seen[j] = 0;
        }
    }
    return C;
}

std::vector<double> ReluNetwork::forward_vec(const double* x) const {
    std::vector<double> h(x, x + input_dim), next;
    for (std::size_t l = 0; l < W.size(); ++l) {
        const Matrix& M = W[l];
        if (M.cols != static_cast<int>(h.size())) throw ParameterError("forward: dimension mismatch");
        next.assign(M.rows, 0.0);
        // extended accumulation keeps the threshold sums exact
        for (int i = 0; i < M.rows; ++i) {
            long double s = 0.0L;
            for (const auto& [j, w] : M.r[i]) s += static_cast<long double>(w) * h[j];
            next[i] = static_cast<double>(s);
        }
        if (l < v.size())
            for (int i = 0; i < M.rows; ++i) next[i] = std::max(0.0, next[i] - v[l][i]);
        h.swap(next);
    }
    return h;
}

double ReluNetwork::forward(const double* x) const { return forward_vec(x)[0]; }

double ReluNetwork::forward(const std::vector<double>& x) const {
    if (static_cast<int>(x.size()) != input_dim) throw ParameterError("forward: input dimension mismatch");
    return forward(x.data());
}

ScalarFn ReluNetwork::as_scalar_fn() const {
    auto self = std::make_shared<ReluNetwork>(*this);
    std::vector<int> act;
    // coordinates with a nonzero first-layer weight
    std::vector<char> used(input_dim, 0);
    for (const auto& row : W.front().r)
        for (const auto& e : row)
            if (e.second != 0.0) used[e.first] = 1;
    for (int i = 0; i < input_dim; ++i)
        if (used[i]) act.push_back(i);
    return ScalarFn{input_dim, act, [self](const double* x) { return self->forward(x); }};
}

double forward(const ReluNetwork& net, const std::vector<double>& x) { return net.forward(x); }

void NetworkBudget::validate() const {
    if (!(G > 0 && N >= 1 && S > 0 && B > 0)) throw ParameterError("network budget needs G>0, N>=1, S>0, B>0");
}

bool BudgetAccount::within(const NetworkBudget& b) const {
    return depth <= b.G && width <= b.N && static_cast<double>(nnz) <= b.S && max_abs <= b.B &&
           sup_estimate <= b.F;
}

BudgetAccount budget_of(const ReluNetwork& net, int sup_grid_resolution) {
    BudgetAccount acc;
    acc.depth = net.depth();
    for (int l = 0; l < net.depth(); ++l) acc.width = std::max(acc.width, net.W[l].rows);
    for (const auto& M : net.W) {
        acc.nnz += M.nnz();
        acc.max_abs = std::max(acc.max_abs, M.max_abs());
    }
    for (const auto& sh : net.v)
        for (double x : sh)
            if (x != 0.0) {
                ++acc.nnz;
                acc.max_abs = std::max(acc.max_abs, std::abs(x));
            }
    const int d = net.input_dim;
    int per = sup_grid_resolution > 0 ? sup_grid_resolution : 4097;
    while (per > 2 && std::pow(static_cast<double>(per), d) > 1e6) --per;
    std::vector<int> all(d);
    for (int i = 0; i < d; ++i) all[i] = i;
    for_each_node(d, all, per, [&](const double* x) {
        acc.sup_estimate = std::max(acc.sup_estimate, std::abs(net.forward(x)));
    });
    return acc;
}

json to_json(const ReluNetwork& net) {
    json layers = json::array();
    for (std::size_t l = 0; l < net.W.size(); ++l) {
        const Matrix& M = net.W[l];
        std::vector<std::vector<double>> dense(M.rows, std::vector<double>(M.cols, 0.0));
        for (int i = 0; i < M.rows; ++i)
            for (const auto& [j, x] : M.r[i]) dense[i][j] = x;
        json layer{{"w", dense}};
        if (l < net.v.size()) layer["v"] = net.v[l];
        layers.push_back(layer);
    }
    return json{{"input_dim", net.input_dim}, {"layers", layers}};
}

ReluNetwork network_from_json(const json& j) {
    ReluNetwork net;
    net.input_dim = j.at("input_dim");
    const auto& layers = j.at("layers");
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const auto dense = layers[l].at("w").get<std::vector<std::vector<double>>>();
        const int rows = static_cast<int>(dense.size());
        const int cols = rows ? static_cast<int>(dense[0].size())
                              : (l == 0 ? net.input_dim : net.W.back().rows);
        Matrix M(rows, cols);
        for (int i = 0; i < rows; ++i)
            for (int c = 0; c < cols; ++c)
                if (dense[i][c] != 0.0) M.r[i].emplace_back(c, dense[i][c]);
        net.W.push_back(std::move(M));
        if (l + 1 < layers.size()) net.v.push_back(layers[l].at("v").get<std::vector<double>>());
    }
    return net;
}

ReluNetwork affine_net(const Matrix& W) {
    ReluNetwork net;
    net.input_dim = W.cols;
    net.W = {W};
    return net;
}

ReluNetwork zero_net(int input_dim) { return affine_net(Matrix(1, input_dim)); }

ReluNetwork compose(const ReluNetwork& outer, const ReluNetwork& inner) {
    if (outer.input_dim != inner.output_dim()) throw ParameterError("compose: dimension mismatch");
    ReluNetwork net;
    net.input_dim = inner.input_dim;
    net.W.assign(inner.W.begin(), inner.W.end() - 1);
    net.W.push_back(matmul(outer.W.front(), inner.W.back()));
    net.W.insert(net.W.end(), outer.W.begin() + 1, outer.W.end());
    net.v = inner.v;
    net.v.insert(net.v.end(), outer.v.begin(), outer.v.end());
    return net;
}

ReluNetwork pad_depth(const ReluNetwork& net, int extra, bool nonneg) {
    ReluNetwork out = net;
    for (int e = 0; e < extra; ++e) {
        const int k = out.output_dim();
        Matrix last = out.W.back();
        const int cols = last.cols;
        if (nonneg) {
            Matrix id(k, k);
            for (int i = 0; i < k; ++i) id.add(i, i, 1.0);
            out.v.push_back(std::vector<double>(k, 0.0));
            out.W.push_back(id);
        } else {
            Matrix hid(2 * k, cols);
            for (int i = 0; i < k; ++i)
                for (const auto& [j, x] : last.r[i]) {
                    hid.add(i, j, x);
                    hid.add(k + i, j, -x);
                }
            out.W.back() = hid;
            out.v.push_back(std::vector<double>(2 * k, 0.0));
            Matrix o(k, 2 * k);
            for (int i = 0; i < k; ++i) {
                o.add(i, i, 1.0);
                o.add(i, k + i, -1.0);
            }
            out.W.push_back(o);
        }
    }
    return out;
}

ReluNetwork parallel(const std::vector<ReluNetwork>& nets, bool nonneg) {
    if (nets.empty()) throw ParameterError("parallel: no networks");
    int L = 0;
    for (const auto& n : nets) {
        if (n.input_dim != nets[0].input_dim) throw ParameterError("parallel: input dimensions differ");
        L = std::max(L, n.depth());
    }
    std::vector<ReluNetwork> eq;
    for (const auto& n : nets) eq.push_back(pad_depth(n, L - n.depth(), nonneg));
    ReluNetwork out;
    out.input_dim = nets[0].input_dim;
    for (int l = 0; l <= L; ++l) {
        int rows = 0, cols = 0;
        for (const auto& n : eq) {
            rows += n.W[l].rows;
            cols += n.W[l].cols;
        }
        if (l == 0) cols = out.input_dim;
        Matrix M(rows, cols);
        int ro = 0, co = 0;
        std::vector<double> sh;
        for (const auto& n : eq) {
            const Matrix& A = n.W[l];
            for (int i = 0; i < A.rows; ++i)
                for (const auto& [j, x] : A.r[i]) M.r[ro + i].emplace_back(l == 0 ? j : co + j, x);
            ro += A.rows;
            co += A.cols;
            if (l < L) sh.insert(sh.end(), n.v[l].begin(), n.v[l].end());
        }
        out.W.push_back(std::move(M));
        if (l < L) out.v.push_back(std::move(sh));
    }
    return out;
}

ReluNetwork clamp01_net(int k) {
    ReluNetwork net;
    net.input_dim = k;
    Matrix W0(2 * k, k), W1(k, 2 * k);
    std::vector<double> v(2 * k, 0.0);
    for (int i = 0; i < k; ++i) {
        W0.add(i, i, 1.0);
        W0.add(k + i, i, 1.0);
        v[k + i] = 1.0;
        W1.add(i, i, 1.0);
        W1.add(i, k + i, -1.0);
    }
    net.W = {W0, W1};
    net.v = {v};
    return net;
}

// ---------------------------------------------------------------- threshold

int threshold_k(double delta) {
    return static_cast<int>(std::ceil(-std::log(delta) / std::log(2.0))) + 1;
}

double threshold_reference(double delta, double t) {
    const int k = threshold_k(delta);
    auto s = [](double z) { return std::max(0.0, z); };
    const double a = s(2.0 * s(t) - 1.0);
    const double p = std::ldexp(1.0, k);
    return 2.0 * s(p * a) - 2.0 * s(p * a - 1.0) - 1.0;
}

ReluNetwork build_threshold_net(double delta) {
    if (!(delta > 0.0 && delta <= 0.5)) throw ParameterError("threshold delta must lie in (0, 1/2]");
    const int k = threshold_k(delta);
    ReluNetwork net;
    net.input_dim = 1;
    // [σ(t), σ(t)]
    Matrix W0(2, 1);
    W0.add(0, 0, 1.0);
    W0.add(1, 0, 1.0);
    net.W.push_back(W0);
    net.v.push_back({0.0, 0.0});
    // two copies of σ(2σ(t) - 1)
    Matrix W1(2, 2);
    for (int i = 0; i < 2; ++i) {
        W1.add(i, 0, 1.0);
        W1.add(i, 1, 1.0);
    }
    net.W.push_back(W1);
    net.v.push_back({1.0, 1.0});
    // doubling chain with unit weights
    for (int r = 0; r < k - 1; ++r) {
        Matrix D(2, 2);
        for (int i = 0; i < 2; ++i) {
            D.add(i, 0, 1.0);
            D.add(i, 1, 1.0);
        }
        net.W.push_back(D);
        net.v.push_back({0.0, 0.0});
    }
    // [σ(c), σ(c), σ(c-1), σ(c-1), 1] with c the sum of the two chain units
    Matrix H(5, 2);
    for (int i = 0; i < 4; ++i) {
        H.add(i, 0, 1.0);
        H.add(i, 1, 1.0);
    }
    net.W.push_back(H);
    net.v.push_back({0.0, 0.0, 1.0, 1.0, -1.0});
    Matrix out(1, 5);
    out.add(0, 0, 1.0);
    out.add(0, 1, 1.0);
    out.add(0, 2, -1.0);
    out.add(0, 3, -1.0);
    out.add(0, 4, -1.0);
    net.W.push_back(out);
    return net;
}

// ---------------------------------------------------------------- approximation

namespace {

// Linear form over the current units; the constant is absorbed into shifts.
struct Form {
    std::vector<std::pair<int, double>> t;
    double c = 0.0;
};

Form operator+(Form a, const Form& b) {
    a.t.insert(a.t.end(), b.t.begin(), b.t.end());
    a.c += b.c;
    return a;
}

Form scaled(Form a, double s) {
    for (auto& e : a.t) e.second *= s;
    a.c *= s;
    return a;
}

class Builder {
public:
    explicit Builder(int input_dim) : in_(input_dim), width_(input_dim) {}

    static Form unit(int i) { return Form{{{i, 1.0}}, 0.0}; }

    // New layer of units σ(pre_k); returns forms for the new units.
    std::vector<Form> layer(const std::vector<Form>& pre) {
        Matrix M(static_cast<int>(pre.size()), width_);
        std::vector<double> sh(pre.size());
        for (std::size_t k = 0; k < pre.size(); ++k) {
            for (const auto& [j, w] : pre[k].t) M.add(static_cast<int>(k), j, w);
            sh[k] = -pre[k].c;
        }
        W_.push_back(std::move(M));
        v_.push_back(std::move(sh));
        width_ = static_cast<int>(pre.size());
        std::vector<Form> out;
        for (std::size_t k = 0; k < pre.size(); ++k) out.push_back(unit(static_cast<int>(k)));
        return out;
    }

    ReluNetwork finish(const std::vector<Form>& outs) {
        bool need_const = false;
        for (const auto& f : outs) need_const |= f.c != 0.0;
        int const_unit = -1;
        if (need_const) {
            if (W_.empty()) throw ParameterError("builder: constant output needs a hidden layer");
            Matrix& last = W_.back();
            const_unit = last.rows;
            last.rows += 1;
            last.r.emplace_back();
            v_.back().push_back(-1.0);
            width_ += 1;
        }
        Matrix out(static_cast<int>(outs.size()), width_);
        for (std::size_t k = 0; k < outs.size(); ++k) {
            for (const auto& [j, w] : outs[k].t) out.add(static_cast<int>(k), j, w);
            if (outs[k].c != 0.0) out.add(static_cast<int>(k), const_unit, outs[k].c);
        }
        ReluNetwork net;
        net.input_dim = in_;
        net.W = W_;
        net.W.push_back(std::move(out));
        net.v = v_;
        return net;
    }

private:
    int in_;
    int width_;
    std::vector<Matrix> W_;
    std::vector<std::vector<double>> v_;
};

// Reduces each group of nonnegative forms to its maximum, all groups in lockstep,
// using max(a, b) = σ(a) + σ(b - a).
std::vector<Form> max_groups(Builder& b, std::vector<std::vector<Form>> groups) {
    auto longest = [&] {
        std::size_t m = 0;
        for (const auto& g : groups) m = std::max(m, g.size());
        return m;
    };
    while (longest() > 1) {
        std::vector<Form> pre;
        std::vector<std::vector<std::vector<int>>> plan(groups.size());  // per group, per new value: units
        for (std::size_t g = 0; g < groups.size(); ++g) {
            const auto& vals = groups[g];
            for (std::size_t i = 0; i < vals.size(); i += 2) {
                std::vector<int> units;
                units.push_back(static_cast<int>(pre.size()));
                pre.push_back(vals[i]);
                if (i + 1 < vals.size()) {
                    units.push_back(static_cast<int>(pre.size()));
                    pre.push_back(vals[i + 1] + scaled(vals[i], -1.0));
                }
                plan[g].push_back(units);
            }
        }
        const auto units = b.layer(pre);
        for (std::size_t g = 0; g < groups.size(); ++g) {
            std::vector<Form> next;
            for (const auto& us : plan[g]) {
                Form f;
                for (int u : us) f = f + units[u];
                next.push_back(f);
            }
            groups[g] = std::move(next);
        }
    }
    std::vector<Form> out;
    for (const auto& g : groups) out.push_back(g.front());
    return out;
}

std::size_t node_count(int cells, int k) {
    double n = std::pow(static_cast<double>(cells) + 1.0, k);
    return n > 1e18 ? static_cast<std::size_t>(-1) : static_cast<std::size_t>(n);
}

ReluNetwork component_net(const funcspace::Component& comp, int cells) {
    if (const auto* m = std::get_if<funcspace::MaxComponent>(&comp)) {
        Builder b(m->input_dim);
        std::vector<Form> vals;
        for (int i : m->active) vals.push_back(Builder::unit(i));
        // inputs lie in [0,1], so one σ layer passes them unchanged
        vals = b.layer(vals);
        auto out = max_groups(b, {vals});
        return b.finish(out);
    }
    const auto& h = std::get<funcspace::HolderComponent>(comp);
    Builder b(h.input_dim);
    const int k = static_cast<int>(h.active.size());
    if (h.core.kind == "constant") {
        const double c = h.core.params.at("value");
        b.layer({Builder::unit(h.active[0])});
        return b.finish({Form{{}, c}});
    }
    const double step = 1.0 / cells;
    if (k == 1) {
        // g(0) + Σ_j (s_j - s_{j-1}) σ(z - j/m)
        std::vector<double> g(cells + 1);
        for (int j = 0; j <= cells; ++j) {
            double z = j * step;
            g[j] = h.core(&z);
        }
        std::vector<Form> pre;
        std::vector<double> coef;
        double prev = 0.0;
        for (int j = 0; j < cells; ++j) {
            const double s = (g[j + 1] - g[j]) / step;
            if (s - prev != 0.0) {
                pre.push_back(Form{{{h.active[0], 1.0}}, -j * step});
                coef.push_back(s - prev);
            }
            prev = s;
        }
        if (pre.empty()) pre.push_back(Form{{{h.active[0], 1.0}}, 0.0}), coef.push_back(0.0);
        const auto units = b.layer(pre);
        Form out{{}, g[0]};
        for (std::size_t i = 0; i < units.size(); ++i)
            if (coef[i] != 0.0) out = out + scaled(units[i], coef[i]);
        return b.finish({out});
    }
    // Courant hats of the Kuhn triangulation: φ_c = σ(h - P - N) / h with
    // P = max_i σ(z_i - c_i), N = max_i σ(c_i - z_i)
    const std::size_t nodes = node_count(cells, k);
    std::vector<std::vector<Form>> groups;
    std::vector<double> weight;
    std::vector<double> c(k);
    for (std::size_t idx = 0; idx < nodes; ++idx) {
        std::size_t rem = idx;
        for (int i = 0; i < k; ++i) {
            c[i] = static_cast<double>(rem % (cells + 1)) * step;
            rem /= (cells + 1);
        }
        const double gv = h.core(c.data());
        if (gv == 0.0) continue;
        std::vector<Form> P, N;
        for (int i = 0; i < k; ++i) {
            P.push_back(Form{{{h.active[i], 1.0}}, -c[i]});
            N.push_back(Form{{{h.active[i], -1.0}}, c[i]});
        }
        groups.push_back(P);
        groups.push_back(N);
        weight.push_back(gv / step);
    }
    if (groups.empty()) {
        b.layer({Builder::unit(h.active[0])});
        return b.finish({Form{{}, 0.0}});
    }
    // first layer applies σ to every signed difference
    std::vector<Form> flat;
    for (const auto& g : groups) flat.insert(flat.end(), g.begin(), g.end());
    const auto first = b.layer(flat);
    std::size_t pos = 0;
    for (auto& g : groups)
        for (auto& f : g) f = first[pos++];
    const auto maxima = max_groups(b, groups);
    std::vector<Form> hats;
    for (std::size_t n = 0; n < weight.size(); ++n)
        hats.push_back(Form{{}, step} + scaled(maxima[2 * n], -1.0) + scaled(maxima[2 * n + 1], -1.0));
    const auto hu = b.layer(hats);
    Form out;
    for (std::size_t n = 0; n < weight.size(); ++n) out = out + scaled(hu[n], weight[n]);
    return b.finish({out});
}

ReluNetwork build_approximant(const CompositionalFunction& f, int cells) {
    ReluNetwork net;
    bool first = true;
    for (int i = 0; i <= f.q; ++i) {
        std::vector<ReluNetwork> comps;
        for (const auto& c : f.layers[i]) comps.push_back(component_net(c, cells));
        ReluNetwork layer = parallel(comps, false);
        layer = compose(clamp01_net(layer.output_dim()), layer);
        net = first ? layer : compose(layer, net);
        first = false;
    }
    return net;
}

std::vector<int> validation_coords(const CompositionalFunction& f) { return f.active_inputs(); }

}  // namespace

double grid_sup_error(const ReluNetwork& net, const CompositionalFunction& f) {
    const auto coords = validation_coords(f);
    const int k = static_cast<int>(coords.size());
    int per = k <= 1 ? 4097 : 257;
    while (per > 2 && std::pow(static_cast<double>(per), k) > 1e6) --per;
    double err = 0.0;
    for_each_node(f.d, coords, per, [&](const double* x) {
        err = std::max(err, std::abs(net.forward(x) - f.eval(x)));
    });
    return err;
}

ApproxResult approximate_chom_detailed(const CompositionalFunction& f, double delta, const ApproxOptions& opt) {
    if (!(delta > 0.0 && delta <= 0.5)) throw ParameterError("approximation delta must lie in (0, 1/2]");
    int kmax = 1;
    for (const auto& layer : f.layers)
        for (const auto& c : layer)
            if (const auto* h = std::get_if<funcspace::HolderComponent>(&c))
                kmax = std::max(kmax, static_cast<int>(h->active.size()));
    int cells = std::max(1, opt.start_cells);
    double last_err = kInf;
    for (int round = 0; round < opt.max_rounds; ++round) {
        if (node_count(cells, kmax) > opt.node_cap)
            throw CapacityError("interpolation grid above node cap; achieved error " + std::to_string(last_err) +
                                " with " + std::to_string(cells) + " cells per axis");
        ApproxResult res;
        res.net = build_approximant(f, cells);
        res.cells = cells;
        res.grid_error = grid_sup_error(res.net, f);
        if (res.grid_error <= delta / 7.0) return res;
        last_err = res.grid_error;
        cells = std::max(cells + 1, static_cast<int>(std::ceil(1.2 * cells)));
    }
    throw CapacityError("approximation did not converge; achieved error " + std::to_string(last_err));
}

ReluNetwork approximate_chom(const CompositionalFunction& f, double delta, const ApproxOptions& opt) {
    return approximate_chom_detailed(f, delta, opt).net;
}

ClassifierNet build_classifier_net_detailed(const CompositionalFunction& f, double delta, const ApproxOptions& opt) {
    ClassifierNet out;
    out.inner = approximate_chom_detailed(f, delta, opt);
    out.net = compose(build_threshold_net(delta), out.inner.net);
    const auto coords = validation_coords(f);
    const int k = static_cast<int>(coords.size());
    int per = k <= 1 ? 4097 : 257;
    while (per > 2 && std::pow(static_cast<double>(per), k) > 1e6) --per;
    for_each_node(f.d, coords, per, [&](const double* x) {
        const double m = 2.0 * f.eval(x) - 1.0;
        const double y = out.net.forward(x);
        if (m > delta && y != 1.0) out.regions_ok = false;
        if (m < -delta && y != -1.0) out.regions_ok = false;
    });
    if (!out.regions_ok) throw FitError("classifier network disagrees with the sign regions");
    return out;
}

ReluNetwork build_classifier_net(const CompositionalFunction& f, double delta, const ApproxOptions& opt) {
    return build_classifier_net_detailed(f, delta, opt).net;
}

}  // namespace mlab::relunet
