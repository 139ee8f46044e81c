#include "mlab/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <random>

namespace mlab::estimators {

using funcspace::CompositionalFunction;

// ---------------------------------------------------------------- gradient ERM

void TrainConfig::validate() const {
    if (iterations < 1) throw ParameterError("iteration cap must be >= 1");
    if (restarts < 1) throw ParameterError("restarts must be >= 1");
    if (!(step_size > 0.0)) throw ParameterError("step size must be positive");
}

double empirical_risk(const ScalarFn& f, const dist::Dataset& data, risk::Loss loss) {
    double acc = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) acc += risk::pointwise_loss(loss, data.y[i], f(data.row(i)));
    return acc / data.size();
}

namespace {

// Dense fully connected ReLU net with one flat parameter vector.
struct Mlp {
    int d = 1;
    std::vector<int> widths;  // hidden
    std::vector<std::size_t> w_off, v_off;
    std::size_t out_off = 0, total = 0;
    std::vector<double> theta;

    Mlp(int d_, std::vector<int> widths_) : d(d_), widths(std::move(widths_)) {
        int prev = d;
        for (int w : widths) {
            w_off.push_back(total);
            total += static_cast<std::size_t>(w) * prev;
            v_off.push_back(total);
            total += w;
            prev = w;
        }
        out_off = total;
        total += prev;
        theta.assign(total, 0.0);
    }

    int in_of(std::size_t l) const { return l == 0 ? d : widths[l - 1]; }

    // returns output; fills pre-activations per layer when acts != nullptr
    double forward(const double* x, std::vector<std::vector<double>>* acts) const {
        std::vector<double> h(x, x + d), next;
        if (acts) acts->assign(1, h);
        for (std::size_t l = 0; l < widths.size(); ++l) {
            const int in = in_of(l), out = widths[l];
            next.assign(out, 0.0);
            for (int i = 0; i < out; ++i) {
                double s = 0.0;
                const double* w = &theta[w_off[l] + static_cast<std::size_t>(i) * in];
                for (int j = 0; j < in; ++j) s += w[j] * h[j];
                next[i] = std::max(0.0, s - theta[v_off[l] + i]);
            }
            h.swap(next);
            if (acts) acts->push_back(h);
        }
        double s = 0.0;
        for (std::size_t j = 0; j < h.size(); ++j) s += theta[out_off + j] * h[j];
        return s;
    }

    // accumulates dL/dθ given dL/df = g
    void backward(const std::vector<std::vector<double>>& acts, double g, std::vector<double>& grad) const {
        const std::size_t L = widths.size();
        std::vector<double> delta(acts[L].size());
        for (std::size_t j = 0; j < acts[L].size(); ++j) {
            grad[out_off + j] += g * acts[L][j];
            delta[j] = g * theta[out_off + j];
        }
        for (std::size_t l = L; l-- > 0;) {
            const int in = in_of(l), out = widths[l];
            std::vector<double> prev(in, 0.0);
            for (int i = 0; i < out; ++i) {
                if (acts[l + 1][i] <= 0.0) continue;
                const double di = delta[i];
                grad[v_off[l] + i] -= di;
                const std::size_t base = w_off[l] + static_cast<std::size_t>(i) * in;
                for (int j = 0; j < in; ++j) {
                    grad[base + j] += di * acts[l][j];
                    prev[j] += di * theta[base + j];
                }
            }
            delta.swap(prev);
        }
    }

    relunet::ReluNetwork to_network() const {
        relunet::ReluNetwork net;
        net.input_dim = d;
        for (std::size_t l = 0; l < widths.size(); ++l) {
            const int in = in_of(l), out = widths[l];
            relunet::Matrix M(out, in);
            for (int i = 0; i < out; ++i)
                for (int j = 0; j < in; ++j) M.add(i, j, theta[w_off[l] + static_cast<std::size_t>(i) * in + j]);
            net.W.push_back(M);
            net.v.emplace_back(theta.begin() + v_off[l], theta.begin() + v_off[l] + out);
        }
        const int last = widths.empty() ? d : widths.back();
        relunet::Matrix O(1, last);
        for (int j = 0; j < last; ++j) O.add(0, j, theta[out_off + j]);
        net.W.push_back(O);
        return net;
    }
};

double loss_grad(risk::Loss loss, int y, double f) {
    switch (loss) {
        case risk::Loss::logistic: return -y / (1.0 + std::exp(y * f));
        default: return y * f < 1.0 ? -static_cast<double>(y) : 0.0;  // hinge subgradient, also for zero_one
    }
}

void project(std::vector<double>& theta, const relunet::NetworkBudget& b, const TrainConfig& cfg) {
    if (cfg.clip)
        for (double& t : theta) t = std::clamp(t, -b.B, b.B);
    if (cfg.prune && static_cast<double>(theta.size()) > b.S) {
        const std::size_t S = static_cast<std::size_t>(b.S);
        std::vector<std::size_t> order(theta.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t c) { return std::abs(theta[a]) > std::abs(theta[c]); });
        for (std::size_t i = S; i < order.size(); ++i) theta[order[i]] = 0.0;
    }
}

double mlp_risk(const Mlp& m, const dist::Dataset& data, risk::Loss loss) {
    double acc = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i)
        acc += risk::pointwise_loss(loss, data.y[i], m.forward(data.row(i), nullptr));
    return acc / data.size();
}

}  // namespace

relunet::ReluNetwork erm_gradient(const dist::Dataset& data, const relunet::NetworkBudget& budget, risk::Loss loss,
                                  const TrainConfig& cfg) {
    if (data.size() == 0) throw ParameterError("empty dataset");
    budget.validate();
    cfg.validate();
    if (budget.S < data.dim) throw ParameterError("budget infeasible: S < d");
    const int L = cfg.hidden_layers > 0 ? std::min<int>(cfg.hidden_layers, static_cast<int>(budget.G))
                                        : std::min(2, static_cast<int>(budget.G));
    const int width = cfg.width > 0 ? std::min<int>(cfg.width, static_cast<int>(budget.N))
                                    : static_cast<int>(budget.N);
    if (L < 1 || width < 1) throw ParameterError("budget infeasible: no hidden layer available");

    struct Candidate {
        double risk;
        std::vector<double> theta;
    };
    std::vector<Candidate> results(cfg.restarts);
    const Mlp shape(data.dim, std::vector<int>(L, width));

    parallel_for(static_cast<std::size_t>(cfg.restarts), [&](std::size_t r) {
        Mlp m = shape;
        std::mt19937_64 rng(mix_seed(cfg.seed, r));
        std::uniform_real_distribution<double> U(-1.0, 1.0);
        for (std::size_t l = 0; l < m.widths.size(); ++l) {
            const double scale = std::min(budget.B, 1.0 / std::sqrt(static_cast<double>(m.in_of(l))));
            for (std::size_t k = m.w_off[l]; k < m.v_off[l]; ++k) m.theta[k] = scale * U(rng);
            for (int i = 0; i < m.widths[l]; ++i) m.theta[m.v_off[l] + i] = 0.1 * std::min(budget.B, 1.0) * U(rng);
        }
        const double so = std::min(budget.B, 1.0 / std::sqrt(static_cast<double>(width)));
        for (std::size_t k = m.out_off; k < m.total; ++k) m.theta[k] = so * U(rng);
        project(m.theta, budget, cfg);
        double cur = mlp_risk(m, data, loss);
        double eta = cfg.step_size;
        std::vector<double> grad(m.total);
        std::vector<std::vector<double>> acts;
        std::vector<std::size_t> idx(data.size());
        std::iota(idx.begin(), idx.end(), 0);
        for (int it = 0; it < cfg.iterations && eta > 1e-8; ++it) {
            std::fill(grad.begin(), grad.end(), 0.0);
            std::size_t bsz = data.size();
            if (cfg.minibatch > 0 && cfg.minibatch < data.size()) {
                bsz = cfg.minibatch;
                for (std::size_t i = 0; i < bsz; ++i) {
                    std::uniform_int_distribution<std::size_t> pick(i, data.size() - 1);
                    std::swap(idx[i], idx[pick(rng)]);
                }
            }
            for (std::size_t b = 0; b < bsz; ++b) {
                const std::size_t i = idx[b];
                const double f = m.forward(data.row(i), &acts);
                const double g = loss_grad(loss, data.y[i], f);
                if (g != 0.0) m.backward(acts, g / bsz, grad);
            }
            Mlp trial = m;
            for (std::size_t k = 0; k < m.total; ++k) trial.theta[k] -= eta * grad[k];
            project(trial.theta, budget, cfg);
            const double risk = mlp_risk(trial, data, loss);
            if (risk <= cur) {
                m.theta.swap(trial.theta);
                cur = risk;
                eta *= 1.1;
            } else {
                eta *= 0.5;
            }
        }
        // descent only approaches zero hinge asymptotically; rescale the output layer once margins are positive
        if (loss == risk::Loss::hinge && cur > 0.0) {
            double min_margin = kInf, max_out = 0.0;
            for (std::size_t i = 0; i < data.size(); ++i)
                min_margin = std::min(min_margin, data.y[i] * m.forward(data.row(i), nullptr));
            for (std::size_t k = m.out_off; k < m.total; ++k) max_out = std::max(max_out, std::abs(m.theta[k]));
            if (min_margin > 0.0 && max_out > 0.0) {
                const double c = std::min(1.0 / min_margin, budget.B / max_out);
                if (c > 1.0) {
                    Mlp trial = m;
                    for (std::size_t k = m.out_off; k < m.total; ++k) trial.theta[k] *= c;
                    project(trial.theta, budget, cfg);
                    const double risk = mlp_risk(trial, data, loss);
                    if (risk <= cur) {
                        m.theta.swap(trial.theta);
                        cur = risk;
                    }
                }
            }
        }
        results[r] = Candidate{cur, m.theta};
    });

    std::size_t best = 0;
    for (std::size_t r = 1; r < results.size(); ++r)
        if (results[r].risk < results[best].risk) best = r;
    Mlp m = shape;
    m.theta = results[best].theta;
    relunet::ReluNetwork net = m.to_network();
    double best_risk = results[best].risk;

    // zero and constant ±1 networks are inside every budget with S >= 2
    auto consider = [&](const relunet::ReluNetwork& cand) {
        const double r = empirical_risk(cand.as_scalar_fn(), data, loss);
        if (r < best_risk) {
            best_risk = r;
            net = cand;
        }
    };
    consider(relunet::zero_net(data.dim));
    if (budget.S >= 2) {
        for (double sign : {1.0, -1.0}) {
            relunet::ReluNetwork c;
            c.input_dim = data.dim;
            c.W.push_back(relunet::Matrix(1, data.dim));
            c.v.push_back({-std::min(1.0, budget.B)});
            relunet::Matrix O(1, 1);
            O.add(0, 0, sign * std::min(1.0, budget.B));
            c.W.push_back(O);
            consider(c);
        }
    }
    if (std::isfinite(budget.F)) {
        const auto acc = relunet::budget_of(net);
        if (acc.sup_estimate > budget.F) {
            const double s = budget.F / acc.sup_estimate;
            for (auto& e : net.W.back().r[0]) e.second *= s;
        }
    }
    return net;
}

relunet::NetworkBudget hyperparam_schedule(double n, double beta, int q, int d_lower, double s, double a, double b) {
    if (!(n >= 3.0)) throw ParameterError("schedule needs n >= 3");
    if (!(a > 0.0 && b > 0.0)) throw ParameterError("schedule constants must be positive");
    relunet::NetworkBudget out;
    out.B = 1.0;
    out.F = kInf;
    if (std::isinf(s)) {
        const double c = std::ceil(a);
        out.G = c;
        out.N = c;
        out.S = c * c;
        return out;
    }
    const double ln = std::log(n);
    const double m = min1_pow(beta, q);
    const double P = std::pow(n / (ln * ln * ln), d_lower / (d_lower + (s + 2.0) * beta * m));
    out.G = std::ceil(a * ln);
    out.N = std::ceil(a * P);
    out.S = std::ceil(a * ln * P);
    return out;
}

// ---------------------------------------------------------------- covering net

Lattice lattice_for(const CoverParams& p, double xi) {
    if (!(xi > 0.0 && xi <= 1.0)) throw ParameterError("covering radius must lie in (0, 1]");
    Lattice lat;
    const double e = std::min(p.beta, 1.0);
    lat.h = std::min(1.0, std::pow(xi / (2.0 * p.r), 1.0 / e));
    lat.knots = static_cast<int>(std::ceil(1.0 / lat.h - 1e-12)) + 1;
    lat.dv = xi / 2.0;
    lat.levels = static_cast<int>(std::floor(std::min(1.0, p.r) / lat.dv + 1e-9)) + 1;
    return lat;
}

namespace {

// suffix[j][l]: number of valid level sequences on knots j..K-1 starting at level l
std::vector<std::vector<long double>> chain_suffix(int knots, int levels) {
    std::vector<std::vector<long double>> suf(knots, std::vector<long double>(levels, 0.0L));
    for (int l = 0; l < levels; ++l) suf[knots - 1][l] = 1.0L;
    for (int j = knots - 2; j >= 0; --j)
        for (int l = 0; l < levels; ++l) {
            long double s = 0.0L;
            for (int m = std::max(0, l - 1); m <= std::min(levels - 1, l + 1); ++m) s += suf[j + 1][m];
            suf[j][l] = s;
        }
    return suf;
}

std::vector<int> chain_unrank(int knots, int levels, long double rank) {
    const auto suf = chain_suffix(knots, levels);
    std::vector<int> seq(knots);
    int lo = 0, hi = levels - 1;
    for (int j = 0; j < knots; ++j) {
        for (int l = lo; l <= hi; ++l) {
            if (rank < suf[j][l]) {
                seq[j] = l;
                break;
            }
            rank -= suf[j][l];
        }
        lo = std::max(0, seq[j] - 1);
        hi = std::min(levels - 1, seq[j] + 1);
    }
    return seq;
}

std::vector<std::vector<int>> combinations(int n, int k) {
    std::vector<std::vector<int>> out;
    std::vector<int> c(k);
    std::function<void(int, int)> rec = [&](int start, int depth) {
        if (depth == k) {
            out.push_back(c);
            return;
        }
        for (int i = start; i < n; ++i) {
            c[depth] = i;
            rec(i + 1, depth + 1);
        }
    };
    rec(0, 0);
    return out;
}

// Level tables on a knots^k grid with axis-neighbors differing by at most one level.
std::vector<std::vector<int>> enumerate_tables(int knots, int k, int levels, std::size_t cap) {
    std::size_t total = 1;
    for (int i = 0; i < k; ++i) total *= static_cast<std::size_t>(knots);
    std::vector<std::vector<int>> out;
    std::vector<int> t(total, 0);
    std::vector<std::size_t> stride(k, 1);
    for (int i = 1; i < k; ++i) stride[i] = stride[i - 1] * knots;
    std::function<void(std::size_t)> rec = [&](std::size_t pos) {
        if (pos == total) {
            out.push_back(t);
            if (out.size() > cap)
                throw CapacityError("covering net: Hölder grid-net exceeds the cap of " + std::to_string(cap) +
                                    " tables per index set");
            return;
        }
        for (int l = 0; l < levels; ++l) {
            bool ok = true;
            std::size_t rem = pos;
            for (int i = 0; i < k && ok; ++i) {
                const std::size_t ki = rem % knots;
                rem /= knots;
                if (ki > 0 && std::abs(t[pos - stride[i]] - l) > 1) ok = false;
            }
            if (!ok) continue;
            t[pos] = l;
            rec(pos + 1);
        }
    };
    rec(0);
    return out;
}

double member_radius(const CoverParams& p, const Lattice& lat) {
    const double e = std::min(p.beta, 1.0);
    const double M = std::min(1.0, p.r);
    // multilinear tables: each partial is at most dv/h, so the gradient norm is at most sqrt(k)·dv/h
    const double slope = std::sqrt(static_cast<double>(p.d_lower)) * lat.dv / lat.h;
    return std::max(p.r, std::pow(M, 1.0 - e) * std::pow(slope, e)) * (1.0 + 1e-9);
}

}  // namespace

long double chain_count(int knots, int levels) {
    const auto suf = chain_suffix(knots, levels);
    long double s = 0.0L;
    for (int l = 0; l < levels; ++l) s += suf[0][l];
    return s;
}

long double log_chain_count(int knots, int levels) {
    // normalized forward recursion
    std::vector<long double> cur(levels, 1.0L), next(levels);
    long double logscale = 0.0L;
    for (int j = 1; j < knots; ++j) {
        long double mx = 0.0L;
        for (int l = 0; l < levels; ++l) {
            long double s = 0.0L;
            for (int m = std::max(0, l - 1); m <= std::min(levels - 1, l + 1); ++m) s += cur[m];
            next[l] = s;
            mx = std::max(mx, s);
        }
        for (int l = 0; l < levels; ++l) cur[l] = next[l] / mx;
        logscale += std::log(mx);
    }
    long double s = 0.0L;
    for (long double v : cur) s += v;
    return logscale + std::log(s);
}

CoveringNet build_covering_net(const CoverParams& params, double xi, std::size_t cap) {
    if (params.d_lower < 1 || params.d_lower > params.d || (params.q > 0 && params.d_lower > params.K))
        throw ParameterError("covering net: dimension constraints violated");
    if (params.d_lower > 3) throw CapacityError("covering net: d_lower > 3 is not enumerated");
    CoveringNet net;
    net.params = params;
    net.xi = xi;
    net.cap = cap;
    net.lattice = lattice_for(params, xi);
    const auto& lat = net.lattice;

    long double chain_log = 0.0L, holder_count = 0.0L;
    std::vector<std::vector<int>> tables;
    if (params.d_lower == 1) {
        chain_log = log_chain_count(lat.knots, lat.levels);
        // exact while long double still holds integers exactly
        holder_count = chain_log < 40.0L ? std::round(chain_count(lat.knots, lat.levels)) : std::exp(chain_log);
    } else {
        tables = enumerate_tables(lat.knots, params.d_lower, lat.levels, cap);
        holder_count = static_cast<long double>(tables.size());
        chain_log = std::log(holder_count);
    }

    long double log_total = 0.0L;
    for (int i = 0; i <= params.q; ++i) {
        const int in_dim = i == 0 ? params.d : params.K;
        const int outs = i < params.q ? params.K : 1;
        std::vector<ChoiceGroup> groups;
        for (const auto& I : combinations(in_dim, params.d_lower)) {
            ChoiceGroup g;
            g.indices = I;
            g.count = holder_count;
            if (params.d_lower > 1) g.tables = tables;
            groups.push_back(std::move(g));
        }
        for (int sz = 1; sz <= std::min(params.d_star, in_dim); ++sz)
            for (const auto& S : combinations(in_dim, sz)) {
                ChoiceGroup g;
                g.is_max = true;
                g.indices = S;
                g.count = 1.0L;
                groups.push_back(std::move(g));
            }
        // log Σ counts, with the Hölder groups sharing one count
        const long double n_holder = static_cast<long double>(
            std::count_if(groups.begin(), groups.end(), [](const ChoiceGroup& g) { return !g.is_max; }));
        const long double n_max = static_cast<long double>(groups.size()) - n_holder;
        const long double slot_log = chain_log + std::log(n_holder) + std::log1p(n_max / (n_holder * std::exp(chain_log)));
        for (int k = 0; k < outs; ++k) {
            net.slots.push_back(groups);
            net.slot_layer.push_back(i);
            log_total += slot_log;
        }
    }
    net.log_count = log_total;
    if (!net.chain_only() && !net.enumerable())
        throw CapacityError("covering net needs about exp(" + std::to_string(static_cast<double>(log_total)) +
                            ") members, above the cap of " + std::to_string(cap));
    return net;
}

bool CoveringNet::enumerable() const {
    return log_count <= std::log(static_cast<long double>(cap)) + 1e-9L;
}

bool CoveringNet::chain_only() const { return params.q == 0 && params.d_lower == 1; }

CompositionalFunction CoveringNet::member(std::size_t index) const {
    if (!enumerable()) throw CapacityError("covering net too large to index members");
    const auto& lat = lattice;
    const double radius = member_radius(params, lat);
    // slot 0 is the most significant digit
    std::vector<long double> sizes;
    for (const auto& groups : slots) {
        long double s = 0.0L;
        for (const auto& g : groups) s += g.count;
        sizes.push_back(s);
    }
    std::vector<long double> digit(slots.size());
    long double rem = static_cast<long double>(index);
    for (std::size_t k = slots.size(); k-- > 0;) {
        digit[k] = std::fmod(rem, sizes[k]);
        rem = std::floor(rem / sizes[k]);
    }
    if (rem >= 1.0L) throw ParameterError("member index out of range");

    CompositionalFunction f;
    f.d = params.d;
    f.q = params.q;
    f.K = params.q > 0 ? params.K : 1;
    f.d_star = params.d_star;
    f.d_lower = params.d_lower;
    f.beta = params.beta;
    f.radius = radius;
    f.layers.assign(params.q + 1, {});
    for (std::size_t k = 0; k < slots.size(); ++k) {
        const int layer = slot_layer[k];
        const int in_dim = layer == 0 ? params.d : params.K;
        long double r = digit[k];
        for (const auto& g : slots[k]) {
            if (r >= g.count) {
                r -= g.count;
                continue;
            }
            if (g.is_max) {
                f.layers[layer].push_back(funcspace::max_component(in_dim, g.indices));
            } else {
                std::vector<int> levels = params.d_lower == 1 ? chain_unrank(lat.knots, lat.levels, r)
                                                              : g.tables[static_cast<std::size_t>(r)];
                std::vector<double> vals(levels.size());
                for (std::size_t t = 0; t < levels.size(); ++t) vals[t] = levels[t] * lat.dv;
                std::vector<int> shape(params.d_lower, lat.knots);
                std::vector<double> spacing(params.d_lower, lat.h);
                f.layers[layer].push_back(funcspace::holder_component(
                    in_dim, g.indices, funcspace::core_table(shape, spacing, vals), params.beta, radius));
            }
            break;
        }
    }
    return f;
}

std::vector<CompositionalFunction> CoveringNet::members() const {
    if (!enumerable())
        throw CapacityError("covering net has about exp(" + std::to_string(static_cast<double>(log_count)) +
                            ") members, above the cap of " + std::to_string(cap));
    long double prod = 1.0L;
    for (const auto& groups : slots) {
        long double s = 0.0L;
        for (const auto& g : groups) s += g.count;
        prod *= s;
    }
    const auto total = static_cast<std::size_t>(std::llround(prod));
    std::vector<CompositionalFunction> out;
    out.reserve(total);
    for (std::size_t i = 0; i < total; ++i) out.push_back(member(i));
    return out;
}

ScalarFn sign_classifier(const CompositionalFunction& f) {
    auto self = std::make_shared<CompositionalFunction>(f);
    return ScalarFn{f.d, f.active_inputs(), [self](const double* x) { return sgn(2.0 * self->eval(x) - 1.0); }};
}

FiniteClassifierSet classifiers_from(const std::vector<CompositionalFunction>& fs) {
    FiniteClassifierSet set;
    for (const auto& f : fs) set.members.push_back(sign_classifier(f));
    return set;
}

std::vector<double> empirical_risks(const dist::Dataset& data, const FiniteClassifierSet& classifiers,
                                    risk::Loss loss) {
    std::vector<double> out(classifiers.members.size());
    parallel_for(out.size(), [&](std::size_t k) { out[k] = empirical_risk(classifiers.members[k], data, loss); });
    return out;
}

std::size_t erm_finite(const dist::Dataset& data, const FiniteClassifierSet& classifiers, risk::Loss loss) {
    if (classifiers.members.empty() || data.size() == 0) throw ParameterError("erm_finite needs members and data");
    const auto r = empirical_risks(data, classifiers, loss);
    std::size_t best = 0;
    for (std::size_t k = 1; k < r.size(); ++k)
        if (r[k] < r[best]) best = k;
    return best;
}

namespace {

std::size_t count_errors(const ScalarFn& c, const dist::Dataset& data) {
    std::size_t e = 0;
    for (std::size_t i = 0; i < data.size(); ++i)
        if (c(data.row(i)) != static_cast<double>(data.y[i])) ++e;
    return e;
}

// Lexicographically smallest level sequence minimizing misclassifications of sgn(2f-1)
// for the chain member over one coordinate.
std::pair<std::size_t, std::vector<int>> chain_dp(const dist::Dataset& data, int coord, const Lattice& lat) {
    const int K = lat.knots, L = lat.levels, S = K - 1;
    // per segment: points as (x, y)
    std::vector<std::vector<std::pair<double, int>>> seg(S);
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double x = data.row(i)[coord];
        int j = static_cast<int>(std::floor(x / lat.h));
        j = std::clamp(j, 0, S - 1);
        seg[j].emplace_back(x, data.y[i]);
    }
    // cost[j][l*3 + (m-l+1)]
    std::vector<std::vector<std::size_t>> cost(S, std::vector<std::size_t>(static_cast<std::size_t>(L) * 3, 0));
    for (int j = 0; j < S; ++j) {
        for (const auto& [x, y] : seg[j]) {
            const double lam = (x - j * lat.h) / lat.h;
            for (int l = 0; l < L; ++l) {
                const double va = l * lat.dv;
                for (int m = std::max(0, l - 1); m <= std::min(L - 1, l + 1); ++m) {
                    const double vb = m * lat.dv;
                    const double v = (1.0 - lam) * va + lam * vb;
                    if (sgn(2.0 * v - 1.0) != static_cast<double>(y)) ++cost[j][static_cast<std::size_t>(l) * 3 + (m - l + 1)];
                }
            }
        }
    }
    const std::size_t INF = static_cast<std::size_t>(-1);
    std::vector<std::vector<std::size_t>> best(K, std::vector<std::size_t>(L, 0));
    for (int j = S - 1; j >= 0; --j)
        for (int l = 0; l < L; ++l) {
            std::size_t b = INF;
            for (int m = std::max(0, l - 1); m <= std::min(L - 1, l + 1); ++m)
                b = std::min(b, cost[j][static_cast<std::size_t>(l) * 3 + (m - l + 1)] + best[j + 1][m]);
            best[j][l] = b;
        }
    std::vector<int> seq(K);
    std::size_t total = INF;
    for (int l = 0; l < L; ++l)
        if (best[0][l] < total) {
            total = best[0][l];
            seq[0] = l;
        }
    for (int j = 0; j < S; ++j) {
        const int l = seq[j];
        for (int m = std::max(0, l - 1); m <= std::min(L - 1, l + 1); ++m)
            if (cost[j][static_cast<std::size_t>(l) * 3 + (m - l + 1)] + best[j + 1][m] == best[j][l]) {
                seq[j + 1] = m;
                break;
            }
    }
    return {total, seq};
}

CompositionalFunction chain_member(const CoveringNet& net, int coord, const std::vector<int>& levels) {
    const auto& lat = net.lattice;
    std::vector<double> vals(levels.size());
    for (std::size_t t = 0; t < levels.size(); ++t) vals[t] = levels[t] * lat.dv;
    auto f = funcspace::single_layer(net.params.d, {coord},
                                     funcspace::core_table({lat.knots}, {lat.h}, vals), net.params.beta,
                                     member_radius(net.params, lat), net.params.d_star);
    return f;
}

CompositionalFunction max_member(const CoveringNet& net, const std::vector<int>& idx) {
    CompositionalFunction f;
    f.d = net.params.d;
    f.q = 0;
    f.K = 1;
    f.d_star = net.params.d_star;
    f.d_lower = net.params.d_lower;
    f.beta = net.params.beta;
    f.radius = member_radius(net.params, net.lattice);
    f.layers = {{funcspace::max_component(net.params.d, idx)}};
    return f;
}

}  // namespace

ErmChoice erm_covering(const dist::Dataset& data, const CoveringNet& net) {
    if (data.size() == 0) throw ParameterError("empty dataset");
    if (!net.chain_only()) return erm_covering_bruteforce(data, net);
    std::optional<CompositionalFunction> best_f;
    std::size_t best_err = static_cast<std::size_t>(-1);
    for (const auto& g : net.slots[0]) {
        CompositionalFunction f;
        std::size_t err;
        if (g.is_max) {
            f = max_member(net, g.indices);
            err = count_errors(sign_classifier(f), data);
        } else {
            auto [e, seq] = chain_dp(data, g.indices[0], net.lattice);
            err = e;
            if (err >= best_err) continue;
            f = chain_member(net, g.indices[0], seq);
        }
        if (err < best_err) {
            best_err = err;
            best_f = std::move(f);
        }
    }
    ErmChoice out;
    out.f = *best_f;
    out.classifier = sign_classifier(*best_f);
    out.errors = best_err;
    out.empirical_hinge = 2.0 * static_cast<double>(best_err) / data.size();
    return out;
}

ErmChoice erm_covering_bruteforce(const dist::Dataset& data, const CoveringNet& net) {
    const auto members = net.members();
    std::vector<std::size_t> errs(members.size());
    parallel_for(members.size(), [&](std::size_t k) { errs[k] = count_errors(sign_classifier(members[k]), data); });
    std::size_t best = 0;
    for (std::size_t k = 1; k < errs.size(); ++k)
        if (errs[k] < errs[best]) best = k;
    ErmChoice out;
    out.f = members[best];
    out.classifier = sign_classifier(members[best]);
    out.errors = errs[best];
    out.empirical_hinge = 2.0 * static_cast<double>(errs[best]) / data.size();
    return out;
}

std::size_t covering_number_estimate(const std::vector<ScalarFn>& members, double gamma, const CoverProbe& probe) {
    if (!(gamma > 0.0)) throw ParameterError("gamma must be positive");
    const std::size_t N = members.size();
    if (N == 0) return 0;
    std::vector<std::vector<double>> vals(N);
    for (std::size_t k = 0; k < N; ++k)
        for_each_node(probe.dim, probe.coords, probe.points,
                      [&](const double* x) { vals[k].push_back(members[k](x)); });
    // within[a] = members within gamma of a in grid sup distance
    std::vector<std::vector<std::size_t>> within(N);
    for (std::size_t a = 0; a < N; ++a)
        for (std::size_t b = 0; b < N; ++b) {
            double d = 0.0;
            for (std::size_t t = 0; t < vals[a].size(); ++t) d = std::max(d, std::abs(vals[a][t] - vals[b][t]));
            if (d <= gamma * (1.0 + 1e-12)) within[a].push_back(b);  // ulp slack at exactly gamma
        }
    // greedy set cover, lowest index on ties
    std::vector<char> covered(N, 0);
    std::size_t left = N, centers = 0;
    while (left > 0) {
        std::size_t best = 0, gain = 0;
        for (std::size_t a = 0; a < N; ++a) {
            std::size_t g = 0;
            for (auto b : within[a]) g += !covered[b];
            if (g > gain) {
                gain = g;
                best = a;
            }
        }
        for (auto b : within[best])
            if (!covered[b]) {
                covered[b] = 1;
                --left;
            }
        ++centers;
    }
    return centers;
}

double covering_radius(std::size_t n, const CoverParams& params, double s, double tau) {
    const double base = std::min(tau, 1.0) / 3.0;
    if (std::isinf(s)) return base;
    const double e = s + 2.0 + params.d_lower / (params.beta * min1_pow(params.beta, params.q));
    return base * std::pow(static_cast<double>(n), -1.0 / e);
}

ErmChoice covering_net_estimator(const dist::Dataset& data, const CoverParams& params, double s, double tau,
                                 std::size_t cap) {
    const double xi = covering_radius(data.size(), params, s, tau);
    const auto net = build_covering_net(params, xi, cap);
    return erm_covering(data, net);
}

ErmChoice threshold_estimator(const dist::Dataset& data, int coord) {
    const std::size_t n = data.size();
    if (n == 0) throw ParameterError("empty dataset");
    std::vector<std::pair<double, int>> pts(n);
    std::size_t neg_total = 0;
    for (std::size_t i = 0; i < n; ++i) {
        pts[i] = {data.row(i)[coord], data.y[i]};
        neg_total += data.y[i] < 0;
    }
    std::sort(pts.begin(), pts.end());
    // errors(θ) = #{y=+1, x<θ} + #{y=-1, x>=θ}
    const std::size_t grid = 4 * n;
    std::size_t p = 0, pos_below = 0, neg_below = 0;
    std::size_t best_err = static_cast<std::size_t>(-1), best_i = 0;
    for (std::size_t i = 0; i <= grid; ++i) {
        const double theta = static_cast<double>(i) / static_cast<double>(grid);
        while (p < n && pts[p].first < theta) {
            (pts[p].second > 0 ? pos_below : neg_below)++;
            ++p;
        }
        const std::size_t err = pos_below + (neg_total - neg_below);
        if (err < best_err) {
            best_err = err;
            best_i = i;
        }
    }
    const double theta = static_cast<double>(best_i) / static_cast<double>(grid);
    ErmChoice out;
    out.classifier = ScalarFn{data.dim, {coord}, [coord, theta](const double* x) { return sgn(x[coord] - theta); }};
    out.errors = best_err;
    out.empirical_hinge = 2.0 * static_cast<double>(best_err) / n;
    return out;
}

}  // namespace mlab::estimators
