#include "mlab/common.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

namespace mlab {

ScalarFn ScalarFn::constant(int dim, double c) {
    return ScalarFn{dim, {}, [c](const double*) { return c; }};
}

ScalarFn ScalarFn::coordinate(int dim, int coord) {
    if (coord < 0 || coord >= dim) throw ParameterError("coordinate out of range");
    return ScalarFn{dim, {coord}, [coord](const double* x) { return x[coord]; }};
}

std::vector<int> union_active(const std::vector<const ScalarFn*>& fns) {
    std::vector<int> out;
    for (const auto* f : fns)
        if (f) out.insert(out.end(), f->active.begin(), f->active.end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    return mix_seed(mix_seed(a, b), c);
}

void for_each_midpoint(int dim, const std::vector<int>& coords, int res,
                       const std::function<void(const double*, double)>& visit) {
    std::vector<double> x(dim, 0.5);
    const int k = static_cast<int>(coords.size());
    double vol = 1.0;
    for (int i = 0; i < k; ++i) vol /= res;
    std::vector<int> idx(k, 0);
    while (true) {
        for (int i = 0; i < k; ++i) x[coords[i]] = (idx[i] + 0.5) / res;
        visit(x.data(), vol);
        int i = 0;
        for (; i < k; ++i) {
            if (++idx[i] < res) break;
            idx[i] = 0;
        }
        if (i == k) break;
    }
}

void for_each_node(int dim, const std::vector<int>& coords, int points,
                   const std::function<void(const double*)>& visit) {
    std::vector<double> x(dim, 0.5);
    const int k = static_cast<int>(coords.size());
    std::vector<int> idx(k, 0);
    const double step = points > 1 ? 1.0 / (points - 1) : 0.0;
    while (true) {
        for (int i = 0; i < k; ++i) x[coords[i]] = points > 1 ? idx[i] * step : 0.5;
        visit(x.data());
        int i = 0;
        for (; i < k; ++i) {
            if (++idx[i] < points) break;
            idx[i] = 0;
        }
        if (i == k) break;
    }
}

int worker_count() {
    if (const char* env = std::getenv("MLAB_WORKERS")) {
        int w = std::atoi(env);
        if (w > 0) return w;
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body, int workers) {
    if (workers <= 0) workers = worker_count();
    workers = static_cast<int>(std::min<std::size_t>(workers, count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex err_mu;
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            while (true) {
                std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lk(err_mu);
                    if (!err) err = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

}  // namespace mlab
