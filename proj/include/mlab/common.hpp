#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace mlab {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct DomainError : std::runtime_error { using std::runtime_error::runtime_error; };
struct RangeViolation : std::runtime_error { using std::runtime_error::runtime_error; };
struct ParameterError : std::runtime_error { using std::runtime_error::runtime_error; };
struct CapacityError : std::runtime_error { using std::runtime_error::runtime_error; };
struct SingularityError : std::runtime_error { using std::runtime_error::runtime_error; };
struct FitError : std::runtime_error { using std::runtime_error::runtime_error; };

// sgn(0) = +1
inline double sgn(double t) { return t >= 0.0 ? 1.0 : -1.0; }

// b^e with 0^0 = 1 and b^inf = 0 for b in [0,1)
inline double cpow(double b, double e) {
    if (e == 0.0) return 1.0;
    if (std::isinf(e) && e > 0) return b < 1.0 ? 0.0 : (b == 1.0 ? 1.0 : kInf);
    return std::pow(b, e);
}

// 1 ∧ beta raised to q
inline double min1_pow(double beta, int q) { return std::pow(std::min(1.0, beta), q); }

// A real-valued function on [0,1]^dim that depends only on the listed coordinates.
struct ScalarFn {
    int dim = 1;
    std::vector<int> active;  // 0-based, sorted
    std::function<double(const double*)> fn;

    double operator()(const double* x) const { return fn(x); }
    double operator()(const std::vector<double>& x) const { return fn(x.data()); }

    static ScalarFn constant(int dim, double c);
    // f(x) = x[coord]
    static ScalarFn coordinate(int dim, int coord);
};

std::vector<int> union_active(const std::vector<const ScalarFn*>& fns);

// splitmix64 finalizer, used to derive independent seeds
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c);

// Visits the midpoints of a tensor grid of `res` cells per listed coordinate.
// Unlisted coordinates are held at 0.5. The callback receives (x, cell volume).
void for_each_midpoint(int dim, const std::vector<int>& coords, int res,
                       const std::function<void(const double*, double)>& visit);

// Visits the nodes of a tensor grid with `points` nodes per listed coordinate (endpoints included).
void for_each_node(int dim, const std::vector<int>& coords, int points,
                   const std::function<void(const double*)>& visit);

// worker count from MLAB_WORKERS, falling back to hardware concurrency
int worker_count();

// Runs body(i) for i in [0, count) on a pool of workers.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body, int workers = 0);

}  // namespace mlab
