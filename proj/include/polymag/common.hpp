#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace polymag {

using cd = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double pi = 3.14159265358979323846;

/// Contract violation (bad input, precondition failure). CLI maps this to exit 2.
struct precondition_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Iterative solver failed to reach the requested residual. CLI exit 3.
struct convergence_error : std::runtime_error {
    double best_residual;
    convergence_error(const std::string& msg, double res)
        : std::runtime_error(msg), best_residual(res) {}
};

/// Dichotomy could not be decided at the configured margin. CLI exit 4.
struct indeterminate_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw precondition_error(msg);
}

/// Run fn(i) for i in [0,n) on up to `workers` threads. Results must be
/// written to pre-sized slots so the outcome is independent of scheduling.
inline void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
    if (workers <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto body = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= n) break;
            fn(i);
        }
    };
    std::vector<std::thread> pool;
    int nt = std::min<std::size_t>(workers, n);
    pool.reserve(nt);
    for (int t = 0; t < nt; ++t) pool.emplace_back(body);
    for (auto& th : pool) th.join();
}

/// Global default worker count, set once by the CLI --workers flag.
inline int& default_workers() {
    static int w = 2;
    return w;
}

/// Least-squares slope of y against x.
inline double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    require(x.size() == y.size() && x.size() >= 2, "fit_slope: need >= 2 points");
    double n = double(x.size()), sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i]; sy += y[i]; sxx += x[i] * x[i]; sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

/// Aitken delta-squared limit of a geometrically converging triple
/// (coarse, mid, fine). Falls back to the finest value when the step
/// errors are not decaying geometrically.
inline double aitken_limit(double x0, double x1, double x2) {
    double d1 = x1 - x0, d2 = x2 - x1;
    double denom = d2 - d1;
    if (std::abs(denom) < 1e-15 || std::abs(d2) >= std::abs(d1)) return x2;
    return x2 - d2 * d2 / denom;
}

/// Golden-section minimization of a unimodal f on [a,b] to |b-a| <= xtol.
inline double golden_minimize(const std::function<double(double)>& f, double a, double b,
                              double xtol, double* fmin = nullptr) {
    const double gr = 0.6180339887498949;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > xtol) {
        if (fc < fd) {
            b = d; d = c; fd = fc;
            c = b - gr * (b - a); fc = f(c);
        } else {
            a = c; c = d; fc = fd;
            d = a + gr * (b - a); fd = f(d);
        }
    }
    double xm = 0.5 * (a + b);
    if (fmin) *fmin = std::min(fc, fd);
    return xm;
}

} // namespace polymag
