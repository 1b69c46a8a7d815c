#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace diamondbc {

// Raised when a solver cannot satisfy its contract (no sign change,
// non-finite integrand, missing boundary).
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Bracket {
    double lo = 0.0;
    double hi = 1.0;
    double tol = 1e-10;
};

struct OptimResult {
    std::vector<double> argmax;
    double value = 0.0;
    std::size_t evaluations = 0;
    bool converged = false;
};

using ScalarFn = std::function<double(double)>;
using VectorFn = std::function<double(const std::vector<double>&)>;

/// E1(x) = int_x^inf e^-t / t dt, x > 0.
double exp_integral_e1(double x);

/// Lower real branch of Lambert W on [-1/e, 0).
double lambert_w_m1(double x);

double find_root(const ScalarFn& f, Bracket b);

/// Coarse scan over `scan_points` equispaced abscissae, then golden-section
/// refinement around the best one.
OptimResult maximize_scalar(const ScalarFn& f, Bracket b, int scan_points = 512);

struct NdOptions {
    int starts = 8;
    int max_evaluations_per_start = 2000;
    double ftol = 1e-10;
    double xtol = 1e-7;
};

/// Bounded Nelder-Mead with deterministic Halton multi-starts. The first
/// start is always x0, so the returned value is never below f(x0).
OptimResult maximize_nd(const VectorFn& f, const std::vector<double>& x0,
                        const std::vector<Bracket>& bounds, NdOptions opt = {});

/// Adaptive Simpson. `hi` may be +infinity.
double integrate(const ScalarFn& f, double lo, double hi, double tol);

/// Fixed-order Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
const GaussRule& gauss_legendre(int order);

}  // namespace diamondbc
