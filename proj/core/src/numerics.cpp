#include "diamondbc/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

#include <boost/math/tools/toms748_solve.hpp>

namespace diamondbc {

namespace {

constexpr double kEuler = 0.57721566490153286061;

double e1_series(double x) {
    double sum = 0.0;
    double term = 1.0;
    for (int k = 1; k < 200; ++k) {
        term *= -x / k;
        const double del = -term / k;
        sum += del;
        if (std::abs(del) < std::abs(sum) * 1e-17) break;
    }
    return -kEuler - std::log(x) + sum;
}

// Modified Lentz on the even form of the continued fraction.
double e1_continued_fraction(double x) {
    constexpr double tiny = 1e-300;
    double b = x + 1.0;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 1000; ++i) {
        const double an = -static_cast<double>(i) * i;
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        const double del = c * d;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    return h * std::exp(-x);
}

}  // namespace

double exp_integral_e1(double x) {
    if (!(x > 0.0)) throw std::domain_error("exp_integral_e1: x must be > 0");
    if (std::isinf(x)) return 0.0;
    return x < 1.0 ? e1_series(x) : e1_continued_fraction(x);
}

double lambert_w_m1(double x) {
    const double branch = -1.0 / std::numbers::e;
    if (!(x >= branch - 1e-17 && x < 0.0))
        throw std::domain_error("lambert_w_m1: x must lie in [-1/e, 0)");
    if (x <= branch) return -1.0;

    double w;
    if (x < -0.25) {
        const double p = -std::sqrt(2.0 * (1.0 + std::numbers::e * x));
        w = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p;
    } else {
        const double l1 = std::log(-x);
        const double l2 = std::log(-l1);
        w = l1 - l2 + l2 / l1;
    }
    for (int it = 0; it < 64; ++it) {
        const double ew = std::exp(w);
        const double f = w * ew - x;
        if (f == 0.0) break;
        const double wp1 = w + 1.0;
        if (wp1 == 0.0) break;
        const double step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
        const double next = std::min(w - step, -1.0);
        if (std::abs(next - w) <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(w)) {
            w = next;
            break;
        }
        w = next;
    }
    return w;
}

double find_root(const ScalarFn& f, Bracket b) {
    if (!(b.lo < b.hi) || !(b.tol > 0.0)) throw std::invalid_argument("find_root: bad bracket");
    const double flo = f(b.lo);
    const double fhi = f(b.hi);
    if (!std::isfinite(flo) || !std::isfinite(fhi))
        throw NumericError("find_root: non-finite value at bracket end");
    if (flo == 0.0) return b.lo;
    if (fhi == 0.0) return b.hi;
    if (flo * fhi > 0.0) throw NumericError("find_root: no sign change on bracket");

    const double tol = b.tol;
    auto done = [tol](double a, double c) { return std::abs(c - a) <= tol; };
    std::uintmax_t max_iter = 200;
    auto r = boost::math::tools::toms748_solve(f, b.lo, b.hi, flo, fhi, done, max_iter);
    const double fa = f(r.first);
    const double fb = f(r.second);
    return std::abs(fa) <= std::abs(fb) ? r.first : r.second;
}

OptimResult maximize_scalar(const ScalarFn& f, Bracket b, int scan_points) {
    if (!(b.lo <= b.hi)) throw std::invalid_argument("maximize_scalar: bad bracket");
    OptimResult res;
    auto eval = [&](double x) {
        ++res.evaluations;
        const double v = f(x);
        return std::isnan(v) ? -std::numeric_limits<double>::infinity() : v;
    };
    if (b.lo == b.hi) {
        res.argmax = {b.lo};
        res.value = eval(b.lo);
        res.converged = std::isfinite(res.value);
        return res;
    }

    const int n = std::max(scan_points, 3);
    const double h = (b.hi - b.lo) / (n - 1);
    int best = 0;
    double best_v = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        const double x = i == n - 1 ? b.hi : b.lo + i * h;
        const double v = eval(x);
        if (v > best_v) {
            best_v = v;
            best = i;
        }
    }
    double best_x = best == n - 1 ? b.hi : b.lo + best * h;

    double a = std::max(b.lo, best_x - h);
    double c = std::min(b.hi, best_x + h);
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = c - invphi * (c - a);
    double x2 = a + invphi * (c - a);
    double f1 = eval(x1);
    double f2 = eval(x2);
    const double tol = std::max(b.tol, 4.0 * std::numeric_limits<double>::epsilon() * std::abs(best_x));
    while (c - a > tol) {
        if (f1 >= f2) {
            c = x2;
            x2 = x1;
            f2 = f1;
            x1 = c - invphi * (c - a);
            f1 = eval(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + invphi * (c - a);
            f2 = eval(x2);
        }
    }
    const double gx = f1 >= f2 ? x1 : x2;
    const double gv = std::max(f1, f2);
    if (gv > best_v) {
        best_v = gv;
        best_x = gx;
    }
    res.argmax = {best_x};
    res.value = best_v;
    res.converged = std::isfinite(best_v);
    return res;
}

namespace {

double halton(std::size_t index, int base) {
    double f = 1.0;
    double r = 0.0;
    while (index > 0) {
        f /= base;
        r += f * static_cast<double>(index % base);
        index /= base;
    }
    return r;
}

constexpr std::array<int, 24> kPrimes{2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37,
                                      41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89};

bool better(double v, const std::vector<double>& x, double bv, const std::vector<double>& bx) {
    if (v != bv) return v > bv;
    return std::lexicographical_compare(x.begin(), x.end(), bx.begin(), bx.end());
}

struct NmRun {
    std::vector<double> x;
    double value;
    bool converged;
};

NmRun nelder_mead(const std::function<double(const std::vector<double>&)>& eval,
                  std::vector<double> start, const std::vector<Bracket>& bounds,
                  const NdOptions& opt) {
    const std::size_t n = start.size();
    auto clamp = [&](std::vector<double>& x) {
        for (std::size_t j = 0; j < n; ++j) x[j] = std::clamp(x[j], bounds[j].lo, bounds[j].hi);
    };
    clamp(start);

    std::vector<std::vector<double>> simplex(n + 1, start);
    std::vector<double> fv(n + 1);
    for (std::size_t j = 0; j < n; ++j) {
        const double span = bounds[j].hi - bounds[j].lo;
        double step = 0.1 * span;
        if (simplex[j + 1][j] + step > bounds[j].hi) step = -step;
        simplex[j + 1][j] += step;
        clamp(simplex[j + 1]);
    }
    int evals = 0;
    for (std::size_t i = 0; i <= n; ++i) {
        fv[i] = eval(simplex[i]);
        ++evals;
    }

    std::vector<std::size_t> order(n + 1);
    bool converged = false;
    while (evals < opt.max_evaluations_per_start) {
        for (std::size_t i = 0; i <= n; ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return better(fv[a], simplex[a], fv[b], simplex[b]);
        });
        const std::size_t ib = order.front();
        const std::size_t iw = order.back();
        const std::size_t is = order[n - 1];

        double diam = 0.0;
        for (std::size_t i = 0; i <= n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                const double span = std::max(bounds[j].hi - bounds[j].lo, 1e-300);
                diam = std::max(diam, std::abs(simplex[i][j] - simplex[ib][j]) / span);
            }
        if (std::abs(fv[ib] - fv[iw]) <= opt.ftol && diam <= opt.xtol) {
            converged = true;
            break;
        }

        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == iw) continue;
            for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i][j] / n;
        }
        auto along = [&](double t) {
            std::vector<double> x(n);
            for (std::size_t j = 0; j < n; ++j) x[j] = centroid[j] + t * (simplex[iw][j] - centroid[j]);
            clamp(x);
            return x;
        };

        auto xr = along(-1.0);
        const double fr = eval(xr);
        ++evals;
        if (fr > fv[ib]) {
            auto xe = along(-2.0);
            const double fe = eval(xe);
            ++evals;
            if (fe > fr) {
                simplex[iw] = std::move(xe);
                fv[iw] = fe;
            } else {
                simplex[iw] = std::move(xr);
                fv[iw] = fr;
            }
            continue;
        }
        if (fr > fv[is]) {
            simplex[iw] = std::move(xr);
            fv[iw] = fr;
            continue;
        }
        const bool outside = fr > fv[iw];
        auto xc = along(outside ? -0.5 : 0.5);
        const double fc = eval(xc);
        ++evals;
        if (fc > (outside ? fr : fv[iw])) {
            simplex[iw] = std::move(xc);
            fv[iw] = fc;
            continue;
        }
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == ib) continue;
            for (std::size_t j = 0; j < n; ++j)
                simplex[i][j] = simplex[ib][j] + 0.5 * (simplex[i][j] - simplex[ib][j]);
            fv[i] = eval(simplex[i]);
            ++evals;
        }
    }
    std::size_t ib = 0;
    for (std::size_t i = 1; i <= n; ++i)
        if (better(fv[i], simplex[i], fv[ib], simplex[ib])) ib = i;
    return {simplex[ib], fv[ib], converged};
}

}  // namespace

OptimResult maximize_nd(const VectorFn& f, const std::vector<double>& x0,
                        const std::vector<Bracket>& bounds, NdOptions opt) {
    const std::size_t n = x0.size();
    if (n == 0 || bounds.size() != n) throw std::invalid_argument("maximize_nd: dimension mismatch");
    for (std::size_t j = 0; j < n; ++j)
        if (!(bounds[j].lo <= x0[j] && x0[j] <= bounds[j].hi))
            throw std::invalid_argument("maximize_nd: x0 outside bounds");

    OptimResult res;
    auto eval = [&](const std::vector<double>& x) {
        ++res.evaluations;
        const double v = f(x);
        return std::isnan(v) ? -std::numeric_limits<double>::infinity() : v;
    };

    std::vector<double> best_x = x0;
    double best_v = eval(x0);

    if (n == 1) {
        auto r = maximize_scalar([&](double t) { return f({t}); }, bounds[0]);
        res.evaluations += r.evaluations;
        if (better(r.value, r.argmax, best_v, best_x)) {
            best_v = r.value;
            best_x = r.argmax;
        }
        res.argmax = best_x;
        res.value = best_v;
        res.converged = std::isfinite(best_v);
        return res;
    }

    bool any_converged = false;
    const int starts = std::max(opt.starts, 1);
    for (int k = 0; k < starts; ++k) {
        std::vector<double> start = x0;
        if (k > 0) {
            for (std::size_t j = 0; j < n; ++j) {
                const int base = kPrimes[j % kPrimes.size()];
                const double u = halton(static_cast<std::size_t>(k) + 1, base);
                start[j] = bounds[j].lo + u * (bounds[j].hi - bounds[j].lo);
            }
        }
        auto run = nelder_mead(eval, start, bounds, opt);
        any_converged = any_converged || run.converged;
        if (better(run.value, run.x, best_v, best_x)) {
            best_v = run.value;
            best_x = run.x;
        }
    }
    auto polish = nelder_mead(eval, best_x, bounds, opt);
    if (better(polish.value, polish.x, best_v, best_x)) {
        best_v = polish.value;
        best_x = polish.x;
    }
    res.argmax = best_x;
    res.value = best_v;
    res.converged = (any_converged || polish.converged) && std::isfinite(best_v);
    return res;
}

namespace {

struct Simpson {
    const ScalarFn& g;
    double checked(double x) const {
        const double v = g(x);
        if (!std::isfinite(v)) throw NumericError("integrate: non-finite integrand");
        return v;
    }
    double recurse(double a, double b, double fa, double fm, double fb, double whole, double tol,
                   int depth) const {
        const double m = 0.5 * (a + b);
        const double lm = 0.5 * (a + m);
        const double rm = 0.5 * (m + b);
        const double flm = checked(lm);
        const double frm = checked(rm);
        const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        const double delta = left + right - whole;
        if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
        return recurse(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
               recurse(m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
    }
};

double simpson(const ScalarFn& g, double lo, double hi, double tol) {
    Simpson s{g};
    const double fa = s.checked(lo);
    const double fb = s.checked(hi);
    const double m = 0.5 * (lo + hi);
    const double fm = s.checked(m);
    // Split once up front so an integrand that happens to vanish at the
    // three initial abscissae is still resolved.
    const double q1 = 0.25 * (3.0 * lo + hi);
    const double q3 = 0.25 * (lo + 3.0 * hi);
    const double fq1 = s.checked(q1);
    const double fq3 = s.checked(q3);
    const double left = (m - lo) / 6.0 * (fa + 4.0 * fq1 + fm);
    const double right = (hi - m) / 6.0 * (fm + 4.0 * fq3 + fb);
    return s.recurse(lo, m, fa, fq1, fm, left, 0.5 * tol, 50) +
           s.recurse(m, hi, fm, fq3, fb, right, 0.5 * tol, 50);
}

}  // namespace

double integrate(const ScalarFn& f, double lo, double hi, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("integrate: tol must be > 0");
    if (lo == hi) return 0.0;
    if (!(lo < hi)) throw std::invalid_argument("integrate: lo must be < hi");
    if (std::isinf(hi)) {
        ScalarFn g = [&](double t) {
            if (t >= 1.0) return 0.0;
            const double u = 1.0 - t;
            return f(lo + t / u) / (u * u);
        };
        return simpson(g, 0.0, 1.0, tol);
    }
    return simpson(f, lo, hi, tol);
}

namespace {

GaussRule build_rule(int n) {
    GaussRule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) p0 = 1.0;
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        r.nodes[i] = x;
        r.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return r;
}

}  // namespace

const GaussRule& gauss_legendre(int order) {
    static const std::vector<GaussRule> table = [] {
        std::vector<GaussRule> t(65);
        for (int n = 1; n <= 64; ++n) t[n] = build_rule(n);
        return t;
    }();
    if (order < 1 || order > 64) throw std::invalid_argument("gauss_legendre: order must be in [1, 64]");
    return table[order];
}

}  // namespace diamondbc
