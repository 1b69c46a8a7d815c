#include "diamondbc/gains.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace diamondbc {

double gain_af1(double ar, double a, const PowerConfig& p) {
    if (ar < 0.0 || a < 0.0) throw std::domain_error("gain_af1: gains must be nonnegative");
    return ar * a * p.pr / (1.0 + ar * p.ps + a * p.pr);
}

double gain_af2(const FadingSample& s, const PowerConfig& p) {
    const double k1 = p.pr / (s.ar1 * p.ps + 1.0);
    const double k2 = p.pr / (s.ar2 * p.ps + 1.0);
    return (k1 * s.ar1 * s.a1 + k2 * s.ar2 * s.a2) / (1.0 + k1 * s.a1 + k2 * s.a2);
}

double gain_daf(const FadingSample& s, const PowerConfig& p) {
    return (s.a1 + s.ar2 * p.ps * (s.a1 + s.a2)) / (1.0 + s.ar2 * p.ps + s.a2 * p.pr);
}

double af_on_threshold(const PowerConfig& p) { return p.pr / (1.0 + p.ps + p.pr); }

double quantizer_theta(double distortion, double ar, double ps) { return 1.0 - distortion / (1.0 + ar * ps); }

QuantizerParams QuantizerParams::make(double distortion, double ar1, double ar2, double ps) {
    if (!(distortion > 0.0)) throw std::domain_error("QuantizerParams: distortion must be > 0");
    return {distortion, quantizer_theta(distortion, ar1, ps), quantizer_theta(distortion, ar2, ps)};
}

double gain_cf(double ar1, double ar2, const QuantizerParams& q, double /*ps*/) {
    if (!(q.theta1 > 0.0) || !(q.theta2 > 0.0))
        throw std::domain_error("gain_cf: degenerate quantizer (theta <= 0)");
    const double d = q.distortion;
    return ar1 / (1.0 + (q.theta2 + d) / (q.theta2 + 1.0) * d / q.theta1) +
           ar2 / (1.0 + (q.theta1 + d) / (q.theta1 + 1.0) * d / q.theta2);
}

double gain_cf_clamped(double ar1, double ar2, double d, double ps) {
    const double t1 = std::max(quantizer_theta(d, ar1, ps), 0.0);
    const double t2 = std::max(quantizer_theta(d, ar2, ps), 0.0);
    double g = 0.0;
    if (t1 > 0.0) g += ar1 / (1.0 + (t2 + d) / (t2 + 1.0) * d / t1);
    if (t2 > 0.0) g += ar2 / (1.0 + (t1 + d) / (t1 + 1.0) * d / t2);
    return g;
}

const char* to_string(TableSource s) {
    switch (s) {
        case TableSource::quadrature: return "quadrature";
        case TableSource::monte_carlo: return "monte-carlo";
        case TableSource::exact: return "exact";
    }
    return "unknown";
}

}  // namespace diamondbc
