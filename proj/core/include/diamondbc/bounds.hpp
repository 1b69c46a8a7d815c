#pragma once

#include <string>

#include "diamondbc/channel.hpp"
#include "diamondbc/schemes.hpp"

namespace diamondbc {

enum class BoundKind { cutset_throughput, cutset_expected, rc_throughput, dfub_cutset };

const char* to_string(BoundKind k);
BoundKind bound_from_string(const std::string& tag);

/// Root in (0, 1] of P s^3 + s^2 - s - 1 = 0 (Cardano, trig form when the
/// discriminant is negative).
double cutset_lower_boundary(double power);
inline constexpr double kGoldenRatio = 1.6180339887498949;

double cutset_throughput_objective(double power, double s);
RateResult cutset_throughput(const PowerConfig& p);

/// Closed form for a single power P.
double cutset_expected_closed(double power);
/// Direct quadrature of e^-s (1+s)(3/s - 1) over [s0, s1].
double cutset_expected_quadrature(double power);
RateResult cutset_expected_rate(const PowerConfig& p);

double rc_threshold_cap(const PowerConfig& p);
double rc_throughput_objective(const PowerConfig& p, double s);
RateResult rc_throughput(const PowerConfig& p);

// First-hop (R1) and second-hop (R2) parts of the DF upper bound.
inline constexpr double kDfubConstant1 = 0.1157;
inline constexpr double kDfubConstant2 = 0.1296;
/// Root of (2 - e^-s) / (2 s (1 - e^-s)) = rhs_const + rhs_slope s.
double dfub_boundary(double rhs_const, double rhs_slope);
double dfub_antiderivative(double s);
double dfub_r1_closed(double ps);
double dfub_r1_quadrature(double ps);
double dfub_r2_closed(double pr);
double dfub_r2_quadrature(double pr);
RateResult dfub_cutset(const PowerConfig& p);

RateResult evaluate_bound(BoundKind k, const PowerConfig& p);

}  // namespace diamondbc
