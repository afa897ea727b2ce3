#pragma once

namespace bqmc {

inline constexpr double kInvSqrt2 = 0.70710678118654752440;
inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;

/// Standard normal density.
double norm_pdf(double x);

/// Standard normal distribution function; exact limits at +-infinity.
double norm_cdf(double x);

/// Inverse standard normal distribution function (Wichura AS241, ~1e-16 relative).
/// Inputs at or beyond 0 and 1 are clamped to the nearest representable interior
/// value so the result is always finite.
double norm_inv(double p);

/// P[lo < Z < hi] for standard normal Z, evaluated in whichever tail keeps
/// precision. Returns 0 when hi <= lo.
double normal_mass(double lo, double hi);

/// Maps t in [0,1) to the point of [lo, hi] that leaves a fraction t of the
/// normal mass of that interval to its left. With lo = -inf and
/// normal_mass(lo, hi) == 1 this is exactly norm_inv(t). The result is clamped
/// into [lo, hi].
double truncated_normal_quantile(double lo, double hi, double t);

}  // namespace bqmc
