#include "bsinfer/normal.hpp"

#include <cmath>
#include <stdexcept>

namespace bsinfer::normal {

namespace {

constexpr double kInvSqrt2 = 0.7071067811865475244;
constexpr double kLogSqrt2Pi = 0.9189385332046727418;
constexpr double kInvSqrt2Pi = 0.3989422804014326779;

// Mills ratio sf(z)/pdf(z) for z > 0 via the continued fraction
// 1/(z + 1/(z + 2/(z + 3/(...)))), Abramowitz & Stegun 26.2.14,
// evaluated with the modified Lentz algorithm. Only used where erfc has
// already underflowed, so z is large and convergence takes a few terms.
// Termination wants two consecutive converged deltas; a single delta can
// pass through 1 while still oscillating.
double mills_ratio_cf(double z) {
  const double tiny = 1e-300;
  double f = z;
  if (f == 0.0) f = tiny;
  double c = f;
  double d = 0.0;
  int quiet = 0;
  for (int k = 1; k < 500; ++k) {
    const double a = static_cast<double>(k);
    d = z + a * d;
    if (d == 0.0) d = tiny;
    c = z + a / c;
    if (c == 0.0) c = tiny;
    d = 1.0 / d;
    const double delta = c * d;
    f *= delta;
    quiet = std::fabs(delta - 1.0) < 4e-16 ? quiet + 1 : 0;
    if (quiet >= 2) break;
  }
  return 1.0 / f;
}

// erfc keeps full relative accuracy until it underflows near z = 37.5; hand
// over to the continued fraction just before that.
constexpr double kTailSwitch = 36.0;

// AS241 PPND16 (Wichura 1988): normal quantile to ~1e-16 relative.
double ppnd16(double u) {
  const double q = u - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                 6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
               1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
             1.3314166789178437745e+2) * r + 3.3871328727963666080e+0) /
           (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                 3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
               5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
             4.2313330701600911252e+1) * r + 1.0);
  }
  double r = q < 0.0 ? u : 1.0 - u;
  r = std::sqrt(-std::log(r));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    val = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                2.41780725177450611770e-1) * r + 1.27045825245236838258e+0) * r +
              3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r +
            4.63033784615654529590e+0) * r + 1.42343711074968357734e+0) /
          (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
              6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r +
            2.05319162663775882187e+0) * r + 1.0);
  } else {
    r -= 5.0;
    val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
              2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r +
            5.46378491116411436990e+0) * r + 6.65790464350110377720e+0) /
          (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
              1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
            5.99832206555887937690e-1) * r + 1.0);
  }
  return q < 0.0 ? -val : val;
}

}  // namespace

double pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

double cdf(double z) { return 0.5 * std::erfc(-z * kInvSqrt2); }

double sf(double z) { return 0.5 * std::erfc(z * kInvSqrt2); }

double log_sf(double z) {
  if (z < kTailSwitch) return std::log(sf(z));
  return -0.5 * z * z - kLogSqrt2Pi + std::log(mills_ratio_cf(z));
}

double hazard(double z) {
  if (z < kTailSwitch) return pdf(z) / sf(z);
  return 1.0 / mills_ratio_cf(z);
}

double quantile(double u) {
  if (!(u > 0.0 && u < 1.0)) {
    throw std::domain_error("normal::quantile: argument must lie in (0, 1)");
  }
  double z = ppnd16(u);
  const double d = pdf(z);
  if (d > 1e-280) {
    // One Newton step; the residual is formed on whichever tail keeps
    // full precision.
    const double err = (u <= 0.5) ? cdf(z) - u : (1.0 - u) - sf(z);
    z -= err / d;
  }
  return z;
}

}  // namespace bsinfer::normal
