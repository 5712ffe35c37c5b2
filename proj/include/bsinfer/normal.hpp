#pragma once

namespace bsinfer::normal {

// Standard normal density.
double pdf(double z);

// Standard normal distribution function, evaluated through erfc so the
// lower tail keeps full relative accuracy.
double cdf(double z);

// Survival function 1 - cdf(z), without cancellation.
double sf(double z);

// log(1 - cdf(z)). Uses a continued-fraction Mills ratio for z > 5 where
// direct evaluation of the survival function loses headroom.
double log_sf(double z);

// Hazard of the standard normal, pdf(z) / sf(z). Grows like z for large z.
double hazard(double z);

// Inverse of cdf. Wichura's algorithm AS241 (PPND16) plus one Newton
// correction. Accurate to close to machine precision on (0, 1).
// Throws std::domain_error outside (0, 1).
double quantile(double u);

}  // namespace bsinfer::normal
