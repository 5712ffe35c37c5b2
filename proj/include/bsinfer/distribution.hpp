#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "bsinfer/censored_sample.hpp"
#include "bsinfer/rng.hpp"

namespace bsinfer {

// Parameter pair of the Birnbaum-Saunders (fatigue-life) distribution:
// shape alpha and scale beta, both strictly positive. beta is the median.
class BsParams {
 public:
  // Throws std::domain_error unless both parameters are positive and finite.
  BsParams(double alpha, double beta);

  double alpha() const { return alpha_; }
  double beta() const { return beta_; }

 private:
  double alpha_;
  double beta_;
};

// Standardizing transforms of the fatigue-life model, for z = t/beta:
// rho maps the median to zero and tau(z) = rho(z)^2 + 2.
inline double rho(double z) {
  const double r = std::sqrt(z);
  return r - 1.0 / r;
}
inline double tau(double z) { return z + 1.0 / z; }

// The standard-normal deviate associated with lifetime t, rho(t/beta)/alpha.
inline double normal_deviate(double t, const BsParams& p) {
  return rho(t / p.beta()) / p.alpha();
}

struct BsMoments {
  double mean;
  double variance;
  double skewness;
  double kurtosis;
};

// Density and log-density at t > 0. Throws std::domain_error for t <= 0.
double bs_pdf(double t, const BsParams& p);
double bs_log_pdf(double t, const BsParams& p);

// Distribution function at t > 0. Throws std::domain_error for t <= 0.
double bs_cdf(double t, const BsParams& p);

// Quantile function on (0, 1). Throws std::domain_error outside (0, 1).
double bs_quantile(double u, const BsParams& p);

// Hazard ratio pdf/(1 - cdf), evaluated through log space so that heavy
// right tails do not underflow. Throws std::domain_error for t <= 0.
double bs_hazard(double t, const BsParams& p);

// Mean, variance and the standardized shape coefficients in closed form.
BsMoments bs_moments(const BsParams& p);

// E(T^order) for integer order >= 1, from the Bessel-ratio expression with
// half-integer orders reduced to finite sums. Throws std::domain_error for
// order < 1.
double bs_raw_moment(const BsParams& p, int order);

// count i.i.d. draws via the inverse-cdf transform of standard normals.
std::vector<double> sample_complete(const BsParams& p, std::size_t count,
                                    RngStream& rng);

// Type-II right censored sample: n lifetimes are generated, sorted, and the
// smallest m retained. Throws std::domain_error unless 1 <= m <= n.
CensoredSample sample_type2(const BsParams& p, std::size_t n, std::size_t m,
                            RngStream& rng);

}  // namespace bsinfer
