#include "bsinfer/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bsinfer/normal.hpp"

namespace bsinfer {

namespace {

constexpr double kLogSqrt2Pi = 0.9189385332046727418;

void require_positive_time(double t) {
  if (!(t > 0.0)) {
    throw std::domain_error("lifetime must be positive");
  }
}

// Lifetime corresponding to the standard-normal deviate z:
// t = beta * w^2 with w = alpha*z/2 + sqrt((alpha*z/2)^2 + 1).
// The negative-z branch is rearranged to avoid cancellation.
double lifetime_from_deviate(double z, const BsParams& p) {
  const double s = 0.5 * p.alpha() * z;
  const double w = s >= 0.0 ? s + std::sqrt(s * s + 1.0)
                            : 1.0 / (std::sqrt(s * s + 1.0) - s);
  return p.beta() * w * w;
}

}  // namespace

BsParams::BsParams(double alpha, double beta) : alpha_(alpha), beta_(beta) {
  if (!(std::isfinite(alpha) && alpha > 0.0) ||
      !(std::isfinite(beta) && beta > 0.0)) {
    throw std::domain_error(
        "BsParams: shape and scale must be positive finite numbers");
  }
}

double bs_log_pdf(double t, const BsParams& p) {
  require_positive_time(t);
  const double v = normal_deviate(t, p);
  // log f = log phi(v) + log v'(t), v'(t) = t^{-3/2} (t + beta) / (2 alpha sqrt(beta))
  const double log_vprime = std::log(t + p.beta()) - 1.5 * std::log(t) -
                            std::log(2.0 * p.alpha()) - 0.5 * std::log(p.beta());
  return -0.5 * v * v - kLogSqrt2Pi + log_vprime;
}

double bs_pdf(double t, const BsParams& p) { return std::exp(bs_log_pdf(t, p)); }

double bs_cdf(double t, const BsParams& p) {
  require_positive_time(t);
  return normal::cdf(normal_deviate(t, p));
}

double bs_quantile(double u, const BsParams& p) {
  if (!(u > 0.0 && u < 1.0)) {
    throw std::domain_error("bs_quantile: argument must lie in (0, 1)");
  }
  return lifetime_from_deviate(normal::quantile(u), p);
}

double bs_hazard(double t, const BsParams& p) {
  require_positive_time(t);
  const double v = normal_deviate(t, p);
  return std::exp(bs_log_pdf(t, p) - normal::log_sf(v));
}

BsMoments bs_moments(const BsParams& p) {
  const double a2 = p.alpha() * p.alpha();
  const double denom = 5.0 * a2 + 4.0;
  BsMoments m;
  m.mean = p.beta() * (1.0 + 0.5 * a2);
  m.variance = a2 * p.beta() * p.beta() * (1.0 + 1.25 * a2);
  m.skewness = 16.0 * a2 * (11.0 * a2 + 6.0) / (denom * denom * denom);
  m.kurtosis = 3.0 + 6.0 * a2 * (93.0 * a2 + 41.0) / (denom * denom);
  return m;
}

double bs_raw_moment(const BsParams& p, int order) {
  if (order < 1) {
    throw std::domain_error("bs_raw_moment: order must be a positive integer");
  }
  // E(T^k) = beta^k (K_{k+1/2}(x) + K_{k-1/2}(x)) / (2 K_{1/2}(x)), x = 1/alpha^2.
  // K_{n+1/2}(x) = sqrt(pi/(2x)) e^{-x} S_n(x); the prefactor cancels in the
  // ratio, leaving the finite sums S_n(x) = sum_k (n+k)!/(k!(n-k)!) (2x)^{-k}.
  const double x = 1.0 / (p.alpha() * p.alpha());
  const auto poly_sum = [x](int n) {
    double term = 1.0;
    double sum = 1.0;
    for (int j = 1; j <= n; ++j) {
      term *= static_cast<double>((n + j) * (n - j + 1)) /
              (static_cast<double>(j) * 2.0 * x);
      sum += term;
    }
    return sum;
  };
  return std::pow(p.beta(), order) * 0.5 *
         (poly_sum(order) + poly_sum(order - 1));
}

std::vector<double> sample_complete(const BsParams& p, std::size_t count,
                                    RngStream& rng) {
  std::vector<double> draws(count);
  for (double& t : draws) {
    t = lifetime_from_deviate(rng.normal_draw(), p);
  }
  return draws;
}

CensoredSample sample_type2(const BsParams& p, std::size_t n, std::size_t m,
                            RngStream& rng) {
  if (m < 1 || m > n) {
    throw std::domain_error("sample_type2: need 1 <= m <= n");
  }
  std::vector<double> draws = sample_complete(p, n, rng);
  std::sort(draws.begin(), draws.end());
  draws.resize(m);
  return CensoredSample(std::move(draws), n);
}

}  // namespace bsinfer
