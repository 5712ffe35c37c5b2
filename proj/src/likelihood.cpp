#include "bsinfer/likelihood.hpp"

#include <cmath>

#include "bsinfer/normal.hpp"

namespace bsinfer {

namespace {
constexpr double kLog2Pi = 1.8378770664093454836;
}

double loglik(const BsParams& p, const CensoredSample& s) {
  const double a = p.alpha();
  const double b = p.beta();
  const double m = static_cast<double>(s.failures());

  // The 1/alpha^2 pieces of log kappa and of the exponent combine into
  // -sum rho(t_i/beta)^2 / (2 alpha^2), which stays well conditioned as
  // alpha -> 0.
  double sum_rho2 = 0.0;
  double sum_log_shifted = 0.0;
  double sum_log_t = 0.0;
  for (double t : s.observed()) {
    const double r = rho(t / b);
    sum_rho2 += r * r;
    sum_log_shifted += std::log(t + b);
    sum_log_t += std::log(t);
  }

  double ll = -sum_rho2 / (2.0 * a * a) - m * std::log(2.0 * a) -
              0.5 * m * (kLog2Pi + std::log(b)) + sum_log_shifted -
              1.5 * sum_log_t;
  if (!s.complete()) {
    const double vm = rho(s.last_observed() / b) / a;
    ll += static_cast<double>(s.censored()) * normal::log_sf(vm);
  }
  return ll;
}

ScoreVector score(const BsParams& p, const CensoredSample& s) {
  const double a = p.alpha();
  const double b = p.beta();
  const double m = static_cast<double>(s.failures());

  double sum_tau = 0.0;
  double sum_inv_shifted = 0.0;
  double sum_centered = 0.0;  // sum of t_i/beta - beta/t_i
  for (double t : s.observed()) {
    const double z = t / b;
    sum_tau += tau(z);
    sum_inv_shifted += 1.0 / (t + b);
    sum_centered += z - 1.0 / z;
  }

  double u_alpha = -(m / a) * (1.0 + 2.0 / (a * a)) + sum_tau / (a * a * a);
  double u_beta = -m / (2.0 * b) + sum_inv_shifted +
                  sum_centered / (2.0 * a * a * b);
  if (!s.complete()) {
    const double zm = s.last_observed() / b;
    const double vm = rho(zm) / a;
    const double hz = normal::hazard(vm);
    const double cens = static_cast<double>(s.censored());
    u_alpha += cens * vm * hz / a;
    u_beta += cens * tau(std::sqrt(zm)) / a * hz / (2.0 * b);
  }
  return {u_alpha, u_beta};
}

}  // namespace bsinfer
