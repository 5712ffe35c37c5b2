#pragma once

#include <cstddef>
#include <optional>

#include "bsinfer/censored_sample.hpp"
#include "bsinfer/distribution.hpp"

namespace bsinfer {

// Outcome of a maximum-likelihood fit, full or restricted. A fit that fails
// to converge is reported with converged == false and the best point found;
// it is never silently passed off as an optimum.
struct FitResult {
  BsParams params;
  double loglik_value;
  bool converged;
  int iterations;
  // Max-norm over the score components that were required to vanish, taken
  // in both the raw and the log-parameter coordinates.
  double grad_norm;
};

// Joint MLE of (alpha, beta) by quasi-Newton ascent with analytical
// gradients, run on (log alpha, log beta) to keep both parameters positive.
// A failed first attempt is retried once from perturbed starting values.
// Requires m >= 2; throws std::domain_error otherwise.
FitResult fit_full(const CensoredSample& s,
                   std::optional<BsParams> init = std::nullopt);

// Restricted MLE with the shape pinned at alpha0: maximizes over beta alone.
// The returned params carry alpha == alpha0 exactly.
FitResult fit_restricted_alpha(const CensoredSample& s, double alpha0,
                               std::optional<double> beta_init = std::nullopt);

// Restricted MLE with the scale pinned at beta0: maximizes over alpha alone.
FitResult fit_restricted_beta(const CensoredSample& s, double beta0,
                              std::optional<double> alpha_init = std::nullopt);

// Bias-corrected shape estimator of Ng, Kundu & Balakrishnan (2006):
// alpha_hat / (1 - (1/n) [1 + 2.5 (1 - m/n)]). Throws std::domain_error when
// the correction factor's denominator is not positive (tiny n under heavy
// censoring), in which case callers should report the adjusted test as
// unavailable.
double bias_corrected_alpha(double alpha_hat, std::size_t n, std::size_t m);

// Deterministic starting values: beta from the sample median of the observed
// times (or the last observed time under majority censoring), alpha from the
// root mean square of the standardized transforms, clamped to [0.05, 3].
BsParams initial_values(const CensoredSample& s);

}  // namespace bsinfer
