#pragma once

#include "bsinfer/censored_sample.hpp"
#include "bsinfer/distribution.hpp"

namespace bsinfer {

// Gradient of the censored log-likelihood in (alpha, beta).
struct ScoreVector {
  double alpha;
  double beta;
};

// Censored log-likelihood of theta = (alpha, beta), up to the combinatorial
// constant log(n!/(m!(n-m)!)) which cancels in every statistic built on
// likelihood differences. The observed-data term is the sum of log densities;
// the n - m censored units contribute (n-m) log S(t_m).
double loglik(const BsParams& p, const CensoredSample& s);

// Analytical score (U_alpha, U_beta); equals the gradient of loglik.
ScoreVector score(const BsParams& p, const CensoredSample& s);

}  // namespace bsinfer
