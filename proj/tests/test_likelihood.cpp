#include <cmath>
#include <vector>

#include "doctest.h"

#include "bsinfer/distribution.hpp"
#include "bsinfer/likelihood.hpp"
#include "bsinfer/rng.hpp"

using bsinfer::BsParams;
using bsinfer::CensoredSample;
using bsinfer::RngStream;

namespace {

const std::vector<double> kMice{41, 44, 46, 54, 55, 58, 60};

// Central finite differences of the log-likelihood with the step tied to the
// parameter magnitude.
bsinfer::ScoreVector fd_score(const BsParams& p, const CensoredSample& s) {
  const double ha = 1e-5 * std::max(1.0, p.alpha());
  const double hb = 1e-5 * std::max(1.0, p.beta());
  const double da = (loglik(BsParams(p.alpha() + ha, p.beta()), s) -
                     loglik(BsParams(p.alpha() - ha, p.beta()), s)) /
                    (2.0 * ha);
  const double db = (loglik(BsParams(p.alpha(), p.beta() + hb), s) -
                     loglik(BsParams(p.alpha(), p.beta() - hb), s)) /
                    (2.0 * hb);
  return {da, db};
}

}  // namespace

TEST_CASE("single complete observation has a closed-form log-likelihood") {
  const CensoredSample s({1.0}, 1);
  // -0.5 log(2 pi)
  CHECK(loglik(BsParams(1.0, 1.0), s) ==
        doctest::Approx(-0.9189385332046727).epsilon(1e-14));
}

TEST_CASE("complete-data log-likelihood is the sum of log densities") {
  RngStream rng(314);
  for (int rep = 0; rep < 5; ++rep) {
    const BsParams truth(0.4 + 0.2 * rep, 1.0 + rep);
    const auto sample = bsinfer::sample_type2(truth, 12, 12, rng);
    const BsParams at(0.6, 2.2);
    double direct = 0.0;
    for (double t : sample.observed()) direct += bsinfer::bs_log_pdf(t, at);
    CHECK(loglik(at, sample) == doctest::Approx(direct).epsilon(1e-12));
  }
}

TEST_CASE("rescaling data and scale together shifts the log-likelihood by -m log k") {
  const CensoredSample s(kMice, 10);
  const BsParams p(0.2, 50.0);
  for (double k : {2.0, 10.0}) {
    std::vector<double> scaled;
    for (double t : kMice) scaled.push_back(k * t);
    const CensoredSample ks(scaled, 10);
    const double shift = loglik(BsParams(0.2, k * 50.0), ks) - loglik(p, s);
    CHECK(shift == doctest::Approx(-7.0 * std::log(k)).epsilon(1e-9));
  }
}

TEST_CASE("analytical score equals the numerical gradient") {
  RngStream rng(999);
  for (int rep = 0; rep < 20; ++rep) {
    const double true_alpha = 0.15 + 0.09 * rep;
    const BsParams truth(true_alpha, 1.0 + 0.5 * rep);
    const std::size_t n = 10 + 3 * rep;
    const std::size_t m = std::max<std::size_t>(3, n - (rep % 4) * (n / 8));
    const auto sample = bsinfer::sample_type2(truth, n, m, rng);

    const BsParams at(true_alpha * (0.8 + 0.04 * rep),
                      truth.beta() * (0.9 + 0.02 * rep));
    const auto analytic = score(at, sample);
    const auto numeric = fd_score(at, sample);
    CHECK(std::fabs(analytic.alpha - numeric.alpha) <=
          1e-6 * std::max(1.0, std::fabs(numeric.alpha)));
    CHECK(std::fabs(analytic.beta - numeric.beta) <=
          1e-6 * std::max(1.0, std::fabs(numeric.beta)));
  }
}

TEST_CASE("complete-data score drops the censoring terms") {
  const CensoredSample s(kMice, 7);
  const BsParams p(0.15, 51.0);
  double sum_tau = 0.0;
  for (double t : kMice) sum_tau += bsinfer::tau(t / p.beta());
  const double expected =
      -(7.0 / p.alpha()) * (1.0 + 2.0 / (p.alpha() * p.alpha())) +
      sum_tau / std::pow(p.alpha(), 3);
  CHECK(score(p, s).alpha == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("observed order does not matter") {
  const CensoredSample sorted_in(kMice, 10);
  const CensoredSample shuffled_in({55, 41, 60, 46, 44, 58, 54}, 10);
  const BsParams p(0.19, 52.0);
  CHECK(loglik(p, sorted_in) == loglik(p, shuffled_in));
  CHECK(score(p, sorted_in).beta == score(p, shuffled_in).beta);
}

TEST_CASE("log-likelihood decays toward every parameter boundary") {
  const CensoredSample s(kMice, 10);
  const double interior = loglik(BsParams(0.2, 54.0), s);
  for (const auto& boundary :
       {BsParams(1e-6, 54.0), BsParams(1e6, 54.0), BsParams(0.2, 1e-9),
        BsParams(0.2, 1e9)}) {
    CHECK(loglik(boundary, s) < interior - 100.0);
  }
}

TEST_CASE("heavily censored likelihood stays finite where naive survival underflows") {
  // Observed failures far above the scale with alpha small push the censored
  // normal deviate to ~90; log-space survival has to carry it.
  const CensoredSample s({4.8, 5.0}, 40);
  const BsParams p(0.02, 1.0);
  const double ll = loglik(p, s);
  CHECK(std::isfinite(ll));
  const auto u = score(p, s);
  CHECK(std::isfinite(u.alpha));
  CHECK(std::isfinite(u.beta));
  // The score must still match finite differences out here.
  const auto numeric = fd_score(p, s);
  CHECK(std::fabs(u.alpha - numeric.alpha) <=
        1e-5 * std::max(1.0, std::fabs(numeric.alpha)));
}
