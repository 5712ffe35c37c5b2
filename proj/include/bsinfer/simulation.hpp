#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bsinfer/hypothesis_tests.hpp"

namespace bsinfer {

// Description of one Monte Carlo experiment: samples of size n with the
// stated censoring fraction are drawn under (true_alpha, true_beta) and the
// requested null hypotheses are tested at each nominal level. Null values
// equal to the truth estimate test size; different values estimate power.
struct StudyConfig {
  std::size_t sample_size = 0;       // n, units on test
  double censoring_fraction = 0.0;   // degree of censoring, 1 - m/n
  double true_alpha = 0.0;
  double true_beta = 0.0;
  std::optional<double> null_alpha;  // tests H: alpha == null_alpha
  std::optional<double> null_beta;   // tests H: beta == null_beta
  std::vector<double> nominal_levels = {0.10, 0.05};
  std::size_t replications = 10000;
  std::uint64_t seed = 0;

  // m = round(n (1 - censoring_fraction)); exact on the usual grids.
  std::size_t failures_per_sample() const;

  // Throws std::invalid_argument on out-of-range fields or m < 2.
  void validate() const;
};

struct TableCell {
  TestKind kind;
  double level;
  std::uint64_t rejections;
  double rate;  // rejections / valid
};

// Rejection-rate grid plus the bookkeeping needed to interpret it.
// Replications where any required fit failed (after the automatic restart)
// are excluded from both numerator and denominator and reported here, never
// silently folded in.
struct RejectionTable {
  StudyConfig config;
  std::vector<TableCell> cells;  // statistic-major, level-minor, fixed order
  std::uint64_t valid = 0;
  std::uint64_t excluded_nonconverged = 0;
  std::uint64_t adjusted_clamped = 0;      // adjusted statistic hit the zero clamp
  std::uint64_t adjusted_unavailable = 0;  // bias correction undefined

  // Throws std::out_of_range if the (kind, level) pair was not part of the
  // study.
  double rate(TestKind kind, double level) const;

  std::string to_csv() const;
  std::string to_json() const;  // serialized JSON document
  std::string to_text() const;  // aligned human-readable table
};

// Runs the experiment. Replication r always uses the random stream derived
// from (seed, r), so results are bit-identical for any worker count;
// workers == 0 means use the available hardware parallelism.
//
// run_size_study fills unset null values with the true parameters (both
// hypotheses are then tested on the same samples). run_power_study requires
// at least one null value to be set explicitly.
RejectionTable run_size_study(const StudyConfig& config,
                              std::size_t workers = 0);
RejectionTable run_power_study(const StudyConfig& config,
                               std::size_t workers = 0);

}  // namespace bsinfer
