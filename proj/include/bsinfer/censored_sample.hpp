#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace bsinfer {

// An ordered type-II right censored sample: the first m failure times out
// of n units on test, with the remaining n - m lifetimes known only to
// exceed the last observed failure. m == n means complete data.
class CensoredSample {
 public:
  // Takes the observed failure times (any order; sorted on construction)
  // and the total number of units n. Throws std::invalid_argument unless
  // every entry is a positive finite number and 1 <= m <= n.
  CensoredSample(std::vector<double> observed, std::size_t total_units);

  std::span<const double> observed() const { return observed_; }
  std::size_t failures() const { return observed_.size(); }        // m
  std::size_t total_units() const { return total_units_; }         // n
  std::size_t censored() const { return total_units_ - observed_.size(); }
  double last_observed() const { return observed_.back(); }
  bool complete() const { return censored() == 0; }

  // Fraction of units whose failure was not observed, 1 - m/n.
  double censoring_fraction() const {
    return static_cast<double>(censored()) / static_cast<double>(total_units_);
  }

 private:
  std::vector<double> observed_;
  std::size_t total_units_;
};

}  // namespace bsinfer
