#include "bsinfer/censored_sample.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace bsinfer {

CensoredSample::CensoredSample(std::vector<double> observed,
                               std::size_t total_units)
    : observed_(std::move(observed)), total_units_(total_units) {
  if (observed_.empty()) {
    throw std::invalid_argument("CensoredSample: no observed failure times");
  }
  for (double t : observed_) {
    if (!std::isfinite(t) || t <= 0.0) {
      throw std::invalid_argument(
          "CensoredSample: failure times must be positive finite numbers");
    }
  }
  if (total_units_ < observed_.size()) {
    throw std::invalid_argument(
        "CensoredSample: total units is smaller than the number of observed "
        "failures");
  }
  std::sort(observed_.begin(), observed_.end());
}

}  // namespace bsinfer
