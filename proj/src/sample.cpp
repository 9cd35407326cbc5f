#include "snqesa/sample.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "snqesa/common.hpp"

namespace snq {

Sample::Sample(std::vector<double> values) : values_(std::move(values)) {
  if (values_.size() < 2) throw InputError("sample needs at least 2 observations");
  for (double v : values_)
    if (!std::isfinite(v)) throw InputError("sample contains a non-finite value");
  order_.resize(values_.size());
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  std::stable_sort(order_.begin(), order_.end(),
                   [this](std::size_t a, std::size_t b) { return values_[a] < values_[b]; });
  sorted_.resize(values_.size());
  for (std::size_t k = 0; k < order_.size(); ++k) sorted_[k] = values_[order_[k]];
}

std::size_t Sample::count_le(double t) const {
  return static_cast<std::size_t>(std::upper_bound(sorted_.begin(), sorted_.end(), t) - sorted_.begin());
}

}  // namespace snq
