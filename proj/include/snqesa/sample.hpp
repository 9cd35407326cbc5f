#pragma once
#include <cstddef>
#include <span>
#include <vector>

namespace snq {

/// An immutable sample with its sort order cached at construction.
class Sample {
 public:
  /// Throws InputError if n < 2 or any value is non-finite.
  explicit Sample(std::vector<double> values);

  std::size_t n() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  std::span<const double> sorted() const { return sorted_; }
  std::span<const std::size_t> sorted_index() const { return order_; }

  /// k-th order statistic, 1-based.
  double order_stat(std::size_t k) const { return sorted_[k - 1]; }
  double min() const { return sorted_.front(); }
  double max() const { return sorted_.back(); }

  /// #{X_i <= t} by binary search.
  std::size_t count_le(double t) const;

 private:
  std::vector<double> values_;
  std::vector<double> sorted_;
  std::vector<std::size_t> order_;
};

}  // namespace snq
