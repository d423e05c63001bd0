#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "oddforge/odd_spec.hpp"

namespace oddforge {

/// Equal-width bins over [range.min, range.max]. Values outside the range are
/// counted in the first or last bin; NaN values are ignored.
struct Histogram {
  Interval range{};
  std::vector<double> counts;

  std::size_t bins() const { return counts.size(); }
  double bin_low(std::size_t i) const;
  double bin_high(std::size_t i) const;
  double total() const;
  /// Counts divided by the total; all zeros when the histogram is empty.
  std::vector<double> normalized() const;
};

/// Throws InvalidInputError when bins < 1 or the range is degenerate.
Histogram make_histogram(std::span<const double> values, const Interval& range, std::size_t bins);

/// Bin index of `value`, clamped into [0, bins).
std::size_t bin_index(double value, const Interval& range, std::size_t bins);

/// Jensen-Shannon divergence in nats between two count or probability
/// vectors of equal length, each normalized first. 0 log 0 is taken as 0.
/// Throws InvalidInputError on length mismatch, negative entries or a zero sum.
double jensen_shannon(std::span<const double> p, std::span<const double> q);

}  // namespace oddforge
