#include "oddforge/histogram.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "oddforge/error.hpp"

namespace oddforge {

namespace {

std::vector<double> to_probabilities(std::span<const double> x) {
  double sum = 0.0;
  for (double v : x) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidInputError("histogram entries must be finite and >= 0");
    sum += v;
  }
  if (!(sum > 0.0)) throw InvalidInputError("histogram is empty");
  std::vector<double> p(x.begin(), x.end());
  for (double& v : p) v /= sum;
  return p;
}

}  // namespace

double Histogram::bin_low(std::size_t i) const {
  return range.min + range.width() * static_cast<double>(i) / static_cast<double>(bins());
}

double Histogram::bin_high(std::size_t i) const {
  return i + 1 == bins() ? range.max : bin_low(i + 1);
}

double Histogram::total() const { return std::accumulate(counts.begin(), counts.end(), 0.0); }

std::vector<double> Histogram::normalized() const {
  const double t = total();
  std::vector<double> p(counts.size(), 0.0);
  if (t > 0.0) {
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = counts[i] / t;
  }
  return p;
}

std::size_t bin_index(double value, const Interval& range, std::size_t bins) {
  const double pos = (value - range.min) / range.width() * static_cast<double>(bins);
  if (!(pos >= 0.0)) return 0;
  if (pos >= static_cast<double>(bins)) return bins - 1;
  return static_cast<std::size_t>(pos);
}

Histogram make_histogram(std::span<const double> values, const Interval& range, std::size_t bins) {
  if (bins < 1) throw InvalidInputError("a histogram needs at least one bin");
  if (!(range.min < range.max) || !std::isfinite(range.min) || !std::isfinite(range.max)) {
    throw InvalidInputError("histogram range must be finite and non-degenerate");
  }
  Histogram h{range, std::vector<double>(bins, 0.0)};
  for (double v : values) {
    if (std::isnan(v)) continue;
    h.counts[bin_index(v, range, bins)] += 1.0;
  }
  return h;
}

double jensen_shannon(std::span<const double> p_in, std::span<const double> q_in) {
  if (p_in.size() != q_in.size()) throw InvalidInputError("histograms differ in bin count");
  const auto p = to_probabilities(p_in);
  const auto q = to_probabilities(q_in);
  double js = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double m = 0.5 * (p[i] + q[i]);
    if (p[i] > 0.0) js += 0.5 * p[i] * std::log(p[i] / m);
    if (q[i] > 0.0) js += 0.5 * q[i] * std::log(q[i] / m);
  }
  return std::clamp(js, 0.0, std::log(2.0));
}

}  // namespace oddforge
