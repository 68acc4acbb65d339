#include "gridruin/stats.hpp"

#include <algorithm>
#include <cmath>

#include "gridruin/errors.hpp"
#include "gridruin/normal.hpp"

namespace gridruin {

void RunningStats::merge(const RunningStats& other) noexcept {
  if (other.count_ == 0) return;
  if (count_ == 0) {
    *this = other;
    return;
  }
  const double n_a = static_cast<double>(count_);
  const double n_b = static_cast<double>(other.count_);
  const double n = n_a + n_b;
  const double d = other.mean_ - mean_;
  mean_ += d * (n_b / n);
  m2_ += other.m2_ + d * d * (n_a * n_b / n);
  count_ += other.count_;
}

double RunningStats::variance() const noexcept {
  if (count_ < 2) return 0.0;
  return std::max(0.0, m2_ / static_cast<double>(count_ - 1));
}

double RunningStats::std_error() const noexcept {
  if (count_ == 0) return 0.0;
  return std::sqrt(variance() / static_cast<double>(count_));
}

double weighted_cdf(std::span<const WeightedPoint> points, double at) {
  double total = 0.0, below = 0.0;
  for (const auto& p : points) {
    total += p.weight;
    if (p.x <= at) below += p.weight;
  }
  if (!(total > 0.0)) throw NumericalError("weighted CDF of an empty or zero-weight sample");
  return below / total;
}

double weighted_ks_to_normal(std::vector<WeightedPoint> points) {
  std::sort(points.begin(), points.end(),
            [](const WeightedPoint& a, const WeightedPoint& b) { return a.x < b.x; });
  double total = 0.0;
  for (const auto& p : points) total += p.weight;
  if (!(total > 0.0)) throw NumericalError("KS distance of an empty or zero-weight sample");

  double ks = 0.0, cum = 0.0;
  std::size_t i = 0;
  while (i < points.size()) {
    const double x = points[i].x;
    const double before = cum / total;
    while (i < points.size() && points[i].x == x) cum += points[i++].weight;
    const double after = cum / total;
    const double phi = normal::cdf(x);
    ks = std::max({ks, std::abs(before - phi), std::abs(after - phi)});
  }
  return ks;
}

}  // namespace gridruin
