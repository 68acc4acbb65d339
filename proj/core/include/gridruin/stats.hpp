#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace gridruin {

// Welford accumulator. merge() is exact-order deterministic: combining the
// same partials in the same order gives bit-identical results.
class RunningStats {
 public:
  void add(double x) noexcept {
    ++count_;
    const double d = x - mean_;
    mean_ += d / static_cast<double>(count_);
    m2_ += d * (x - mean_);
  }
  void merge(const RunningStats& other) noexcept;

  std::uint64_t count() const noexcept { return count_; }
  double mean() const noexcept { return mean_; }
  // Unbiased sample variance; 0 for fewer than two samples.
  double variance() const noexcept;
  double std_error() const noexcept;

 private:
  std::uint64_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

struct WeightedPoint {
  double x = 0.0;
  double weight = 0.0;
};

// Weighted empirical CDF evaluated at `at` (points need not be sorted).
double weighted_cdf(std::span<const WeightedPoint> points, double at);

// Kolmogorov-Smirnov distance sup_s |F_hat(s) - Phi(s)| of the weighted
// empirical distribution against the standard normal. Ties are grouped.
double weighted_ks_to_normal(std::vector<WeightedPoint> points);

inline constexpr double kZ95 = 1.959963984540054;

}  // namespace gridruin
