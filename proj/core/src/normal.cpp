#include "gridruin/normal.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace gridruin::normal {

namespace {
constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;
}  // namespace

double pdf(double x) noexcept { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double cdf(double x) noexcept { return 0.5 * std::erfc(-x * kInvSqrt2); }

double sf(double x) noexcept { return 0.5 * std::erfc(x * kInvSqrt2); }

double log_sf(double x) noexcept {
  if (x < 30.0) return std::log(sf(x));
  // sf(x) = pdf(x)/x * (1 - 1/x^2 + 3/x^4 - 15/x^6 + ...)
  const double z = 1.0 / (x * x);
  const double series = 1.0 - z * (1.0 - 3.0 * z * (1.0 - 5.0 * z));
  return -0.5 * x * x - std::log(x) - 0.5 * std::log(2.0 * std::numbers::pi) + std::log(series);
}

double mills_bound(double x) noexcept {
  if (!(x > 0.0)) return std::numeric_limits<double>::infinity();
  return pdf(x) / x;
}

}  // namespace gridruin::normal
