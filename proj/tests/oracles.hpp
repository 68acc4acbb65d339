#pragma once

// Independent reference computations used only by tests.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

namespace gridruin::oracle {

// Gauss-Legendre nodes and weights on [-1, 1] (Newton on P_n).
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      const double dz = p1 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
  }
}

// Integral over z of 1(eta_scale * #{s : w[s] + z > 0} > k) e^{-z} dz,
// integrating e^{-z} piecewise between the breakpoints -w[s] with
// Gauss-Legendre nodes and counting exceedances directly at each node.
// eta_scale = eta gives the eta-weighted count, 1 the plain count.
inline double berman_integral_quadrature(std::span<const double> w, double eta_scale, long k,
                                         int nodes_per_piece) {
  std::vector<double> breaks;
  for (double v : w) breaks.push_back(-v);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  auto fires = [&](double z) {
    long count = 0;
    for (double v : w) count += (v + z > 0.0);
    return eta_scale * static_cast<double>(count) > static_cast<double>(k);
  };

  std::vector<double> gx, gw;
  gauss_legendre(nodes_per_piece, gx, gw);
  double total = 0.0;
  // Above the last breakpoint every point exceeds: integrate e^{-z} exactly.
  if (fires(breaks.back() + 1.0)) total += std::exp(-breaks.back());
  for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
    const double a = breaks[p], b = breaks[p + 1];
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double piece = 0.0;
    for (int i = 0; i < nodes_per_piece; ++i) {
      const double z = mid + half * gx[i];
      if (fires(z)) piece += gw[i] * std::exp(-z);
    }
    total += half * piece;
  }
  return total;
}

}  // namespace gridruin::oracle
