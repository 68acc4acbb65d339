#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>

#include "gridruin/errors.hpp"
#include "gridruin/model.hpp"

namespace gridruin {

struct RuinEvent {
  bool occurred = false;
  std::int64_t step = -1;          // grid index of detection
  std::optional<double> time;      // step * delta
  double level = 0.0;              // S at the detection step
  double weight = 1.0;             // likelihood ratio; 1 for crude sampling
};

// Detectors are per-path state machines fed S_0, S_1, ... in order;
// observe() returns true at the first index where ruin is established.
// Inequalities against u are strict.

class ClassicalDetector {
 public:
  explicit ClassicalDetector(double u) : u_(u) {}
  bool observe(std::int64_t, double s) noexcept { return s > u_; }

 private:
  double u_;
};

// Ruin once S_i - gamma * min_{j<=i} S_j > u. gamma = 0 is accepted here and
// reduces to the classical detector.
class ReflectedDetector {
 public:
  ReflectedDetector(double u, double gamma) : u_(u), gamma_(gamma) {
    if (!(gamma >= 0.0 && gamma < 1.0)) throw ConfigError("gamma must lie in [0, 1)");
  }
  bool observe(std::int64_t, double s) noexcept {
    running_min_ = std::min(running_min_, s);
    return s - gamma_ * running_min_ > u_;
  }

 private:
  double u_;
  double gamma_;
  double running_min_ = std::numeric_limits<double>::infinity();
};

// Ruin once window_steps + 1 consecutive grid points all have S > u.
class ParisianDetector {
 public:
  ParisianDetector(double u, std::int64_t window_steps) : u_(u), needed_(window_steps + 1) {
    if (window_steps < 0) throw ConfigError("Parisian window must be nonnegative");
  }
  bool observe(std::int64_t, double s) noexcept {
    run_ = s > u_ ? run_ + 1 : 0;
    return run_ >= needed_;
  }

 private:
  double u_;
  std::int64_t needed_;
  std::int64_t run_ = 0;
};

// Ruin once more than k grid points (not necessarily consecutive) have S > u.
class CumulativeDetector {
 public:
  CumulativeDetector(double u, std::int64_t k) : u_(u), k_(k) {
    if (k < 0) throw ConfigError("k must be nonnegative");
  }
  bool observe(std::int64_t, double s) noexcept {
    if (s > u_) ++count_;
    return count_ > k_;
  }

 private:
  double u_;
  std::int64_t k_;
  std::int64_t count_ = 0;
};

// Source: PathStream, FixedPath, or anything with index()/value()/advance().
template <class Source, class Detector>
RuinEvent run_detector(Source& src, Detector& det, const Grid& grid) {
  for (;;) {
    if (det.observe(src.index(), src.value())) {
      RuinEvent ev;
      ev.occurred = true;
      ev.step = src.index();
      ev.time = grid.time(ev.step);
      ev.level = src.value();
      return ev;
    }
    if (!src.advance()) return RuinEvent{};
  }
}

template <class Source>
RuinEvent detect_classical(Source& src, double u, const Grid& grid) {
  ClassicalDetector det(u);
  return run_detector(src, det, grid);
}

template <class Source>
RuinEvent detect_reflected(Source& src, double u, double gamma, const Grid& grid) {
  ReflectedDetector det(u, gamma);
  return run_detector(src, det, grid);
}

template <class Source>
RuinEvent detect_parisian(Source& src, double u, double T, const Grid& grid) {
  const auto steps = grid_steps(T, grid.delta());
  if (!steps) throw ConfigError("T must be a multiple of delta");
  ParisianDetector det(u, *steps);
  return run_detector(src, det, grid);
}

template <class Source>
RuinEvent detect_cumulative(Source& src, double u, std::int64_t k, const Grid& grid) {
  CumulativeDetector det(u, k);
  return run_detector(src, det, grid);
}

}  // namespace gridruin
