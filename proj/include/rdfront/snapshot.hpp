#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "rdfront/numeric.hpp"

namespace rdfront {

/// Grid field u(t, .) on a window of the line. Node j sits at
/// origin + (first + j) * dx; the end nodes are Dirichlet nodes whose values
/// the stepper holds fixed.
struct Snapshot {
  double t = 0.0;
  double origin = 0.0;
  std::int64_t first = 0;
  double dx = 0.05;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  double x(std::size_t j) const {
    return origin + static_cast<double>(first + static_cast<std::int64_t>(j)) * dx;
  }
  double left() const { return x(0); }
  double right() const { return x(values.size() - 1); }

  UniformSamples samples() const { return {left(), dx, values}; }
  double at(double x) const { return interp_linear(samples(), x); }
  double at_cubic(double x) const { return interp_cubic(samples(), x); }

  /// Index of the last node at or left of x, clamped to the window.
  std::size_t index_below(double xq) const {
    const double pos = std::floor((xq - left()) / dx);
    if (pos <= 0.0) return 0;
    const auto j = static_cast<std::size_t>(pos);
    return j >= values.size() ? values.size() - 1 : j;
  }
};

/// Front diagnostics of one observed time.
struct FrontDiagnostics {
  double t = 0.0;
  std::optional<double> X;        ///< rightmost theta0 crossing
  std::optional<double> X_left;   ///< leftmost theta0 crossing (absent once the left edge is pinned)
  std::optional<double> X_h_l;    ///< end of the block u > h starting at the origin
  std::optional<double> X_k_r;    ///< start of the clearance u < k to the right
  double slope_at_X = std::numeric_limits<double>::quiet_NaN();
  double ut_at_X = std::numeric_limits<double>::quiet_NaN();
  double window_left = 0.0;
  double window_right = 0.0;

  std::optional<double> width() const {
    if (!X_h_l || !X_k_r) return std::nullopt;
    return *X_k_r - *X_h_l;
  }
};

struct Provenance {
  std::string field;
  std::string grid;
  std::string initial;
  std::uint64_t seed = 0;
};

/// Observer records (and optional stored snapshots) of one evolution.
struct Trajectory {
  std::vector<FrontDiagnostics> records;
  std::vector<Snapshot> snapshots;
  Snapshot final_state;
  Provenance provenance;
  double level_h = std::numeric_limits<double>::quiet_NaN();  ///< h of the X_h_l records
  double level_k = std::numeric_limits<double>::quiet_NaN();  ///< k of the X_k_r records
};

}  // namespace rdfront
