#pragma once

// Level crossings of a grid snapshot. All positions are linearly
// interpolated between the two nodes that bracket the level.

#include <optional>
#include <span>
#include <string>
#include <utility>

#include "rdfront/error.hpp"
#include "rdfront/snapshot.hpp"

namespace rdfront {

namespace detail {

inline double cross_between(const Snapshot& s, std::size_t i, double level) {
  // values[i] >= level > values[i+1] or the reverse
  const double a = s.values[i], b = s.values[i + 1];
  return s.x(i) + (a - level) / (a - b) * s.dx;
}

}  // namespace detail

/// Rightmost position where u comes down through `level`, or nullopt.
inline std::optional<double> rightmost_crossing(const Snapshot& s, double level) {
  const std::size_t n = s.size();
  if (n < 2) return std::nullopt;
  for (std::size_t j = n; j-- > 0;) {
    if (s.values[j] >= level) {
      if (j + 1 == n) return std::nullopt;
      return detail::cross_between(s, j, level);
    }
  }
  return std::nullopt;
}

/// Index i of the cell [x_i, x_{i+1}] containing the rightmost crossing.
inline std::optional<std::size_t> rightmost_crossing_cell(const Snapshot& s, double level) {
  const std::size_t n = s.size();
  for (std::size_t j = n; j-- > 0;) {
    if (s.values[j] >= level) {
      if (j + 1 == n) return std::nullopt;
      return j;
    }
  }
  return std::nullopt;
}

/// Leftmost position where u comes up through `level` from below.
inline std::optional<double> leftmost_crossing(const Snapshot& s, double level) {
  const std::size_t n = s.size();
  if (n < 2 || s.values[0] >= level) return std::nullopt;
  for (std::size_t j = 1; j < n; ++j)
    if (s.values[j] >= level) return detail::cross_between(s, j - 1, level);
  return std::nullopt;
}

/// Right interface X: the rightmost theta0 crossing. Throws NoCrossing when
/// the window is entirely below (quenched) or ends above (saturated) theta0.
inline double track_interface(const Snapshot& s, double theta0) {
  if (s.size() < 2) throw InvalidArgument("track_interface: snapshot has fewer than two nodes");
  bool any_above = false;
  for (double v : s.values)
    if (v >= theta0) { any_above = true; break; }
  if (!any_above)
    throw NoCrossing(NoCrossing::Kind::kQuenched,
                     "no theta0 crossing at t=" + std::to_string(s.t) + ": solution quenched");
  if (s.values.back() >= theta0)
    throw NoCrossing(NoCrossing::Kind::kSaturated,
                     "no theta0 crossing at t=" + std::to_string(s.t) + ": window saturated");
  return *rightmost_crossing(s, theta0);
}

/// Level positions relative to `origin`:
///  X_h_l = sup{x > origin : u > h on [origin, x)}  (absent if u(origin) <= h)
///  X_k_r = inf{x : u < k on (x, inf)}              (absent if u < k everywhere)
/// An origin left of the window counts as lying in the dropped region where u = 1.
inline std::pair<std::optional<double>, std::optional<double>> level_positions(
    const Snapshot& s, double origin, double h, double k) {
  std::optional<double> xh;
  const std::size_t n = s.size();
  std::size_t j0 = 0;
  bool inside = true;
  if (origin >= s.left()) {
    if (origin > s.right() || s.at(origin) <= h) inside = false;
    j0 = s.index_below(origin) + 1;
  } else if (s.values[0] <= h) {
    inside = false;
  }
  if (inside) {
    for (std::size_t j = j0; j < n; ++j) {
      if (s.values[j] <= h) {
        xh = (j == 0) ? s.left() : detail::cross_between(s, j - 1, h);
        if (*xh < origin) xh = origin;
        break;
      }
    }
  }
  std::optional<double> xk;
  for (std::size_t j = n; j-- > 0;) {
    if (s.values[j] >= k) {
      xk = (j + 1 == n) ? s.right() : detail::cross_between(s, j, k);
      break;
    }
  }
  return {xh, xk};
}

}  // namespace rdfront
