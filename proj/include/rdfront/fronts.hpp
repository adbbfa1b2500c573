#pragma once

// Statistics over a diagnostics stream: width, steepness, temporal slope,
// interface speed bounds and hitting times.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <vector>

#include "rdfront/crossing.hpp"
#include "rdfront/error.hpp"
#include "rdfront/numeric.hpp"
#include "rdfront/snapshot.hpp"

namespace rdfront {

struct FrontSummary {
  double burn_in = 0.0;
  double level_h = 0.0;
  double level_k = 0.0;
  std::size_t samples = 0;
  double width_max = std::numeric_limits<double>::quiet_NaN();
  double slope_max = std::numeric_limits<double>::quiet_NaN();  ///< max u_x at X (negative)
  double ut_min = std::numeric_limits<double>::quiet_NaN();     ///< min u_t at X (positive)
  double xdot_min = std::numeric_limits<double>::quiet_NaN();
  double xdot_max = std::numeric_limits<double>::quiet_NaN();
  double xdot_mean = std::numeric_limits<double>::quiet_NaN();
  LinearFit width_trend;  ///< width regressed on t
  double width_trend_ci = std::numeric_limits<double>::quiet_NaN();
  LinearFit position_fit;  ///< X regressed on t

  double p_hat() const { return -slope_max; }
  double delta_hat() const { return ut_min; }
};

/// Summary of the records with t >= burn_in. Width uses the h and k the
/// trajectory was diagnosed with.
inline FrontSummary front_stats(const Trajectory& traj, double burn_in) {
  const auto& rec = traj.records;
  if (rec.empty() || rec.back().t < burn_in) {
    std::ostringstream os;
    os << "front_stats: trajectory ends before the burn-in time " << burn_in;
    throw InvalidArgument(os.str());
  }
  FrontSummary out;
  out.burn_in = burn_in;
  out.level_h = traj.level_h;
  out.level_k = traj.level_k;

  std::vector<double> tw, w, tx, xs, xdot;
  double slope_max = -std::numeric_limits<double>::infinity();
  double ut_min = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < rec.size(); ++i) {
    const auto& r = rec[i];
    if (r.t < burn_in) continue;
    ++out.samples;
    if (auto width = r.width()) {
      tw.push_back(r.t);
      w.push_back(*width);
    }
    if (!r.X) continue;
    tx.push_back(r.t);
    xs.push_back(*r.X);
    if (!std::isnan(r.slope_at_X)) slope_max = std::max(slope_max, r.slope_at_X);
    if (!std::isnan(r.ut_at_X)) ut_min = std::min(ut_min, r.ut_at_X);
    if (i > 0 && i + 1 < rec.size() && rec[i - 1].X && rec[i + 1].X)
      xdot.push_back((*rec[i + 1].X - *rec[i - 1].X) / (rec[i + 1].t - rec[i - 1].t));
  }
  if (!w.empty()) out.width_max = *std::max_element(w.begin(), w.end());
  if (std::isfinite(slope_max)) out.slope_max = slope_max;
  if (std::isfinite(ut_min)) out.ut_min = ut_min;
  if (!xdot.empty()) {
    out.xdot_min = *std::min_element(xdot.begin(), xdot.end());
    out.xdot_max = *std::max_element(xdot.begin(), xdot.end());
    out.xdot_mean = mean(xdot);
  }
  if (tw.size() >= 3) {
    out.width_trend = fit_line(tw, w);
    out.width_trend_ci = kZ95 * out.width_trend.slope_se;
  }
  if (tx.size() >= 2) out.position_fit = fit_line(tx, xs);
  return out;
}

/// Largest width over records with t in [t0, t1].
inline double max_width(const Trajectory& traj, double t0, double t1) {
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& r : traj.records)
    if (r.t >= t0 && r.t <= t1)
      if (auto w = r.width()) m = std::max(m, *w);
  return m;
}

struct HittingTimes {
  std::vector<double> positions;
  std::vector<std::optional<double>> times;  ///< nullopt: not reached
  Provenance provenance;
};

/// First time the interface reaches each position, linear in t between records.
inline HittingTimes hitting_times(const Trajectory& traj, std::span<const double> positions) {
  HittingTimes out;
  out.positions.assign(positions.begin(), positions.end());
  out.times.assign(positions.size(), std::nullopt);
  out.provenance = traj.provenance;
  const auto& rec = traj.records;
  for (std::size_t p = 0; p < positions.size(); ++p) {
    const double xi = positions[p];
    for (std::size_t i = 0; i < rec.size(); ++i) {
      if (!rec[i].X || *rec[i].X < xi) continue;
      if (i == 0 || !rec[i - 1].X) {
        out.times[p] = rec[i].t;
      } else {
        const double xa = *rec[i - 1].X, xb = *rec[i].X;
        const double a = (xi - xa) / (xb - xa);
        out.times[p] = rec[i - 1].t + a * (rec[i].t - rec[i - 1].t);
      }
      break;
    }
  }
  return out;
}

/// Records X(t) reaching integer targets on the fly; cheaper than keeping
/// the full record stream for long hitting-time runs.
class HittingRecorder {
 public:
  HittingRecorder(std::int64_t first, std::int64_t last)
      : first_(first), times_(static_cast<std::size_t>(std::max<std::int64_t>(last - first + 1, 0)),
                              std::numeric_limits<double>::quiet_NaN()) {}

  void record(double t, const std::optional<double>& X) {
    if (!X) return;
    if (have_prev_ && *X > prev_x_) {
      while (next_ < times_.size() && static_cast<double>(first_ + static_cast<std::int64_t>(next_)) <= *X) {
        const double xi = static_cast<double>(first_ + static_cast<std::int64_t>(next_));
        times_[next_] = xi <= prev_x_ ? prev_t_ : prev_t_ + (xi - prev_x_) / (*X - prev_x_) * (t - prev_t_);
        ++next_;
      }
    } else if (!have_prev_) {
      while (next_ < times_.size() && static_cast<double>(first_ + static_cast<std::int64_t>(next_)) <= *X)
        times_[next_++] = t;
    }
    if (!have_prev_ || *X > prev_x_) {
      prev_t_ = t;
      prev_x_ = *X;
    }
    have_prev_ = true;
  }

  bool done() const { return next_ >= times_.size(); }
  std::int64_t first() const { return first_; }
  /// T(first + i); NaN when not reached.
  const std::vector<double>& times() const { return times_; }

 private:
  std::int64_t first_;
  std::vector<double> times_;
  std::size_t next_ = 0;
  bool have_prev_ = false;
  double prev_t_ = 0.0, prev_x_ = 0.0;
};

}  // namespace rdfront
