#pragma once

// Spreading-rate estimation from hitting times of bump-initiated fronts,
// near-subadditivity of the hitting-time family, and the general-data
// spreading check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "rdfront/crossing.hpp"
#include "rdfront/error.hpp"
#include "rdfront/fronts.hpp"
#include "rdfront/numeric.hpp"
#include "rdfront/parallel.hpp"
#include "rdfront/reaction.hpp"
#include "rdfront/solver.hpp"

namespace rdfront {

/// One bump run whose right interface starts at `start`.
struct BumpRunRecord {
  std::int64_t start = 0;
  std::vector<double> hits;       ///< T(start + 1), T(start + 2), ... (NaN: not reached)
  std::vector<double> X_at;       ///< X at the requested observation times
  double t_final = 0.0;
};

struct BumpRunOptions {
  double h0 = 0.0;                  ///< 0: (1 + theta0) / 2
  std::int64_t target = 0;          ///< last integer target; stop once X >= target
  double t_end = 0.0;               ///< 0: 4 (target - start) + 100
  std::vector<double> observe_at;   ///< times at which X is recorded
  bool stop_at_target = true;
};

inline BumpRunRecord bump_run(const ReactionField& field, const GridConfig& grid,
                              std::int64_t start, const BumpRunOptions& opt) {
  const double theta0 = field.theta0();
  const double h0 = opt.h0 > 0.0 ? opt.h0 : default_bump_peak(theta0);
  BumpRunRecord rec;
  rec.start = start;
  HittingRecorder hits(start + 1, opt.target);
  rec.X_at.assign(opt.observe_at.size(), std::numeric_limits<double>::quiet_NaN());

  EvolveOptions o;
  o.t_end = opt.t_end > 0.0 ? opt.t_end : 4.0 * static_cast<double>(opt.target - start) + 100.0;
  for (double t : opt.observe_at) o.t_end = std::max(o.t_end, t);
  o.observer_stride = 1;
  o.diagnostics.level_positions = false;
  o.seed = field.medium.seed();
  bool quenched = false;
  double quench_t = 0.0;
  o.observers.push_back([&](const StepView& v) {
    const auto& d = v.diagnostics;
    if (!d.X && !d.X_left) {
      if (!quenched) quench_t = d.t;
      quenched = true;
      return;
    }
    hits.record(d.t, d.X);
    for (std::size_t i = 0; i < opt.observe_at.size(); ++i)
      if (std::abs(d.t - opt.observe_at[i]) <= 0.5 * grid.dt && d.X) rec.X_at[i] = *d.X;
  });
  double last_obs = 0.0;
  for (double t : opt.observe_at) last_obs = std::max(last_obs, t);
  o.stop = [&](const FrontDiagnostics& d) {
    if (quenched) return true;
    return opt.stop_at_target && hits.done() && d.t >= last_obs;
  };
  const Trajectory traj = evolve(make_bump_at_interface(h0, static_cast<double>(start), field, grid),
                                 field, grid, o);
  if (quenched) {
    std::ostringstream os;
    os << "front quenched at t=" << quench_t << " (bump h0=" << h0
       << "): the initial excitation must be large enough to ignite";
    throw QuenchingError(os.str());
  }
  rec.hits = hits.times();
  rec.t_final = traj.final_state.t;
  return rec;
}

/// q[m][n] for starts m in {0, stride, ...} below N and integer targets n in (m, N].
struct HittingMatrix {
  std::int64_t N = 0;
  std::int64_t stride = 0;
  std::uint64_t seed = 0;
  std::vector<std::int64_t> starts;
  std::vector<std::vector<double>> rows;  ///< rows[i][n - starts[i] - 1]

  std::size_t start_index(std::int64_t m) const {
    for (std::size_t i = 0; i < starts.size(); ++i)
      if (starts[i] == m) return i;
    throw InvalidArgument("HittingMatrix: " + std::to_string(m) + " is not a start position");
  }
  double q(std::int64_t m, std::int64_t n) const {
    const auto& row = rows[start_index(m)];
    const std::int64_t k = n - m - 1;
    if (k < 0 || k >= static_cast<std::int64_t>(row.size())) return std::numeric_limits<double>::quiet_NaN();
    return row[static_cast<std::size_t>(k)];
  }
};

struct HittingMatrixOptions {
  double h0 = 0.0;
  int workers = 1;
  /// Use only the first start (the q[0][n] row).
  bool first_row_only = false;
};

inline HittingMatrix build_hitting_matrix(const ReactionField& field, std::int64_t N,
                                          std::int64_t stride, const GridConfig& grid,
                                          const HittingMatrixOptions& opt = {}) {
  if (N < 2) throw InvalidArgument("build_hitting_matrix: N must be at least 2");
  if (stride < 1) throw InvalidArgument("build_hitting_matrix: stride must be positive");
  grid.validate(field);
  HittingMatrix hm;
  hm.N = N;
  hm.stride = stride;
  hm.seed = field.medium.seed();
  for (std::int64_t m = 0; m < N; m += stride) {
    hm.starts.push_back(m);
    if (opt.first_row_only) break;
  }
  auto runs = parallel_map_strict(hm.starts.size(), opt.workers, [&](std::size_t i) {
    BumpRunOptions bo;
    bo.h0 = opt.h0;
    bo.target = N;
    return bump_run(field, grid, hm.starts[i], bo);
  });
  for (auto& r : runs) {
    for (double t : r.hits)
      if (std::isnan(t)) throw InvalidArgument("build_hitting_matrix: target not reached within the time budget");
    hm.rows.push_back(std::move(r.hits));
  }
  return hm;
}

struct SpanAlpha {
  std::int64_t span_lo = 0;
  std::int64_t span_hi = 0;
  double alpha = -std::numeric_limits<double>::infinity();
  std::size_t triples = 0;
};

struct SubadditivityReport {
  double alpha_max = -std::numeric_limits<double>::infinity();
  std::int64_t arg_m = 0, arg_n = 0, arg_r = 0;
  std::vector<SpanAlpha> spans;
  double flatness = 0.0;  ///< max over span bins of alpha minus min
  double beta = 0.0;      ///< 4 max(alpha, 0) + 1
  bool corrected_subadditive = false;
  double worst_corrected_margin = std::numeric_limits<double>::infinity();
  std::size_t triples = 0;
};

/// alpha(m, n, r) = q[m][r] - q[m][n] - q[n][r] over triples m < n < r with
/// m, n start positions. The corrected family q + beta sqrt(n - m) is then
/// checked for exact subadditivity on the same triples.
inline SubadditivityReport verify_near_subadditivity(const HittingMatrix& q, int span_bins = 4) {
  if (q.starts.size() < 3) throw InvalidArgument("verify_near_subadditivity: need at least three starts");
  if (span_bins < 1) throw InvalidArgument("verify_near_subadditivity: span_bins must be positive");
  SubadditivityReport rep;
  const std::int64_t min_span = q.starts[1] - q.starts[0] + 1;
  const double width = static_cast<double>(q.N - min_span + 1) / span_bins;
  rep.spans.resize(static_cast<std::size_t>(span_bins));
  for (int b = 0; b < span_bins; ++b) {
    rep.spans[b].span_lo = min_span + static_cast<std::int64_t>(std::ceil(b * width));
    rep.spans[b].span_hi = min_span + static_cast<std::int64_t>(std::ceil((b + 1) * width)) - 1;
  }
  struct Triple { std::int64_t m, n, r; double a; };
  std::vector<Triple> all;
  for (std::size_t i = 0; i < q.starts.size(); ++i) {
    for (std::size_t j = i + 1; j < q.starts.size(); ++j) {
      const std::int64_t m = q.starts[i], n = q.starts[j];
      for (std::int64_t r = n + 1; r <= q.N; ++r) {
        const double a = q.q(m, r) - q.q(m, n) - q.q(n, r);
        all.push_back({m, n, r, a});
        if (a > rep.alpha_max) {
          rep.alpha_max = a;
          rep.arg_m = m;
          rep.arg_n = n;
          rep.arg_r = r;
        }
        const auto b = std::min<std::size_t>(
            static_cast<std::size_t>(static_cast<double>(r - m - min_span) / width), rep.spans.size() - 1);
        rep.spans[b].alpha = std::max(rep.spans[b].alpha, a);
        ++rep.spans[b].triples;
      }
    }
  }
  rep.triples = all.size();
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& s : rep.spans) {
    if (s.triples == 0) continue;
    lo = std::min(lo, s.alpha);
    hi = std::max(hi, s.alpha);
  }
  rep.flatness = hi - lo;
  rep.beta = 4.0 * std::max(rep.alpha_max, 0.0) + 1.0;
  rep.corrected_subadditive = true;
  for (const auto& t : all) {
    const auto sq = [](std::int64_t d) { return std::sqrt(static_cast<double>(d)); };
    const double lhs = q.q(t.m, t.r) + rep.beta * sq(t.r - t.m);
    const double rhs = q.q(t.m, t.n) + rep.beta * sq(t.n - t.m) + q.q(t.n, t.r) + rep.beta * sq(t.r - t.n);
    rep.worst_corrected_margin = std::min(rep.worst_corrected_margin, rhs - lhs);
    if (lhs > rhs) rep.corrected_subadditive = false;
  }
  return rep;
}

/// Largest deviation of the first row from (n - m) / c: the transient constant
/// of a translation-invariant run.
inline double transient_constant(const HittingMatrix& q, double c) {
  double worst = 0.0;
  for (std::size_t i = 0; i < q.starts.size(); ++i) {
    const auto& row = q.rows[i];
    for (std::size_t k = 0; k < row.size(); ++k)
      worst = std::max(worst, std::abs(row[k] - static_cast<double>(k + 1) / c));
  }
  return worst;
}

struct SpeedEstimate {
  std::string method = "regression-of-T(n)-on-n";
  double c_star = 0.0;
  double ci_half_width = 0.0;
  std::size_t ensemble_size = 0;
  std::vector<double> qbar;       ///< per-realization tail slope of T(n) on n
  std::vector<double> slopes;     ///< per-realization speeds 1 / qbar
  std::vector<double> segment_a;  ///< per-realization speed over the first tail quarter
  std::vector<double> segment_b;  ///< ... and over the last quarter
  double segment_gap = 0.0;       ///< |mean(a) - mean(b)|
  double segment_ci = 0.0;        ///< joint two-sample half-width
  bool segments_agree = true;
  double heterogeneity = 0.0;     ///< sd(slopes) / sd(segment differences)
  bool non_ergodic = false;
  bool underpowered = false;
};

/// Speed over [a, b] from hitting times T(first + i).
inline double segment_speed(const std::vector<double>& hits, std::int64_t first, std::int64_t a,
                            std::int64_t b) {
  const double ta = hits.at(static_cast<std::size_t>(a - first));
  const double tb = hits.at(static_cast<std::size_t>(b - first));
  return static_cast<double>(b - a) / (tb - ta);
}

/// Ensemble estimate from first rows T(1..N) of each realization. The tail
/// half n in [N/2, N] is regressed on n; c* = 1 / mean(qbar) with a
/// delta-method interval.
inline SpeedEstimate estimate_speed_from_rows(const std::vector<std::vector<double>>& rows,
                                              std::int64_t N, double c_min = 0.0,
                                              double c_max = 0.0) {
  if (rows.size() < 2) throw InvalidArgument("estimate_speed: need at least two realizations");
  if (N < 8) throw InvalidArgument("estimate_speed: N too small for a tail fit");
  SpeedEstimate est;
  est.ensemble_size = rows.size();
  const std::int64_t half = N / 2, q3 = (3 * N) / 4;
  for (const auto& row : rows) {
    if (static_cast<std::int64_t>(row.size()) < N) throw InvalidArgument("estimate_speed: row shorter than N");
    std::vector<double> xs, ys;
    for (std::int64_t n = half; n <= N; ++n) {
      const double t = row[static_cast<std::size_t>(n - 1)];
      if (std::isnan(t)) throw InvalidArgument("estimate_speed: missing hitting time");
      xs.push_back(static_cast<double>(n));
      ys.push_back(t);
    }
    const LinearFit fit = fit_line(xs, ys);
    est.qbar.push_back(fit.slope);
    est.slopes.push_back(1.0 / fit.slope);
    est.segment_a.push_back(segment_speed(row, 1, half, q3));
    est.segment_b.push_back(segment_speed(row, 1, q3, N));
  }
  const double mq = mean(est.qbar);
  est.c_star = 1.0 / mq;
  est.ci_half_width = kZ95 * standard_error(est.qbar) / (mq * mq);
  est.segment_gap = std::abs(mean(est.segment_a) - mean(est.segment_b));
  est.segment_ci = kZ95 * std::hypot(standard_error(est.segment_a), standard_error(est.segment_b));
  est.segments_agree = est.segment_gap <= est.segment_ci || est.segment_gap < 1e-9;
  std::vector<double> diff;
  for (std::size_t i = 0; i < rows.size(); ++i) diff.push_back(est.segment_a[i] - est.segment_b[i]);
  const double sd_across = stddev(est.slopes);
  const double sd_within = stddev(diff);
  est.heterogeneity = sd_within > 0.0 ? sd_across / sd_within
                                      : (sd_across > 1e-9 ? std::numeric_limits<double>::infinity() : 0.0);
  est.non_ergodic = sd_across > 1e-9 && est.heterogeneity > 2.0;
  if (c_max > c_min) est.underpowered = 2.0 * est.ci_half_width > c_max - c_min;
  return est;
}

inline SpeedEstimate estimate_speed(const std::vector<HittingMatrix>& ensemble, double c_min = 0.0,
                                    double c_max = 0.0) {
  if (ensemble.size() < 2) throw InvalidArgument("estimate_speed: need at least two realizations");
  std::vector<std::vector<double>> rows;
  std::int64_t N = ensemble.front().N;
  for (const auto& hm : ensemble) {
    if (hm.starts.empty() || hm.starts.front() != 0) throw InvalidArgument("estimate_speed: matrix lacks the m=0 row");
    N = std::min(N, hm.N);
    rows.push_back(hm.rows.front());
  }
  return estimate_speed_from_rows(rows, N, c_min, c_max);
}

// ---------------------------------------------------------------------------
// General-data check

struct SpreadingLadderEntry {
  double t = 0.0;
  double inner_min = 0.0;  ///< min u over [(c_- + eps) t, (c_+ - eps) t]
  double outer_max = 0.0;  ///< max u outside [(c_- - eps) t, (c_+ + eps) t]
};

struct SpreadingReport {
  double c_plus = 0.0, c_minus = 0.0, eps = 0.0;
  std::vector<SpreadingLadderEntry> ladder;  ///< at T/4, T/2, T
  bool inner_monotone = true;
  bool pass = false;  ///< inner >= 0.99 and outer <= 0.01 at T, monotone ladder
};

/// Two-sided evolution of `data` to T. c_minus is the signed left speed
/// (negative for a left-moving interface).
inline SpreadingReport spreading_theorem_check(const ReactionField& field, const GridConfig& grid,
                                               const Snapshot& data, double c_plus, double c_minus,
                                               double eps, double T) {
  if (!(eps > 0.0)) throw InvalidArgument("spreading_theorem_check: eps must be positive");
  if (!(c_minus + eps < c_plus - eps)) throw InvalidArgument("spreading_theorem_check: empty inner cone");
  SpreadingReport rep;
  rep.c_plus = c_plus;
  rep.c_minus = c_minus;
  rep.eps = eps;
  const std::vector<double> times{0.25 * T, 0.5 * T, T};
  EvolveOptions o;
  o.t_end = T;
  o.two_sided = true;
  o.observer_stride = 10;
  o.diagnostics.level_positions = false;
  o.snapshot_times = times;
  bool quenched = false;
  o.observers.push_back([&](const StepView& v) {
    if (!v.diagnostics.X && v.snapshot.t > 0.0) {
      bool any = false;
      for (double u : v.snapshot.values) any = any || u >= field.theta0();
      if (!any) quenched = true;
    }
  });
  o.stop = [&](const FrontDiagnostics&) { return quenched; };
  const Trajectory traj = evolve(data, field, grid, o);
  if (quenched)
    throw QuenchingError("general data quenched: the initial excitation must exceed a bump of sufficient width");
  for (const auto& s : traj.snapshots) {
    SpreadingLadderEntry e;
    e.t = s.t;
    const double a = (c_minus + eps) * s.t, b = (c_plus - eps) * s.t;
    const double oa = (c_minus - eps) * s.t, ob = (c_plus + eps) * s.t;
    e.inner_min = std::min(s.at(a), s.at(b));
    e.outer_max = std::max(s.at(oa), s.at(ob));
    for (std::size_t j = 0; j < s.size(); ++j) {
      const double x = s.x(j);
      if (x >= a && x <= b) e.inner_min = std::min(e.inner_min, s.values[j]);
      if (x <= oa || x >= ob) e.outer_max = std::max(e.outer_max, s.values[j]);
    }
    // outside the window the solution is the end value
    if (oa < s.left()) e.outer_max = std::max(e.outer_max, s.values.front());
    if (ob > s.right()) e.outer_max = std::max(e.outer_max, s.values.back());
    rep.ladder.push_back(e);
  }
  for (std::size_t i = 1; i < rep.ladder.size(); ++i)
    if (rep.ladder[i].inner_min < rep.ladder[i - 1].inner_min - 1e-3) rep.inner_monotone = false;
  rep.pass = !rep.ladder.empty() && rep.ladder.back().inner_min >= 0.99 &&
             rep.ladder.back().outer_max <= 0.01 && rep.inner_monotone;
  return rep;
}

}  // namespace rdfront
