#pragma once

// Random traveling wave by the shift-normalized step-data limit: solutions
// started at t = -n from a step placed so that the interface sits at x = 0
// at t = 0, for an increasing ladder of n.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rdfront/crossing.hpp"
#include "rdfront/error.hpp"
#include "rdfront/fronts.hpp"
#include "rdfront/numeric.hpp"
#include "rdfront/parallel.hpp"
#include "rdfront/profiles.hpp"
#include "rdfront/reaction.hpp"
#include "rdfront/solver.hpp"

namespace rdfront {

enum class InitialKind { kStep, kBump };

inline std::string_view to_string(InitialKind k) { return k == InitialKind::kStep ? "step" : "bump"; }

/// Sampling grid x_i = -R + i * spacing shared by all normalized profiles.
struct ProfileGrid {
  double R = 30.0;
  double spacing = 0.05;

  std::size_t size() const { return static_cast<std::size_t>(std::llround(2.0 * R / spacing)) + 1; }
  double x(std::size_t i) const { return -R + static_cast<double>(i) * spacing; }
  std::size_t index_of(double xq) const {
    return static_cast<std::size_t>(std::llround((xq + R) / spacing));
  }
};

/// u(x + center) on the profile grid; cubic in space, 1 left of the window.
inline std::vector<double> sample_profile(const Snapshot& s, double center, const ProfileGrid& pg) {
  std::vector<double> out(pg.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double x = pg.x(i) + center;
    out[i] = x < s.left() ? s.values.front() : std::clamp(s.at_cubic(x), 0.0, 1.0);
  }
  return out;
}

/// Crossing of `level` by the cubic reconstruction within one cell of `near`.
/// Profiles are centred here so that the sampled profile passes through the
/// level exactly at 0.
inline double cubic_crossing(const Snapshot& s, double level, double near) {
  double lo = near - s.dx, hi = near + s.dx;
  if (!(s.at_cubic(lo) >= level && s.at_cubic(hi) <= level)) return near;
  for (int it = 0; it < 100 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    (s.at_cubic(mid) > level ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

struct NormalizedRun {
  int n = 0;
  InitialKind kind = InitialKind::kStep;
  double shift = 0.0;     ///< placement y of the initial data
  double X0 = 0.0;        ///< interface at t = 0 (|X0| <= tolerance)
  double center = 0.0;    ///< cubic-reconstruction crossing near X0
  double residual = 0.0;  ///< |u(0, 0) - theta0|
  int evaluations = 0;
  double bracket_lo = 0.0, bracket_hi = 0.0;
  Snapshot state;               ///< solution at t = 0
  std::vector<double> profile;  ///< u(0, x + center) on the profile grid
};

struct NormalizeOptions {
  double tol = 1e-7;  ///< target |X(0)|
  double h0 = 0.0;    ///< bump peak (0: (1 + theta0) / 2)
  ProfileGrid profile;
};

namespace detail {

inline Snapshot initial_data(InitialKind kind, double y, const ReactionField& field,
                             const GridConfig& grid, double h0) {
  return kind == InitialKind::kStep ? make_step(y, grid) : make_bump(h0, y, field, grid);
}

inline Snapshot run_to_zero(InitialKind kind, double y, int n, const ReactionField& field,
                            const GridConfig& grid, double h0) {
  Snapshot init = initial_data(kind, y, field, grid, h0);
  init.t = -static_cast<double>(n);
  EvolveOptions o;
  o.t_end = 0.0;
  o.observer_stride = std::numeric_limits<int>::max();
  o.diagnostics.level_positions = false;
  return evolve(std::move(init), field, grid, o).final_state;
}

}  // namespace detail

/// Finds the placement y so that the interface of the solution started at
/// t = -n sits at 0 when t = 0. X(0) is increasing and continuous in y (the
/// grid moves with y), so a bracketing root finder on y is safe; the
/// bracket comes from the exponential super-solution speed.
inline NormalizedRun normalize_shift(int n, const ReactionField& field, InitialKind kind,
                                     const GridConfig& grid, const NormalizeOptions& opt = {}) {
  if (n < 1) throw InvalidArgument("normalize_shift: n must be at least 1");
  if (!(opt.tol > 0.0)) throw InvalidArgument("normalize_shift: tol must be positive");
  grid.validate(field);
  const double theta0 = field.theta0();
  const double h0 = opt.h0 > 0.0 ? opt.h0 : default_bump_peak(theta0);
  const auto sup = exp_supersolution_params(field.nonlinearity, field.medium.g_max());
  double K = std::log(1.0 / theta0) / sup.lambda + 1.0;
  if (kind == InitialKind::kBump) K += discrete_bump(h0, field, grid.dx).z2;

  NormalizedRun run;
  run.n = n;
  run.kind = kind;
  double lo = -sup.c * n - K, hi = sup.c * n + K;
  run.bracket_lo = lo;
  run.bracket_hi = hi;
  auto eval = [&](double y, Snapshot* keep) {
    ++run.evaluations;
    Snapshot s = detail::run_to_zero(kind, y, n, field, grid, h0);
    const double X = track_interface(s, theta0);
    if (keep) *keep = std::move(s);
    return X;
  };
  Snapshot s_lo, s_hi;
  double f_lo = eval(lo, &s_lo), f_hi = eval(hi, &s_hi);
  if (!(f_lo <= 0.0 && f_hi >= 0.0)) {
    std::ostringstream os;
    os << "normalize_shift: X(0) does not change sign on [" << lo << ", " << hi << "] (X=" << f_lo
       << ", " << f_hi << ")";
    throw BracketError(os.str());
  }
  // Illinois variant of regula falsi; every iterate stays inside the bracket.
  double y = lo, fy = f_lo;
  Snapshot s_y = s_lo;
  int side = 0;
  for (int it = 0; it < 200; ++it) {
    if (std::abs(f_lo) <= opt.tol) { y = lo; fy = f_lo; s_y = s_lo; break; }
    if (std::abs(f_hi) <= opt.tol) { y = hi; fy = f_hi; s_y = s_hi; break; }
    double cand = (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
    if (!(cand > lo && cand < hi)) cand = 0.5 * (lo + hi);
    Snapshot s_c;
    const double fc = eval(cand, &s_c);
    y = cand;
    fy = fc;
    s_y = s_c;
    if (std::abs(fc) <= opt.tol || hi - lo < 1e-13) break;
    if (fc < 0.0) {
      lo = cand; f_lo = fc; s_lo = std::move(s_c);
      if (side == -1) f_hi *= 0.5;
      side = -1;
    } else {
      hi = cand; f_hi = fc; s_hi = std::move(s_c);
      if (side == 1) f_lo *= 0.5;
      side = 1;
    }
  }
  // f values may have been halved by the Illinois rule; report the true one
  run.shift = y;
  run.X0 = track_interface(s_y, theta0);
  (void)fy;
  if (std::abs(run.X0) > 10.0 * opt.tol) {
    std::ostringstream os;
    os << "normalize_shift: did not reach |X(0)| <= " << opt.tol << " (X(0)=" << run.X0 << ")";
    throw BracketError(os.str());
  }
  run.residual = std::abs(s_y.at(0.0) - theta0);
  run.center = cubic_crossing(s_y, theta0, run.X0);
  run.profile = sample_profile(s_y, run.center, opt.profile);
  run.state = std::move(s_y);
  return run;
}

struct PassageProfile {
  std::int64_t xi = 0;
  double time = 0.0;            ///< T(xi)
  std::vector<double> values;   ///< w(T(xi), x + xi) on the profile grid
};

struct WaveOptions {
  std::vector<int> n_list{5, 10, 20, 40, 80};
  NormalizeOptions normalize;
  double cauchy_tol = 1e-4;
  double order_tol = 1e-5;
  /// Time of the forward run of the limit profile (0: none).
  double forward_time = 0.0;
  /// Integer positions whose passage profiles are recorded.
  std::int64_t xi_first = 0, xi_last = -1;
  /// Levels of the transition-width diagnostics along the forward run.
  double width_h = 0.8, width_k = 0.2;
  int workers = 1;
  bool abort_on_disorder = true;
};

struct WaveLimitRecord {
  std::vector<int> n_list;
  std::vector<NormalizedRun> runs;
  ProfileGrid grid;
  std::vector<double> cauchy_gaps;  ///< sup |W_{n_{i+1}} - W_{n_i}| on [-R, R]
  double order_violation = 0.0;     ///< worst breach of the ordering over all pairs
  double final_gap = 0.0;
  bool converged = false;
  std::vector<double> W;
  double W_left = 0.0, W_right = 0.0;
  // forward run from W
  Trajectory forward;
  std::vector<double> X_tilde_t, X_tilde;
  double min_increment = 0.0;   ///< min over steps of X(t + dt) - X(t)
  std::map<std::int64_t, PassageProfile> passages;
};

namespace detail {

// Advances `state` and captures passage profiles at integer crossings.
inline void forward_run(WaveLimitRecord& rec, const Snapshot& start, const ReactionField& field,
                        const GridConfig& grid, const WaveOptions& opt) {
  EvolveOptions o;
  o.t_end = opt.forward_time;
  o.observer_stride = 1;
  o.diagnostics.origin = std::numeric_limits<double>::lowest();
  o.diagnostics.h = opt.width_h;
  o.diagnostics.k = opt.width_k;
  Snapshot prev = start;
  std::optional<double> prev_x = track_interface(start, field.theta0());
  std::int64_t next_xi = std::max<std::int64_t>(opt.xi_first, static_cast<std::int64_t>(std::floor(*prev_x)) + 1);
  o.observers.push_back([&](const StepView& v) {
    const auto& d = v.diagnostics;
    if (!d.X) return;
    rec.X_tilde_t.push_back(d.t);
    rec.X_tilde.push_back(*d.X);
    if (v.snapshot.t > start.t) {
      const double c_prev = cubic_crossing(prev, field.theta0(), *prev_x);
      const double c_cur = cubic_crossing(v.snapshot, field.theta0(), *d.X);
      while (next_xi <= opt.xi_last && static_cast<double>(next_xi) <= *d.X &&
             static_cast<double>(next_xi) > *prev_x) {
        const double xi = static_cast<double>(next_xi);
        PassageProfile p;
        p.xi = next_xi;
        p.time = prev.t + (xi - *prev_x) / (*d.X - *prev_x) * (v.snapshot.t - prev.t);
        // profile taken where the cubic reconstruction crosses xi (may
        // extrapolate slightly past the step)
        const double tau = (xi - c_prev) / (c_cur - c_prev);
        const auto a = sample_profile(prev, xi, rec.grid);
        const auto b = sample_profile(v.snapshot, xi, rec.grid);
        p.values.resize(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) p.values[i] = (1.0 - tau) * a[i] + tau * b[i];
        rec.passages.emplace(next_xi, std::move(p));
        ++next_xi;
      }
    }
    prev = v.snapshot;
    prev_x = d.X;
  });
  Snapshot init = start;
  rec.forward = evolve(std::move(init), field, grid, o);
  rec.min_increment = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < rec.X_tilde.size(); ++i)
    rec.min_increment = std::min(rec.min_increment, rec.X_tilde[i] - rec.X_tilde[i - 1]);
}

}  // namespace detail

/// Normalized step runs over the n-ladder, their ordering and Cauchy gaps,
/// and (optionally) the forward evolution of the last profile.
inline WaveLimitRecord construct_wave(const ReactionField& field, const GridConfig& grid,
                                      const WaveOptions& opt = {}) {
  if (opt.n_list.size() < 3) throw InvalidArgument("construct_wave: n_list needs at least three entries");
  for (std::size_t i = 1; i < opt.n_list.size(); ++i)
    if (opt.n_list[i] <= opt.n_list[i - 1]) throw InvalidArgument("construct_wave: n_list must increase");
  WaveLimitRecord rec;
  rec.n_list = opt.n_list;
  rec.grid = opt.normalize.profile;
  rec.runs = parallel_map_strict(opt.n_list.size(), opt.workers, [&](std::size_t i) {
    return normalize_shift(opt.n_list[i], field, InitialKind::kStep, grid, opt.normalize);
  });
  const ProfileGrid& pg = rec.grid;
  const std::size_t mid = pg.index_of(0.0);
  for (std::size_t a = 0; a < rec.runs.size(); ++a) {
    for (std::size_t b = a + 1; b < rec.runs.size(); ++b) {
      const auto& lo = rec.runs[a].profile;  // smaller n
      const auto& hi = rec.runs[b].profile;  // larger n
      for (std::size_t i = 0; i < pg.size(); ++i) {
        // a later start sits below behind the interface and above ahead of it
        if (i < mid) rec.order_violation = std::max(rec.order_violation, hi[i] - lo[i]);
        else if (i > mid) rec.order_violation = std::max(rec.order_violation, lo[i] - hi[i]);
      }
    }
  }
  for (std::size_t a = 1; a < rec.runs.size(); ++a) {
    double gap = 0.0;
    for (std::size_t i = 0; i < pg.size(); ++i)
      gap = std::max(gap, std::abs(rec.runs[a].profile[i] - rec.runs[a - 1].profile[i]));
    rec.cauchy_gaps.push_back(gap);
  }
  if (opt.abort_on_disorder && rec.order_violation > opt.order_tol) {
    std::ostringstream os;
    os << "construct_wave: ordering of the normalized profiles violated by " << rec.order_violation
       << " (tolerance " << opt.order_tol << ")";
    throw Error(os.str());
  }
  rec.final_gap = rec.cauchy_gaps.back();
  rec.converged = rec.final_gap < opt.cauchy_tol;
  rec.W = rec.runs.back().profile;
  rec.W_left = rec.W.front();
  rec.W_right = rec.W.back();
  if (opt.forward_time > 0.0) detail::forward_run(rec, rec.runs.back().state, field, grid, opt);
  return rec;
}

struct PassageEnsemble {
  ProfileGrid grid;
  std::vector<std::int64_t> xi;           ///< positions present, increasing
  std::vector<std::int64_t> absent;       ///< requested but beyond the horizon
  std::vector<std::vector<double>> rows;  ///< one profile per present xi
  std::vector<double> mean, variance;     ///< per x
};

inline PassageEnsemble passage_profiles(const WaveLimitRecord& rec, const std::vector<std::int64_t>& xi_list) {
  PassageEnsemble ens;
  ens.grid = rec.grid;
  for (auto xi : xi_list) {
    auto it = rec.passages.find(xi);
    if (it == rec.passages.end()) {
      ens.absent.push_back(xi);
      continue;
    }
    ens.xi.push_back(xi);
    ens.rows.push_back(it->second.values);
  }
  const std::size_t nx = ens.grid.size();
  ens.mean.assign(nx, std::numeric_limits<double>::quiet_NaN());
  ens.variance.assign(nx, std::numeric_limits<double>::quiet_NaN());
  if (ens.rows.empty()) return ens;
  std::vector<double> col(ens.rows.size());
  for (std::size_t i = 0; i < nx; ++i) {
    for (std::size_t r = 0; r < ens.rows.size(); ++r) col[r] = ens.rows[r][i];
    ens.mean[i] = mean(col);
    ens.variance[i] = variance(col);
  }
  return ens;
}

struct StationarityReport {
  double x_lo = -10.0, x_hi = 10.0;
  std::size_t batch = 10;
  double worst_excess = -std::numeric_limits<double>::infinity();  ///< max of |m1 - m2| - bound
  double worst_x = 0.0;
  double worst_z = 0.0;  ///< max of |m1 - m2| / sqrt(se1^2 + se2^2)
  bool pass = false;
};

/// Per-x mean passage profiles of two xi-windows compared within two
/// standard errors. Consecutive passage profiles share most of their
/// environment, so standard errors use batch means; `floor` absorbs the
/// interpolation error of the profiles themselves.
inline StationarityReport compare_passage_windows(const PassageEnsemble& a, const PassageEnsemble& b,
                                                  double x_lo = -10.0, double x_hi = 10.0,
                                                  std::size_t batch = 10, double floor = 1e-5) {
  if (a.rows.size() < 2 || b.rows.size() < 2)
    throw InvalidArgument("compare_passage_windows: each window needs at least two profiles");
  StationarityReport rep;
  rep.x_lo = x_lo;
  rep.x_hi = x_hi;
  rep.batch = batch;
  const ProfileGrid& pg = a.grid;
  std::vector<double> ca(a.rows.size()), cb(b.rows.size());
  rep.pass = true;
  for (std::size_t i = pg.index_of(x_lo); i <= pg.index_of(x_hi); ++i) {
    for (std::size_t r = 0; r < ca.size(); ++r) ca[r] = a.rows[r][i];
    for (std::size_t r = 0; r < cb.size(); ++r) cb[r] = b.rows[r][i];
    const double se = std::hypot(batch_means_standard_error(ca, batch), batch_means_standard_error(cb, batch));
    const double diff = std::abs(mean(ca) - mean(cb));
    const double excess = diff - (2.0 * se + floor);
    if (excess > rep.worst_excess) {
      rep.worst_excess = excess;
      rep.worst_x = pg.x(i);
    }
    if (se > 0.0) rep.worst_z = std::max(rep.worst_z, diff / se);
    if (excess > 0.0) rep.pass = false;
  }
  return rep;
}

struct TranslationReport {
  std::int64_t xi = 0;
  bool skipped = false;
  std::string notice;
  double discrepancy = std::numeric_limits<double>::quiet_NaN();  ///< sup over [-R, R]
};

/// Compares the forward run seen from its passage through xi with the wave
/// built independently in the medium shifted by xi. Integer xi keeps the
/// shifted medium exactly realizable.
inline TranslationReport translation_check(const WaveLimitRecord& rec, const ReactionField& field,
                                           const GridConfig& grid, std::int64_t xi,
                                           const NormalizeOptions& nopt = {}) {
  TranslationReport rep;
  rep.xi = xi;
  const std::vector<double>* seen = nullptr;
  if (xi == 0) {
    seen = &rec.W;
  } else {
    auto it = rec.passages.find(xi);
    if (it == rec.passages.end()) {
      rep.skipped = true;
      rep.notice = "no passage through xi=" + std::to_string(xi) + " within the forward horizon";
      return rep;
    }
    seen = &it->second.values;
  }
  NormalizeOptions o = nopt;
  o.profile = rec.grid;
  const auto other = normalize_shift(rec.n_list.back(), field.with_medium(shift_medium(field.medium, xi)),
                                     InitialKind::kStep, grid, o);
  rep.discrepancy = 0.0;
  for (std::size_t i = 0; i < seen->size(); ++i)
    rep.discrepancy = std::max(rep.discrepancy, std::abs((*seen)[i] - other.profile[i]));
  return rep;
}

}  // namespace rdfront
