#pragma once

// Finite-difference integrator for u_t = u_xx + g(x) f0(u) on a moving,
// on-demand-extending window.
//
// Two IMEX schemes are available:
//  - imex-euler:     backward-Euler diffusion, forward-Euler reaction. Under
//                    dt * K * g_max < 1 the update is order preserving, so the
//                    discrete comparison principle and [0,1] invariance hold
//                    exactly (up to rounding). First order in time.
//  - imex-cn-strang: Strang splitting of the exact reaction flow around a
//                    Crank-Nicolson diffusion step. Second order, not
//                    order preserving for large dt/dx^2.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "rdfront/crossing.hpp"
#include "rdfront/error.hpp"
#include "rdfront/reaction.hpp"
#include "rdfront/snapshot.hpp"

namespace rdfront {

enum class Scheme { kImexEuler, kImexCnStrang };

inline std::string_view to_string(Scheme s) {
  return s == Scheme::kImexEuler ? "imex-euler" : "imex-cn-strang";
}

inline Scheme parse_scheme(std::string_view s) {
  if (s == "imex-euler") return Scheme::kImexEuler;
  if (s == "imex-cn-strang") return Scheme::kImexCnStrang;
  throw InvalidArgument("unknown scheme '" + std::string(s) + "'");
}

/// Margins kept around the tracked interface(s). Lengths are in x units.
struct WindowPolicy {
  double ahead = 55.0;        ///< kept ahead of the outermost interface
  double behind = 40.0;       ///< kept behind the right interface before dropping
  double chunk = 10.0;        ///< extension / drop granularity
  double max_length = 4000.0; ///< hard cap on the window length
};

struct GridConfig {
  double dx = 0.05;
  double dt = 0.01;
  Scheme scheme = Scheme::kImexEuler;
  WindowPolicy window;
  /// Assumed exponential decay rate of u ahead of the front; sets the
  /// minimum admissible `ahead` margin.
  double decay_estimate = 0.5;

  /// Smallest ahead margin for which theta0 e^{-p x} drops below 1e-12.
  double min_ahead(double theta0) const { return std::log(theta0 / 1e-12) / decay_estimate; }

  void validate(const ReactionField& field) const {
    if (!(dx > 0.0) || !(dt > 0.0)) throw InvalidArgument("grid: dx and dt must be positive");
    const double margin = dt * field.nonlinearity.lipschitz() * field.medium.g_max();
    if (!(margin < 1.0)) {
      std::ostringstream os;
      os << "grid: dt*K*g_max = " << margin << " violates the explicit-reaction bound (< 1)";
      throw InvalidArgument(os.str());
    }
    if (!(decay_estimate > 0.0)) throw InvalidArgument("grid: decay_estimate must be positive");
    if (window.ahead < min_ahead(field.theta0())) {
      std::ostringstream os;
      os << "grid: ahead margin " << window.ahead << " is below (1/p)ln(theta0/1e-12) = "
         << min_ahead(field.theta0());
      throw InvalidArgument(os.str());
    }
    if (!(window.behind > 0.0) || !(window.chunk > 0.0) || !(window.max_length > window.ahead))
      throw InvalidArgument("grid: window margins must be positive and below the hard cap");
  }

  std::string describe() const {
    std::ostringstream os;
    os << "dx=" << dx << " dt=" << dt << " scheme=" << to_string(scheme)
       << " ahead=" << window.ahead << " behind=" << window.behind;
    return os.str();
  }
};

/// Values that leave [-kRangeTol, 1 + kRangeTol] abort the run; smaller
/// excursions are clamped.
inline constexpr double kRangeTol = 1e-9;
/// Cells behind the front at or above 1 - kFreezeTol may be frozen to 1.
inline constexpr double kFreezeTol = 1e-12;

/// Advances snapshots with one scheme/field pair. Caches g on the window
/// and the Thomas elimination factors, so a Stepper should be reused across
/// the steps of a run.
class Stepper {
 public:
  Stepper(ReactionField field, GridConfig grid) : field_(std::move(field)), grid_(grid) {}

  const ReactionField& field() const { return field_; }
  const GridConfig& grid() const { return grid_; }

  /// One step of size dt in place; `rate` receives (u_new - u_old) / dt.
  void advance(Snapshot& s, double dt, std::vector<double>& rate) {
    const std::size_t n = s.size();
    if (n < 3) throw InvalidArgument("step: window needs at least three nodes");
    bind(s);
    old_.assign(s.values.begin(), s.values.end());
    rhs_.resize(n);
    if (grid_.scheme == Scheme::kImexEuler) {
      for (std::size_t j = 1; j + 1 < n; ++j)
        rhs_[j] = s.values[j] + dt * g_[j] * field_.nonlinearity.eval(s.values[j]);
      solve(s, dt / (s.dx * s.dx));
    } else {
      const double half = 0.5 * dt;
      for (std::size_t j = 1; j + 1 < n; ++j)
        s.values[j] = field_.nonlinearity.flow(s.values[j], g_[j], half);
      const double r = dt / (s.dx * s.dx);
      for (std::size_t j = 1; j + 1 < n; ++j)
        rhs_[j] = s.values[j] + 0.5 * r * (s.values[j - 1] - 2.0 * s.values[j] + s.values[j + 1]);
      solve(s, 0.5 * r);
      for (std::size_t j = 1; j + 1 < n; ++j)
        s.values[j] = field_.nonlinearity.flow(s.values[j], g_[j], half);
    }
    for (std::size_t j = 1; j + 1 < n; ++j) {
      double& v = s.values[j];
      if (v < -kRangeTol || v > 1.0 + kRangeTol) {
        std::ostringstream os;
        os << "stability violation: u=" << v << " at x=" << s.x(j) << ", t=" << s.t + dt
           << ", dx=" << s.dx << ", dt=" << dt;
        throw StabilityError(os.str());
      }
      v = std::clamp(v, 0.0, 1.0);
    }
    rate.resize(n);
    for (std::size_t j = 0; j < n; ++j) rate[j] = (s.values[j] - old_[j]) / dt;
    s.t += dt;
  }

 private:
  // Refresh the cached medium values when the window moved.
  void bind(const Snapshot& s) {
    if (s.origin == g_origin_ && s.first == g_first_ && s.size() == g_.size() && s.dx == g_dx_)
      return;
    g_.resize(s.size());
    for (std::size_t j = 0; j < s.size(); ++j) g_[j] = field_.medium.g(s.x(j));
    g_origin_ = s.origin;
    g_first_ = s.first;
    g_dx_ = s.dx;
  }

  // Solve (1 + 2r) u_j - r (u_{j-1} + u_{j+1}) = rhs_j on interior nodes,
  // end nodes held fixed. Elimination factors depend only on r and j.
  void solve(Snapshot& s, double r) {
    const std::size_t n = s.size();
    const std::size_t m = n - 2;  // interior count
    if (r != factor_r_) {
      factor_r_ = r;
      cprime_.clear();
      inv_.clear();
    }
    while (cprime_.size() < m) {
      const std::size_t i = cprime_.size();
      const double denom = (1.0 + 2.0 * r) - (i == 0 ? 0.0 : -r * cprime_[i - 1]);
      inv_.push_back(1.0 / denom);
      cprime_.push_back(-r / denom);
    }
    rhs_[1] += r * s.values[0];
    rhs_[n - 2] += r * s.values[n - 1];
    // forward sweep in rhs_ (interior i = j - 1)
    double prev = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      prev = (rhs_[i + 1] + r * prev) * inv_[i];
      rhs_[i + 1] = prev;
    }
    double next = rhs_[m];
    s.values[m] = next;
    for (std::size_t i = m - 1; i-- > 0;) {
      next = rhs_[i + 1] - cprime_[i] * next;
      s.values[i + 1] = next;
    }
  }

  ReactionField field_;
  GridConfig grid_;
  std::vector<double> g_, old_, rhs_, cprime_, inv_;
  double g_origin_ = std::numeric_limits<double>::quiet_NaN();
  std::int64_t g_first_ = 0;
  double g_dx_ = 0.0;
  double factor_r_ = -1.0;
};

/// One step of the configured scheme; returns the snapshot at t + dt.
inline Snapshot step(const Snapshot& s, const ReactionField& field, const GridConfig& grid) {
  grid.validate(field);
  Snapshot out = s;
  Stepper stepper(field, grid);
  std::vector<double> rate;
  stepper.advance(out, grid.dt, rate);
  return out;
}

/// Diagnostics the evolution loop computes at every observer call.
struct DiagnosticsSpec {
  double origin = 0.0;  ///< x0 of the level-block definition
  double h = 0.9;
  std::optional<double> k;  ///< defaults to theta0
  bool level_positions = true;
};

struct StepView {
  const Snapshot& snapshot;
  std::span<const double> rate;  ///< (u(t) - u(t - dt)) / dt, zero at t0
  const FrontDiagnostics& diagnostics;
};

using Observer = std::function<void(const StepView&)>;

struct EvolveOptions {
  double t_end = 0.0;
  int observer_stride = 50;
  /// Store snapshots every this many steps (0: none).
  int snapshot_stride = 0;
  /// Additional times at which to store snapshots (matched to the nearest step).
  std::vector<double> snapshot_times;
  DiagnosticsSpec diagnostics;
  std::vector<Observer> observers;
  /// Stop early once this returns true on a fresh record.
  std::function<bool(const FrontDiagnostics&)> stop;
  /// Track both interfaces and never drop cells.
  bool two_sided = false;
  /// Steps between window maintenance passes.
  int window_stride = 10;
  std::uint64_t seed = 0;
  std::string initial_descriptor;
};

namespace detail {

inline FrontDiagnostics diagnose(const Snapshot& s, std::span<const double> rate, double theta0,
                                 const DiagnosticsSpec& spec) {
  FrontDiagnostics d;
  d.t = s.t;
  d.window_left = s.left();
  d.window_right = s.right();
  if (auto cell = rightmost_crossing_cell(s, theta0)) {
    const std::size_t i = *cell;
    const double a = s.values[i], b = s.values[i + 1];
    const double frac = (a - theta0) / (a - b);
    d.X = s.x(i) + frac * s.dx;
    d.slope_at_X = (b - a) / s.dx;
    if (!rate.empty()) d.ut_at_X = (1.0 - frac) * rate[i] + frac * rate[i + 1];
  }
  d.X_left = leftmost_crossing(s, theta0);
  if (spec.level_positions) {
    auto [xh, xk] = level_positions(s, spec.origin, spec.h, spec.k.value_or(theta0));
    d.X_h_l = xh;
    d.X_k_r = xk;
  }
  return d;
}

// Keeps the window large enough around the interfaces and drops frozen cells
// far behind the right interface.
inline void maintain_window(Snapshot& s, std::vector<double>& rate, double theta0,
                            const WindowPolicy& policy, bool two_sided) {
  const auto xr = rightmost_crossing(s, theta0);
  std::size_t argmax = 0;
  if (!xr) {
    for (std::size_t j = 1; j < s.size(); ++j)
      if (s.values[j] >= s.values[argmax]) argmax = j;
  }
  const double anchor_right = xr ? *xr : s.x(argmax);
  const auto chunk_nodes = static_cast<std::int64_t>(std::ceil(policy.chunk / s.dx));

  if (s.right() < anchor_right + policy.ahead) {
    const auto need = static_cast<std::int64_t>(
        std::ceil((anchor_right + policy.ahead - s.right()) / s.dx)) + chunk_nodes;
    const double fill = s.values.back();
    s.values.insert(s.values.end(), static_cast<std::size_t>(need), fill);
    rate.insert(rate.end(), static_cast<std::size_t>(need), 0.0);
  }

  const bool pinned = s.values.front() >= 1.0;
  if (two_sided || !pinned) {
    const auto xl = leftmost_crossing(s, theta0);
    double anchor_left = xl ? *xl : (xr ? *xr : s.x(argmax));
    if (!xl && !xr) {
      std::size_t first_max = 0;
      for (std::size_t j = 1; j < s.size(); ++j)
        if (s.values[j] > s.values[first_max]) first_max = j;
      anchor_left = s.x(first_max);
    }
    if (s.left() > anchor_left - policy.ahead && s.values.front() < 1.0) {
      const auto need = static_cast<std::int64_t>(
          std::ceil((s.left() - (anchor_left - policy.ahead)) / s.dx)) + chunk_nodes;
      const double fill = s.values.front();
      s.values.insert(s.values.begin(), static_cast<std::size_t>(need), fill);
      rate.insert(rate.begin(), static_cast<std::size_t>(need), 0.0);
      s.first -= need;
    }
  }

  if (!two_sided && xr) {
    const double target = *xr - policy.behind;
    if (target > s.left()) {
      std::size_t i = s.index_below(target);
      while (i > 0 && s.values[i] < 1.0 - kFreezeTol) --i;
      if (s.values[i] >= 1.0 - kFreezeTol && static_cast<std::int64_t>(i) >= chunk_nodes) {
        s.values.erase(s.values.begin(), s.values.begin() + static_cast<std::ptrdiff_t>(i));
        rate.erase(rate.begin(), rate.begin() + static_cast<std::ptrdiff_t>(i));
        s.first += static_cast<std::int64_t>(i);
        s.values.front() = 1.0;
      }
    }
  }

  if (s.right() - s.left() > policy.max_length) {
    std::ostringstream os;
    os << "window length " << s.right() - s.left() << " exceeds the hard cap "
       << policy.max_length << " at t=" << s.t;
    throw WindowOverflow(os.str());
  }
}

}  // namespace detail

/// Repeated stepping from `init` to `opts.t_end` (or until `opts.stop`).
/// Observers and the diagnostics stream run every `observer_stride` steps,
/// at t0, and at the final time.
inline Trajectory evolve(Snapshot init, const ReactionField& field, const GridConfig& grid,
                         const EvolveOptions& opts) {
  grid.validate(field);
  if (!(opts.t_end > init.t)) throw InvalidArgument("evolve: t_end must exceed the initial time");
  if (opts.observer_stride <= 0) throw InvalidArgument("evolve: observer_stride must be positive");
  if (std::abs(init.dx - grid.dx) > 1e-15 * grid.dx)
    throw InvalidArgument("evolve: snapshot spacing differs from the grid dx");

  const double theta0 = field.theta0();
  Trajectory traj;
  traj.provenance = {std::string(field.nonlinearity.family_tag()) + " theta0=" +
                         std::to_string(theta0) + " medium=" +
                         std::string(field.medium.family_tag()) + " seed=" +
                         std::to_string(field.medium.seed()),
                     grid.describe(), opts.initial_descriptor, opts.seed};

  if (opts.diagnostics.level_positions) {
    traj.level_h = opts.diagnostics.h;
    traj.level_k = opts.diagnostics.k.value_or(theta0);
  }

  Stepper stepper(field, grid);
  Snapshot s = std::move(init);
  std::vector<double> rate(s.size(), 0.0);
  const double t0 = s.t;
  const double span = opts.t_end - t0;
  auto nsteps = static_cast<std::int64_t>(std::ceil(span / grid.dt - 1e-9));
  if (nsteps < 1) nsteps = 1;

  std::vector<bool> taken(opts.snapshot_times.size(), false);
  auto maybe_snapshot = [&](std::int64_t k) {
    if (opts.snapshot_stride > 0 && k % opts.snapshot_stride == 0) traj.snapshots.push_back(s);
    for (std::size_t i = 0; i < opts.snapshot_times.size(); ++i) {
      if (!taken[i] && std::abs(s.t - opts.snapshot_times[i]) <= 0.5 * grid.dt) {
        traj.snapshots.push_back(s);
        taken[i] = true;
      }
    }
  };
  auto observe = [&]() -> bool {
    traj.records.push_back(detail::diagnose(s, rate, theta0, opts.diagnostics));
    const FrontDiagnostics& d = traj.records.back();
    for (const auto& obs : opts.observers) obs(StepView{s, rate, d});
    return opts.stop && opts.stop(d);
  };

  detail::maintain_window(s, rate, theta0, grid.window, opts.two_sided);
  maybe_snapshot(0);
  bool stopped = observe();
  for (std::int64_t k = 1; k <= nsteps && !stopped; ++k) {
    const double target = (k == nsteps) ? opts.t_end : t0 + static_cast<double>(k) * grid.dt;
    stepper.advance(s, target - s.t, rate);
    s.t = target;
    if (k % opts.window_stride == 0)
      detail::maintain_window(s, rate, theta0, grid.window, opts.two_sided);
    maybe_snapshot(k);
    if (k % opts.observer_stride == 0 || k == nsteps) stopped = observe();
  }
  traj.final_state = std::move(s);
  return traj;
}

// ---------------------------------------------------------------------------
// Initial data

inline double default_bump_peak(double theta0) { return 0.5 * (1.0 + theta0); }

/// Grid-consistent bump: the symmetric solution of the three-point recurrence
///   -(z_{j+1} - 2 z_j + z_{j-1}) / dx^2 = f_min(z_j),  z_0 = h0,
/// truncated at its first non-positive value. This is the discrete
/// counterpart of the bump sub-solution; it is an exact sub-solution of the
/// imex-euler update, so bump runs are monotone in time to rounding.
struct DiscreteBump {
  double h0 = 0.0;
  double dx = 0.0;
  std::vector<double> half;  ///< z_0, z_1, ... (last entry 0)
  double z1 = 0.0;           ///< interpolated theta0 crossing of the right flank
  double z2 = 0.0;           ///< first node offset where the profile is 0
};

inline DiscreteBump discrete_bump(double h0, const ReactionField& field, double dx) {
  const double theta0 = field.theta0();
  if (!(h0 > theta0 && h0 < 1.0))
    throw InvalidArgument("bump peak h0 must lie in (theta0, 1)");
  DiscreteBump b;
  b.h0 = h0;
  b.dx = dx;
  const double d2 = dx * dx;
  b.half.push_back(h0);
  double prev = h0;
  double cur = h0 - 0.5 * d2 * field.f_min(h0);
  while (cur > 0.0) {
    b.half.push_back(cur);
    const double next = 2.0 * cur - prev - d2 * field.f_min(cur);
    prev = cur;
    cur = next;
    if (b.half.size() > 10'000'000) throw InvalidArgument("discrete_bump: profile does not close");
  }
  b.half.push_back(0.0);
  for (std::size_t j = 0; j + 1 < b.half.size(); ++j) {
    if (b.half[j] >= theta0 && b.half[j + 1] < theta0) {
      b.z1 = (static_cast<double>(j) + (b.half[j] - theta0) / (b.half[j] - b.half[j + 1])) * dx;
      break;
    }
  }
  b.z2 = static_cast<double>(b.half.size() - 1) * dx;
  return b;
}

/// Bump initial data peaked at x_shift; the grid is aligned so that x_shift
/// is a node.
inline Snapshot make_bump(double h0, double x_shift, const ReactionField& field,
                          const GridConfig& grid) {
  const DiscreteBump b = discrete_bump(h0, field, grid.dx);
  const auto half = static_cast<std::int64_t>(b.half.size() - 1);
  const auto pad = static_cast<std::int64_t>(std::ceil(grid.window.ahead / grid.dx));
  Snapshot s;
  s.dx = grid.dx;
  s.origin = x_shift;
  s.first = -(half + pad);
  s.values.assign(static_cast<std::size_t>(2 * (half + pad) + 1), 0.0);
  for (std::int64_t j = -half; j <= half; ++j)
    s.values[static_cast<std::size_t>(j - s.first)] = b.half[static_cast<std::size_t>(std::abs(j))];
  return s;
}

/// Bump whose right theta0 crossing sits exactly at `interface`.
inline Snapshot make_bump_at_interface(double h0, double interface, const ReactionField& field,
                                       const GridConfig& grid) {
  const DiscreteBump b = discrete_bump(h0, field, grid.dx);
  return make_bump(h0, interface - b.z1, field, grid);
}

/// Step data: 1 for x < x_shift, 0 for x >= x_shift, grid aligned with x_shift.
inline Snapshot make_step(double x_shift, const GridConfig& grid) {
  const auto behind = static_cast<std::int64_t>(std::ceil(grid.window.behind / grid.dx));
  const auto ahead = static_cast<std::int64_t>(std::ceil(grid.window.ahead / grid.dx));
  Snapshot s;
  s.dx = grid.dx;
  s.origin = x_shift;
  s.first = -behind;
  s.values.assign(static_cast<std::size_t>(behind + ahead + 1), 0.0);
  for (std::int64_t j = -behind; j < 0; ++j) s.values[static_cast<std::size_t>(j + behind)] = 1.0;
  return s;
}

/// Constant data on [left, right] with Dirichlet ends equal to the constant.
inline Snapshot make_constant(double value, double left, double right, double dx) {
  Snapshot s;
  s.dx = dx;
  s.origin = left;
  s.first = 0;
  const auto n = static_cast<std::size_t>(std::llround((right - left) / dx)) + 1;
  s.values.assign(n, value);
  return s;
}

/// Samples an arbitrary profile on the nodes origin + j*dx, j in [j0, j1].
template <class F>
Snapshot make_sampled(F&& profile, double origin, std::int64_t j0, std::int64_t j1, double dx) {
  Snapshot s;
  s.dx = dx;
  s.origin = origin;
  s.first = j0;
  s.values.resize(static_cast<std::size_t>(j1 - j0 + 1));
  for (std::size_t j = 0; j < s.values.size(); ++j) s.values[j] = profile(s.x(j));
  return s;
}

}  // namespace rdfront
