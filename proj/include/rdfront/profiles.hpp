#pragma once

// Auxiliary solutions: the bump sub-solution, homogeneous traveling waves,
// the exponential super-solution, the empirical envelope ahead of / behind
// the front, and the time-dilated super-solution harness.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "rdfront/crossing.hpp"
#include "rdfront/error.hpp"
#include "rdfront/reaction.hpp"
#include "rdfront/snapshot.hpp"
#include "rdfront/solver.hpp"

namespace rdfront {

namespace detail {

// One RK4 step of the planar system (y, y') for y'' = rhs(y, y').
template <class F>
std::array<double, 2> rk4_second_order(const F& rhs, std::array<double, 2> s, double h) {
  auto d = [&](const std::array<double, 2>& v) { return std::array<double, 2>{v[1], rhs(v[0], v[1])}; };
  const auto k1 = d(s);
  const auto k2 = d({s[0] + 0.5 * h * k1[0], s[1] + 0.5 * h * k1[1]});
  const auto k3 = d({s[0] + 0.5 * h * k2[0], s[1] + 0.5 * h * k2[1]});
  const auto k4 = d({s[0] + h * k3[0], s[1] + h * k3[1]});
  return {s[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
          s[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])};
}

// Cubic Hermite interpolation on a uniform table of (value, derivative).
inline double hermite(const std::vector<std::array<double, 2>>& table, double x0, double h,
                      double x) {
  const double pos = (x - x0) / h;
  auto j = static_cast<std::size_t>(std::clamp(std::floor(pos), 0.0,
                                               static_cast<double>(table.size() - 2)));
  const double t = pos - static_cast<double>(j);
  const auto& a = table[j];
  const auto& b = table[j + 1];
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * a[0] + (t3 - 2 * t2 + t) * h * a[1] +
         (-2 * t3 + 3 * t2) * b[0] + (t3 - t2) * h * b[1];
}

}  // namespace detail

/// Even bump solving -z'' = f_min(z), z(0) = h0, z'(0) = 0, continued
/// linearly below theta0 and cut at zero.
struct BumpSubsolution {
  double h0 = 0.0;
  double theta0 = 0.0;
  double z1 = 0.0;
  double z2 = 0.0;
  double slope_z1 = 0.0;  ///< z'(z1) < 0
  double step = 1e-3;
  std::vector<std::array<double, 2>> table;  ///< (z, z') at x = 0, step, ..., last node <= z1

  /// The unclipped profile (negative beyond z2).
  double hat(double x) const {
    const double a = std::abs(x);
    if (a >= z1) return theta0 + slope_z1 * (a - z1);
    const double last = step * static_cast<double>(table.size() - 1);
    if (a > last) return hermite_span(table.back(), {theta0, slope_z1}, last, z1, a);
    return detail::hermite(table, 0.0, step, a);
  }

  double operator()(double x) const { return std::max(hat(x), 0.0); }

  double derivative(double x) const {
    const double a = std::abs(x);
    const double sgn = x < 0 ? -1.0 : 1.0;
    if (a >= z1) return a >= z2 ? 0.0 : sgn * slope_z1;
    const double eps = 1e-6;
    return (hat(x + eps) - hat(x - eps)) / (2.0 * eps);
  }

 private:
  static double hermite_span(const std::array<double, 2>& a, const std::array<double, 2>& b,
                             double xa, double xb, double x) {
    const double h = xb - xa;
    if (h <= 0.0) return b[0];
    const double t = (x - xa) / h, t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * a[0] + (t3 - 2 * t2 + t) * h * a[1] +
           (-2 * t3 + 3 * t2) * b[0] + (t3 - t2) * h * b[1];
  }
};

/// RK4 integration of the bump ODE at fixed step; z1 is located by shrinking
/// the final step until it lands on theta0.
inline BumpSubsolution build_bump(const ReactionField& field, double h0, double step = 1e-3) {
  const double theta0 = field.theta0();
  if (!(h0 > theta0 && h0 < 1.0)) {
    std::ostringstream os;
    os << "build_bump: h0=" << h0 << " must lie in (theta0, 1) = (" << theta0 << ", 1)";
    throw InvalidArgument(os.str());
  }
  if (!(step > 0.0)) throw InvalidArgument("build_bump: step must be positive");
  auto rhs = [&](double z, double) { return -field.f_min(z); };
  BumpSubsolution b;
  b.h0 = h0;
  b.theta0 = theta0;
  b.step = step;
  std::array<double, 2> s{h0, 0.0};
  b.table.push_back(s);
  double x = 0.0;
  for (;;) {
    const auto next = detail::rk4_second_order(rhs, s, step);
    if (next[0] <= theta0) {
      // bisect on the step length
      double lo = 0.0, hi = step;
      std::array<double, 2> at = next;
      for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        at = detail::rk4_second_order(rhs, s, mid);
        (at[0] > theta0 ? lo : hi) = mid;
      }
      at = detail::rk4_second_order(rhs, s, hi);
      b.z1 = x + hi;
      b.slope_z1 = at[1];
      break;
    }
    s = next;
    x += step;
    b.table.push_back(s);
    if (b.table.size() > 100'000'000) throw InvalidArgument("build_bump: profile does not reach theta0");
  }
  if (!(b.slope_z1 < 0.0)) throw InvalidArgument("build_bump: degenerate slope at z1");
  b.z2 = b.z1 - theta0 / b.slope_z1;
  return b;
}

/// Traveling wave U'' + c U' + g f0(U) = 0 with U(0) = theta0.
struct HomogeneousWave {
  double c = 0.0;
  double level = 1.0;
  double theta0 = 0.0;
  double tol = 0.0;
  int iterations = 0;
  double step = 1e-3;
  /// (U, U') at x = 0, -step, -2 step, ...
  std::vector<std::array<double, 2>> table;

  double profile(double x) const {
    if (x >= 0.0) return theta0 * std::exp(-c * x);
    const double s = -x;
    const double last = step * static_cast<double>(table.size() - 1);
    if (s >= last) return table.back()[0];
    // table is in s = -x, derivatives flip sign
    const double pos = s / step;
    const auto j = static_cast<std::size_t>(pos);
    const double t = pos - static_cast<double>(j);
    const auto& a = table[j];
    const auto& b = table[j + 1];
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * a[0] - (t3 - 2 * t2 + t) * step * a[1] +
           (-2 * t3 + 3 * t2) * b[0] - (t3 - t2) * step * b[1];
  }

  double operator()(double x) const { return profile(x); }

  double left_extent() const { return -step * static_cast<double>(table.size() - 1); }

  /// Position where U crosses `level_value` (monotone profile).
  double position_of(double level_value) const {
    if (level_value <= theta0) return std::log(theta0 / level_value) / c;
    double lo = left_extent(), hi = 0.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (profile(mid) > level_value ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }
};

namespace detail {

enum class Shot { kTooSlow, kTooFast };

// Backward integration from the exponential tail; records the path if asked.
inline Shot shoot(const IgnitionNonlinearity& nl, double level, double c, double step,
                  std::vector<std::array<double, 2>>* path, double s_max = 400.0) {
  const double theta0 = nl.theta0();
  // s = -x: dU/ds = -U', d(U')/ds = c U' + g f0(U)
  auto rhs = [&](double u, double v) { return std::array<double, 2>{-v, c * v + level * nl.eval(u)}; };
  std::array<double, 2> s{theta0, -c * theta0};
  if (path) path->push_back(s);
  const auto nmax = static_cast<std::int64_t>(s_max / step);
  for (std::int64_t i = 0; i < nmax; ++i) {
    const auto k1 = rhs(s[0], s[1]);
    const auto k2 = rhs(s[0] + 0.5 * step * k1[0], s[1] + 0.5 * step * k1[1]);
    const auto k3 = rhs(s[0] + 0.5 * step * k2[0], s[1] + 0.5 * step * k2[1]);
    const auto k4 = rhs(s[0] + step * k3[0], s[1] + step * k3[1]);
    s[0] += step / 6.0 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]);
    s[1] += step / 6.0 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]);
    if (s[0] > 1.0) return Shot::kTooFast;
    if (s[1] >= 0.0) return Shot::kTooSlow;
    if (path) {
      path->push_back(s);
      if (1.0 - s[0] < 1e-12) return Shot::kTooSlow;
    }
  }
  return Shot::kTooSlow;
}

}  // namespace detail

/// Wave speed by bisection on c over [lo, hi] (default [1e-3, 1e3]).
inline HomogeneousWave tw_speed_shoot(const IgnitionNonlinearity& nl, double level,
                                      double tol = 1e-6, double lo = 1e-3, double hi = 1e3,
                                      double step = 1e-3) {
  if (!(level > 0.0)) throw InvalidArgument("tw_speed_shoot: reaction level must be positive");
  if (!(tol > 0.0) || !(lo < hi)) throw InvalidArgument("tw_speed_shoot: bad tolerance or bracket");
  if (detail::shoot(nl, level, lo, step, nullptr) != detail::Shot::kTooSlow ||
      detail::shoot(nl, level, hi, step, nullptr) != detail::Shot::kTooFast) {
    std::ostringstream os;
    os << "tw_speed_shoot: no sign change of the shooting classifier on [" << lo << ", " << hi << "]";
    throw BracketError(os.str());
  }
  HomogeneousWave w;
  w.level = level;
  w.theta0 = nl.theta0();
  w.step = step;
  while (hi - lo >= tol) {
    const double mid = 0.5 * (lo + hi);
    (detail::shoot(nl, level, mid, step, nullptr) == detail::Shot::kTooSlow ? lo : hi) = mid;
    ++w.iterations;
  }
  w.c = 0.5 * (lo + hi);
  w.tol = hi - lo;
  // Profile from the bracket's fast side: it rises monotonically to 1.
  std::vector<std::array<double, 2>> path;
  detail::shoot(nl, level, w.c, step, &path);
  // keep the monotone part below 1
  std::size_t keep = path.size();
  for (std::size_t i = 1; i < path.size(); ++i) {
    if (path[i][0] <= path[i - 1][0]) { keep = i; break; }
  }
  path.resize(keep);
  w.table = std::move(path);
  return w;
}

/// Exponential super-solution e^{-lambda (x - c t)}: c lambda >= lambda^2 + M g_max
/// is tightest at lambda = sqrt(M g_max), c = 2 lambda.
struct ExpSupersolution {
  double lambda = 0.0;
  double c = 0.0;
};

inline ExpSupersolution exp_supersolution_params(double slope_M, double g_max) {
  if (!(slope_M > 0.0) || !(g_max > 0.0))
    throw InvalidArgument("exp_supersolution_params: M and g_max must be positive");
  const double lambda = std::sqrt(slope_M * g_max);
  return {lambda, 2.0 * lambda};
}

inline ExpSupersolution exp_supersolution_params(const IgnitionNonlinearity& nl, double g_max) {
  return exp_supersolution_params(nl.slope_bound(), g_max);
}

// ---------------------------------------------------------------------------
// Empirical envelope

/// Pointwise extremes of u(t, X(t) + x) over observed times and runs:
/// minimum behind the front (x in [-R, 0]), maximum ahead (x in [0, ahead]).
class EnvelopeAccumulator {
 public:
  EnvelopeAccumulator(double behind = 30.0, double ahead = 10.0, double spacing = 0.05)
      : behind_(behind), ahead_(ahead), spacing_(spacing) {
    nb_ = static_cast<std::size_t>(std::llround(behind / spacing));
    na_ = static_cast<std::size_t>(std::llround(ahead / spacing));
    lower_.assign(nb_ + 1, std::numeric_limits<double>::infinity());
    upper_.assign(na_ + 1, -std::numeric_limits<double>::infinity());
  }

  double behind() const { return behind_; }
  double ahead() const { return ahead_; }
  double spacing() const { return spacing_; }
  std::size_t observations() const { return count_; }

  void add(const Snapshot& s, double X) {
    for (std::size_t i = 0; i <= nb_; ++i) {
      const double x = X - static_cast<double>(i) * spacing_;
      lower_[i] = std::min(lower_[i], x < s.left() ? 1.0 : s.at(x));
    }
    for (std::size_t i = 0; i <= na_; ++i)
      upper_[i] = std::max(upper_[i], s.at(X + static_cast<double>(i) * spacing_));
    ++count_;
  }

  void merge(const EnvelopeAccumulator& o) {
    if (o.nb_ != nb_ || o.na_ != na_ || o.spacing_ != spacing_)
      throw InvalidArgument("EnvelopeAccumulator::merge: incompatible sampling");
    for (std::size_t i = 0; i <= nb_; ++i) lower_[i] = std::min(lower_[i], o.lower_[i]);
    for (std::size_t i = 0; i <= na_; ++i) upper_[i] = std::max(upper_[i], o.upper_[i]);
    count_ += o.count_;
  }

  /// Minimum at x = -i * spacing.
  const std::vector<double>& lower() const { return lower_; }
  /// Maximum at x = i * spacing.
  const std::vector<double>& upper() const { return upper_; }

  /// Observer recording every snapshot at or after `burn_in`.
  Observer observer(double burn_in) {
    return [this, burn_in](const StepView& v) {
      if (v.snapshot.t >= burn_in && v.diagnostics.X) add(v.snapshot, *v.diagnostics.X);
    };
  }

 private:
  double behind_, ahead_, spacing_;
  std::size_t nb_ = 0, na_ = 0, count_ = 0;
  std::vector<double> lower_, upper_;
};

struct EnvelopeEstimate {
  double theta0 = 0.0;
  double p_hat = 0.0;
  double spacing = 0.05;
  /// v_hat at x = -i * spacing, non-increasing in x.
  std::vector<double> behind;
  std::vector<std::uint64_t> seeds;
  std::vector<int> n_values;
  std::size_t observations = 0;
  std::size_t floored = 0;  ///< behind-front samples raised to theta0

  double operator()(double x) const {
    if (x >= 0.0) return theta0 * std::exp(-p_hat * x);
    const double pos = -x / spacing;
    if (pos >= static_cast<double>(behind.size() - 1)) return behind.back();
    const auto j = static_cast<std::size_t>(pos);
    const double a = pos - static_cast<double>(j);
    return (1.0 - a) * behind[j] + a * behind[j + 1];
  }

  /// y with v_hat(y) = level for level in (theta0, 1); nullopt if not reached.
  std::optional<double> position_of(double level) const {
    for (std::size_t j = 1; j < behind.size(); ++j) {
      if (behind[j] >= level) {
        const double a = (level - behind[j - 1]) / (behind[j] - behind[j - 1]);
        return -(static_cast<double>(j - 1) + a) * spacing;
      }
    }
    return std::nullopt;
  }
};

/// v_hat behind the front is the running minimum of the ensemble minimum; ahead
/// of it v_hat = theta0 e^{-p_hat x}, with p_hat the largest rate keeping the
/// ensemble maximum below it on (0, ahead].
inline EnvelopeEstimate estimate_envelope(const std::vector<EnvelopeAccumulator>& ensemble,
                                          double theta0) {
  if (ensemble.empty()) throw InvalidArgument("estimate_envelope: empty ensemble");
  EnvelopeAccumulator all = ensemble.front();
  for (std::size_t i = 1; i < ensemble.size(); ++i) all.merge(ensemble[i]);
  if (all.observations() == 0) throw InvalidArgument("estimate_envelope: no observations");
  EnvelopeEstimate e;
  e.theta0 = theta0;
  e.spacing = all.spacing();
  e.observations = all.observations();
  // Largest non-increasing minorant of the ensemble minimum, floored at
  // theta0; points where the floor binds (a trailing flank within R after
  // burn-in) are counted, since the bracket fails there.
  e.behind = all.lower();
  for (std::size_t i = e.behind.size() - 1; i-- > 0;) e.behind[i] = std::min(e.behind[i], e.behind[i + 1]);
  // index 0 is the front itself, where the data equal theta0 to rounding
  e.behind[0] = theta0;
  for (std::size_t i = 1; i < e.behind.size(); ++i) {
    if (e.behind[i] < theta0) ++e.floored;
    e.behind[i] = std::max(e.behind[i], theta0);
  }
  double p = std::numeric_limits<double>::infinity();
  const auto& up = all.upper();
  for (std::size_t i = 1; i < up.size(); ++i) {
    const double x = static_cast<double>(i) * all.spacing();
    if (up[i] <= 0.0) continue;
    p = std::min(p, -std::log(up[i] / theta0) / x);
  }
  if (!std::isfinite(p)) throw InvalidArgument("estimate_envelope: no data ahead of the front");
  e.p_hat = p;
  return e;
}

// ---------------------------------------------------------------------------
// Super-solution harness

/// Parameters of u_bar(t, x) = u(gamma(t), x) + q with gamma(t) = gamma0 + rate t.
struct SupersolutionSpec {
  double q = 0.05;
  double s = 0.05;
  double K = 0.0;        ///< Lipschitz constant of u -> f(x, u)
  double eps = std::numeric_limits<double>::quiet_NaN();  ///< NaN: measure from the run
  std::optional<double> y_h;  ///< offset behind X where u >= 1 - q; measured if absent
  double gamma0 = 5.0;
  std::optional<double> rate_override;

  double h() const { return 1.0 - q; }
  double gamma_rate() const { return rate_override ? *rate_override : 1.0 + K * q / eps; }

  void validate(double theta0) const {
    if (!(q >= 0.0 && q < theta0 / 3.0)) throw InvalidArgument("supersolution: q must lie in [0, theta0/3)");
    if (!(s > 0.0 && s < theta0 / 3.0)) throw InvalidArgument("supersolution: s must lie in (0, theta0/3)");
    if (!(K > 0.0)) throw InvalidArgument("supersolution: K must be positive");
    if (!(gamma0 >= 0.0)) throw InvalidArgument("supersolution: gamma0 must be non-negative");
  }
};

struct SupersolutionReport {
  double q = 0.0;
  double eps = 0.0;
  double gamma_rate = 1.0;
  double y_h = 0.0;
  double beta = 0.0;  ///< half-width of the zone s <= u <= 1 - s around X
  double min_residual = std::numeric_limits<double>::infinity();
  double worst_t = 0.0;
  double worst_x = 0.0;
  double min_ahead_residual = std::numeric_limits<double>::infinity();  ///< on u + q < theta0
  std::size_t points = 0;
  bool pass = false;
};

/// The run checked by the harness: a monotone-in-time evolution.
struct MonotoneRun {
  ReactionField field;
  GridConfig grid;
  Snapshot init;
  double t_end = 50.0;
};

/// Discrete residual of u_bar along the run, written with the discrete time
/// derivative r = (u^{k+1} - u^k) / dt of the scheme:
///   R = (rate - 1) r + g(x) [f0(u) - f0(u + q)]
/// on {x > X + y_h, u + q < 1}. eps and y_h are measured in a first pass
/// when not given.
inline SupersolutionReport verify_supersolution(const MonotoneRun& run, SupersolutionSpec spec,
                                                double tol = 1e-6) {
  const ReactionField& field = run.field;
  const auto& nl = field.nonlinearity;
  spec.validate(field.theta0());
  SupersolutionReport rep;
  rep.q = spec.q;

  EvolveOptions base;
  base.t_end = run.t_end;
  base.observer_stride = 1;
  base.diagnostics.level_positions = false;

  const double h = spec.h();
  const bool need_eps = std::isnan(spec.eps) && !spec.rate_override;
  if (need_eps || !spec.y_h) {
    double eps = std::numeric_limits<double>::infinity();
    double yh = 0.0;
    double beta = 0.0;
    EvolveOptions o = base;
    o.observers.push_back([&](const StepView& v) {
      const auto& sn = v.snapshot;
      if (sn.t < spec.gamma0 || !v.diagnostics.X) return;
      const double X = *v.diagnostics.X;
      if (auto xr = rightmost_crossing(sn, h)) yh = std::min(yh, *xr - X);
      else if (sn.values.front() < h) yh = std::min(yh, sn.left() - X);
      // interface zone: the right flank, right of the rightmost maximum
      std::size_t top = 0;
      for (std::size_t j = 1; j < sn.size(); ++j)
        if (sn.values[j] >= sn.values[top]) top = j;
      for (std::size_t j = std::max<std::size_t>(top, 1); j + 1 < sn.size(); ++j) {
        const double u = sn.values[j];
        if (u >= spec.s && u <= 1.0 - spec.s && sn.x(j) > X + yh) {
          eps = std::min(eps, v.rate[j]);
          beta = std::max(beta, std::abs(sn.x(j) - X));
        }
      }
    });
    evolve(run.init, field, run.grid, o);
    if (need_eps) spec.eps = eps;
    if (!spec.y_h) spec.y_h = yh;
    rep.beta = beta;
  }
  if (!spec.rate_override && !(spec.eps > 0.0)) {
    std::ostringstream os;
    os << "verify_supersolution: measured Harnack floor eps=" << spec.eps << " is not positive";
    throw InvalidArgument(os.str());
  }
  rep.eps = spec.eps;
  rep.y_h = *spec.y_h;
  rep.gamma_rate = spec.gamma_rate();
  const double rate = rep.gamma_rate;
  const double theta0 = field.theta0();

  EvolveOptions o = base;
  o.observers.push_back([&](const StepView& v) {
    const auto& sn = v.snapshot;
    if (sn.t < spec.gamma0 || !v.diagnostics.X) return;
    const double X = *v.diagnostics.X;
    for (std::size_t j = 1; j + 1 < sn.size(); ++j) {
      const double u = sn.values[j];
      const double x = sn.x(j);
      if (u + spec.q >= 1.0 || x <= X + rep.y_h) continue;
      const double g = field.medium.g(x);
      const double r = (rate - 1.0) * v.rate[j] + g * (nl.eval(u) - nl.eval(u + spec.q));
      ++rep.points;
      if (r < rep.min_residual) {
        rep.min_residual = r;
        rep.worst_t = sn.t;
        rep.worst_x = x;
      }
      if (u + spec.q < theta0) rep.min_ahead_residual = std::min(rep.min_ahead_residual, r);
    }
  });
  evolve(run.init, field, run.grid, o);
  rep.pass = rep.points > 0 && rep.min_residual >= -tol;
  return rep;
}

}  // namespace rdfront
