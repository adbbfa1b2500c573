#pragma once

// Ignition nonlinearities f0, stationary random media g(x, omega) and the
// reaction field f(x, u) = g(x) f0(u).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rdfront/error.hpp"

namespace rdfront {

enum class NonlinearityFamily { kQuadratic, kSmoothBump };

inline std::string_view to_string(NonlinearityFamily f) {
  return f == NonlinearityFamily::kQuadratic ? "quadratic" : "smooth-bump";
}

inline NonlinearityFamily parse_nonlinearity_family(std::string_view s) {
  if (s == "quadratic") return NonlinearityFamily::kQuadratic;
  if (s == "smooth-bump") return NonlinearityFamily::kSmoothBump;
  throw InvalidArgument("unknown nonlinearity family '" + std::string(s) + "'");
}

/// An ignition-type nonlinearity: zero on (-inf, theta0] and [1, inf),
/// positive in between. The constants K (Lipschitz) and M (f0(u) <= M u) are
/// closed-form for each family.
///
///  - quadratic:   f0(u) = (u - theta0)(1 - u)
///  - smooth-bump: f0(u) = 4 (u - theta0)^2 (1 - u)^2 / (1 - theta0)^2
class IgnitionNonlinearity {
 public:
  IgnitionNonlinearity() : IgnitionNonlinearity(NonlinearityFamily::kQuadratic, 0.25) {}

  IgnitionNonlinearity(NonlinearityFamily family, double theta0)
      : family_(family), theta0_(theta0) {
    if (!(theta0 > 0.0 && theta0 < 1.0))
      throw InvalidArgument("theta0 must lie in (0,1), got " + std::to_string(theta0));
    const double span = 1.0 - theta0;
    if (family == NonlinearityFamily::kQuadratic) {
      scale_ = 1.0;
      lipschitz_ = span;
      const double r = 1.0 - std::sqrt(theta0);
      slope_ = r * r;
    } else {
      scale_ = 4.0 / (span * span);
      const double half = 0.5 * span;
      lipschitz_ = scale_ * 8.0 * half * half * half / (3.0 * std::sqrt(3.0));
      // d/du log[(u-theta)^2 (1-u)^2 / u] = 0  <=>  -3u^2 + (1+theta)u + theta = 0
      const double a = 1.0 + theta0;
      const double ustar = (a + std::sqrt(a * a + 12.0 * theta0)) / 6.0;
      const double p = (ustar - theta0) * (1.0 - ustar);
      slope_ = scale_ * p * p / ustar;
    }
  }

  NonlinearityFamily family() const { return family_; }
  std::string_view family_tag() const { return to_string(family_); }
  double theta0() const { return theta0_; }
  double lipschitz() const { return lipschitz_; }
  double slope_bound() const { return slope_; }

  double eval(double u) const {
    if (u <= theta0_ || u >= 1.0) return 0.0;
    const double p = (u - theta0_) * (1.0 - u);
    return family_ == NonlinearityFamily::kQuadratic ? p : scale_ * p * p;
  }

  double operator()(double u) const { return eval(u); }

  /// Flow of the reaction ODE u' = rate * f0(u) over a time tau. Exact
  /// (logistic) for the quadratic family, RK4 sub-stepping otherwise.
  /// Monotone in u and maps [0,1] into itself.
  double flow(double u, double rate, double tau) const {
    if (u <= theta0_ || u >= 1.0 || rate == 0.0 || tau == 0.0) return u;
    const double span = 1.0 - theta0_;
    if (family_ == NonlinearityFamily::kQuadratic) {
      const double w0 = (u - theta0_) / span;
      const double w = 1.0 / (1.0 + (1.0 - w0) / w0 * std::exp(-rate * span * tau));
      return theta0_ + span * w;
    }
    const int sub = std::max(1, static_cast<int>(std::ceil(rate * lipschitz_ * tau / 0.05)));
    const double h = tau / sub;
    double v = u;
    for (int i = 0; i < sub; ++i) {
      const double k1 = rate * eval(v);
      const double k2 = rate * eval(v + 0.5 * h * k1);
      const double k3 = rate * eval(v + 0.5 * h * k2);
      const double k4 = rate * eval(v + h * k3);
      v += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return std::min(std::max(v, u), 1.0);
  }

 private:
  NonlinearityFamily family_;
  double theta0_;
  double scale_ = 1.0;
  double lipschitz_ = 0.0;
  double slope_ = 0.0;
};

enum class MediumFamily { kIidUniform, kHomogeneous, kRandomConstant };

inline std::string_view to_string(MediumFamily f) {
  switch (f) {
    case MediumFamily::kIidUniform: return "iid-uniform";
    case MediumFamily::kHomogeneous: return "homogeneous";
    case MediumFamily::kRandomConstant: return "random-constant";
  }
  return "?";
}

inline MediumFamily parse_medium_family(std::string_view s) {
  if (s == "iid-uniform") return MediumFamily::kIidUniform;
  if (s == "homogeneous") return MediumFamily::kHomogeneous;
  if (s == "random-constant") return MediumFamily::kRandomConstant;
  throw InvalidArgument("unknown medium family '" + std::string(s) + "'");
}

namespace detail {

// SplitMix64 finalizer; a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr double to_unit(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

}  // namespace detail

/// One sample path of the reaction level g(x, omega) on the whole line.
///
/// Cell j (covering [j, j+1)) carries a level that is a pure hash of
/// (seed, j); g is blended between neighbouring cells with a C^1 smoothstep
/// over a band of width `blend` centred on every integer. The realization
/// stores a coordinate map (integer offset, optional reflection) so that
/// shifted and mirrored media are cheap views of the same hash stream.
class MediumRealization {
 public:
  static constexpr double kDefaultBlend = 0.2;

  MediumRealization() = default;

  static MediumRealization sample(std::uint64_t seed, MediumFamily family, double g_min,
                                  double g_max, double blend = kDefaultBlend) {
    if (!(g_min > 0.0) || !(g_min <= g_max))
      throw InvalidArgument("medium bounds must satisfy 0 < g_min <= g_max (got g_min=" +
                            std::to_string(g_min) + ", g_max=" + std::to_string(g_max) + ")");
    if (!(blend > 0.0 && blend <= 1.0))
      throw InvalidArgument("medium blend fraction must lie in (0,1]");
    if (family == MediumFamily::kHomogeneous && g_min != g_max)
      throw InvalidArgument("homogeneous medium needs g_min == g_max");
    MediumRealization m;
    m.seed_ = seed;
    m.family_ = family;
    m.g_min_ = g_min;
    m.g_max_ = g_max;
    m.blend_ = blend;
    m.key_ = detail::mix64(seed);
    return m;
  }

  static MediumRealization homogeneous(double level) {
    return sample(0, MediumFamily::kHomogeneous, level, level);
  }

  std::uint64_t seed() const { return seed_; }
  MediumFamily family() const { return family_; }
  std::string_view family_tag() const { return to_string(family_); }
  double g_min() const { return g_min_; }
  double g_max() const { return g_max_; }
  double blend() const { return blend_; }
  std::int64_t offset() const { return offset_; }
  bool is_mirrored() const { return mirrored_; }
  bool is_homogeneous() const { return g_min_ == g_max_; }

  /// Bound on |g'| implied by the smoothstep blend (1.5 * jump / band).
  double lipschitz_bound() const { return 1.5 * (g_max_ - g_min_) / blend_; }

  /// Level of cell j in this realization's coordinates.
  double cell_value(std::int64_t j) const {
    if (g_min_ == g_max_) return g_min_;
    if (family_ == MediumFamily::kRandomConstant)
      return (key_ & 1ULL) ? g_max_ : g_min_;
    const std::int64_t base = mirrored_ ? -j - 1 + offset_ : j + offset_;
    const std::uint64_t bits = detail::mix64(key_ ^ detail::mix64(static_cast<std::uint64_t>(base)));
    return g_min_ + (g_max_ - g_min_) * detail::to_unit(bits);
  }

  double g(double x) const {
    if (g_min_ == g_max_ || family_ == MediumFamily::kRandomConstant) return cell_value(0);
    const double kf = std::floor(x);
    const double s = x - kf;  // exact
    const auto k = static_cast<std::int64_t>(kf);
    const double half = 0.5 * blend_;
    if (s < half) {
      const double a = cell_value(k - 1), b = cell_value(k);
      return a + (b - a) * smoothstep((s + half) / blend_);
    }
    if (s > 1.0 - half) {
      const double a = cell_value(k), b = cell_value(k + 1);
      return a + (b - a) * smoothstep((s - (1.0 - half)) / blend_);
    }
    return cell_value(k);
  }

  double operator()(double x) const { return g(x); }

  /// The medium seen from x + h: shifted(h).g(x) == g(x + h).
  MediumRealization shifted(std::int64_t h) const {
    MediumRealization m = *this;
    m.offset_ += mirrored_ ? -h : h;
    return m;
  }

  /// The reflected medium x -> -x (another sample of a reflection-symmetric law).
  MediumRealization mirrored() const {
    MediumRealization m = *this;
    m.mirrored_ = !mirrored_;
    return m;
  }

  /// (cell index, value) pairs for j in [j0, j1).
  std::vector<std::pair<std::int64_t, double>> cells(std::int64_t j0, std::int64_t j1) const {
    std::vector<std::pair<std::int64_t, double>> out;
    for (std::int64_t j = j0; j < j1; ++j) out.emplace_back(j, cell_value(j));
    return out;
  }

 private:
  static double smoothstep(double t) { return t * t * (3.0 - 2.0 * t); }

  std::uint64_t seed_ = 0;
  MediumFamily family_ = MediumFamily::kHomogeneous;
  double g_min_ = 1.0;
  double g_max_ = 1.0;
  double blend_ = kDefaultBlend;
  std::uint64_t key_ = 0;
  std::int64_t offset_ = 0;
  bool mirrored_ = false;
};

inline MediumRealization sample_medium(std::uint64_t seed, MediumFamily family, double g_min,
                                       double g_max) {
  return MediumRealization::sample(seed, family, g_min, g_max);
}

inline MediumRealization shift_medium(const MediumRealization& m, std::int64_t h) {
  return m.shifted(h);
}

inline double eval_f0(const IgnitionNonlinearity& nl, double u) { return nl.eval(u); }

/// f(x, u) = g(x) f0(u) together with its homogeneous minorant and majorant.
struct ReactionField {
  IgnitionNonlinearity nonlinearity;
  MediumRealization medium;

  double theta0() const { return nonlinearity.theta0(); }
  double operator()(double x, double u) const { return medium.g(x) * nonlinearity.eval(u); }
  double f_min(double u) const { return medium.g_min() * nonlinearity.eval(u); }
  double f_max(double u) const { return medium.g_max() * nonlinearity.eval(u); }
  /// Lipschitz constant of u -> f(x, u), uniform in x.
  double lipschitz() const { return nonlinearity.lipschitz() * medium.g_max(); }

  ReactionField with_medium(MediumRealization m) const { return {nonlinearity, std::move(m)}; }
};

inline ReactionField homogeneous_field(const IgnitionNonlinearity& nl, double level) {
  return {nl, MediumRealization::homogeneous(level)};
}

}  // namespace rdfront
