#include <gtest/gtest.h>

#include <cmath>

#include "rdfront/crossing.hpp"
#include "rdfront/fronts.hpp"
#include "rdfront/profiles.hpp"

using namespace rdfront;

namespace {

const IgnitionNonlinearity kF{};
const ReactionField kHom = homogeneous_field(kF, 1.0);

Trajectory bump_trajectory(const ReactionField& field, double T, int stride = 50) {
  const GridConfig grid;
  Snapshot init = make_bump(default_bump_peak(0.25), 0.0, field, grid);
  EvolveOptions o;
  o.t_end = T;
  o.observer_stride = stride;
  o.diagnostics.origin = 0.0;
  o.diagnostics.h = 0.9;
  return evolve(std::move(init), field, grid, o);
}

}  // namespace

TEST(TrackInterface, LinearProfileIsExact) {
  const Snapshot s = make_sampled(
      [](double x) {
        if (x < 0.5) return 0.25 + 0.25;
        if (x > 5.5) return 0.25 - 0.25;
        return 0.25 - (x - 3.0) * 0.1;
      },
      0.0, -40, 200, 0.05);
  EXPECT_NEAR(track_interface(s, 0.25), 3.0, 1e-12);
}

TEST(TrackInterface, StepDataSitsWithinOneCell) {
  // the sampled step drops between nodes y - dx and y, so the linear crossing
  // is y - theta0 dx
  const GridConfig grid;
  for (double y : {0.0, 2.5, -7.0}) {
    const double X = track_interface(make_step(y, grid), 0.25);
    EXPECT_NEAR(X, y - 0.25 * grid.dx, 1e-12);
    EXPECT_NEAR(X, y, grid.dx);
  }
}

TEST(TrackInterface, TypedErrors) {
  try {
    (void)track_interface(make_constant(0.1, 0.0, 10.0, 0.05), 0.25);
    FAIL();
  } catch (const NoCrossing& e) {
    EXPECT_EQ(e.kind(), NoCrossing::Kind::kQuenched);
  }
  try {
    (void)track_interface(make_constant(0.9, 0.0, 10.0, 0.05), 0.25);
    FAIL();
  } catch (const NoCrossing& e) {
    EXPECT_EQ(e.kind(), NoCrossing::Kind::kSaturated);
  }
}

TEST(LevelPositions, SingleCrossingProfile) {
  // decreasing line from 1 at x=0 to 0 at x=10
  const Snapshot s = make_sampled([](double x) { return std::clamp(1.0 - 0.1 * x, 0.0, 1.0); }, 0.0, -20, 400, 0.05);
  const auto [xh, xk] = level_positions(s, 0.5, 0.9, 0.2);
  ASSERT_TRUE(xh && xk);
  EXPECT_NEAR(*xh, 1.0, 1e-12);
  EXPECT_NEAR(*xk, 8.0, 1e-12);
}

TEST(LevelPositions, NestedLevelSets) {
  const Snapshot s = make_sampled([](double x) { return x <= 4.0 ? 1.0 : std::max(0.0, 1.0 - 0.5 * (x - 4.0)); },
                                  0.0, 0, 400, 0.05);
  double prev = -1.0;
  for (double h : {0.3, 0.5, 0.8, 0.95, 0.999}) {
    const auto [xh, xk] = level_positions(s, 1.0, h, 0.25);
    ASSERT_TRUE(xh);
    EXPECT_NEAR(*xh, 4.0 + 2.0 * (1.0 - h), 1e-12);
    EXPECT_LT(*xh, prev < 0 ? 1e9 : prev);
    prev = *xh;
  }
}

TEST(LevelPositions, AbsentWhenOriginBelowH) {
  const Snapshot s = make_sampled([](double x) { return 0.6 * std::exp(-x * x); }, 0.0, -100, 100, 0.05);
  const auto [xh, xk] = level_positions(s, 0.0, 0.9, 0.25);
  EXPECT_FALSE(xh.has_value());
  EXPECT_TRUE(xk.has_value());
}

TEST(LevelPositions, HomogeneousWidthMatchesTheWaveGeometry) {
  const auto traj = bump_trajectory(kHom, 150.0);
  const auto w = tw_speed_shoot(kF, 1.0);
  const double oracle = w.position_of(0.25) - w.position_of(0.9);
  const auto width = traj.records.back().width();
  ASSERT_TRUE(width);
  EXPECT_NEAR(*width, oracle, 0.05 * oracle);
}

TEST(Diagnostics, OrderingAndPositiveWidth) {
  const ReactionField field{kF, sample_medium(12, MediumFamily::kIidUniform, 1.0, 2.0)};
  const auto traj = bump_trajectory(field, 80.0, 10);
  std::size_t checked = 0;
  for (const auto& r : traj.records) {
    if (!r.X || !r.X_h_l || !r.X_k_r) continue;
    EXPECT_LE(*r.X_h_l, *r.X);
    EXPECT_LE(*r.X, *r.X_k_r);
    EXPECT_GE(*r.width(), 0.0);
    ++checked;
  }
  EXPECT_GT(checked, 50u);
}

TEST(FrontStats, HomogeneousSpeedStatistics) {
  const auto traj = bump_trajectory(kHom, 100.0);
  const double c = tw_speed_shoot(kF, 1.0).c;
  const auto st = front_stats(traj, 20.0);
  EXPECT_NEAR(st.xdot_min, c, 0.02 * c);
  EXPECT_NEAR(st.xdot_max, c, 0.02 * c);
  EXPECT_LT(st.slope_max, 0.0);
  EXPECT_GT(st.ut_min, 0.0);
}

TEST(FrontStats, SignsInRandomMedia) {
  for (std::uint64_t seed : {3u, 4u, 5u}) {
    const ReactionField field{kF, sample_medium(seed, MediumFamily::kIidUniform, 1.0, 2.0)};
    const auto st = front_stats(bump_trajectory(field, 60.0), 5.0);
    EXPECT_LT(st.slope_max, 0.0);
    EXPECT_GT(st.ut_min, 0.0);
    EXPECT_GT(st.xdot_min, 0.0);
    EXPECT_GT(st.p_hat(), 0.0);
    EXPECT_TRUE(std::isfinite(st.width_trend_ci));
  }
}

TEST(FrontStats, RejectsShortTrajectory) {
  const auto traj = bump_trajectory(kHom, 3.0);
  EXPECT_THROW(front_stats(traj, 5.0), InvalidArgument);
}

TEST(HittingTimes, HomogeneousInverseSpeed) {
  const auto traj = bump_trajectory(kHom, 200.0, 5);
  const double c = tw_speed_shoot(kF, 1.0).c;
  std::vector<double> pos;
  for (int n = 50; n <= 100; ++n) pos.push_back(n);
  const auto ht = hitting_times(traj, pos);
  for (std::size_t i = 0; i < pos.size(); ++i) {
    ASSERT_TRUE(ht.times[i]);
    if (i > 0) {
      EXPECT_LT(*ht.times[i - 1], *ht.times[i]);
    }
  }
  // the start-up offset (initial bump radius, ignition delay) cancels in the
  // increment; T(n)/n alone carries it at O(1/n)
  const double slope = (*ht.times.back() - *ht.times.front()) / (pos.back() - pos.front());
  EXPECT_NEAR(slope, 1.0 / c, 0.02 / c);
  EXPECT_NEAR(*ht.times.back() / pos.back(), 1.0 / c, 0.05 / c);
  const auto never = hitting_times(traj, std::vector<double>{1e6});
  EXPECT_FALSE(never.times[0]);
}

TEST(HittingTimes, FixedPointAtARecord) {
  const auto traj = bump_trajectory(kHom, 30.0, 10);
  const auto& r = traj.records[50];
  const auto ht = hitting_times(traj, std::vector<double>{*r.X});
  ASSERT_TRUE(ht.times[0]);
  EXPECT_NEAR(*ht.times[0], r.t, 1e-9);
}

TEST(HittingTimes, RecorderMatchesTrajectoryInterpolation) {
  const auto traj = bump_trajectory(kHom, 40.0, 1);
  HittingRecorder rec(1, 20);
  for (const auto& r : traj.records) rec.record(r.t, r.X);
  std::vector<double> pos;
  for (int n = 1; n <= 20; ++n) pos.push_back(n);
  const auto ht = hitting_times(traj, pos);
  const auto times = rec.times();
  for (std::size_t i = 0; i < pos.size(); ++i) {
    ASSERT_TRUE(ht.times[i]);
    EXPECT_NEAR(times[i], *ht.times[i], 1e-12);
  }
}

TEST(SpreadingBracket, ConstantsDoNotGrowWithTheHorizon) {
  const ReactionField field{kF, sample_medium(8, MediumFamily::kIidUniform, 1.0, 2.0)};
  const double cmin = tw_speed_shoot(kF, 1.0).c, cmax = tw_speed_shoot(kF, 2.0).c;
  const auto traj = bump_trajectory(field, 200.0);
  const double t0 = 5.0;
  auto constants = [&](double T) {
    double beta = -1e9, eta = -1e9, X0 = 0.0;
    for (const auto& r : traj.records) {
      if (r.t < t0 || r.t > T || !r.X) continue;
      if (X0 == 0.0) X0 = *r.X;
      beta = std::max(beta, cmin * (r.t - t0) - (*r.X - X0));
      eta = std::max(eta, (*r.X - X0) - cmax * (r.t - t0));
    }
    return std::pair{beta, eta};
  };
  const auto [b1, e1] = constants(100.0);
  const auto [b2, e2] = constants(200.0);
  EXPECT_LE(b2, b1 + 1e-9);
  EXPECT_LE(e2, e1 + 1e-9);
}
