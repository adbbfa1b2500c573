#include <gtest/gtest.h>

#include <cmath>

#include "rdfront/fronts.hpp"
#include "rdfront/profiles.hpp"

using namespace rdfront;

namespace {

const IgnitionNonlinearity kF{};
const ReactionField kHom = homogeneous_field(kF, 1.0);

}  // namespace

TEST(Bump, ShapeInvariants) {
  const double h0 = default_bump_peak(0.25);
  const auto b = build_bump(kHom, h0);
  EXPECT_DOUBLE_EQ(b.hat(0.0), h0);
  EXPECT_NEAR(b.derivative(0.0), 0.0, 1e-8);
  EXPECT_GT(b.z1, 0.0);
  EXPECT_LT(b.z1, b.z2);
  EXPECT_NEAR(b.hat(b.z1), 0.25, 1e-6);
  EXPECT_NEAR(b(b.z2), 0.0, 1e-12);
  const double d = 1e-2;
  for (double x = -b.z1 + d; x < b.z1 - d; x += d) {
    EXPECT_LT(b.hat(x + d) - 2 * b.hat(x) + b.hat(x - d), 0.0) << x;
    EXPECT_NEAR(b.hat(x), b.hat(-x), 1e-8);
  }
  for (double x = b.z1 + d; x < b.z2 - d; x += d) {
    EXPECT_LT(std::abs(b.hat(x + d) - 2 * b.hat(x) + b.hat(x - d)), 1e-6) << x;
    EXPECT_NEAR(b.derivative(x), b.slope_z1, 1e-12);
  }
  // slope just inside z1 meets the affine part
  EXPECT_NEAR((b.hat(b.z1) - b.hat(b.z1 - 1e-4)) / 1e-4, b.slope_z1, 1e-4);
  for (double x : {b.z2 + 1e-9, b.z2 + 1.0, -b.z2 - 3.0}) EXPECT_EQ(b(x), 0.0);
}

TEST(Bump, SelfConvergenceOfZ1) {
  // reference at a 10x finer RK4 step
  const double h0 = 0.625;
  const auto coarse = build_bump(kHom, h0, 1e-3);
  const auto fine = build_bump(kHom, h0, 1e-4);
  EXPECT_NEAR(coarse.z1, fine.z1, 1e-5);
  EXPECT_NEAR(coarse.z2, fine.z2, 1e-5);
  EXPECT_NEAR(coarse.z1, 2.39974, 1e-4);
}

TEST(Bump, RejectsPeakOutsideRange) {
  EXPECT_THROW(build_bump(kHom, 0.25), InvalidArgument);
  EXPECT_THROW(build_bump(kHom, 1.0), InvalidArgument);
  EXPECT_THROW(build_bump(kHom, 0.1), InvalidArgument);
}

TEST(Bump, IsASubsolutionInRandomMedia) {
  // f >= f_min, so one step from zeta never goes below zeta
  const GridConfig grid;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const ReactionField field{kF, sample_medium(seed, MediumFamily::kIidUniform, 1.0, 2.0)};
    const Snapshot s = make_bump(default_bump_peak(0.25), 0.3 * seed, field, grid);
    const Snapshot out = step(s, field, grid);
    for (std::size_t j = 0; j < s.size(); ++j) EXPECT_GE(out.values[j], s.values[j] - 1e-8);
  }
}

TEST(TravelingWave, ScalingInLevel) {
  const double tol = 1e-7;
  const double c1 = tw_speed_shoot(kF, 1.0, tol).c;
  for (double a : {0.25, 4.0}) EXPECT_NEAR(tw_speed_shoot(kF, a, tol).c, std::sqrt(a) * c1, 2 * tol + 1e-8) << a;
}

TEST(TravelingWave, KnownSpeedsAndOrdering) {
  const auto w1 = tw_speed_shoot(kF, 1.0), w2 = tw_speed_shoot(kF, 2.0);
  EXPECT_NEAR(w1.c, 0.5766997, 2e-6);
  EXPECT_LT(w1.c, w2.c);
  EXPECT_LT(w1.tol, 1e-6);
  EXPECT_GT(w1.iterations, 0);
}

TEST(TravelingWave, OrderingAgreesWithThePdeOracle) {
  const GridConfig grid;
  double pde[2];
  int i = 0;
  for (double g : {1.0, 2.0}) {
    const auto field = homogeneous_field(kF, g);
    EvolveOptions o;
    o.t_end = 120.0;
    o.diagnostics.level_positions = false;
    const auto traj = evolve(make_step(0.0, grid), field, grid, o);
    pde[i++] = front_stats(traj, 40.0).position_fit.slope;
  }
  const double c1 = tw_speed_shoot(kF, 1.0).c, c2 = tw_speed_shoot(kF, 2.0).c;
  EXPECT_LT(pde[0], pde[1]);
  EXPECT_NEAR(pde[0], c1, 0.01 * c1);
  EXPECT_NEAR(pde[1], c2, 0.01 * c2);
}

TEST(TravelingWave, ProfileSolvesTheOde) {
  const auto w = tw_speed_shoot(kF, 1.0);
  // in s = -x: d(U')/ds = c U' + g f0(U); central differences along the table
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < w.table.size(); ++i) {
    const double lhs = (w.table[i + 1][1] - w.table[i - 1][1]) / (2 * w.step);
    const double rhs = w.c * w.table[i][1] + kF(w.table[i][0]);
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  EXPECT_LT(worst, 1e-6);
  for (double x = 0.0; x < 20.0; x += 0.37) EXPECT_NEAR(w.profile(x), 0.25 * std::exp(-w.c * x), 1e-8);
  EXPECT_DOUBLE_EQ(w.profile(0.0), 0.25);
  EXPECT_GT(w.profile(w.left_extent()), 1.0 - 1e-6);
  for (double x = w.left_extent(); x < 10.0; x += 0.05) EXPECT_GE(w.profile(x), w.profile(x + 0.05));
}

TEST(TravelingWave, BracketIndependence) {
  const double a = tw_speed_shoot(kF, 1.0, 1e-6, 1e-3, 1e3).c;
  const double b = tw_speed_shoot(kF, 1.0, 1e-6, 0.1, 7.0).c;
  EXPECT_NEAR(a, b, 1e-6);
}

TEST(TravelingWave, RejectsBadBracket) {
  EXPECT_THROW(tw_speed_shoot(kF, 1.0, 1e-6, 0.7, 3.0), BracketError);
  EXPECT_THROW(tw_speed_shoot(kF, 0.0), InvalidArgument);
}

TEST(ExpSupersolution, Parameters) {
  auto p = exp_supersolution_params(1.0, 1.0);
  EXPECT_DOUBLE_EQ(p.lambda, 1.0);
  EXPECT_DOUBLE_EQ(p.c, 2.0);
  p = exp_supersolution_params(1.0, 4.0);
  EXPECT_DOUBLE_EQ(p.lambda, 2.0);
  EXPECT_DOUBLE_EQ(p.c, 4.0);
  const auto q = exp_supersolution_params(kF, 2.0);
  EXPECT_DOUBLE_EQ(q.lambda, std::sqrt(0.5));
}

TEST(ExpSupersolution, BoundsARandomRun) {
  // oracle: the comparison run itself
  const GridConfig grid;
  const ReactionField field{kF, sample_medium(5, MediumFamily::kIidUniform, 1.0, 2.0)};
  const auto p = exp_supersolution_params(kF, 2.0);
  const Snapshot init = make_bump(default_bump_peak(0.25), -10.0, field, grid);
  for (std::size_t j = 0; j < init.size(); ++j) ASSERT_LE(init.values[j], std::exp(-p.lambda * init.x(j)));
  double worst = -1.0;
  EvolveOptions o;
  o.t_end = 50.0;
  o.observer_stride = 10;
  o.diagnostics.level_positions = false;
  o.observers.push_back([&](const StepView& v) {
    for (std::size_t j = 0; j < v.snapshot.size(); ++j) {
      const double psi = std::exp(-p.lambda * (v.snapshot.x(j) - p.c * v.snapshot.t));
      worst = std::max(worst, v.snapshot.values[j] - psi);
    }
  });
  evolve(init, field, grid, o);
  EXPECT_LE(worst, 1e-8);
}

namespace {

EnvelopeAccumulator homogeneous_envelope_run(double burn_in, double T) {
  const GridConfig grid;
  EnvelopeAccumulator acc(30.0, 10.0, 0.05);
  EvolveOptions o;
  o.t_end = T;
  o.observer_stride = 50;
  o.diagnostics.level_positions = false;
  o.observers.push_back(acc.observer(burn_in));
  evolve(make_bump_at_interface(default_bump_peak(0.25), 0.0, kHom, grid), kHom, grid, o);
  return acc;
}

}  // namespace

TEST(Envelope, HomogeneousEnsembleRecoversTheWave) {
  const auto acc = homogeneous_envelope_run(60.0, 120.0);
  const auto env = estimate_envelope({acc}, 0.25);
  const auto w = tw_speed_shoot(kF, 1.0);
  EXPECT_EQ(env.floored, 0u);
  EXPECT_NEAR(env.p_hat, w.c, 0.02 * w.c);
  double worst = 0.0;
  for (double x = -30.0; x <= 10.0; x += 0.05) worst = std::max(worst, std::abs(env(x) - w.profile(x)));
  EXPECT_LT(worst, 0.02);
}

TEST(Envelope, NormalizationMonotonicityAndBracket) {
  const auto a = homogeneous_envelope_run(40.0, 80.0);
  const ReactionField field{kF, sample_medium(3, MediumFamily::kIidUniform, 1.0, 2.0)};
  EnvelopeAccumulator b(30.0, 10.0, 0.05);
  {
    const GridConfig grid;
    EvolveOptions o;
    o.t_end = 80.0;
    o.observer_stride = 50;
    o.diagnostics.level_positions = false;
    o.observers.push_back(b.observer(40.0));
    evolve(make_bump_at_interface(default_bump_peak(0.25), 0.0, field, grid), field, grid, o);
  }
  const auto env = estimate_envelope({a, b}, 0.25);
  EXPECT_EQ(env(0.0), 0.25);
  EXPECT_GT(env.p_hat, 0.0);
  for (double x = -30.0; x < 10.0; x += 0.05) EXPECT_GE(env(x), env(x + 0.05) - 1e-15) << x;
  for (double x = -30.0; x <= 0.0; x += 0.05) EXPECT_GE(env(x), 0.25);
  // exact bracket on the ensemble
  for (const EnvelopeAccumulator* acc : std::initializer_list<const EnvelopeAccumulator*>{&a, &b}) {
    for (std::size_t i = 1; i < acc->lower().size(); ++i) EXPECT_LE(env.behind[i], acc->lower()[i]);
    for (std::size_t i = 1; i < acc->upper().size(); ++i)
      EXPECT_LE(acc->upper()[i], env(static_cast<double>(i) * acc->spacing()) * (1 + 1e-12));
  }
  EXPECT_THROW(estimate_envelope({}, 0.25), InvalidArgument);
}

TEST(Supersolution, IdentityTransformationHasZeroResidual) {
  const GridConfig grid;
  MonotoneRun run{kHom, grid, make_bump(default_bump_peak(0.25), 0.0, kHom, grid), 30.0};
  SupersolutionSpec spec;
  spec.q = 0.0;
  spec.K = kHom.lipschitz();
  spec.rate_override = 1.0;
  const auto rep = verify_supersolution(run, spec);
  EXPECT_EQ(rep.min_residual, 0.0);
  EXPECT_TRUE(rep.pass);
}

TEST(Supersolution, AheadOfTheZoneResidualIsTheRateTerm) {
  const GridConfig grid;
  MonotoneRun run{kHom, grid, make_bump(default_bump_peak(0.25), 0.0, kHom, grid), 30.0};
  SupersolutionSpec spec;
  spec.K = kHom.lipschitz();
  const auto rep = verify_supersolution(run, spec);
  EXPECT_GT(rep.gamma_rate, 1.0);
  EXPECT_GE(rep.min_ahead_residual, 0.0);
  EXPECT_GE(rep.min_residual, -1e-6);
  EXPECT_GT(rep.eps, 0.0);
  EXPECT_GT(rep.beta, 0.0);
  EXPECT_LT(rep.beta, 20.0);
  EXPECT_TRUE(rep.pass);
}

TEST(Supersolution, SpecValidation) {
  SupersolutionSpec spec;
  spec.K = 1.0;
  spec.eps = 0.1;
  EXPECT_DOUBLE_EQ(spec.h(), 0.95);
  EXPECT_DOUBLE_EQ(spec.gamma_rate(), 1.5);
  spec.q = 0.1;
  EXPECT_THROW(spec.validate(0.25), InvalidArgument);
  spec.q = 0.05;
  spec.s = 0.09;
  EXPECT_THROW(spec.validate(0.25), InvalidArgument);
}
