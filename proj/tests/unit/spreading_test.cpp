#include <gtest/gtest.h>

#include <cmath>

#include "rdfront/profiles.hpp"
#include "rdfront/spreading.hpp"

using namespace rdfront;

namespace {

const IgnitionNonlinearity kF{};
const ReactionField kHom = homogeneous_field(kF, 1.0);
const GridConfig kGrid;

ReactionField random_field(std::uint64_t seed) {
  return {kF, sample_medium(seed, MediumFamily::kIidUniform, 1.0, 2.0)};
}

// q[m][n] = phi(n - m) on starts {0, stride, ...}
HittingMatrix synthetic(std::int64_t N, std::int64_t stride, auto phi) {
  HittingMatrix hm;
  hm.N = N;
  hm.stride = stride;
  for (std::int64_t m = 0; m < N; m += stride) {
    hm.starts.push_back(m);
    std::vector<double> row;
    for (std::int64_t n = m + 1; n <= N; ++n) row.push_back(phi(n - m));
    hm.rows.push_back(row);
  }
  return hm;
}

Snapshot plateau(double L) {
  const auto pad = static_cast<std::int64_t>(std::ceil((L + kGrid.window.ahead) / kGrid.dx));
  return make_sampled([&](double x) { return std::abs(x) <= L ? 1.0 : 0.0; }, 0.0, -pad, pad, kGrid.dx);
}

}  // namespace

TEST(BumpRun, HomogeneousHitsAreIncreasingAndLinear) {
  BumpRunOptions o;
  o.target = 60;
  const auto rec = bump_run(kHom, kGrid, 0, o);
  ASSERT_EQ(rec.hits.size(), 60u);
  for (std::size_t i = 1; i < rec.hits.size(); ++i) EXPECT_LT(rec.hits[i - 1], rec.hits[i]);
  const double c = tw_speed_shoot(kF, 1.0).c;
  EXPECT_NEAR(segment_speed(rec.hits, 1, 30, 60), c, 0.02 * c);
}

TEST(BumpRun, ObservationTimesAndStart) {
  BumpRunOptions o;
  o.target = 30;
  o.observe_at = {10.0, 20.0};
  const auto rec = bump_run(kHom, kGrid, 5, o);
  EXPECT_EQ(rec.start, 5);
  EXPECT_EQ(rec.hits.size(), 25u);
  ASSERT_EQ(rec.X_at.size(), 2u);
  EXPECT_LT(rec.X_at[0], rec.X_at[1]);
  EXPECT_GE(rec.t_final, 20.0 - kGrid.dt);
}

TEST(HittingMatrix, HomogeneousRowsDependOnlyOnTheSpan) {
  const auto hm = build_hitting_matrix(kHom, 40, 10, kGrid);
  ASSERT_EQ(hm.starts, (std::vector<std::int64_t>{0, 10, 20, 30}));
  for (std::int64_t m : hm.starts)
    for (std::int64_t n = m + 1; n <= 40; ++n) EXPECT_NEAR(hm.q(m, n), hm.q(0, n - m), 1e-9);
  EXPECT_TRUE(std::isnan(hm.q(10, 10)));
  EXPECT_TRUE(std::isnan(hm.q(10, 41)));
  EXPECT_THROW((void)hm.q(5, 20), InvalidArgument);
}

TEST(HittingMatrix, IndependentOfWorkerCount) {
  const auto field = random_field(21);
  HittingMatrixOptions o1, o4;
  o4.workers = 4;
  const auto a = build_hitting_matrix(field, 30, 10, kGrid, o1);
  const auto b = build_hitting_matrix(field, 30, 10, kGrid, o4);
  EXPECT_EQ(a.rows, b.rows);
  EXPECT_EQ(a.seed, 21u);
}

TEST(HittingMatrix, ArgumentChecks) {
  EXPECT_THROW(build_hitting_matrix(kHom, 1, 1, kGrid), InvalidArgument);
  EXPECT_THROW(build_hitting_matrix(kHom, 10, 0, kGrid), InvalidArgument);
}

TEST(Subadditivity, AffineFamilyOracle) {
  // q = s / c + a: alpha = -a on every triple, transient a
  const double c = 0.6, a = 1.5;
  const auto hm = synthetic(50, 5, [&](std::int64_t s) { return static_cast<double>(s) / c + a; });
  const auto rep = verify_near_subadditivity(hm);
  EXPECT_NEAR(rep.alpha_max, -a, 1e-12);
  EXPECT_NEAR(rep.flatness, 0.0, 1e-12);
  EXPECT_TRUE(rep.corrected_subadditive);
  EXPECT_NEAR(transient_constant(hm, c), a, 1e-12);
}

TEST(Subadditivity, TripleCountOracle) {
  const std::int64_t N = 30, stride = 5;
  const auto hm = synthetic(N, stride, [](std::int64_t s) { return static_cast<double>(s); });
  std::size_t expect = 0;
  for (std::int64_t m = 0; m < N; m += stride)
    for (std::int64_t n = m + stride; n < N; n += stride) expect += static_cast<std::size_t>(N - n);
  EXPECT_EQ(verify_near_subadditivity(hm).triples, expect);
}

TEST(Subadditivity, CorrectedFamilyIsAlwaysSubadditive) {
  std::uint64_t state = 99;
  auto next = [&] {
    state = state * 6364136223846793005ULL + 1442695040888963407ULL;
    return static_cast<double>(state >> 11) * 0x1.0p-53;
  };
  for (int trial = 0; trial < 50; ++trial) {
    HittingMatrix hm = synthetic(24, 3, [](std::int64_t s) { return static_cast<double>(s); });
    for (auto& row : hm.rows)
      for (auto& v : row) v += 4.0 * (next() - 0.5);
    const auto rep = verify_near_subadditivity(hm, 3);
    EXPECT_TRUE(rep.corrected_subadditive) << trial;
    EXPECT_GE(rep.worst_corrected_margin, 0.0);
  }
}

TEST(Subadditivity, RandomMediumNearSubadditive) {
  const auto hm = build_hitting_matrix(random_field(31), 60, 10, kGrid, {.workers = 4});
  const auto hom = build_hitting_matrix(kHom, 60, 10, kGrid, {.first_row_only = true});
  const double transient = transient_constant(hom, tw_speed_shoot(kF, 1.0).c);
  const auto rep = verify_near_subadditivity(hm);
  EXPECT_TRUE(rep.corrected_subadditive);
  EXPECT_LE(rep.alpha_max, 2.0 * transient);
  EXPECT_THROW(verify_near_subadditivity(hom), InvalidArgument);
}

TEST(EstimateSpeed, ExactLinesRecoverTheSpeed) {
  const double c = 0.7;
  std::vector<std::vector<double>> rows(4);
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (int n = 1; n <= 40; ++n) rows[r].push_back(n / c + 2.0 + static_cast<double>(r));
  const auto est = estimate_speed_from_rows(rows, 40, 0.5, 0.9);
  EXPECT_NEAR(est.c_star, c, 1e-12);
  EXPECT_NEAR(est.ci_half_width, 0.0, 1e-9);
  EXPECT_TRUE(est.segments_agree);
  EXPECT_FALSE(est.non_ergodic);
  EXPECT_FALSE(est.underpowered);
}

TEST(EstimateSpeed, DistinctDeterministicSpeedsAreFlagged) {
  std::vector<std::vector<double>> rows(6);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const double c = r % 2 ? 0.6 : 0.8;
    for (int n = 1; n <= 40; ++n) rows[r].push_back(n / c);
  }
  EXPECT_TRUE(estimate_speed_from_rows(rows, 40).non_ergodic);
}

TEST(EstimateSpeed, ArgumentChecks) {
  std::vector<std::vector<double>> one{std::vector<double>(40, 1.0)};
  EXPECT_THROW(estimate_speed_from_rows(one, 40), InvalidArgument);
  std::vector<std::vector<double>> two(2, std::vector<double>(4, 1.0));
  EXPECT_THROW(estimate_speed_from_rows(two, 4), InvalidArgument);
  std::vector<std::vector<double>> shortrow(2, std::vector<double>(10, 1.0));
  EXPECT_THROW(estimate_speed_from_rows(shortrow, 20), InvalidArgument);
}

TEST(EstimateSpeed, RandomEnsembleLiesBetweenTheBounds) {
  std::vector<HittingMatrix> ens;
  for (std::uint64_t s = 40; s < 44; ++s)
    ens.push_back(build_hitting_matrix(random_field(s), 80, 10, kGrid, {.first_row_only = true}));
  const double lo = tw_speed_shoot(kF, 1.0).c, hi = tw_speed_shoot(kF, 2.0).c;
  const auto est = estimate_speed(ens, lo, hi);
  EXPECT_GT(est.c_star, lo);
  EXPECT_LT(est.c_star, hi);
  EXPECT_EQ(est.ensemble_size, 4u);
}

TEST(SegmentSpeed, Oracle) {
  const std::vector<double> hits{1.0, 3.0, 5.0, 6.0};
  EXPECT_DOUBLE_EQ(segment_speed(hits, 1, 1, 4), 3.0 / 5.0);
  EXPECT_DOUBLE_EQ(segment_speed(hits, 1, 3, 4), 1.0);
}

TEST(SpreadingCheck, HomogeneousPlateauFillsTheCone) {
  const double c = tw_speed_shoot(kF, 1.0).c;
  // the initial half-width and the leading tail must fit inside eps T
  const auto rep = spreading_theorem_check(kHom, kGrid, plateau(5.0), c, -c, 0.1 * c, 200.0);
  ASSERT_EQ(rep.ladder.size(), 3u);
  EXPECT_TRUE(rep.pass);
  EXPECT_GE(rep.ladder.back().inner_min, 0.99);
  EXPECT_LE(rep.ladder.back().outer_max, 0.01);
}

TEST(SpreadingCheck, WideDataFillsTheShrunkConeEarly) {
  const double c = tw_speed_shoot(kF, 1.0).c;
  const auto rep = spreading_theorem_check(kHom, kGrid, plateau(150.0), c, -c, 0.1 * c, 200.0);
  EXPECT_GE(rep.ladder.front().inner_min, 0.99);
  EXPECT_TRUE(rep.inner_monotone);
}

TEST(SpreadingCheck, RandomMediumLadderIsMonotone) {
  const auto rep = spreading_theorem_check(random_field(5), kGrid, plateau(5.0), 0.70, -0.70, 0.07, 200.0);
  for (std::size_t i = 1; i < rep.ladder.size(); ++i)
    EXPECT_GE(rep.ladder[i].inner_min, rep.ladder[i - 1].inner_min - 1e-3);
}

TEST(SpreadingCheck, WrongSpeedFails) {
  const double c = tw_speed_shoot(kF, 1.0).c;
  const auto rep = spreading_theorem_check(kHom, kGrid, plateau(20.0), 0.8 * c, -0.8 * c, 0.02, 200.0);
  EXPECT_FALSE(rep.pass);
}

TEST(SpreadingCheck, SmallDataQuenches) {
  const auto pad = static_cast<std::int64_t>(std::ceil(60.0 / kGrid.dx));
  const auto data = make_sampled([](double x) { return std::abs(x) <= 0.5 ? 0.3 : 0.0; }, 0.0, -pad, pad, kGrid.dx);
  EXPECT_THROW(spreading_theorem_check(kHom, kGrid, data, 0.5, -0.5, 0.05, 50.0), QuenchingError);
}

TEST(SpreadingCheck, ArgumentChecks) {
  EXPECT_THROW(spreading_theorem_check(kHom, kGrid, plateau(5.0), 0.5, -0.5, 0.0, 10.0), InvalidArgument);
  EXPECT_THROW(spreading_theorem_check(kHom, kGrid, plateau(5.0), 0.1, 0.05, 0.05, 10.0), InvalidArgument);
}
