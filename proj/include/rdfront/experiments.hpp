#pragma once

// Experiment orchestration: one run of `front run <config>` writes a
// manifest, the experiment's result files and an acceptance summary into
// the configured output directory.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "rdfront/acceptance.hpp"
#include "rdfront/config.hpp"
#include "rdfront/io.hpp"

#ifndef RDFRONT_VERSION
#define RDFRONT_VERSION "0.0.0"
#endif

namespace rdfront {

inline std::string version_string() { return RDFRONT_VERSION; }

/// Criteria enabled by default for each experiment.
inline std::vector<int> default_checks(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::kTwSpeed: return {1};
    case ExperimentKind::kSpeed: return {2, 3};
    case ExperimentKind::kSubadditivity: return {4};
    case ExperimentKind::kEnvelope: return {5, 6, 7};
    case ExperimentKind::kWave: return {8, 10};
    case ExperimentKind::kSpreadingTheorem: return {};
    case ExperimentKind::kInvariantSuite: return {11, 12};
  }
  return {};
}

/// Acceptance parameters derived from a config. Ensemble sizes scale with
/// `realizations`: R speed runs, 2R spreading runs, R/2 front and training
/// runs.
inline AcceptanceParams acceptance_params(const ExperimentConfig& c) {
  AcceptanceParams p;
  p.family = c.nonlinearity;
  p.theta0 = c.theta0;
  p.medium = c.medium;
  p.g_min = c.g_min;
  p.g_max = c.g_max;
  p.grid = c.grid;
  p.workers = c.workers;
  p.spread_seed = c.seed;
  p.front_seed = c.seed;
  p.training_seed = c.seed + 1000;
  p.matrix_seed = c.seed;
  p.pair_seed = c.seed + 4000;
  p.wave_seed = c.seed;
  p.h0 = c.h0;

  p.sub_realizations = c.experiment == ExperimentKind::kSubadditivity ? c.realizations : 1;
  p.speed_realizations = c.realizations;
  p.spread_realizations = 2 * c.realizations;
  p.N = c.N;
  p.sub_N = c.N;
  p.sub_stride = c.stride;

  p.front_realizations = std::max(2, c.realizations / 2);
  p.envelope_training = p.front_realizations;
  p.width_T = c.T;
  p.steep_horizon = c.T;
  p.envelope_T = c.T;
  p.burn_in = c.burn_in;
  p.level_h = c.h;
  p.level_k = c.level_k();

  p.n_list = c.n_list;
  p.R = c.R;
  p.cauchy_tol = c.cauchy_tol;
  p.forward_time = c.forward_time;
  p.xi_a0 = c.xi_first;
  p.xi_b1 = c.xi_last;
  p.xi_a1 = (c.xi_first + c.xi_last) / 2;
  p.q = c.q;
  p.super_tol = c.tol;

  // spreading horizon: long enough for N cells at the slowest speed
  const double c_lo = tw_speed_shoot(c.make_nonlinearity(), c.g_min).c;
  p.T_long = std::max(2.0 * c.T, std::ceil(1.3 * static_cast<double>(c.N) / c_lo));
  p.T_short = p.T_long / 4.0;
  return p;
}

struct ExperimentOutcome {
  int exit_code = 0;
  json acceptance;
  std::vector<std::string> failures;
};

namespace detail {

inline std::string g_tag(double g) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", g);
  return buf;
}

inline json config_echo(const ExperimentConfig& c) {
  json echo = json::array();
  std::istringstream in(c.canonical());
  for (std::string line; std::getline(in, line);) echo.push_back(line);
  return echo;
}

inline json optional_json(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

class Experiment {
 public:
  Experiment(const ExperimentConfig& cfg, AcceptanceSuite& suite, const std::filesystem::path& out)
      : cfg_(cfg), suite_(suite), out_(out) {}

  json seeds = json::array();
  std::vector<json> checks;  ///< experiment-specific checks {name, pass, ...}

  void run() {
    switch (cfg_.experiment) {
      case ExperimentKind::kTwSpeed: tw_speed(); break;
      case ExperimentKind::kSpeed: speed(); break;
      case ExperimentKind::kSubadditivity: subadditivity(); break;
      case ExperimentKind::kEnvelope: envelope(); break;
      case ExperimentKind::kWave: wave(); break;
      case ExperimentKind::kSpreadingTheorem: spreading(); break;
      case ExperimentKind::kInvariantSuite: break;
    }
  }

 private:
  void tw_speed() {
    const auto nl = cfg_.make_nonlinearity();
    std::vector<double> levels{cfg_.g_min};
    if (cfg_.g_max != cfg_.g_min) levels.push_back(cfg_.g_max);
    NdjsonWriter speeds(out_ / "speeds.ndjson");
    for (double g : levels) {
      const auto w = tw_speed_shoot(nl, g, cfg_.tol);
      speeds.write({{"g", g}, {"c", w.c}, {"tol", w.tol}, {"iterations", w.iterations}});
      CsvWriter prof(out_ / ("tw_profile_g" + g_tag(g) + ".csv"), {"x", "value"});
      const ProfileGrid pg{cfg_.R, 0.05};
      for (std::size_t i = 0; i < pg.size(); ++i) prof.row({pg.x(i), w.profile(pg.x(i))});
    }
    const auto bump = build_bump(homogeneous_field(nl, cfg_.g_min), suite_.params().bump_peak());
    CsvWriter b(out_ / "bump.csv", {"x", "value"});
    const auto n = static_cast<std::int64_t>(std::ceil(bump.z2 / 0.01));
    for (std::int64_t i = -n; i <= n; ++i) b.row({0.01 * static_cast<double>(i), bump(0.01 * static_cast<double>(i))});
  }

  void speed() {
    const auto& runs = suite_.spread_runs();
    CsvWriter hits(out_ / "hitting_times.csv", {"seed", "n", "T"});
    for (const auto& r : runs) {
      seeds.push_back(r.seed);
      for (std::size_t i = 0; i < r.rec.hits.size(); ++i)
        if (!std::isnan(r.rec.hits[i])) hits.row({static_cast<double>(r.seed), static_cast<double>(i + 1), r.rec.hits[i]});
    }
    const SpeedEstimate est = suite_.speed_estimate();
    NdjsonWriter out(out_ / "speed.ndjson");
    for (std::size_t i = 0; i < est.slopes.size(); ++i)
      out.write({{"seed", runs[i].seed}, {"speed", est.slopes[i]}, {"segment_a", est.segment_a[i]},
                 {"segment_b", est.segment_b[i]}});
    out.write({{"method", est.method}, {"c_star", est.c_star}, {"ci_half_width", est.ci_half_width},
               {"ensemble_size", est.ensemble_size}, {"segment_gap", est.segment_gap},
               {"segment_ci", est.segment_ci}, {"segments_agree", est.segments_agree},
               {"heterogeneity", est.heterogeneity}, {"non_ergodic", est.non_ergodic},
               {"underpowered", est.underpowered}});
    checks.push_back({{"name", "speed estimate not flagged non-ergodic"}, {"pass", !est.non_ergodic}});
  }

  void subadditivity() {
    CsvWriter mat(out_ / "hitting_matrix.csv", {"seed", "m", "n", "T"});
    NdjsonWriter reps(out_ / "subadditivity.ndjson");
    bool ok = true;
    for (auto sd : cfg_.seeds()) {
      seeds.push_back(sd);
      const auto& q = suite_.matrix(sd);
      for (std::size_t i = 0; i < q.starts.size(); ++i)
        for (std::size_t k = 0; k < q.rows[i].size(); ++k)
          mat.row({static_cast<double>(sd), static_cast<double>(q.starts[i]),
                   static_cast<double>(q.starts[i] + static_cast<std::int64_t>(k) + 1), q.rows[i][k]});
      const auto rep = verify_near_subadditivity(q);
      ok = ok && rep.corrected_subadditive;
      json spans = json::array();
      for (const auto& s : rep.spans) spans.push_back({{"span_lo", s.span_lo}, {"span_hi", s.span_hi}, {"alpha", s.alpha}});
      reps.write({{"seed", sd}, {"alpha_max", rep.alpha_max}, {"flatness", rep.flatness}, {"beta", rep.beta},
                  {"corrected_subadditive", rep.corrected_subadditive},
                  {"worst_corrected_margin", rep.worst_corrected_margin}, {"triples", rep.triples},
                  {"spans", spans}});
    }
    checks.push_back({{"name", "corrected hitting times subadditive for every seed"}, {"pass", ok}});
  }

  void envelope() {
    const auto& runs = suite_.front_runs();
    const double c_lo = suite_.c_low(), c_hi = suite_.c_high();
    NdjsonWriter summary(out_ / "front_summary.ndjson");
    for (const auto& f : runs) {
      seeds.push_back(f.seed);
      const auto st = front_stats(f.traj, cfg_.burn_in);
      summary.write({{"seed", f.seed}, {"c_min", c_lo}, {"c_max", c_hi}, {"width_max", optional_json(st.width_max)},
                     {"p_hat", optional_json(st.p_hat())}, {"delta_hat", optional_json(st.delta_hat())},
                     {"L_hat", optional_json(st.xdot_min)}, {"H_hat", optional_json(st.xdot_max)},
                     {"trend_ci", optional_json(st.width_trend_ci)}});
      NdjsonWriter stream(out_ / ("observer_seed" + std::to_string(f.seed) + ".ndjson"));
      for (const auto& d : f.traj.records) stream.write(to_json(d));
    }
    const EnvelopeEstimate& env = suite_.envelope();
    for (auto sd : env.seeds) seeds.push_back(sd);
    CsvWriter e(out_ / "envelope.csv", {"x", "value", "exponential"});
    const auto nb = static_cast<std::int64_t>(env.behind.size()) - 1;
    const auto na = static_cast<std::int64_t>(std::lround(suite_.params().envelope_ahead / env.spacing));
    for (std::int64_t i = -nb; i <= na; ++i) {
      const double x = static_cast<double>(i) * env.spacing;
      e.row({x, env(x), x >= 0.0 ? cfg_.theta0 * std::exp(-env.p_hat * x) : 1.0});
    }
    NdjsonWriter fit(out_ / "envelope.ndjson");
    fit.write({{"p_hat", env.p_hat}, {"theta0", env.theta0}, {"training_seeds", env.seeds},
               {"observations", env.observations}});
  }

  void wave() {
    const auto& w = suite_.wave();
    seeds.push_back(suite_.params().wave_seed);
    NdjsonWriter conv(out_ / "convergence.ndjson");
    for (std::size_t i = 0; i < w.runs.size(); ++i) {
      const auto& r = w.runs[i];
      conv.write({{"n", r.n}, {"shift", r.shift}, {"residual", r.residual}, {"evaluations", r.evaluations},
                  {"gap", i == 0 ? json(nullptr) : json(w.cauchy_gaps[i - 1])}});
      CsvWriter prof(out_ / ("wave_profile_n" + std::to_string(r.n) + ".csv"), {"x", "value"});
      for (std::size_t j = 0; j < w.grid.size(); ++j) prof.row({w.grid.x(j), r.profile[j]});
    }
    CsvWriter W(out_ / "W.csv", {"x", "value"});
    for (std::size_t j = 0; j < w.grid.size(); ++j) W.row({w.grid.x(j), w.W[j]});
    CsvWriter X(out_ / "X_tilde.csv", {"t", "X"});
    for (std::size_t i = 0; i < w.X_tilde.size(); ++i) X.row({w.X_tilde_t[i], w.X_tilde[i]});
    CsvWriter pas(out_ / "passages.csv", {"xi", "x", "value"});
    for (const auto& [xi, prof] : w.passages)
      for (std::size_t j = 0; j < w.grid.size(); ++j) pas.row({static_cast<double>(xi), w.grid.x(j), prof.values[j]});
  }

  void spreading() {
    double c_plus = 0.0;
    if (cfg_.c_plus) {
      c_plus = *cfg_.c_plus;
    } else {
      const SpeedEstimate est = suite_.speed_estimate();
      c_plus = est.c_star;
      for (const auto& r : suite_.spread_runs()) seeds.push_back(r.seed);
    }
    // The medium families are reflection invariant in law, so the left
    // speed equals the right one unless given.
    const double c_minus = cfg_.c_minus.value_or(-c_plus);
    // Half-width of the plateau data: above the ignition radius, small next to eps T.
    const double L0 = 5.0;
    const auto pad = static_cast<std::int64_t>(std::ceil((L0 + cfg_.grid.window.ahead) / cfg_.grid.dx));
    auto reports = parallel_map(cfg_.seeds().size(), suite_.params().worker_count(), [&](std::size_t i) {
      const auto sd = cfg_.seeds()[i];
      const auto data = make_sampled([&](double x) { return std::abs(x) <= L0 ? 1.0 : 0.0; }, 0.0, -pad, pad,
                                     cfg_.grid.dx);
      return spreading_theorem_check(cfg_.make_field(sd), cfg_.grid, data, c_plus, c_minus, cfg_.eps, cfg_.T);
    });
    NdjsonWriter out(out_ / "spreading.ndjson");
    bool ok = true;
    for (std::size_t i = 0; i < reports.size(); ++i) {
      const auto sd = cfg_.seeds()[i];
      seeds.push_back(sd);
      if (!reports[i].value) {
        ok = false;
        out.write({{"seed", sd}, {"error", reports[i].error}});
        continue;
      }
      const auto& r = *reports[i].value;
      json ladder = json::array();
      for (const auto& e : r.ladder) ladder.push_back({{"t", e.t}, {"inner_min", e.inner_min}, {"outer_max", e.outer_max}});
      out.write({{"seed", sd}, {"c_plus", r.c_plus}, {"c_minus", r.c_minus}, {"eps", r.eps},
                 {"ladder", ladder}, {"inner_monotone", r.inner_monotone}, {"pass", r.pass}});
      ok = ok && r.pass;
    }
    checks.push_back({{"name", "solution fills the inner cone and vanishes outside the outer cone"}, {"pass", ok}});
    for (const auto& r : reports)
      if (!r.value) throw Error("spreading run failed: " + r.error);
  }

  const ExperimentConfig& cfg_;
  AcceptanceSuite& suite_;
  std::filesystem::path out_;
};

}  // namespace detail

/// Runs the configured experiment (or, with `suite`, all criteria) and writes
/// manifest.json, the result files and acceptance.json into cfg.output.
/// Result files hold no timing data, so re-runs reproduce them byte for byte;
/// wall-clock times live in the manifest only.
inline ExperimentOutcome run_experiment(const ExperimentConfig& cfg, bool suite_mode = false,
                                        std::ostream* log = nullptr) {
  namespace fs = std::filesystem;
  const auto wall0 = std::chrono::steady_clock::now();
  const fs::path out = cfg.output;
  fs::create_directories(out);

  json manifest;
  manifest["tool"] = "front";
  manifest["version"] = version_string();
  manifest["mode"] = suite_mode ? "suite" : "run";
  manifest["experiment"] = std::string(to_string(cfg.experiment));
  manifest["config"] = detail::config_echo(cfg);
  manifest["config_hash"] = sha256_hex(cfg.canonical());
  manifest["output"] = cfg.output;
  manifest["workers"] = cfg.workers > 0 ? cfg.workers : default_workers();
  manifest["status"] = "running";
  write_json(out / "manifest.json", manifest);

  ExperimentOutcome outcome;
  AcceptanceSuite suite(acceptance_params(cfg));
  detail::Experiment exp(cfg, suite, out);

  std::vector<int> enabled;
  if (cfg.checks) enabled = *cfg.checks;
  else if (suite_mode) for (int i = 1; i <= AcceptanceSuite::kCount; ++i) enabled.push_back(i);
  else enabled = default_checks(cfg.experiment);

  if (!suite_mode) {
    try {
      exp.run();
    } catch (const std::exception& e) {
      outcome.failures.push_back(std::string("experiment: ") + e.what());
    }
  }

  json criteria = json::array();
  json timings = json::object();
  for (int id = 1; id <= AcceptanceSuite::kCount; ++id) {
    json entry{{"id", id}, {"name", AcceptanceSuite::name(id)}};
    if (std::find(enabled.begin(), enabled.end(), id) == enabled.end()) {
      entry["status"] = "not-run";
    } else {
      const auto r = suite.run(id);
      if (log) *log << format_result_line(r) << std::endl;
      entry["status"] = r.pass ? "pass" : "fail";
      entry["summary"] = r.summary;
      entry["measured"] = r.measured;
      timings[std::to_string(id)] = r.seconds;
      if (!r.pass) outcome.failures.push_back("criterion " + std::to_string(id) + ": " + r.summary);
    }
    criteria.push_back(entry);
  }
  json checks = json::array();
  for (const auto& c : exp.checks) {
    checks.push_back(c);
    if (!c.at("pass").get<bool>()) outcome.failures.push_back("check: " + c.at("name").get<std::string>());
  }

  outcome.acceptance = {{"experiment", std::string(to_string(cfg.experiment))},
                        {"config_hash", manifest["config_hash"]},
                        {"criteria", criteria},
                        {"experiment_checks", checks},
                        {"pass", outcome.failures.empty()}};
  write_json(out / "acceptance.json", outcome.acceptance);

  json summary = json::object();
  for (const auto& c : criteria) summary[std::to_string(c["id"].get<int>())] = c["status"];
  manifest["seeds"] = exp.seeds;
  manifest["status"] = outcome.failures.empty() ? "complete" : "failed";
  manifest["failures"] = outcome.failures;
  manifest["acceptance_summary"] = summary;
  manifest["criterion_seconds"] = timings;
  manifest["wall_clock_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();
  write_json(out / "manifest.json", manifest);

  outcome.exit_code = outcome.failures.empty() ? 0 : 1;
  return outcome;
}

}  // namespace rdfront
