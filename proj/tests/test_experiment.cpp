#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "agsp/errors.hpp"
#include "agsp/experiment.hpp"

using namespace agsp;

namespace {

std::string config_error_field(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "no error";
}

std::size_t line_count(const std::string& s) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

const char* kSmall = R"({
  "version": 1,
  "graph": {"nodes": 10, "radius": 0.6, "seed": 3},
  "bandlimit": {"size": 3},
  "noise": {"variance": 0.01},
  "algorithm": {"name": "lms", "mu": 0.05},
  "run": {"horizon": 400, "trials": 200, "seed": 9}
})";

}  // namespace

TEST_CASE("config errors name the offending field") {
  CHECK(config_error_field("{") == "document");
  CHECK(config_error_field("{}") == "version");
  CHECK(config_error_field(R"({"version": 2})") == "version");
  CHECK(config_error_field(R"({"version": 1, "extra": 0})") == "extra");
  CHECK(config_error_field(R"({"version": 1, "graph": {"nodes": 1}})") == "graph.nodes");
  CHECK(config_error_field(R"({"version": 1, "graph": {"colour": 1}})") == "graph.colour");
  CHECK(config_error_field(R"({"version": 1, "graph": {"type": "edge_list"}})") == "graph.path");
  CHECK(config_error_field(R"({"version": 1, "algorithm": {"name": "nlms"}})") == "algorithm.name");
  CHECK(config_error_field(R"({"version": 1, "algorithm": {"beta": 0}})") == "algorithm.beta");
  CHECK(config_error_field(R"({"version": 1, "algorithm": {"mu": "big"}})") == "algorithm.mu");
  CHECK(config_error_field(R"({"version": 1, "sampling": {"rate_target": 1.5}})") == "sampling.rate_target");
  CHECK(config_error_field(R"({"version": 1, "sampling": {"source": "explicit"}})") == "sampling.probs");
  CHECK(config_error_field(R"({"version": 1, "noise": {"variance": -1}})") == "noise");
  CHECK(config_error_field(R"({"version": 1, "run": {"trials": 0}})") == "run.trials");
  CHECK(config_error_field(R"({"version": 1, "run": {"init": "warm"}})") == "run.init");
  CHECK(config_error_field(R"({"version": 1, "compare": {"alpha_grid": [1.0]}})") == "compare.alpha_grid");
  CHECK(config_error_field(R"({"version": 1, "bandlimit": {"size": 2, "indices": [0]}})") == "bandlimit");

  const ExperimentConfig c = parse_config(R"({"version": 1, "graph": {"nodes": 6}, "bandlimit": {"size": 7}})");
  CHECK_THROWS_AS(build_instance(c), ConfigError);
  const ExperimentConfig v =
      parse_config(R"({"version": 1, "graph": {"nodes": 6}, "noise": {"variances": [0.1, 0.2]}})");
  CHECK_THROWS_AS(build_instance(v), ConfigError);
}

TEST_CASE("config values and hash") {
  const ExperimentConfig c = parse_config(R"({"version": 1, "sampling": {"msd_target_db": -20}})");
  CHECK(c.msd_target == doctest::Approx(0.01).epsilon(1e-12));
  CHECK(c.algorithm == Algorithm::lms);
  CHECK(c.trials == 200);
  CHECK(parse_config(kSmall).hash == parse_config(kSmall).hash);
  CHECK(parse_config(kSmall).hash != c.hash);
  const ExperimentConfig d = parse_config(kSmall);
  CHECK(d.graph.nodes == 10);
  CHECK(d.mu == 0.05);
  CHECK(d.horizon == 400);
}

TEST_CASE("steady state and rate fit") {
  CHECK(steady_state((Vector(8) << 1, 2, 3, 4, 5, 6, 7, 8).finished()) == doctest::Approx(7.5));
  CHECK(steady_state(Vector::Constant(3, 2.0)) == 2.0);
  CHECK(to_db(0.01) == doctest::Approx(-20.0));

  Vector geometric(400);
  for (Index n = 0; n < 400; ++n) geometric(n) = std::pow(0.9, static_cast<double>(n));
  CHECK(fit_rate(geometric) == doctest::Approx(0.9).epsilon(1e-10));
  CHECK(fit_rate(Vector::Constant(50, 3.0)) == 1.0);
  CHECK(fit_rate(Vector::Constant(1, 3.0)) == 1.0);

  Vector floored = geometric.array() + 1e-4;
  CHECK(std::abs(fit_rate(floored) - 0.9) < 0.01);
}

TEST_CASE("LMS Monte-Carlo curve against the closed forms") {
  const ExperimentConfig c = parse_config(kSmall);
  const Instance inst = build_instance(c);
  const LearningCurve lc = run_experiment(c);
  REQUIRE(lc.msd.size() == 400);
  CHECK(lc.msd(0) == doctest::Approx(inst.x_true.squaredNorm()).epsilon(1e-12));
  CHECK(lc.theory_msd == doctest::Approx(0.025 * 3 * 0.01).epsilon(1e-10));
  CHECK(lc.theory_rate == doctest::Approx(0.9).epsilon(1e-10));
  CHECK(std::abs(to_db(steady_state(lc.msd)) - to_db(lc.theory_msd)) < 0.3);
  CHECK(std::abs(fit_rate(lc.msd) - lc.theory_rate) < 0.01);
  CHECK(lc.config_hash == c.hash);
}

TEST_CASE("experiments are deterministic") {
  ExperimentConfig c = parse_config(kSmall);
  c.horizon = 60;
  c.trials = 7;
  for (Algorithm a : {Algorithm::lms, Algorithm::rls, Algorithm::drls}) {
    c.algorithm = a;
    c.sampling = "constant";
    c.constant = 0.7;
    std::ostringstream first;
    std::ostringstream second;
    write_curve_csv(run_experiment(c), first);
    write_curve_csv(run_experiment(c), second);
    CHECK(first.str() == second.str());
    CHECK(line_count(first.str()) == 61);
    if (a != Algorithm::lms) CHECK(first.str().find("nan") != std::string::npos);
  }
  c.algorithm = Algorithm::lms;
  const LearningCurve a = run_experiment(c);
  c.seed += 1;
  CHECK((run_experiment(c).msd - a.msd).norm() > 0.0);
}

TEST_CASE("sampling sources") {
  ExperimentConfig c = parse_config(kSmall);
  const Instance inst = build_instance(c);
  CHECK(resolve_sampling(c, inst).probs() == Vector::Ones(10));
  c.sampling = "max_det";
  c.sample_count = 4;
  CHECK(resolve_sampling(c, inst).probs().sum() == 4.0);
  c.sampling = "leverage_score";
  CHECK(resolve_sampling(c, inst).probs().sum() == 4.0);
  c.sampling = "uniform";
  CHECK(resolve_sampling(c, inst).probs().sum() == 4.0);
  c.sample_count = 11;
  CHECK_THROWS_AS(resolve_sampling(c, inst), ConfigError);
  c.sampling = "explicit";
  c.probs = Vector::Constant(9, 0.5);
  CHECK_THROWS_AS(resolve_sampling(c, inst), ConfigError);
  c.probs = Vector::Constant(10, 1.5);
  CHECK_THROWS_AS(resolve_sampling(c, inst), ConfigError);
}

TEST_CASE("design output files") {
  ExperimentConfig c = parse_config(kSmall);
  c.sampling = "design";
  c.design_problem = "sca_min_rate";
  c.msd_target = 4e-3;
  const Instance inst = build_instance(c);
  const DesignResult r = run_design(c, inst);
  std::ostringstream trace;
  write_trace_csv(r.trace, trace);
  CHECK(line_count(trace.str()) == static_cast<std::size_t>(r.trace.iterations) + 2);
  CHECK(trace.str().rfind("iteration,objective,msd\n", 0) == 0);
  std::ostringstream probs;
  write_probabilities_csv(r.p, inst.noise, Vector::Ones(10), probs);
  CHECK(line_count(probs.str()) == 11);
  CHECK(resolve_sampling(c, inst).probs() == r.p);
}

TEST_CASE("sampling comparison") {
  ExperimentConfig c = parse_config(kSmall);
  c.msd_target = 4e-3;
  c.uniform_seeds = 5;
  const auto rows = compare_sampling(c, {0.98, 0.95});
  REQUIRE(rows.size() == 2);
  for (const ComparisonRow& r : rows) {
    CHECK(std::isfinite(r.designed));
    CHECK(r.designed <= r.max_det + 1e-9);
    CHECK(r.designed <= r.leverage_score + 1e-9);
    CHECK(r.designed <= r.uniform_mean + 1e-9);
  }
  CHECK(rows[0].designed <= rows[1].designed + 1e-9);  // a smaller alpha_bar asks for a faster rate
  std::ostringstream out;
  write_comparison_csv(rows, out);
  CHECK(line_count(out.str()) == 3);
}

TEST_CASE("a frozen filter gives a flat curve") {
  ExperimentConfig c = parse_config(kSmall);
  c.mu = 0.0;
  c.trials = 1;
  c.horizon = 1;
  const Instance inst = build_instance(c);
  const LearningCurve lc = run_experiment(c);
  REQUIRE(lc.msd.size() == 1);
  CHECK(lc.msd(0) == doctest::Approx(inst.x_true.squaredNorm()).epsilon(1e-14));
  c.horizon = 20;
  const LearningCurve flat = run_experiment(c);
  CHECK((flat.msd.array() == flat.msd(0)).all());
}

TEST_CASE("fitted LMS rate with full sampling") {
  ExperimentConfig c = parse_config(kSmall);
  c.mu = 0.01;
  c.horizon = 2000;
  c.trials = 50;
  const LearningCurve lc = run_experiment(c);
  CHECK(std::abs(fit_rate(lc.msd) - (1.0 - 2.0 * 0.01)) < 0.02);
  Vector scaled(300);
  for (Index n = 0; n < 300; ++n) scaled(n) = 7.0 * std::pow(0.97, static_cast<double>(n));
  CHECK(std::abs(fit_rate(scaled) - 0.97) < 1e-6);
}

TEST_CASE("a vacuous design samples nothing") {
  ExperimentConfig c = parse_config(kSmall);
  c.sampling = "design";
  c.rate_target = 1.0 - 1e-12;
  c.msd_target = 1e6;
  const Instance inst = build_instance(c);
  CHECK(run_design(c, inst).p.maxCoeff() < 1e-6);
}
