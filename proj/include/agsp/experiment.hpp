#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "agsp/design.hpp"
#include "agsp/graph.hpp"
#include "agsp/sampling.hpp"

namespace agsp {

/// Either a random geometric graph or an edge-list file.
struct GraphSource {
  std::optional<std::filesystem::path> edge_list;
  Index nodes = 20;
  double radius = 0.4;
  std::uint64_t seed = 1;
};

enum class Algorithm { lms, rls, drls };

/// One experiment, loaded from a version-1 JSON document (see README).
struct ExperimentConfig {
  GraphSource graph;
  Index bandwidth = 5;   // lowest |F| frequencies unless freq_set is given
  IndexSet freq_set;
  Vector noise;          // one variance per node, or a single shared variance

  Algorithm algorithm = Algorithm::lms;
  double mu = 0.1;
  double beta = 0.95;
  double delta = 1e-3;
  double rho = 1.0;
  int inner_iters = 1;
  std::optional<GraphSource> comm_graph;  // DRLS topology; defaults to the processing graph

  // full | explicit | constant | design | max_det | leverage_score | uniform
  std::string sampling = "full";
  Vector probs;
  double constant = 1.0;
  Index sample_count = 0;
  // min_rate_convex | sca_min_rate | dinkelbach | sca_min_msd | rls
  std::string design_problem = "min_rate_convex";
  double rate_target = 0.95;
  double msd_target = 1e-3;  // linear
  double budget = std::numeric_limits<double>::infinity();
  Vector bounds;

  Index horizon = 1000;
  int trials = 200;
  std::uint64_t seed = 1;
  bool random_init = false;  // LMS start: zero, or a random bandlimited vector

  std::vector<double> alpha_grid;
  int uniform_seeds = 200;

  std::string hash;  // FNV-1a of the canonical document
};

/// Throws ConfigError naming the offending field.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Graph, bandlimit, noise and true signal built from a configuration.
struct Instance {
  Graph graph;
  SpectralBasis basis;
  Bandlimit bandlimit;
  NoiseModel noise;
  Vector x_true;  // U_F s with s ~ N(0, I) drawn from the experiment seed
};

Graph build_graph(const GraphSource& source);
Instance build_instance(const ExperimentConfig& config);
DesignSpec design_spec(const ExperimentConfig& config, const Instance& instance);

/// Runs the configured design problem.
DesignResult run_design(const ExperimentConfig& config, const Instance& instance);

/// Resolves the configured sampling source to probabilities.
SamplingProbabilities resolve_sampling(const ExperimentConfig& config, const Instance& instance);

struct LearningCurve {
  Vector msd;          // trial-averaged squared deviation per iteration, linear
  Vector centralized;  // DRLS only: centralised RLS on the same draws
  double theory_msd = 0.0;
  double theory_rate = 0.0;  // NaN when the algorithm has no rate prediction
  std::string config_hash;
};

double to_db(double linear);

/// Monte-Carlo learning curve over config.trials independent trials; trial t
/// uses seed + t. Trials run on worker threads and are reduced in trial order.
LearningCurve run_experiment(const ExperimentConfig& config);

/// Mean of the final quarter of the curve.
double steady_state(const Vector& curve);

/// Geometric per-iteration factor from a log-linear fit over the transient:
/// from n = 0 until the curve first comes within 3 dB of its steady state.
/// Returns 1 when fewer than two points qualify.
double fit_rate(const Vector& curve);

struct ComparisonRow {
  double alpha_bar = 0.0;
  double designed = 0.0;
  double max_det = 0.0;
  double leverage_score = 0.0;
  double uniform_mean = 0.0;
  double uniform_std = 0.0;
};

/// Minimal sampling rate meeting the rate and exact MSD constraints at each
/// alpha_bar: the SCA design against node counts of the greedy baselines.
/// Infeasible entries are +inf.
std::vector<ComparisonRow> compare_sampling(const ExperimentConfig& config, const std::vector<double>& alpha_grid);

void write_curve_csv(const LearningCurve& curve, std::ostream& out);
void write_centralized_csv(const LearningCurve& curve, std::ostream& out);
void write_comparison_csv(const std::vector<ComparisonRow>& rows, std::ostream& out);
void write_probabilities_csv(const Vector& p, const NoiseModel& noise, const Vector& bounds, std::ostream& out);
void write_trace_csv(const SolverTrace& trace, std::ostream& out);

}  // namespace agsp
