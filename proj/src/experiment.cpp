#include "agsp/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <thread>

#include "agsp/adaptive.hpp"
#include "agsp/distributed.hpp"

namespace agsp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Rng signal_rng(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), 0x5eedu};
  return Rng(seq);
}

Vector standard_normal(Index n, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = gauss(rng);
  return v;
}

struct TrialOutput {
  Vector curve;
  Vector centralized;
};

TrialOutput run_trial(const ExperimentConfig& config, const Instance& inst, const SamplingProbabilities& p,
                      const CommGraph* comm, int trial) {
  Rng rng(config.seed + static_cast<std::uint64_t>(trial));
  const Bandlimit& b = inst.bandlimit;
  const Index horizon = config.horizon;
  TrialOutput out;
  out.curve = Vector::Zero(horizon);

  switch (config.algorithm) {
    case Algorithm::lms: {
      const Vector x0 =
          config.random_init ? synthesize(b, standard_normal(b.bandwidth(), rng)) : Vector::Zero(b.nodes());
      LmsState state = LmsState::init(b, x0, config.mu);
      for (Index t = 0; t < horizon; ++t) {
        out.curve(t) = (state.estimate - inst.x_true).squaredNorm();
        const SamplingDraw draw = draw_sampling_set(p, rng);
        const Vector y = observe(inst.x_true, draw, inst.noise, rng);
        state = lms_step(state, y, draw, b);
      }
      break;
    }
    case Algorithm::rls: {
      RlsState state = rls_init(b, config.beta, config.delta);
      for (Index t = 0; t < horizon; ++t) {
        out.curve(t) = (rls_estimate(state, b) - inst.x_true).squaredNorm();
        const SamplingDraw draw = draw_sampling_set(p, rng);
        const Vector y = observe(inst.x_true, draw, inst.noise, rng);
        state = rls_step(state, y, draw, inst.noise, b);
      }
      break;
    }
    case Algorithm::drls: {
      DrlsConfig dc;
      dc.rho = config.rho;
      dc.inner_iters = config.inner_iters;
      dc.beta = config.beta;
      dc.delta = config.delta;
      const DrlsRun run = drls_run(*comm, b, inst.noise, p, dc, horizon, inst.x_true, rng);
      out.curve = run.node_errors.colwise().mean().transpose();
      out.centralized = run.centralized;
      break;
    }
  }
  return out;
}

// Smallest prefix of `order` (nodes at p_max) meeting the rate and exact MSD targets.
double prefix_count(const std::vector<Index>& order, const DesignSpec& spec) {
  const Vector ub = spec.upper_bounds();
  Vector p = Vector::Zero(ub.size());
  const double target = spec.lambda_target();
  for (std::size_t k = 0; k < order.size(); ++k) {
    p(order[k]) = ub(order[k]);
    if (reconstructability_lambda(p, spec.bandlimit) < target) continue;
    try {
      if (lms_msd_theory(p, spec.mu, spec.noise, spec.bandlimit) <= spec.msd_target) {
        return static_cast<double>(k + 1);
      }
    } catch (const ReconstructabilityError&) {
    }
  }
  return kInf;
}

}  // namespace

Graph build_graph(const GraphSource& source) {
  if (source.edge_list) return load_edge_list(*source.edge_list);
  return connected_random_geometric_graph(source.nodes, source.radius, source.seed).graph;
}

Instance build_instance(const ExperimentConfig& config) {
  Graph g = build_graph(config.graph);
  const Index n = g.size();
  SpectralBasis basis = eigendecompose(build_laplacian(g));
  if (config.freq_set.empty() && config.bandwidth > n) {
    throw ConfigError("bandlimit.size", "exceeds the number of nodes");
  }
  for (Index k : config.freq_set) {
    if (k >= n) throw ConfigError("bandlimit.indices", "index exceeds the number of nodes");
  }
  Bandlimit b = config.freq_set.empty() ? Bandlimit::lowest(basis, config.bandwidth) : Bandlimit(basis, config.freq_set);
  Vector var;
  if (config.noise.size() == 1) {
    var = Vector::Constant(n, config.noise(0));
  } else if (config.noise.size() == n) {
    var = config.noise;
  } else {
    throw ConfigError("noise.variances", "needs one entry per node");
  }
  Rng rng = signal_rng(config.seed);
  Vector x = synthesize(b, standard_normal(b.bandwidth(), rng));
  return {std::move(g), std::move(basis), std::move(b), NoiseModel(std::move(var)), std::move(x)};
}

DesignSpec design_spec(const ExperimentConfig& config, const Instance& inst) {
  DesignSpec spec(inst.bandlimit, inst.noise);
  spec.mu = config.mu;
  spec.beta = config.beta;
  spec.rate_target = config.rate_target;
  spec.msd_target = config.msd_target;
  spec.budget = config.budget;
  if (config.bounds.size() != 0) {
    if (config.bounds.size() != inst.bandlimit.nodes()) throw ConfigError("sampling.bounds", "needs one entry per node");
    spec.bounds = config.bounds;
  }
  return spec;
}

DesignResult run_design(const ExperimentConfig& config, const Instance& inst) {
  const DesignSpec spec = design_spec(config, inst);
  const std::string& which = config.design_problem;
  if (which == "min_rate_convex") return solve_min_rate_convex(spec);
  if (which == "sca_min_rate") return sca_min_rate(spec);
  if (which == "dinkelbach") return dinkelbach_min_msd(spec);
  if (which == "sca_min_msd") return sca_min_msd(spec);
  return solve_rls_design(spec);
}

SamplingProbabilities resolve_sampling(const ExperimentConfig& config, const Instance& inst) {
  const Index n = inst.bandlimit.nodes();
  const std::string& src = config.sampling;
  if (src == "full") return SamplingProbabilities::constant(n, 1.0);
  if (src == "constant") return SamplingProbabilities::constant(n, config.constant);
  if (src == "explicit") {
    if (config.probs.size() != n) throw ConfigError("sampling.probs", "needs one entry per node");
    try {
      return SamplingProbabilities(config.probs);
    } catch (const InvariantError& e) {
      throw ConfigError("sampling.probs", e.what());
    }
  }
  if (src == "design") {
    const DesignSpec spec = design_spec(config, inst);
    return SamplingProbabilities(run_design(config, inst).p, spec.upper_bounds());
  }
  if (config.sample_count < 1 || config.sample_count > n) {
    throw ConfigError("sampling.count", "must lie in [1, n] for a node-selection strategy");
  }
  const auto m = static_cast<std::size_t>(config.sample_count);
  std::vector<Index> order;
  if (src == "max_det") {
    order = max_det_greedy(inst.bandlimit, config.sample_count, inst.noise).order;
  } else if (src == "leverage_score") {
    order = leverage_score_order(inst.bandlimit);
  } else {
    Rng rng(config.seed);
    order = uniform_random_order(n, rng);
  }
  IndexSet chosen(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(m));
  std::sort(chosen.begin(), chosen.end());
  return SamplingProbabilities::indicator(chosen, n);
}

double to_db(double linear) { return 10.0 * std::log10(linear); }

LearningCurve run_experiment(const ExperimentConfig& config) {
  const Instance inst = build_instance(config);
  const SamplingProbabilities p = resolve_sampling(config, inst);

  std::optional<CommGraph> comm;
  if (config.algorithm == Algorithm::drls) {
    comm = config.comm_graph ? CommGraph::from_graph(build_graph(*config.comm_graph)) : CommGraph::from_graph(inst.graph);
    if (comm->size() != inst.graph.size()) throw ConfigError("algorithm.comm_graph", "node count differs from the graph");
  }

  LearningCurve lc;
  lc.config_hash = config.hash;
  lc.theory_rate = kNaN;
  try {
    if (config.algorithm == Algorithm::lms) {
      lc.theory_msd = lms_msd_theory(p.probs(), config.mu, inst.noise, inst.bandlimit);
      lc.theory_rate = lms_rate_theory(p.probs(), config.mu, inst.bandlimit);
    } else {
      lc.theory_msd = rls_msd_theory(p.probs(), config.beta, inst.noise, inst.bandlimit);
    }
  } catch (const std::exception&) {
    lc.theory_msd = kNaN;
  }

  const int trials = config.trials;
  std::vector<TrialOutput> results(static_cast<std::size_t>(trials));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(trials));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int t = next++; t < trials; t = next++) {
      try {
        results[static_cast<std::size_t>(t)] = run_trial(config, inst, p, comm ? &*comm : nullptr, t);
      } catch (...) {
        errors[static_cast<std::size_t>(t)] = std::current_exception();
      }
    }
  };
  {
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const unsigned count = std::min<unsigned>(hw, static_cast<unsigned>(trials));
    std::vector<std::jthread> pool;
    for (unsigned w = 1; w < count; ++w) pool.emplace_back(worker);
    worker();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  lc.msd = Vector::Zero(config.horizon);
  if (config.algorithm == Algorithm::drls) lc.centralized = Vector::Zero(config.horizon);
  for (const TrialOutput& r : results) {
    lc.msd += r.curve;
    if (config.algorithm == Algorithm::drls) lc.centralized += r.centralized;
  }
  lc.msd /= static_cast<double>(trials);
  if (config.algorithm == Algorithm::drls) lc.centralized /= static_cast<double>(trials);
  return lc;
}

double steady_state(const Vector& curve) {
  if (curve.size() == 0) throw InvariantError("steady_state: empty curve");
  const Index tail = std::max<Index>(1, curve.size() / 4);
  return curve.tail(tail).mean();
}

double fit_rate(const Vector& curve) {
  if (curve.size() < 2) return 1.0;
  const double ss = steady_state(curve);
  const double limit = ss * std::pow(10.0, 0.3);  // 3 dB above steady state
  Index end = 0;
  while (end < curve.size() && curve(end) > limit && curve(end) > 0.0) ++end;
  if (end < 2) return 1.0;
  const Vector x = Vector::LinSpaced(end, 0.0, static_cast<double>(end - 1));
  const Vector y = curve.head(end).array().log();
  const double xm = x.mean();
  const double ym = y.mean();
  const double slope = (x.array() - xm).matrix().dot((y.array() - ym).matrix()) / (x.array() - xm).square().sum();
  return std::exp(slope);
}

std::vector<ComparisonRow> compare_sampling(const ExperimentConfig& config, const std::vector<double>& alpha_grid) {
  const Instance inst = build_instance(config);
  const Index n = inst.bandlimit.nodes();
  const std::vector<Index> max_det = max_det_greedy(inst.bandlimit, n, inst.noise).order;
  const std::vector<Index> leverage = leverage_score_order(inst.bandlimit);
  std::vector<std::vector<Index>> uniform;
  for (int s = 0; s < config.uniform_seeds; ++s) {
    Rng rng(config.seed + static_cast<std::uint64_t>(s));
    uniform.push_back(uniform_random_order(n, rng));
  }

  std::vector<ComparisonRow> rows;
  for (double alpha : alpha_grid) {
    ExperimentConfig c = config;
    c.rate_target = alpha;
    const DesignSpec spec = design_spec(c, inst);
    ComparisonRow row;
    row.alpha_bar = alpha;
    try {
      row.designed = sca_min_rate(spec).p.sum();
    } catch (const InfeasibleError&) {
      row.designed = kInf;
    }
    row.max_det = prefix_count(max_det, spec);
    row.leverage_score = prefix_count(leverage, spec);
    std::vector<double> counts;
    for (const auto& order : uniform) counts.push_back(prefix_count(order, spec));
    const double mean = std::accumulate(counts.begin(), counts.end(), 0.0) / static_cast<double>(counts.size());
    double var = 0.0;
    for (double v : counts) var += (v - mean) * (v - mean);
    row.uniform_mean = mean;
    row.uniform_std = counts.size() > 1 && std::isfinite(mean) ? std::sqrt(var / static_cast<double>(counts.size() - 1))
                                                                 : 0.0;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace agsp
