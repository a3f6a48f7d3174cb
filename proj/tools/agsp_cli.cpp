// Command-line front end: experiments, designs and theory reports from a JSON config.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "agsp/adaptive.hpp"
#include "agsp/experiment.hpp"

namespace fs = std::filesystem;
using namespace agsp;

namespace {

struct CommonArgs {
  std::string config;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
};

ExperimentConfig load(const CommonArgs& args) {
  ExperimentConfig c = args.config.empty() ? parse_config(R"({"version": 1})") : load_config(args.config);
  if (args.seed) c.seed = *args.seed;
  if (args.trials) {
    if (*args.trials < 1) throw ConfigError("--trials", "must be at least 1");
    c.trials = *args.trials;
  }
  return c;
}

std::ofstream open_out(const CommonArgs& args, const std::string& name) {
  fs::create_directories(args.out);
  const fs::path path = fs::path(args.out) / name;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  std::cout << "wrote " << path.string() << '\n';
  return out;
}

void run_curve(const CommonArgs& args, Algorithm algorithm) {
  ExperimentConfig c = load(args);
  c.algorithm = algorithm;
  const LearningCurve lc = run_experiment(c);
  auto out = open_out(args, "curve.csv");
  write_curve_csv(lc, out);
  if (algorithm == Algorithm::drls) {
    auto central = open_out(args, "centralized.csv");
    write_centralized_csv(lc, central);
  }
  std::cout << "steady-state MSD " << to_db(steady_state(lc.msd)) << " dB, theory " << to_db(lc.theory_msd)
            << " dB\n";
}

void run_design_cmd(const CommonArgs& args) {
  const ExperimentConfig c = load(args);
  const Instance inst = build_instance(c);
  const DesignResult res = run_design(c, inst);
  auto p_out = open_out(args, "probabilities.csv");
  write_probabilities_csv(res.p, inst.noise, design_spec(c, inst).upper_bounds(), p_out);
  auto t_out = open_out(args, "trace.csv");
  write_trace_csv(res.trace, t_out);
  std::cout << "total sampling rate " << res.p.sum() << " after " << res.trace.iterations << " iterations"
            << (res.trace.converged ? "" : " (not converged)") << '\n';
}

void run_theory(const CommonArgs& args) {
  const ExperimentConfig c = load(args);
  const Instance inst = build_instance(c);
  const SamplingProbabilities p = resolve_sampling(c, inst);
  const Vector& pv = p.probs();
  auto out = open_out(args, "theory.csv");
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  out << "quantity,value\n";
  out << "lambda_min," << reconstructability_lambda(pv, inst.bandlimit) << '\n';
  out << "total_rate," << p.total_rate() << '\n';
  out << "lms_step_bound," << lms_step_bound(pv, inst.bandlimit) << '\n';
  out << "lms_rate," << lms_rate_theory(pv, c.mu, inst.bandlimit) << '\n';
  out << "lms_msd," << lms_msd_theory(pv, c.mu, inst.noise, inst.bandlimit) << '\n';
  out << "lms_msd_upper_bound," << lms_msd_upper_bound(pv, c.mu, inst.noise, inst.bandlimit) << '\n';
  out << "rls_msd," << rls_msd_theory(pv, c.beta, inst.noise, inst.bandlimit) << '\n';
}

void run_compare(const CommonArgs& args) {
  const ExperimentConfig c = load(args);
  const std::vector<double> grid = c.alpha_grid.empty() ? std::vector<double>{c.rate_target} : c.alpha_grid;
  const auto rows = compare_sampling(c, grid);
  auto out = open_out(args, "compare.csv");
  write_comparison_csv(rows, out);
}

void run_gen_graph(const CommonArgs& args) {
  const ExperimentConfig c = load(args);
  const Graph g = build_graph(c.graph);
  auto out = open_out(args, "graph.edges");
  write_edge_list(g, out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive sampling and reconstruction of bandlimited graph signals"};
  app.require_subcommand(1);
  CommonArgs args;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", args.config, "experiment configuration (JSON)");
    sub->add_option("--out", args.out, "output directory")->capture_default_str();
    sub->add_option("--seed", args.seed, "override the experiment seed");
    sub->add_option("--trials", args.trials, "override the Monte-Carlo trial count");
  };

  struct Command {
    const char* name;
    const char* help;
    std::function<void()> run;
  };
  const std::vector<Command> commands{
      {"design", "solve the configured sampling-design problem", [&] { run_design_cmd(args); }},
      {"run-lms", "LMS learning curve", [&] { run_curve(args, Algorithm::lms); }},
      {"run-rls", "RLS learning curve", [&] { run_curve(args, Algorithm::rls); }},
      {"run-drls", "distributed RLS learning curve", [&] { run_curve(args, Algorithm::drls); }},
      {"theory", "closed-form MSD, rate and step bound", [&] { run_theory(args); }},
      {"compare-sampling", "sampling rate of designed vs baseline strategies", [&] { run_compare(args); }},
      {"gen-graph", "write the configured graph as an edge list", [&] { run_gen_graph(args); }},
  };
  for (const Command& cmd : commands) {
    CLI::App* sub = app.add_subcommand(cmd.name, cmd.help);
    add_common(sub);
    sub->callback(cmd.run);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << " (best achievable " << e.best_achievable() << ")\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
