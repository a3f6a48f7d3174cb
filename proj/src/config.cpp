#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "agsp/experiment.hpp"

namespace agsp {

namespace {

using nlohmann::json;

constexpr int kConfigVersion = 1;

// Field access with dotted-path diagnostics.
class Node {
 public:
  Node(const json& j, std::string path) : j_(j), path_(std::move(path)) {}

  void only(std::initializer_list<const char*> keys) const {
    if (!j_.is_object()) throw ConfigError(name(), "expected an object");
    const std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& item : j_.items()) {
      if (!allowed.count(item.key())) throw ConfigError(child(item.key()), "unknown field");
    }
  }

  bool has(const char* key) const { return j_.contains(key); }
  Node at(const char* key) const { return Node(j_.at(key), child(key)); }

  double number(const char* key, double fallback) const {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_number()) throw ConfigError(child(key), "expected a number");
    return v.get<double>();
  }

  long long integer(const char* key, long long fallback) const {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_number_integer()) throw ConfigError(child(key), "expected an integer");
    return v.get<long long>();
  }

  std::string text(const char* key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_string()) throw ConfigError(child(key), "expected a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const char* key) const {
    const json& v = j_.at(key);
    if (!v.is_array()) throw ConfigError(child(key), "expected an array of numbers");
    std::vector<double> out;
    for (const json& e : v) {
      if (!e.is_number()) throw ConfigError(child(key), "expected an array of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  std::string child(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  const std::string& name() const { return path_; }

 private:
  const json& j_;
  std::string path_;
};

Vector to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Index>(v.size()));
}

void require(bool ok, const std::string& field, const std::string& message) {
  if (!ok) throw ConfigError(field, message);
}

GraphSource parse_graph(const Node& n) {
  n.only({"type", "nodes", "radius", "seed", "path"});
  GraphSource g;
  const std::string type = n.text("type", "random_geometric");
  if (type == "edge_list") {
    require(n.has("path"), n.child("path"), "required for an edge-list graph");
    g.edge_list = n.text("path", "");
    require(std::filesystem::exists(*g.edge_list), n.child("path"), "file does not exist: " + g.edge_list->string());
  } else {
    require(type == "random_geometric", n.child("type"), "must be random_geometric or edge_list");
  }
  g.nodes = n.integer("nodes", g.nodes);
  g.radius = n.number("radius", g.radius);
  g.seed = static_cast<std::uint64_t>(n.integer("seed", static_cast<long long>(g.seed)));
  require(g.nodes >= 2, n.child("nodes"), "must be at least 2");
  require(g.radius > 0.0 && g.radius <= std::sqrt(2.0), n.child("radius"), "must lie in (0, sqrt(2)]");
  return g;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("document", std::string("invalid JSON: ") + e.what());
  }
  const Node root(doc, "");
  root.only({"version", "graph", "bandlimit", "noise", "algorithm", "sampling", "run", "compare"});
  require(root.has("version"), "version", "required");
  require(root.integer("version", 0) == kConfigVersion, "version", "unsupported; expected 1");

  ExperimentConfig c;
  if (root.has("graph")) c.graph = parse_graph(root.at("graph"));

  if (root.has("bandlimit")) {
    const Node b = root.at("bandlimit");
    b.only({"size", "indices"});
    require(b.has("size") != b.has("indices"), "bandlimit", "give exactly one of size or indices");
    if (b.has("size")) {
      c.bandwidth = b.integer("size", 0);
      require(c.bandwidth >= 1, "bandlimit.size", "must be at least 1");
    } else {
      for (double v : b.numbers("indices")) {
        require(v >= 0 && v == std::floor(v), "bandlimit.indices", "entries must be nonnegative integers");
        c.freq_set.push_back(static_cast<Index>(v));
      }
      require(!c.freq_set.empty(), "bandlimit.indices", "must not be empty");
    }
  }

  c.noise = Vector::Constant(1, 0.01);
  if (root.has("noise")) {
    const Node v = root.at("noise");
    v.only({"variance", "variances"});
    require(v.has("variance") != v.has("variances"), "noise", "give exactly one of variance or variances");
    c.noise = v.has("variance") ? Vector::Constant(1, v.number("variance", 0.0)) : to_vector(v.numbers("variances"));
    for (Index i = 0; i < c.noise.size(); ++i) {
      require(c.noise(i) > 0.0 && std::isfinite(c.noise(i)), "noise", "variances must be positive");
    }
  }

  if (root.has("algorithm")) {
    const Node a = root.at("algorithm");
    a.only({"name", "mu", "beta", "delta", "rho", "inner_iters", "comm_graph"});
    const std::string name = a.text("name", "lms");
    if (name == "lms") {
      c.algorithm = Algorithm::lms;
    } else if (name == "rls") {
      c.algorithm = Algorithm::rls;
    } else if (name == "drls") {
      c.algorithm = Algorithm::drls;
    } else {
      throw ConfigError("algorithm.name", "must be lms, rls or drls");
    }
    c.mu = a.number("mu", c.mu);
    c.beta = a.number("beta", c.beta);
    c.delta = a.number("delta", c.delta);
    c.rho = a.number("rho", c.rho);
    c.inner_iters = static_cast<int>(a.integer("inner_iters", c.inner_iters));
    if (a.has("comm_graph")) c.comm_graph = parse_graph(a.at("comm_graph"));
    require(c.mu >= 0.0, "algorithm.mu", "must be nonnegative");
    require(c.beta > 0.0 && c.beta <= 1.0, "algorithm.beta", "must lie in (0, 1]");
    require(c.delta > 0.0, "algorithm.delta", "must be positive");
    require(c.rho > 0.0, "algorithm.rho", "must be positive");
    require(c.inner_iters >= 1, "algorithm.inner_iters", "must be at least 1");
  }

  if (root.has("sampling")) {
    const Node s = root.at("sampling");
    s.only({"source", "probs", "value", "count", "problem", "rate_target", "msd_target", "msd_target_db", "budget",
            "bounds"});
    c.sampling = s.text("source", c.sampling);
    const std::set<std::string> sources{"full", "explicit", "constant", "design", "max_det", "leverage_score", "uniform"};
    require(sources.count(c.sampling) > 0, "sampling.source",
            "must be full, explicit, constant, design, max_det, leverage_score or uniform");
    if (c.sampling == "explicit") {
      require(s.has("probs"), "sampling.probs", "required for explicit sampling");
      c.probs = to_vector(s.numbers("probs"));
    }
    c.constant = s.number("value", c.constant);
    require(c.constant >= 0.0 && c.constant <= 1.0, "sampling.value", "must lie in [0, 1]");
    c.sample_count = s.integer("count", c.sample_count);
    require(c.sample_count >= 0, "sampling.count", "must be nonnegative");
    c.design_problem = s.text("problem", c.design_problem);
    const std::set<std::string> problems{"min_rate_convex", "sca_min_rate", "dinkelbach", "sca_min_msd", "rls"};
    require(problems.count(c.design_problem) > 0, "sampling.problem",
            "must be min_rate_convex, sca_min_rate, dinkelbach, sca_min_msd or rls");
    c.rate_target = s.number("rate_target", c.rate_target);
    require(c.rate_target > 0.0 && c.rate_target < 1.0, "sampling.rate_target", "must lie in (0, 1)");
    require(!(s.has("msd_target") && s.has("msd_target_db")), "sampling", "give at most one of msd_target, msd_target_db");
    if (s.has("msd_target_db")) c.msd_target = std::pow(10.0, s.number("msd_target_db", 0.0) / 10.0);
    c.msd_target = s.number("msd_target", c.msd_target);
    require(c.msd_target > 0.0, "sampling.msd_target", "must be positive");
    c.budget = s.number("budget", c.budget);
    require(c.budget >= 0.0, "sampling.budget", "must be nonnegative");
    if (s.has("bounds")) c.bounds = to_vector(s.numbers("bounds"));
  }

  if (root.has("run")) {
    const Node r = root.at("run");
    r.only({"horizon", "trials", "seed", "init"});
    c.horizon = r.integer("horizon", c.horizon);
    c.trials = static_cast<int>(r.integer("trials", c.trials));
    c.seed = static_cast<std::uint64_t>(r.integer("seed", static_cast<long long>(c.seed)));
    const std::string init = r.text("init", "zero");
    require(init == "zero" || init == "random", "run.init", "must be zero or random");
    c.random_init = init == "random";
    require(c.horizon >= 1, "run.horizon", "must be at least 1");
    require(c.trials >= 1, "run.trials", "must be at least 1");
  }

  if (root.has("compare")) {
    const Node m = root.at("compare");
    m.only({"alpha_grid", "uniform_seeds"});
    if (m.has("alpha_grid")) c.alpha_grid = m.numbers("alpha_grid");
    for (double a : c.alpha_grid) require(a > 0.0 && a < 1.0, "compare.alpha_grid", "entries must lie in (0, 1)");
    c.uniform_seeds = static_cast<int>(m.integer("uniform_seeds", c.uniform_seeds));
    require(c.uniform_seeds >= 1, "compare.uniform_seeds", "must be at least 1");
  }

  std::ostringstream hex;
  hex << std::hex << fnv1a(doc.dump());
  c.hash = hex.str();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace agsp
