#include "agsp/distributed.hpp"

#include <algorithm>
#include <cmath>

#include "agsp/adaptive.hpp"
#include "agsp/linalg.hpp"

namespace agsp {

namespace {

void check_size(Index got, Index want, const char* what) {
  if (got != want) throw DimensionError(std::string(what) + ": dimension mismatch");
}

}  // namespace

CommGraph::CommGraph(std::vector<IndexSet> neighbors) : neighbors_(std::move(neighbors)) {
  const Index n = size();
  if (n < 1) throw InvariantError("communication graph needs at least one node");
  Matrix w = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    IndexSet& list = neighbors_[static_cast<std::size_t>(i)];
    std::sort(list.begin(), list.end());
    if (std::adjacent_find(list.begin(), list.end()) != list.end()) {
      throw InvariantError("duplicate neighbour of node " + std::to_string(i));
    }
    for (Index j : list) {
      if (j < 0 || j >= n) throw InvariantError("neighbour index out of range at node " + std::to_string(i));
      if (j == i) throw InvariantError("self loop at node " + std::to_string(i));
      w(i, j) = 1.0;
    }
  }
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (w(i, j) != w(j, i)) {
        throw InvariantError("communication graph not symmetric: " + std::to_string(i) + " -> " + std::to_string(j));
      }
    }
  }
  if (!is_connected(Graph(std::move(w)))) throw InvariantError("communication graph is not connected");
}

CommGraph CommGraph::from_graph(const Graph& g) { return CommGraph(g.neighbors()); }

CommGraph CommGraph::complete(Index n) {
  std::vector<IndexSet> nb(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (j != i) nb[static_cast<std::size_t>(i)].push_back(j);
    }
  }
  return CommGraph(std::move(nb));
}

CommGraph CommGraph::ring(Index n) {
  if (n < 3) throw InvariantError("ring needs at least three nodes");
  std::vector<IndexSet> nb(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) nb[static_cast<std::size_t>(i)] = {(i + n - 1) % n, (i + 1) % n};
  return CommGraph(std::move(nb));
}

Index CommGraph::edge_count() const {
  Index twice = 0;
  for (const IndexSet& list : neighbors_) twice += static_cast<Index>(list.size());
  return twice / 2;
}

void DrlsConfig::validate() const {
  if (!(rho > 0.0) || !std::isfinite(rho)) throw InvariantError("rho must be positive");
  if (inner_iters < 1) throw InvariantError("inner iterations K must be at least 1");
  if (!(beta > 0.0 && beta <= 1.0)) throw InvariantError("beta must lie in (0, 1]");
  if (!(delta > 0.0) || !std::isfinite(delta)) throw InvariantError("delta must be positive");
}

DrlsNetwork drls_init(const CommGraph& comm, const Bandlimit& b, const DrlsConfig& config) {
  config.validate();
  check_size(comm.size(), b.nodes(), "drls_init");
  const Index f = b.bandwidth();
  const double share = config.delta / static_cast<double>(comm.size());
  DrlsNetwork net;
  net.nodes.resize(static_cast<std::size_t>(comm.size()));
  for (Index i = 0; i < comm.size(); ++i) {
    NodeState& node = net.nodes[static_cast<std::size_t>(i)];
    node.psi_mat = share * Matrix::Identity(f, f);
    node.psi_vec = Vector::Zero(f);
    node.estimate = Vector::Zero(f);
    for (Index j : comm.neighbors(i)) node.multipliers[j] = Vector::Zero(f);
  }
  return net;
}

NodeState drls_sense(const NodeState& node, double y_i, bool sampled, double noise_var, const Vector& u_row,
                     double beta) {
  check_size(u_row.size(), node.psi_vec.size(), "drls_sense");
  NodeState next = node;
  next.psi_mat *= beta;
  next.psi_vec *= beta;
  if (sampled) {
    next.psi_mat.noalias() += u_row * u_row.transpose() / noise_var;
    next.psi_vec += (y_i / noise_var) * u_row;
  }
  return next;
}

Vector drls_local_update(const NodeState& node, const std::map<Index, Vector>& neighbor_estimates,
                         const std::map<Index, Vector>& incoming, double rho) {
  Vector rhs = node.psi_vec;
  for (const auto& [j, s_j] : neighbor_estimates) {
    const auto own = node.multipliers.find(j);
    const auto in = incoming.find(j);
    if (own == node.multipliers.end() || in == incoming.end()) {
      throw DimensionError("drls_local_update: missing multiplier for neighbour " + std::to_string(j));
    }
    rhs += rho * s_j - 0.5 * (own->second - in->second);
  }
  Matrix lhs = node.psi_mat;
  lhs.diagonal().array() += rho * static_cast<double>(neighbor_estimates.size());
  return linalg::spd_factor(lhs, "drls_local_update").solve(rhs);
}

Vector drls_multiplier_update(const Vector& lambda_ij, const Vector& s_hat_i, const Vector& s_hat_j, double rho) {
  return lambda_ij + 0.5 * rho * (s_hat_i - s_hat_j);
}

DrlsNetwork drls_round(const DrlsNetwork& network, const CommGraph& comm, const Vector& y, const SamplingDraw& draw,
                       const NoiseModel& noise, const Bandlimit& b, const DrlsConfig& config) {
  config.validate();
  const Index n = comm.size();
  check_size(static_cast<Index>(network.nodes.size()), n, "drls_round");
  check_size(y.size(), n, "drls_round");
  check_size(draw.size(), n, "drls_round");
  check_size(noise.size(), n, "drls_round");
  check_size(b.nodes(), n, "drls_round");

  DrlsNetwork net = network;
  for (Index i = 0; i < n; ++i) {
    auto& node = net.nodes[static_cast<std::size_t>(i)];
    node = drls_sense(node, y(i), draw.sampled(i), noise.variances()(i), b.row(i), config.beta);
  }

  for (int k = 0; k < config.inner_iters; ++k) {
    // Read old estimates and multipliers, write new estimates.
    std::vector<Vector> fresh(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
      std::map<Index, Vector> est;
      std::map<Index, Vector> incoming;
      for (Index j : comm.neighbors(i)) {
        const NodeState& nj = net.nodes[static_cast<std::size_t>(j)];
        est[j] = nj.estimate;
        incoming[j] = nj.multipliers.at(i);
      }
      fresh[static_cast<std::size_t>(i)] =
          drls_local_update(net.nodes[static_cast<std::size_t>(i)], est, incoming, config.rho);
    }
    for (Index i = 0; i < n; ++i) net.nodes[static_cast<std::size_t>(i)].estimate = fresh[static_cast<std::size_t>(i)];
    net.messages += 2 * comm.edge_count();
    for (Index i = 0; i < n; ++i) {
      NodeState& node = net.nodes[static_cast<std::size_t>(i)];
      for (auto& [j, lambda] : node.multipliers) {
        lambda = drls_multiplier_update(lambda, node.estimate, fresh[static_cast<std::size_t>(j)], config.rho);
      }
    }
  }
  return net;
}

DrlsRun drls_run(const CommGraph& comm, const Bandlimit& b, const NoiseModel& noise, const SamplingProbabilities& p,
                 const DrlsConfig& config, Index horizon, const Vector& x_true, Rng& rng) {
  config.validate();
  const Index n = comm.size();
  check_size(p.size(), n, "drls_run");
  check_size(x_true.size(), n, "drls_run");
  if (horizon < 0) throw InvariantError("horizon must be nonnegative");

  DrlsNetwork net = drls_init(comm, b, config);
  RlsState central = rls_init(b, config.beta, config.delta);
  const Matrix& u = b.basis_slice();

  DrlsRun run;
  run.node_errors = Matrix::Zero(n, horizon);
  run.centralized = Vector::Zero(horizon);
  for (Index t = 0; t < horizon; ++t) {
    for (Index i = 0; i < n; ++i) {
      run.node_errors(i, t) = (u * net.nodes[static_cast<std::size_t>(i)].estimate - x_true).squaredNorm();
    }
    run.centralized(t) = (rls_estimate(central, b) - x_true).squaredNorm();
    const SamplingDraw draw = draw_sampling_set(p, rng);
    const Vector y = observe(x_true, draw, noise, rng);
    net = drls_round(net, comm, y, draw, noise, b, config);
    central = rls_step(central, y, draw, noise, b);
  }
  for (const NodeState& node : net.nodes) run.final_estimates.push_back(u * node.estimate);
  run.centralized_final = rls_estimate(central, b);
  run.messages = net.messages;
  return run;
}

}  // namespace agsp
