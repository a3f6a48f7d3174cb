#pragma once

#include <map>
#include <vector>

#include "agsp/graph.hpp"
#include "agsp/sampling.hpp"

namespace agsp {

/// Undirected communication topology between the estimating nodes.
class CommGraph {
 public:
  /// Throws InvariantError unless the lists are symmetric, loop-free and the
  /// graph is connected.
  explicit CommGraph(std::vector<IndexSet> neighbors);
  static CommGraph from_graph(const Graph& g);
  static CommGraph complete(Index n);
  static CommGraph ring(Index n);

  Index size() const { return static_cast<Index>(neighbors_.size()); }
  const IndexSet& neighbors(Index i) const { return neighbors_[static_cast<std::size_t>(i)]; }
  Index edge_count() const;

 private:
  std::vector<IndexSet> neighbors_;
};

/// Local accumulators Psi_i, psi_i, the local estimate s_i (GFT domain) and
/// the multipliers lambda_ij for every neighbour j.
struct NodeState {
  Matrix psi_mat;
  Vector psi_vec;
  Vector estimate;
  std::map<Index, Vector> multipliers;
};

struct DrlsConfig {
  double rho = 1.0;     // ADMM penalty
  int inner_iters = 1;  // K
  double beta = 0.95;
  double delta = 1e-3;  // each node starts from (delta / N) I

  /// Throws InvariantError unless rho > 0, K >= 1, beta in (0, 1], delta > 0.
  void validate() const;
};

struct DrlsNetwork {
  std::vector<NodeState> nodes;
  long long messages = 0;  // vector-valued messages exchanged so far
};

DrlsNetwork drls_init(const CommGraph& comm, const Bandlimit& b, const DrlsConfig& config);

/// Psi_i <- beta Psi_i + d_i u u^T / sigma^2 and psi_i <- beta psi_i + d_i y_i u / sigma^2.
NodeState drls_sense(const NodeState& node, double y_i, bool sampled, double noise_var, const Vector& u_row,
                     double beta);

/// Closed-form minimiser (Psi_i + rho |N_i| I)^{-1} [psi_i + rho sum_j s_j - 1/2 sum_j (lambda_ij - lambda_ji)].
/// `incoming` holds lambda_ji for every neighbour j.
Vector drls_local_update(const NodeState& node, const std::map<Index, Vector>& neighbor_estimates,
                         const std::map<Index, Vector>& incoming, double rho);

/// Dual ascent step lambda_ij + (rho/2)(s_i - s_j).
Vector drls_multiplier_update(const Vector& lambda_ij, const Vector& s_hat_i, const Vector& s_hat_j, double rho);

/// One sensing instant: every node senses, then K synchronous ADMM iterations
/// run on double-buffered estimates. Each iteration sends one estimate over
/// every directed link (2 |E_c| messages); both ends of a link update their
/// multipliers locally from the exchanged estimates.
DrlsNetwork drls_round(const DrlsNetwork& network, const CommGraph& comm, const Vector& y, const SamplingDraw& draw,
                       const NoiseModel& noise, const Bandlimit& b, const DrlsConfig& config);

struct DrlsRun {
  Matrix node_errors;       // (n x horizon): ||U_F s_i[t] - x||^2 before the update at time t
  Vector centralized;       // centralised RLS error on the same draws
  std::vector<Vector> final_estimates;  // U_F s_i after the last round
  Vector centralized_final;
  long long messages = 0;
};

/// Runs distributed and centralised RLS side by side on identical sampling
/// draws and observations of `x_true`.
DrlsRun drls_run(const CommGraph& comm, const Bandlimit& b, const NoiseModel& noise, const SamplingProbabilities& p,
                 const DrlsConfig& config, Index horizon, const Vector& x_true, Rng& rng);

}  // namespace agsp
