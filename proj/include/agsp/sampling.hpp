#pragma once

#include <optional>
#include <random>
#include <vector>

#include "agsp/graph.hpp"

namespace agsp {

/// Random engine used by every stochastic routine. One stream per trial.
using Rng = std::mt19937_64;

/// Per-node Bernoulli sampling probabilities p with box bounds p_max.
class SamplingProbabilities {
 public:
  /// Bounds default to one. Throws InvariantError unless 0 <= p_i <= p_max_i <= 1.
  explicit SamplingProbabilities(Vector probs);
  SamplingProbabilities(Vector probs, Vector bounds);

  static SamplingProbabilities constant(Index n, double value);
  /// p_i = 1 on `set`, 0 elsewhere.
  static SamplingProbabilities indicator(const IndexSet& set, Index n);

  Index size() const { return probs_.size(); }
  const Vector& probs() const { return probs_; }
  const Vector& bounds() const { return bounds_; }
  double total_rate() const { return probs_.sum(); }

  /// Expected sampling set {i : p_i > threshold}; entries at or below the
  /// threshold are treated as numerical zeros.
  IndexSet expected_set(double threshold = 1e-9) const;

 private:
  Vector probs_;
  Vector bounds_;
};

/// One time step of sampling decisions d_i[n] in {0, 1}.
class SamplingDraw {
 public:
  explicit SamplingDraw(Vector mask);
  static SamplingDraw all(Index n) { return SamplingDraw(Vector::Ones(n)); }
  static SamplingDraw none(Index n) { return SamplingDraw(Vector::Zero(n)); }

  Index size() const { return mask_.size(); }
  const Vector& mask() const { return mask_; }
  bool sampled(Index i) const { return mask_(i) != 0.0; }
  IndexSet sampled_nodes() const;

 private:
  Vector mask_;
};

/// Diagonal observation-noise covariance C_v = diag(sigma_i^2).
class NoiseModel {
 public:
  /// Throws InvariantError unless every variance is finite and positive.
  explicit NoiseModel(Vector variances);
  static NoiseModel white(Index n, double variance) { return NoiseModel(Vector::Constant(n, variance)); }

  Index size() const { return variances_.size(); }
  const Vector& variances() const { return variances_; }

 private:
  Vector variances_;
};

SamplingDraw draw_sampling_set(const SamplingProbabilities& p, Rng& rng);

/// y_i = d_i (x_i + v_i) with v_i ~ N(0, sigma_i^2); unsampled entries are exactly zero.
Vector observe(const Vector& x_true, const SamplingDraw& draw, const NoiseModel& noise, Rng& rng);

/// lambda_min(U_F^T diag(p) U_F). Positive iff the signal is recoverable.
double reconstructability_lambda(const SamplingProbabilities& p, const Bandlimit& b);
double reconstructability_lambda(const Vector& p, const Bandlimit& b);

/// ||D_{S^c} U_F||_2, where S^c is the complement of `expected_set`.
/// Lies in [0, 1]; strictly below one iff the signal is recoverable.
double localization_norm(const IndexSet& expected_set, const Bandlimit& b);

/// ||u_{F,i}||^2 for every node; sums to |F|.
Vector leverage_scores(const Bandlimit& b);

/// p_i = min(1, m ||u_{F,i}||^2 / |F|). Throws InvariantError when m > n or m < 0.
SamplingProbabilities leverage_score_probabilities(const Bandlimit& b, double m);

/// Nodes ordered by decreasing leverage score, ties by lowest index.
std::vector<Index> leverage_score_order(const Bandlimit& b);

struct MaxDetSelection {
  std::vector<Index> order;  // nodes in the order they were picked
  Index rank = 0;            // rank of U_F^T D_S U_F for the full selection
  double log_det = 0.0;      // log of the (pseudo-)determinant
  double det() const;
};

/// Greedy determinant maximisation of U_F^T D_S (W) U_F. While the selection
/// is rank deficient, candidates are ranked first by the rank they reach and
/// then by the product of nonzero eigenvalues. Ties go to the lowest index.
/// With `noise`, rows are weighted by 1/sigma_i^2.
MaxDetSelection max_det_greedy(const Bandlimit& b, Index m,
                               const std::optional<NoiseModel>& noise = std::nullopt);

/// m distinct nodes drawn uniformly without replacement, returned sorted.
IndexSet uniform_random_set(Index n, Index m, Rng& rng);

/// Uniformly random permutation of {0, ..., n-1}.
std::vector<Index> uniform_random_order(Index n, Rng& rng);

}  // namespace agsp
