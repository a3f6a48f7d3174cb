#include "agsp/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "agsp/linalg.hpp"

namespace agsp {

namespace {

constexpr double kRankTol = 1e-10;
constexpr double kTieTol = 1e-12;

void check_size(Index got, Index want, const char* what) {
  if (got != want) throw DimensionError(std::string(what) + ": dimension mismatch");
}

struct PseudoDet {
  Index rank = 0;
  double log_det = 0.0;
};

PseudoDet pseudo_log_det(const Matrix& gram) {
  const Vector ev = linalg::symmetric_eigenvalues(gram);
  PseudoDet out;
  for (Index k = 0; k < ev.size(); ++k) {
    if (ev(k) > kRankTol) {
      ++out.rank;
      out.log_det += std::log(ev(k));
    }
  }
  return out;
}

}  // namespace

SamplingProbabilities::SamplingProbabilities(Vector probs)
    : SamplingProbabilities(probs, Vector::Ones(probs.size())) {}

SamplingProbabilities::SamplingProbabilities(Vector probs, Vector bounds)
    : probs_(std::move(probs)), bounds_(std::move(bounds)) {
  check_size(bounds_.size(), probs_.size(), "sampling probabilities");
  for (Index i = 0; i < probs_.size(); ++i) {
    if (!(bounds_(i) >= 0.0 && bounds_(i) <= 1.0)) {
      throw InvariantError("sampling bound p_max must lie in [0, 1] at node " + std::to_string(i));
    }
    if (!(probs_(i) >= 0.0 && probs_(i) <= bounds_(i))) {
      throw InvariantError("sampling probability must lie in [0, p_max] at node " + std::to_string(i));
    }
  }
}

SamplingProbabilities SamplingProbabilities::constant(Index n, double value) {
  return SamplingProbabilities(Vector::Constant(n, value));
}

SamplingProbabilities SamplingProbabilities::indicator(const IndexSet& set, Index n) {
  Vector p = Vector::Zero(n);
  for (Index i : set) {
    if (i < 0 || i >= n) throw DimensionError("indicator: node index out of range");
    p(i) = 1.0;
  }
  return SamplingProbabilities(std::move(p));
}

IndexSet SamplingProbabilities::expected_set(double threshold) const {
  IndexSet out;
  for (Index i = 0; i < probs_.size(); ++i) {
    if (probs_(i) > threshold) out.push_back(i);
  }
  return out;
}

SamplingDraw::SamplingDraw(Vector mask) : mask_(std::move(mask)) {
  for (Index i = 0; i < mask_.size(); ++i) {
    if (mask_(i) != 0.0 && mask_(i) != 1.0) throw InvariantError("sampling draw entries must be 0 or 1");
  }
}

IndexSet SamplingDraw::sampled_nodes() const {
  IndexSet out;
  for (Index i = 0; i < mask_.size(); ++i) {
    if (sampled(i)) out.push_back(i);
  }
  return out;
}

NoiseModel::NoiseModel(Vector variances) : variances_(std::move(variances)) {
  for (Index i = 0; i < variances_.size(); ++i) {
    if (!std::isfinite(variances_(i)) || variances_(i) <= 0.0) {
      throw InvariantError("noise variance must be positive at node " + std::to_string(i));
    }
  }
}

SamplingDraw draw_sampling_set(const SamplingProbabilities& p, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Vector mask(p.size());
  for (Index i = 0; i < p.size(); ++i) mask(i) = unit(rng) < p.probs()(i) ? 1.0 : 0.0;
  return SamplingDraw(std::move(mask));
}

Vector observe(const Vector& x_true, const SamplingDraw& draw, const NoiseModel& noise, Rng& rng) {
  check_size(draw.size(), x_true.size(), "observe");
  check_size(noise.size(), x_true.size(), "observe");
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector y = Vector::Zero(x_true.size());
  for (Index i = 0; i < x_true.size(); ++i) {
    // One normal per node keeps the noise stream aligned across sampling patterns.
    const double v = std::sqrt(noise.variances()(i)) * gauss(rng);
    if (draw.sampled(i)) y(i) = x_true(i) + v;
  }
  return y;
}

double reconstructability_lambda(const Vector& p, const Bandlimit& b) {
  check_size(p.size(), b.nodes(), "reconstructability_lambda");
  return linalg::min_eigenvalue(linalg::weighted_gram(b.basis_slice(), p));
}

double reconstructability_lambda(const SamplingProbabilities& p, const Bandlimit& b) {
  return reconstructability_lambda(p.probs(), b);
}

double localization_norm(const IndexSet& expected_set, const Bandlimit& b) {
  Vector outside = Vector::Ones(b.nodes());
  for (Index i : expected_set) {
    if (i < 0 || i >= b.nodes()) throw DimensionError("localization_norm: node index out of range");
    outside(i) = 0.0;
  }
  // ||D U_F||_2^2 = lambda_max(U_F^T D U_F) for a 0/1 diagonal D.
  const double top = linalg::max_eigenvalue(linalg::weighted_gram(b.basis_slice(), outside));
  return std::sqrt(std::clamp(top, 0.0, 1.0));
}

Vector leverage_scores(const Bandlimit& b) { return b.basis_slice().rowwise().squaredNorm(); }

SamplingProbabilities leverage_score_probabilities(const Bandlimit& b, double m) {
  if (!(m >= 0.0) || m > static_cast<double>(b.nodes())) {
    throw InvariantError("leverage_score_probabilities: target count must lie in [0, n]");
  }
  const Vector scores = leverage_scores(b);
  const double scale = m / static_cast<double>(b.bandwidth());
  Vector p = (scale * scores).cwiseMin(1.0);
  return SamplingProbabilities(std::move(p));
}

std::vector<Index> leverage_score_order(const Bandlimit& b) {
  const Vector scores = leverage_scores(b);
  std::vector<Index> order(static_cast<std::size_t>(b.nodes()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index c) { return scores(a) > scores(c) + kTieTol; });
  return order;
}

double MaxDetSelection::det() const { return std::exp(log_det); }

MaxDetSelection max_det_greedy(const Bandlimit& b, Index m, const std::optional<NoiseModel>& noise) {
  const Index n = b.nodes();
  if (m < 0 || m > n) throw InvariantError("max_det_greedy: m must lie in [0, n]");
  if (noise) check_size(noise->size(), n, "max_det_greedy");
  const Index f = b.bandwidth();

  Vector weight = Vector::Ones(n);
  if (noise) weight = noise->variances().cwiseInverse();

  MaxDetSelection sel;
  std::vector<bool> taken(static_cast<std::size_t>(n), false);
  Matrix gram = Matrix::Zero(f, f);
  for (Index step = 0; step < m; ++step) {
    Index best = -1;
    PseudoDet best_val;
    for (Index i = 0; i < n; ++i) {
      if (taken[static_cast<std::size_t>(i)]) continue;
      const Vector u = b.row(i);
      const PseudoDet val = pseudo_log_det(gram + weight(i) * u * u.transpose());
      const bool better = best < 0 || val.rank > best_val.rank ||
                          (val.rank == best_val.rank && val.log_det > best_val.log_det + kTieTol);
      if (better) {
        best = i;
        best_val = val;
      }
    }
    taken[static_cast<std::size_t>(best)] = true;
    const Vector u = b.row(best);
    gram += weight(best) * u * u.transpose();
    sel.order.push_back(best);
    sel.rank = best_val.rank;
    sel.log_det = best_val.log_det;
  }
  return sel;
}

std::vector<Index> uniform_random_order(Index n, Rng& rng) {
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  for (Index k = n - 1; k > 0; --k) {
    std::uniform_int_distribution<Index> pick(0, k);
    std::swap(order[static_cast<std::size_t>(k)], order[static_cast<std::size_t>(pick(rng))]);
  }
  return order;
}

IndexSet uniform_random_set(Index n, Index m, Rng& rng) {
  if (m < 0 || m > n) throw InvariantError("uniform_random_set: m must lie in [0, n]");
  std::vector<Index> order = uniform_random_order(n, rng);
  IndexSet out(order.begin(), order.begin() + m);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace agsp
