#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "agsp/errors.hpp"

namespace agsp {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Sorted, duplicate-free list of node or frequency indices (0-based).
using IndexSet = std::vector<Index>;

struct Edge {
  Index i;
  Index j;
  double weight;
};

/// Undirected weighted graph stored as a dense symmetric weight matrix.
class Graph {
 public:
  /// Throws InvariantError unless `weights` is square, symmetric, nonnegative
  /// with zero diagonal.
  explicit Graph(Matrix weights);

  /// Builds a graph on `n` nodes; each edge sets a_ij = a_ji = weight.
  static Graph from_edges(Index n, const std::vector<Edge>& edges);

  Index size() const { return weights_.rows(); }
  const Matrix& weights() const { return weights_; }

  /// Edges with i < j and positive weight, in row-major order.
  std::vector<Edge> edges() const;
  std::vector<IndexSet> neighbors() const;

  bool operator==(const Graph& other) const { return weights_ == other.weights_; }

 private:
  Matrix weights_;
};

/// Orthonormal Laplacian eigenvectors (columns) with ascending eigenvalues.
class SpectralBasis {
 public:
  SpectralBasis(Vector eigenvalues, Matrix vectors);

  Index size() const { return eigenvalues_.size(); }
  const Vector& eigenvalues() const { return eigenvalues_; }
  const Matrix& vectors() const { return vectors_; }

 private:
  Vector eigenvalues_;
  Matrix vectors_;
};

/// Frequency support F together with the n x |F| slice U_F of the basis.
class Bandlimit {
 public:
  /// `freq_set` is sorted and deduplicated; throws InvariantError when empty
  /// or out of range.
  Bandlimit(const SpectralBasis& basis, IndexSet freq_set);

  /// The |F| lowest graph frequencies, F = {0, ..., size-1}.
  static Bandlimit lowest(const SpectralBasis& basis, Index size);

  Index nodes() const { return basis_slice_.rows(); }
  Index bandwidth() const { return basis_slice_.cols(); }
  const IndexSet& freq_set() const { return freq_set_; }
  const Matrix& basis_slice() const { return basis_slice_; }

  /// u_{F,i}: row i of U_F as a column vector.
  Vector row(Index i) const { return basis_slice_.row(i).transpose(); }

 private:
  IndexSet freq_set_;
  Matrix basis_slice_;
};

Matrix build_laplacian(const Graph& g);

/// Symmetric eigendecomposition. Each eigenvector is sign-normalised so that
/// its first entry with magnitude above 1e-12 is positive. Throws
/// InvariantError when the input is not symmetric within 1e-10.
SpectralBasis eigendecompose(const Matrix& laplacian);

/// x = U_F s.
Vector synthesize(const Bandlimit& b, const Vector& s);

/// GFT coefficients s = U^T x.
Vector analyze(const SpectralBasis& basis, const Vector& x);

/// B_F = U_F U_F^T.
Matrix bandlimit_projector(const Bandlimit& b);

/// D_S = diag(1_S).
Matrix vertex_limiter(const IndexSet& s_set, Index n);

Index connected_components(const Graph& g);
inline bool is_connected(const Graph& g) { return connected_components(g) == 1; }

struct GeometricGraph {
  Graph graph;
  Matrix positions;  // n x 2, uniform on the unit square
  bool connected;
};

/// Unit-weight edge between nodes at Euclidean distance <= radius.
/// Disconnected draws are returned with `connected == false`.
GeometricGraph random_geometric_graph(Index n, double radius, std::uint64_t seed);

/// Redraws with seed, seed+1, ... until a connected graph appears. Throws
/// std::runtime_error after `max_attempts` disconnected draws.
GeometricGraph connected_random_geometric_graph(Index n, double radius, std::uint64_t seed,
                                                int max_attempts = 1000);

/// Edge-list text: one "i j w" per line, 0-based, whitespace separated.
/// Lines starting with '#' are comments, except "# nodes <n>" which declares
/// the node count. Without a declaration or `n`, the count is max index + 1.
Graph load_edge_list(const std::filesystem::path& path, std::optional<Index> n = std::nullopt);
Graph parse_edge_list(std::istream& in, std::optional<Index> n = std::nullopt);

/// Writes the "# nodes <n>" header followed by every edge with i < j.
/// Weights are printed with round-trip precision.
void save_edge_list(const Graph& g, const std::filesystem::path& path);
void write_edge_list(const Graph& g, std::ostream& out);

}  // namespace agsp
