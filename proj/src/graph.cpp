#include "agsp/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>

namespace agsp {

namespace {

constexpr double kSymmetryTol = 1e-10;
constexpr double kSignTol = 1e-12;

std::string describe(Index i, Index j) {
  return "(" + std::to_string(i) + ", " + std::to_string(j) + ")";
}

}  // namespace

Graph::Graph(Matrix weights) : weights_(std::move(weights)) {
  if (weights_.rows() != weights_.cols()) {
    throw InvariantError("graph weights must be square");
  }
  const Index n = weights_.rows();
  for (Index i = 0; i < n; ++i) {
    if (weights_(i, i) != 0.0) {
      throw InvariantError("graph weight diagonal must be zero at node " + std::to_string(i));
    }
    for (Index j = 0; j < n; ++j) {
      const double w = weights_(i, j);
      if (!std::isfinite(w) || w < 0.0) {
        throw InvariantError("graph weight " + describe(i, j) + " must be finite and nonnegative");
      }
      if (w != weights_(j, i)) {
        throw InvariantError("graph weights not symmetric at " + describe(i, j));
      }
    }
  }
}

Graph Graph::from_edges(Index n, const std::vector<Edge>& edges) {
  Matrix w = Matrix::Zero(n, n);
  for (const Edge& e : edges) {
    if (e.i < 0 || e.j < 0 || e.i >= n || e.j >= n) {
      throw InvariantError("edge " + describe(e.i, e.j) + " out of range for n=" + std::to_string(n));
    }
    w(e.i, e.j) = e.weight;
    w(e.j, e.i) = e.weight;
  }
  return Graph(std::move(w));
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  for (Index i = 0; i < size(); ++i) {
    for (Index j = i + 1; j < size(); ++j) {
      if (weights_(i, j) > 0.0) out.push_back({i, j, weights_(i, j)});
    }
  }
  return out;
}

std::vector<IndexSet> Graph::neighbors() const {
  std::vector<IndexSet> out(static_cast<std::size_t>(size()));
  for (Index i = 0; i < size(); ++i) {
    for (Index j = 0; j < size(); ++j) {
      if (weights_(i, j) > 0.0) out[static_cast<std::size_t>(i)].push_back(j);
    }
  }
  return out;
}

SpectralBasis::SpectralBasis(Vector eigenvalues, Matrix vectors)
    : eigenvalues_(std::move(eigenvalues)), vectors_(std::move(vectors)) {
  if (vectors_.rows() != vectors_.cols() || vectors_.cols() != eigenvalues_.size()) {
    throw DimensionError("spectral basis: eigenvector matrix must be n x n with n eigenvalues");
  }
}

Bandlimit::Bandlimit(const SpectralBasis& basis, IndexSet freq_set) : freq_set_(std::move(freq_set)) {
  std::sort(freq_set_.begin(), freq_set_.end());
  freq_set_.erase(std::unique(freq_set_.begin(), freq_set_.end()), freq_set_.end());
  if (freq_set_.empty()) throw InvariantError("bandlimit: frequency set is empty");
  if (freq_set_.front() < 0 || freq_set_.back() >= basis.size()) {
    throw InvariantError("bandlimit: frequency index out of range");
  }
  basis_slice_.resize(basis.size(), static_cast<Index>(freq_set_.size()));
  for (std::size_t k = 0; k < freq_set_.size(); ++k) {
    basis_slice_.col(static_cast<Index>(k)) = basis.vectors().col(freq_set_[k]);
  }
}

Bandlimit Bandlimit::lowest(const SpectralBasis& basis, Index size) {
  if (size < 1 || size > basis.size()) {
    throw InvariantError("bandlimit: |F| must lie in [1, n]");
  }
  IndexSet f(static_cast<std::size_t>(size));
  std::iota(f.begin(), f.end(), Index{0});
  return Bandlimit(basis, std::move(f));
}

Matrix build_laplacian(const Graph& g) {
  const Vector degree = g.weights().rowwise().sum();
  Matrix lap = -g.weights();
  lap.diagonal() += degree;
  return lap;
}

SpectralBasis eigendecompose(const Matrix& laplacian) {
  if (laplacian.rows() != laplacian.cols()) throw DimensionError("eigendecompose: matrix not square");
  const double asym = (laplacian - laplacian.transpose()).cwiseAbs().maxCoeff();
  if (laplacian.size() > 0 && asym > kSymmetryTol) {
    std::ostringstream msg;
    msg << "eigendecompose: input not symmetric (max |L - L^T| = " << asym << ")";
    throw InvariantError(msg.str());
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(laplacian);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigendecompose: solver failed");
  Matrix vectors = solver.eigenvectors();
  for (Index c = 0; c < vectors.cols(); ++c) {
    for (Index r = 0; r < vectors.rows(); ++r) {
      if (std::abs(vectors(r, c)) > kSignTol) {
        if (vectors(r, c) < 0.0) vectors.col(c) *= -1.0;
        break;
      }
    }
  }
  return SpectralBasis(solver.eigenvalues(), std::move(vectors));
}

Vector synthesize(const Bandlimit& b, const Vector& s) {
  if (s.size() != b.bandwidth()) throw DimensionError("synthesize: coefficient vector must have |F| entries");
  return b.basis_slice() * s;
}

Vector analyze(const SpectralBasis& basis, const Vector& x) {
  if (x.size() != basis.size()) throw DimensionError("analyze: signal must have n entries");
  return basis.vectors().transpose() * x;
}

Matrix bandlimit_projector(const Bandlimit& b) {
  return b.basis_slice() * b.basis_slice().transpose();
}

Matrix vertex_limiter(const IndexSet& s_set, Index n) {
  Matrix d = Matrix::Zero(n, n);
  for (Index i : s_set) {
    if (i < 0 || i >= n) throw DimensionError("vertex_limiter: node index out of range");
    d(i, i) = 1.0;
  }
  return d;
}

Index connected_components(const Graph& g) {
  const Index n = g.size();
  std::vector<Index> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), Index{0});
  auto find = [&](Index x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      auto& p = parent[static_cast<std::size_t>(x)];
      p = parent[static_cast<std::size_t>(p)];
      x = p;
    }
    return x;
  };
  Index components = n;
  for (const Edge& e : g.edges()) {
    const Index a = find(e.i);
    const Index b = find(e.j);
    if (a != b) {
      parent[static_cast<std::size_t>(a)] = b;
      --components;
    }
  }
  return components;
}

GeometricGraph random_geometric_graph(Index n, double radius, std::uint64_t seed) {
  if (n < 2) throw InvariantError("random_geometric_graph: need n >= 2");
  if (!(radius > 0.0) || radius > std::sqrt(2.0)) {
    throw InvariantError("random_geometric_graph: radius must lie in (0, sqrt(2)]");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Matrix pos(n, 2);
  for (Index i = 0; i < n; ++i) {
    pos(i, 0) = unit(rng);
    pos(i, 1) = unit(rng);
  }
  Matrix w = Matrix::Zero(n, n);
  const double r2 = radius * radius;
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      if ((pos.row(i) - pos.row(j)).squaredNorm() <= r2) {
        w(i, j) = 1.0;
        w(j, i) = 1.0;
      }
    }
  }
  Graph g(std::move(w));
  const bool connected = is_connected(g);
  return {std::move(g), std::move(pos), connected};
}

GeometricGraph connected_random_geometric_graph(Index n, double radius, std::uint64_t seed,
                                                int max_attempts) {
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    GeometricGraph gg = random_geometric_graph(n, radius, seed + static_cast<std::uint64_t>(attempt));
    if (gg.connected) return gg;
  }
  throw std::runtime_error("no connected random geometric graph after " + std::to_string(max_attempts) +
                           " attempts; increase the radius");
}

Graph parse_edge_list(std::istream& in, std::optional<Index> n) {
  struct Entry {
    double weight;
    std::size_t line;
  };
  std::map<std::pair<Index, Index>, Entry> entries;
  std::optional<Index> declared;
  Index max_index = -1;
  std::string line;
  std::size_t line_no = 0;

  auto fail = [&](const std::string& msg) {
    throw ParseError("edge list line " + std::to_string(line_no) + ": " + msg);
  };

  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream tokens(line);
    std::string first;
    if (!(tokens >> first)) continue;
    if (first[0] == '#') {
      std::string key;
      long long value = 0;
      std::istringstream directive(line.substr(line.find('#') + 1));
      if (directive >> key && key == "nodes") {
        if (!(directive >> value) || value < 1) fail("malformed '# nodes' declaration");
        declared = static_cast<Index>(value);
      }
      continue;
    }
    long long i = 0;
    long long j = 0;
    double w = 0.0;
    std::string extra;
    std::istringstream fields(line);
    if (!(fields >> i >> j >> w) || (fields >> extra)) fail("expected 'i j w'");
    if (i < 0 || j < 0) fail("negative node index");
    if (i == j) fail("self loop on node " + std::to_string(i));
    if (!std::isfinite(w) || w < 0.0) fail("weight must be finite and nonnegative");
    const std::pair<Index, Index> key{std::min(i, j), std::max(i, j)};
    auto [it, inserted] = entries.emplace(key, Entry{w, line_no});
    if (!inserted && it->second.weight != w) {
      fail("edge " + describe(key.first, key.second) + " conflicts with line " + std::to_string(it->second.line));
    }
    max_index = std::max<Index>(max_index, key.second);
  }

  if (n && declared && *n != *declared) {
    throw ParseError("edge list declares " + std::to_string(*declared) + " nodes, caller expects " +
                     std::to_string(*n));
  }
  const Index nodes = n ? *n : declared ? *declared : max_index + 1;
  if (nodes < 1) throw ParseError("edge list is empty and declares no node count");
  std::vector<Edge> edges;
  edges.reserve(entries.size());
  for (const auto& [key, entry] : entries) {
    if (key.second >= nodes) {
      line_no = entry.line;
      fail("node index " + std::to_string(key.second) + " out of range for n=" + std::to_string(nodes));
    }
    edges.push_back({key.first, key.second, entry.weight});
  }
  return Graph::from_edges(nodes, edges);
}

Graph load_edge_list(const std::filesystem::path& path, std::optional<Index> n) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open edge list " + path.string());
  return parse_edge_list(in, n);
}

void write_edge_list(const Graph& g, std::ostream& out) {
  out << "# nodes " << g.size() << '\n';
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (const Edge& e : g.edges()) out << e.i << ' ' << e.j << ' ' << e.weight << '\n';
}

void save_edge_list(const Graph& g, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write edge list " + path.string());
  write_edge_list(g, out);
}

}  // namespace agsp
