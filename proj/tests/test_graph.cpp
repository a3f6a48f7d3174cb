#include <doctest.h>

#include <cmath>
#include <sstream>

#include "agsp/errors.hpp"
#include "agsp/graph.hpp"
#include "oracles.hpp"

using namespace agsp;

TEST_CASE("laplacian of a weighted triangle") {
  const Graph g = Graph::from_edges(3, {{0, 1, 2.0}, {1, 2, 0.5}});
  const Matrix l = build_laplacian(g);
  Matrix expected(3, 3);
  expected << 2.0, -2.0, 0.0, -2.0, 2.5, -0.5, 0.0, -0.5, 0.5;
  CHECK((l - expected).cwiseAbs().maxCoeff() == 0.0);
  CHECK(l.rowwise().sum().cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("graph rejects invalid weights") {
  Matrix w = Matrix::Zero(2, 2);
  w(0, 1) = 1.0;
  CHECK_THROWS_AS(Graph{w}, InvariantError);  // asymmetric
  w(1, 0) = 1.0;
  w(0, 0) = 1.0;
  CHECK_THROWS_AS(Graph{w}, InvariantError);  // self loop
  w(0, 0) = 0.0;
  w(0, 1) = w(1, 0) = -1.0;
  CHECK_THROWS_AS(Graph{w}, InvariantError);
  CHECK_THROWS_AS(Graph(Matrix::Zero(2, 3)), InvariantError);
}

TEST_CASE("3-node path spectrum") {
  const SpectralBasis basis = eigendecompose(build_laplacian(oracle::path_graph(3)));
  CHECK(basis.eigenvalues()(0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(std::abs(basis.eigenvalues()(0)) < 1e-12);
  CHECK(basis.eigenvalues()(1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(basis.eigenvalues()(2) == doctest::Approx(3.0).epsilon(1e-12));
  Matrix expected(3, 3);
  expected << 1 / std::sqrt(3.0), 1 / std::sqrt(2.0), 1 / std::sqrt(6.0),  //
      1 / std::sqrt(3.0), 0.0, -2 / std::sqrt(6.0),                        //
      1 / std::sqrt(3.0), -1 / std::sqrt(2.0), 1 / std::sqrt(6.0);
  CHECK((basis.vectors() - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("eigendecomposition agrees with Jacobi rotations on random graphs") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Graph g = random_geometric_graph(12, 0.45, seed).graph;
    const Matrix l = build_laplacian(g);
    const SpectralBasis basis = eigendecompose(l);
    const Vector ref = oracle::jacobi_eigenvalues(l);
    CHECK((basis.eigenvalues() - ref).cwiseAbs().maxCoeff() < 1e-10);
    const Matrix& u = basis.vectors();
    CHECK((u.transpose() * u - Matrix::Identity(12, 12)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((l * u - u * basis.eigenvalues().asDiagonal()).cwiseAbs().maxCoeff() < 1e-10);
    for (Index c = 0; c < u.cols(); ++c) {
      Index r = 0;
      while (std::abs(u(r, c)) <= 1e-12) ++r;
      CHECK(u(r, c) > 0.0);
    }
  }
}

TEST_CASE("eigendecompose rejects asymmetric input") {
  Matrix m = Matrix::Identity(3, 3);
  m(0, 1) = 1e-6;
  CHECK_THROWS_AS(eigendecompose(m), InvariantError);
}

TEST_CASE("bandlimit projector is an orthogonal projector of rank |F|") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Index f = 1 + static_cast<Index>(seed % 6);
    const auto inst = oracle::random_instance(15, f, seed);
    const Matrix bf = bandlimit_projector(inst.band);
    CHECK((bf * bf - bf).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((bf - bf.transpose()).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(bf.trace() == doctest::Approx(static_cast<double>(f)).epsilon(1e-12));
    const Matrix& uf = inst.band.basis_slice();
    CHECK((uf.transpose() * uf - Matrix::Identity(f, f)).cwiseAbs().maxCoeff() < 1e-12);

    const Vector s = Vector::LinSpaced(f, -1.0, 2.0);
    const Vector x = synthesize(inst.band, s);
    CHECK((bf * x - x).norm() < 1e-12);
    const SpectralBasis basis = eigendecompose(build_laplacian(inst.graph));
    const Vector coeffs = analyze(basis, x);
    CHECK((coeffs.head(f) - s).norm() < 1e-12);
    CHECK(coeffs.tail(15 - f).norm() < 1e-12);
    CHECK_THROWS_AS(synthesize(inst.band, Vector::Zero(f + 1)), DimensionError);
  }
}

TEST_CASE("bandlimit validation") {
  const SpectralBasis basis = eigendecompose(build_laplacian(oracle::path_graph(4)));
  CHECK_THROWS_AS(Bandlimit(basis, {}), InvariantError);
  CHECK_THROWS_AS(Bandlimit(basis, {4}), InvariantError);
  const Bandlimit b(basis, {2, 0, 2});
  CHECK(b.bandwidth() == 2);
  CHECK(b.freq_set() == IndexSet{0, 2});
}

TEST_CASE("vertex limiter") {
  const Matrix d = vertex_limiter({0, 2}, 4);
  CHECK(d.diagonal() == Vector((Vector(4) << 1, 0, 1, 0).finished()));
  CHECK_THROWS_AS(vertex_limiter({5}, 4), DimensionError);
}

TEST_CASE("random geometric graph follows the distance rule") {
  const GeometricGraph gg = random_geometric_graph(30, 0.3, 11);
  for (Index i = 0; i < 30; ++i) {
    for (Index j = 0; j < 30; ++j) {
      if (i == j) continue;
      const bool close = (gg.positions.row(i) - gg.positions.row(j)).norm() <= 0.3;
      CHECK((gg.graph.weights()(i, j) == 1.0) == close);
    }
  }
  CHECK(gg.connected == is_connected(gg.graph));
  CHECK(random_geometric_graph(30, 0.3, 11).graph == gg.graph);
  CHECK(!(random_geometric_graph(30, 0.3, 12).graph == gg.graph));
  CHECK(!random_geometric_graph(30, 0.01, 1).connected);
  CHECK_THROWS_AS(random_geometric_graph(1, 0.3, 1), InvariantError);
  CHECK_THROWS_AS(random_geometric_graph(5, 0.0, 1), InvariantError);
  const GeometricGraph c = connected_random_geometric_graph(20, 0.4, 5);
  CHECK(c.connected);
  CHECK(connected_components(c.graph) == 1);
}

TEST_CASE("connected components") {
  const Graph g = Graph::from_edges(5, {{0, 1, 1.0}, {2, 3, 1.0}});
  CHECK(connected_components(g) == 3);
  CHECK(!is_connected(g));
  CHECK(is_connected(oracle::path_graph(5)));
}

TEST_CASE("edge list round trip") {
  const Graph g = Graph::from_edges(5, {{0, 1, 0.25}, {1, 4, 1.0 / 3.0}, {2, 3, 2.0}});
  std::stringstream buf;
  write_edge_list(g, buf);
  const Graph back = parse_edge_list(buf);
  CHECK(back == g);
}

TEST_CASE("edge list parsing") {
  SUBCASE("comments, blank lines and duplicates") {
    std::istringstream in("# a comment\n\n0 1 1.5\n1 0 1.5\n# nodes 4\n2 1 1\n");
    const Graph g = parse_edge_list(in);
    CHECK(g.size() == 4);
    CHECK(g.weights()(0, 1) == 1.5);
    CHECK(g.weights()(1, 2) == 1.0);
  }
  SUBCASE("node count inferred from indices") {
    std::istringstream in("0 3 1\n");
    CHECK(parse_edge_list(in).size() == 4);
  }
  SUBCASE("errors carry line numbers") {
    auto message = [](const std::string& text, std::optional<Index> n = std::nullopt) {
      std::istringstream in(text);
      try {
        parse_edge_list(in, n);
      } catch (const ParseError& e) {
        return std::string(e.what());
      }
      return std::string("no error");
    };
    CHECK(message("0 1 1\n1 1 1\n").find("line 2") != std::string::npos);
    CHECK(message("0 1 -1\n").find("line 1") != std::string::npos);
    CHECK(message("0 1 1\n1 0 2\n").find("conflicts") != std::string::npos);
    CHECK(message("0 1\n").find("expected") != std::string::npos);
    CHECK(message("0 5 1\n", 3).find("out of range") != std::string::npos);
    CHECK(message("# nodes 3\n0 1 1\n", 4).find("declares 3") != std::string::npos);
  }
}
