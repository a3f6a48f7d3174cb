#include <doctest.h>

#include <cmath>

#include "agsp/adaptive.hpp"
#include "agsp/errors.hpp"
#include "oracles.hpp"

using namespace agsp;

namespace {

Bandlimit path3_band() { return oracle::lowest_band(oracle::path_graph(3), 2); }

// (mu/2) Tr[H^{-1} G] through Jacobi-free dense algebra: explicit sums and Gauss-Jordan.
double msd_oracle(const Vector& p, double mu, const Vector& var, const Matrix& u) {
  const Matrix h = oracle::gram_by_rows(u, p);
  const Matrix g = oracle::gram_by_rows(u, p.cwiseProduct(var));
  return 0.5 * mu * (oracle::gauss_jordan_inverse(h) * g).trace();
}

}  // namespace

TEST_CASE("LMS step basics") {
  const auto inst = oracle::random_instance(12, 4, 21);
  const Bandlimit& b = inst.band;
  std::mt19937_64 gen(1);
  const Vector x_true = synthesize(b, oracle::uniform_vector(4, -1, 1, gen));

  SUBCASE("init projects onto the bandlimited subspace") {
    const LmsState s = LmsState::init(b, oracle::uniform_vector(12, -1, 1, gen), 0.1);
    CHECK((bandlimit_projector(b) * s.estimate - s.estimate).norm() < 1e-12);
    CHECK_THROWS_AS(LmsState::init(b, Vector::Zero(12), -0.1), InvariantError);
    CHECK_THROWS_AS(LmsState::init(b, Vector::Zero(11), 0.1), DimensionError);
  }
  SUBCASE("zero innovation and empty draws leave the estimate alone") {
    const LmsState s = LmsState::init(b, x_true, 0.3);
    CHECK((lms_step(s, x_true, SamplingDraw::all(12), b).estimate - x_true).norm() < 1e-14);
    const LmsState z = LmsState::init(b, Vector::Zero(12), 0.3);
    CHECK(lms_step(z, x_true, SamplingDraw::none(12), b).estimate.norm() == 0.0);
  }
  SUBCASE("full sampling with mu = 1 recovers the signal in one step") {
    const LmsState s = LmsState::init(b, Vector::Zero(12), 1.0);
    CHECK((lms_step(s, x_true, SamplingDraw::all(12), b).estimate - x_true).norm() < 1e-12);
  }
  SUBCASE("iterates stay bandlimited") {
    LmsState s = LmsState::init(b, Vector::Zero(12), 0.5);
    const SamplingProbabilities p = SamplingProbabilities::constant(12, 0.5);
    const NoiseModel noise = NoiseModel::white(12, 0.1);
    Rng rng(3);
    const Matrix bf = bandlimit_projector(b);
    for (int t = 0; t < 200; ++t) {
      const SamplingDraw d = draw_sampling_set(p, rng);
      s = lms_step(s, observe(x_true, d, noise, rng), d, b);
      CHECK((bf * s.estimate - s.estimate).norm() < 1e-10);
    }
  }
}

TEST_CASE("LMS step bound") {
  const auto inst = oracle::random_instance(10, 3, 4);
  CHECK(lms_step_bound(Vector::Ones(10), inst.band) == doctest::Approx(2.0).epsilon(1e-12));
  std::mt19937_64 gen(2);
  const Vector p = oracle::uniform_vector(10, 0.2, 1.0, gen);
  CHECK(lms_step_bound(0.5 * p, inst.band) == doctest::Approx(2.0 * lms_step_bound(p, inst.band)).epsilon(1e-12));

  const Bandlimit b = path3_band();
  const Vector q = (Vector(3) << 1, 1, 0).finished();
  const Vector ev = oracle::jacobi_eigenvalues(oracle::gram_by_rows(b.basis_slice(), q));
  CHECK(lms_step_bound(q, b) == doctest::Approx(2.0 * ev(0) / (ev(1) * ev(1))).epsilon(1e-12));
  CHECK(lms_step_bound(q, b) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("LMS MSD closed form") {
  const auto big = oracle::random_instance(30, 10, 6, 0.4);
  CHECK(lms_msd_theory(Vector::Ones(30), 0.1, NoiseModel::white(30, 0.01), big.band) ==
        doctest::Approx(5.0e-3).epsilon(1e-12));

  const Bandlimit b = path3_band();
  const Vector q = (Vector(3) << 1, 1, 0).finished();
  const Vector var = (Vector(3) << 0.01, 0.04, 0.09).finished();
  CHECK(lms_msd_theory(q, 0.1, NoiseModel(var), b) ==
        doctest::Approx(msd_oracle(q, 0.1, var, b.basis_slice())).epsilon(1e-12));
  CHECK_THROWS_AS(lms_msd_theory((Vector(3) << 0, 1, 0).finished(), 0.1, NoiseModel(var), b),
                  ReconstructabilityError);

  // White noise makes the MSD independent of p wherever H is invertible.
  std::mt19937_64 gen(8);
  const Vector p = oracle::uniform_vector(30, 0.3, 1.0, gen);
  CHECK(lms_msd_theory(p, 0.05, NoiseModel::white(30, 0.02), big.band) ==
        doctest::Approx(0.025 * 10 * 0.02).epsilon(1e-10));
}

TEST_CASE("LMS rate approximation") {
  const Bandlimit b = path3_band();
  const Vector q = (Vector(3) << 1, 1, 0).finished();
  CHECK(lms_rate_theory(q, 0.0, b) == 1.0);
  CHECK(lms_rate_theory(Vector::Ones(3), 0.1, b) == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(lms_rate_theory(q, 0.1, b) == doctest::Approx(1.0 - 0.2 / 6.0).epsilon(1e-12));
}

TEST_CASE("MSD upper bound dominates the exact MSD") {
  const auto inst = oracle::random_instance(10, 3, 12);
  std::mt19937_64 gen(12);
  for (int k = 0; k < 100; ++k) {
    const Vector p = oracle::uniform_vector(10, 0.05, 1.0, gen);
    const NoiseModel noise(oracle::uniform_vector(10, 0.001, 0.1, gen));
    const double exact = lms_msd_theory(p, 0.1, noise, inst.band);
    CHECK(lms_msd_upper_bound(p, 0.1, noise, inst.band) >= exact * (1.0 - 1e-12));
  }
  CHECK(lms_msd_upper_bound(Vector::Ones(10), 0.1, NoiseModel::white(10, 0.01), inst.band) ==
        doctest::Approx(0.05 * 3 * 0.01).epsilon(1e-12));
  const TheoryReport r = lms_theory(Vector::Ones(10), 0.1, NoiseModel::white(10, 0.01), inst.band);
  CHECK(r.rate == doctest::Approx(0.8));
  CHECK(r.step_bound == doctest::Approx(2.0));
}

TEST_CASE("RLS recursion basics") {
  const auto inst = oracle::random_instance(12, 4, 5);
  const Bandlimit& b = inst.band;
  const RlsState s0 = rls_init(b, 0.9, 1e-3);
  CHECK((s0.psi_mat - 1e-3 * Matrix::Identity(4, 4)).norm() == 0.0);
  CHECK(s0.psi_vec.norm() == 0.0);
  CHECK(rls_estimate(s0, b).norm() == 0.0);
  CHECK_THROWS_AS(rls_init(b, 0.0, 1e-3), InvariantError);
  CHECK_THROWS_AS(rls_init(b, 0.9, 0.0), InvariantError);

  std::mt19937_64 gen(5);
  const Vector y = oracle::uniform_vector(12, -1, 1, gen);
  const NoiseModel unit = NoiseModel::white(12, 1.0);

  SUBCASE("empty draw only decays") {
    const RlsState s1 = rls_step(rls_step(s0, y, SamplingDraw::all(12), unit, b), y, SamplingDraw::none(12), unit, b);
    const RlsState ref = rls_step(s0, y, SamplingDraw::all(12), unit, b);
    CHECK((s1.psi_mat - 0.9 * ref.psi_mat).norm() < 1e-14);
    CHECK((s1.psi_vec - 0.9 * ref.psi_vec).norm() < 1e-14);
  }
  SUBCASE("one full step with unit noise and beta = 1") {
    const RlsState s = rls_step(rls_init(b, 1.0, 1e-3), y, SamplingDraw::all(12), unit, b);
    CHECK((s.psi_mat - (1.0 + 1e-3) * Matrix::Identity(4, 4)).norm() < 1e-12);
    const Matrix& u = b.basis_slice();
    CHECK((rls_estimate(s, b) - u * (u.transpose() * y) / (1.0 + 1e-3)).norm() < 1e-12);
  }
  SUBCASE("noise-free full sampling recovers the signal") {
    const Vector x = synthesize(b, oracle::uniform_vector(4, -1, 1, gen));
    const RlsState s = rls_step(rls_init(b, 0.95, 1e-12), x, SamplingDraw::all(12), unit, b);
    CHECK((rls_estimate(s, b) - x).norm() < 1e-6);
  }
  SUBCASE("singular accumulator is reported") {
    RlsState s = s0;
    s.psi_mat(0, 0) = 0.0;
    CHECK_THROWS_AS(rls_estimate(s, b), ReconstructabilityError);
    s.psi_mat(0, 0) = 1e-16;
    s.psi_mat(1, 1) = 1.0;
    CHECK_THROWS_AS(rls_estimate(s, b), ReconstructabilityError);
  }
}

TEST_CASE("RLS estimate equals the batch weighted least-squares solution") {
  const auto inst = oracle::random_instance(15, 4, 8);
  const Bandlimit& b = inst.band;
  const Matrix& u = b.basis_slice();
  std::mt19937_64 gen(8);
  const NoiseModel noise(oracle::uniform_vector(15, 0.01, 0.2, gen));
  const SamplingProbabilities p(oracle::uniform_vector(15, 0.2, 0.8, gen));
  const Vector x = synthesize(b, oracle::uniform_vector(4, -1, 1, gen));

  for (double beta : {1.0, 0.9}) {
    const double delta = 1e-2;
    Rng rng(17);
    RlsState s = rls_init(b, beta, delta);
    std::vector<SamplingDraw> draws;
    std::vector<Vector> ys;
    for (int t = 0; t < 60; ++t) {
      draws.push_back(draw_sampling_set(p, rng));
      ys.push_back(observe(x, draws.back(), noise, rng));
      s = rls_step(s, ys.back(), draws.back(), noise, b);
    }
    // Normal equations of sum_l beta^{n-l} ||D_l (y_l - U s)||^2_{C^-1} + beta^n delta ||s||^2.
    const int n = 60;
    Matrix lhs = std::pow(beta, n) * delta * Matrix::Identity(4, 4);
    Vector rhs = Vector::Zero(4);
    for (int l = 0; l < n; ++l) {
      const double w = std::pow(beta, n - 1 - l);
      for (Index i = 0; i < 15; ++i) {
        if (!draws[static_cast<std::size_t>(l)].sampled(i)) continue;
        const double c = w / noise.variances()(i);
        for (Index a = 0; a < 4; ++a) {
          rhs(a) += c * u(i, a) * ys[static_cast<std::size_t>(l)](i);
          for (Index bb = 0; bb < 4; ++bb) lhs(a, bb) += c * u(i, a) * u(i, bb);
        }
      }
    }
    CHECK((s.psi_mat - lhs).cwiseAbs().maxCoeff() < 1e-10 * lhs.cwiseAbs().maxCoeff());
    const Vector batch = u * (oracle::gauss_jordan_inverse(lhs) * rhs);
    CHECK((rls_estimate(s, b) - batch).norm() <= 1e-8 * batch.norm());
  }
}

TEST_CASE("RLS MSD closed form") {
  const auto inst = oracle::random_instance(30, 10, 6, 0.4);
  CHECK(rls_msd_theory(Vector::Ones(30), 0.95, NoiseModel::white(30, 0.01), inst.band) ==
        doctest::Approx(0.05 / 1.95 * 0.1).epsilon(1e-12));
  CHECK(rls_msd_theory(Vector::Ones(30), 1.0, NoiseModel::white(30, 0.01), inst.band) == 0.0);

  const auto small = oracle::random_instance(10, 3, 14);
  std::mt19937_64 gen(14);
  const Vector p = oracle::uniform_vector(10, 0.1, 1.0, gen);
  const Vector var = oracle::uniform_vector(10, 0.01, 0.1, gen);
  const Matrix m = oracle::gram_by_rows(small.band.basis_slice(), p.cwiseQuotient(var));
  const double expected = (0.05 / 1.95) * oracle::gauss_jordan_inverse(m).trace();
  CHECK(rls_msd_theory(p, 0.95, NoiseModel(var), small.band) == doctest::Approx(expected).epsilon(1e-12));
  CHECK_THROWS_AS(rls_msd_theory(Vector::Zero(10), 0.95, NoiseModel(var), small.band), ReconstructabilityError);
}
