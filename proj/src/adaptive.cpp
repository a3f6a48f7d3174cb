#include "agsp/adaptive.hpp"

#include <cmath>

#include "agsp/linalg.hpp"

namespace agsp {

namespace {

constexpr double kMaxCondition = 1e12;

void check_size(Index got, Index want, const char* what) {
  if (got != want) throw DimensionError(std::string(what) + ": dimension mismatch");
}

Matrix lms_h(const Vector& p, const Bandlimit& b) {
  check_size(p.size(), b.nodes(), "sampling probabilities");
  return linalg::weighted_gram(b.basis_slice(), p);
}

}  // namespace

LmsState LmsState::init(const Bandlimit& b, const Vector& initial, double mu) {
  check_size(initial.size(), b.nodes(), "LmsState::init");
  if (!std::isfinite(mu) || mu < 0.0) throw InvariantError("LMS step size must be finite and nonnegative");
  const Matrix& u = b.basis_slice();
  return {u * (u.transpose() * initial), mu};
}

LmsState lms_step(const LmsState& state, const Vector& y, const SamplingDraw& draw, const Bandlimit& b) {
  check_size(state.estimate.size(), b.nodes(), "lms_step");
  check_size(y.size(), b.nodes(), "lms_step");
  check_size(draw.size(), b.nodes(), "lms_step");
  const Matrix& u = b.basis_slice();
  Vector g = Vector::Zero(b.bandwidth());
  for (Index i = 0; i < b.nodes(); ++i) {
    if (draw.sampled(i)) g += (y(i) - state.estimate(i)) * u.row(i).transpose();
  }
  LmsState next = state;
  next.estimate += state.step * (u * g);
  return next;
}

double lms_step_bound(const Vector& p, const Bandlimit& b) {
  const Vector ev = linalg::symmetric_eigenvalues(lms_h(p, b));
  const double top = ev(ev.size() - 1);
  if (!(top > 0.0)) return 0.0;
  return 2.0 * std::max(ev(0), 0.0) / (top * top);
}

double lms_msd_theory(const Vector& p, double mu, const NoiseModel& noise, const Bandlimit& b) {
  check_size(noise.size(), b.nodes(), "lms_msd_theory");
  const Matrix h = lms_h(p, b);
  const Matrix g = linalg::weighted_gram(b.basis_slice(), p.cwiseProduct(noise.variances()));
  return 0.5 * mu * linalg::invertible_factor(h, "lms_msd_theory").solve(g).trace();
}

double lms_rate_theory(const Vector& p, double mu, const Bandlimit& b) {
  return 1.0 - 2.0 * mu * linalg::min_eigenvalue(lms_h(p, b));
}

double lms_msd_upper_bound(const Vector& p, double mu, const NoiseModel& noise, const Bandlimit& b) {
  check_size(noise.size(), b.nodes(), "lms_msd_upper_bound");
  const double lmin = linalg::min_eigenvalue(lms_h(p, b));
  if (!(lmin > 0.0)) throw ReconstructabilityError("lms_msd_upper_bound: U_F^T diag(p) U_F is singular");
  const Vector lev = b.basis_slice().rowwise().squaredNorm();
  return 0.5 * mu * p.cwiseProduct(noise.variances()).dot(lev) / lmin;
}

TheoryReport lms_theory(const Vector& p, double mu, const NoiseModel& noise, const Bandlimit& b) {
  return {lms_msd_theory(p, mu, noise, b), lms_rate_theory(p, mu, b), lms_step_bound(p, b)};
}

RlsState rls_init(const Bandlimit& b, double beta, double delta) {
  if (!(beta > 0.0 && beta <= 1.0)) throw InvariantError("RLS forgetting factor must lie in (0, 1]");
  if (!(delta > 0.0) || !std::isfinite(delta)) throw InvariantError("RLS regulariser delta must be positive");
  const Index f = b.bandwidth();
  const Matrix pi = delta * Matrix::Identity(f, f);
  return {pi, Vector::Zero(f), beta, pi, 0};
}

RlsState rls_step(const RlsState& state, const Vector& y, const SamplingDraw& draw, const NoiseModel& noise,
                  const Bandlimit& b) {
  check_size(y.size(), b.nodes(), "rls_step");
  check_size(draw.size(), b.nodes(), "rls_step");
  check_size(noise.size(), b.nodes(), "rls_step");
  check_size(state.psi_vec.size(), b.bandwidth(), "rls_step");
  RlsState next = state;
  next.psi_mat *= state.beta;
  next.psi_vec *= state.beta;
  for (Index i = 0; i < b.nodes(); ++i) {
    if (!draw.sampled(i)) continue;
    const Vector u = b.row(i);
    const double w = 1.0 / noise.variances()(i);
    next.psi_mat.noalias() += w * u * u.transpose();
    next.psi_vec += (w * y(i)) * u;
  }
  ++next.steps;
  return next;
}

Vector rls_estimate(const RlsState& state, const Bandlimit& b) {
  check_size(state.psi_vec.size(), b.bandwidth(), "rls_estimate");
  const Eigen::LLT<Matrix> llt = linalg::spd_factor(state.psi_mat, "rls_estimate");
  if (llt.rcond() < 1.0 / kMaxCondition) {
    throw ReconstructabilityError("rls_estimate: Psi is numerically singular (condition number above 1e12)");
  }
  return b.basis_slice() * llt.solve(state.psi_vec);
}

double rls_msd_theory(const Vector& p, double beta, const NoiseModel& noise, const Bandlimit& b) {
  check_size(noise.size(), b.nodes(), "rls_msd_theory");
  if (!(beta > 0.0 && beta <= 1.0)) throw InvariantError("RLS forgetting factor must lie in (0, 1]");
  const Matrix m = lms_h(p.cwiseQuotient(noise.variances()), b);
  const Index f = b.bandwidth();
  const double tr = linalg::invertible_factor(m, "rls_msd_theory").solve(Matrix::Identity(f, f)).trace();
  return (1.0 - beta) / (1.0 + beta) * tr;
}

}  // namespace agsp
