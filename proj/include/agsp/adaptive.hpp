#pragma once

#include "agsp/graph.hpp"
#include "agsp/sampling.hpp"

namespace agsp {

/// LMS recursion state: the vertex-domain estimate and the step size mu.
struct LmsState {
  Vector estimate;
  double step = 0.0;

  /// Projects `initial` onto the bandlimited subspace of `b`. Throws
  /// InvariantError when mu is negative or not finite.
  static LmsState init(const Bandlimit& b, const Vector& initial, double mu);
};

/// RLS accumulators Psi[n], psi[n] plus the forgetting factor and the
/// regulariser Pi = delta I.
struct RlsState {
  Matrix psi_mat;
  Vector psi_vec;
  double beta = 1.0;
  Matrix regularizer;
  long long steps = 0;
};

struct TheoryReport {
  double msd = 0.0;
  double rate = 0.0;
  double step_bound = 0.0;
};

/// x[n+1] = x[n] + mu B_F D_S[n] (y[n] - x[n]), evaluated as U_F (U_F^T r)
/// over the sampled rows only.
LmsState lms_step(const LmsState& state, const Vector& y, const SamplingDraw& draw, const Bandlimit& b);

/// Mean-square stability limit 2 lambda_min(H) / lambda_max(H)^2, H = U_F^T diag(p) U_F.
double lms_step_bound(const Vector& p, const Bandlimit& b);

/// Steady-state MSD (mu/2) Tr[H^{-1} U_F^T diag(p) C_v U_F], O(mu^2) dropped.
/// Throws ReconstructabilityError when H is singular.
double lms_msd_theory(const Vector& p, double mu, const NoiseModel& noise, const Bandlimit& b);

/// Convergence-rate approximation 1 - 2 mu lambda_min(H).
double lms_rate_theory(const Vector& p, double mu, const Bandlimit& b);

/// (mu/2) Tr(U_F^T diag(p) C_v U_F) / lambda_min(H); never below lms_msd_theory.
double lms_msd_upper_bound(const Vector& p, double mu, const NoiseModel& noise, const Bandlimit& b);

TheoryReport lms_theory(const Vector& p, double mu, const NoiseModel& noise, const Bandlimit& b);

/// Psi[0] = delta I, psi[0] = 0. Requires beta in (0, 1] and delta > 0.
RlsState rls_init(const Bandlimit& b, double beta, double delta);

/// Psi[n] = beta Psi[n-1] + U_F^T D_S[n] C_v^{-1} U_F and
/// psi[n] = beta psi[n-1] + U_F^T D_S[n] C_v^{-1} y[n].
RlsState rls_step(const RlsState& state, const Vector& y, const SamplingDraw& draw, const NoiseModel& noise,
                  const Bandlimit& b);

/// U_F Psi[n]^{-1} psi[n] via a Cholesky solve. Throws ReconstructabilityError
/// when Psi is not positive definite or its condition number exceeds 1e12.
Vector rls_estimate(const RlsState& state, const Bandlimit& b);

/// ((1 - beta) / (1 + beta)) Tr[(U_F^T diag(p) C_v^{-1} U_F)^{-1}].
double rls_msd_theory(const Vector& p, double beta, const NoiseModel& noise, const Bandlimit& b);

}  // namespace agsp
