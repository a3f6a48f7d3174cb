#pragma once

#include <limits>
#include <optional>
#include <vector>

#include "agsp/graph.hpp"
#include "agsp/sampling.hpp"

namespace agsp {

/// Targets and limits shared by the sampling-design problems. `mu` applies to
/// the LMS designs and `beta` to the RLS design.
struct DesignSpec {
  Bandlimit bandlimit;
  NoiseModel noise;
  double mu = 0.1;
  double beta = 0.95;
  double rate_target = 0.95;  // alpha_bar in (0, 1)
  double msd_target = 1e-3;   // gamma > 0, linear scale
  double budget = std::numeric_limits<double>::infinity();  // P, capped at sum(bounds)
  Vector bounds;                                            // p_max; empty means all ones

  DesignSpec(Bandlimit b, NoiseModel v) : bandlimit(std::move(b)), noise(std::move(v)) {}

  /// Throws InvariantError or DimensionError on an invalid combination.
  void validate() const;
  Vector upper_bounds() const;
  double effective_budget() const;
  /// Smallest lambda_min(H) meeting the rate target: (1 - alpha_bar) / (2 mu).
  double lambda_target() const;
};

struct TraceEntry {
  Vector p;
  double objective = 0.0;  // the solver's own objective (Dinkelbach: the ratio omega)
  double msd = 0.0;        // closed-form MSD of the filter the design targets; inf if singular
  double violation = 0.0;  // largest constraint violation, zero when feasible
  double parametric = 0.0; // Dinkelbach h(p[k], omega[k-1]); zero elsewhere
};

struct SolverTrace {
  std::vector<TraceEntry> iterates;  // iterates[0] is the starting point
  bool converged = false;
  int iterations = 0;
};

struct DesignResult {
  Vector p;
  SolverTrace trace;
};

/// Step sizes gamma[k] = gamma[k-1] (1 - eta gamma[k-1]).
struct StepSchedule {
  double gamma0 = 1.0;
  double eta = 1e-3;
  double next(double gamma) const { return gamma * (1.0 - eta * gamma); }
};

struct ScaOptions {
  double tau = 1e-6;
  StepSchedule steps;
  double tol = 1e-7;  // on ||p[k+1] - p[k]||_inf
  int max_iters = 500;
  std::optional<Vector> start;
};

struct DinkelbachOptions {
  double tol = 1e-8;  // on |h(p[k+1], omega[k])|
  int max_iters = 100;
  std::optional<Vector> start;
};

/// Gradient of the LMS MSD (mu/2) Tr[H^{-1} G] with respect to p.
/// Throws ReconstructabilityError when H is singular.
Vector msd_gradient(const Vector& p, double mu, const NoiseModel& noise, const Bandlimit& b);

/// (v^T u_i)^2 for a unit minimum eigenvector v of H: a supergradient of the
/// concave map p -> lambda_min(H(p)).
Vector lambda_min_subgradient(const Vector& p, const Bandlimit& b);

/// Surrogate of the LMS MSD around z used by the min-MSD SCA:
/// (tau/2)||p - z||^2 + (mu/2) Tr[H(z)^{-1} G(p)] + (mu/2) Tr[H(p)^{-1} G(z)].
double msd_surrogate(const Vector& p, const Vector& z, double tau, double mu, const NoiseModel& noise,
                     const Bandlimit& b);
Vector msd_surrogate_gradient(const Vector& p, const Vector& z, double tau, double mu, const NoiseModel& noise,
                              const Bandlimit& b);

struct MaxLambda {
  Vector p;
  double lambda = 0.0;
};

/// Largest lambda_min(H(p)) over the box and the budget.
MaxLambda max_lambda_min(const DesignSpec& spec);

/// Minimum 1^T p subject to lambda_min(H) >= lambda_target, the MSD upper
/// bound <= msd_target, and the box. Throws InfeasibleError carrying the best
/// achievable lambda_min.
DesignResult solve_min_rate_convex(const DesignSpec& spec);

/// Successive convex approximation of the min-rate problem with the exact MSD
/// constraint. Starts from solve_min_rate_convex unless options.start is set.
DesignResult sca_min_rate(const DesignSpec& spec, const ScaOptions& options = {});

/// Minimum of the MSD upper bound Tr(G)/lambda_min(H) over the rate, budget
/// and box constraints, by Dinkelbach's parametric method.
DesignResult dinkelbach_min_msd(const DesignSpec& spec, const DinkelbachOptions& options = {});

/// Successive convex approximation of the exact min-MSD problem over the rate,
/// budget and box constraints.
DesignResult sca_min_msd(const DesignSpec& spec, const ScaOptions& options = {});

/// Minimum 1^T p subject to rls_msd_theory(p) <= msd_target and the box.
/// Throws InfeasibleError carrying the MSD reached at p = p_max.
DesignResult solve_rls_design(const DesignSpec& spec);

}  // namespace agsp
