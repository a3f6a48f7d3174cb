#pragma once

#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace agsp::convex {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Value, gradient and Hessian of a smooth convex function at a point.
struct SmoothValue {
  double value = 0.0;
  Vector grad;
  Matrix hess;
};

/// Returns std::nullopt outside the function's domain.
using SmoothFn = std::function<std::optional<SmoothValue>(const Vector&)>;

/// F(x) = f0 + sum_j x_j coeffs[j], constrained to be positive semidefinite.
struct Lmi {
  Matrix f0;
  std::vector<Matrix> coeffs;
};

/// minimize cost^T x + smooth_cost(x)
/// s.t.     ineq x <= ineq_rhs, every LMI >= 0, every constraint g(x) <= 0.
struct Problem {
  Vector cost;
  SmoothFn smooth_cost;
  Matrix ineq;
  Vector ineq_rhs;
  std::vector<Lmi> lmis;
  std::vector<SmoothFn> constraints;

  explicit Problem(Index dim) : cost(Vector::Zero(dim)), ineq(0, dim), ineq_rhs(0) {}
  Index dim() const { return cost.size(); }

  void add_inequality(const Vector& row, double rhs);
  /// lower <= x_i <= upper
  void add_bounds(Index i, double lower, double upper);

  /// Number of barrier terms, i.e. the duality-gap multiplier.
  Index barrier_degree() const;
  double objective(const Vector& x) const;
  bool strictly_feasible(const Vector& x) const;
};

struct Options {
  double gap_tol = 1e-10;  // stop once barrier_degree / t falls below this
  double t0 = 1.0;
  double growth = 20.0;
  double newton_tol = 1e-11;  // half squared Newton decrement ending a centering step
  int max_newton = 2000;
  /// Called with the iterate after every centering step; returning true stops.
  std::function<bool(const Vector&)> on_center;
};

struct Result {
  Vector x;
  double objective = 0.0;
  double gap = 0.0;
  int centerings = 0;
  int newton_steps = 0;
  bool converged = false;
};

/// Log-barrier path following. `x0` must be strictly feasible.
Result minimize(const Problem& problem, const Vector& x0, const Options& options = {});

struct InteriorPoint {
  bool found = false;
  Vector x;
  double slack = 0.0;  // smallest uniform relaxation reached; negative when found
};

/// Phase I: minimizes s subject to every constraint relaxed by s, stopping as
/// soon as a centred point with s < 0 appears. `hint` must lie in the domain of
/// every smooth constraint.
InteriorPoint find_interior_point(const Problem& problem, const Vector& hint, const Options& options = {});

}  // namespace agsp::convex
