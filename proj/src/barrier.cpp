#include "agsp/barrier.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace agsp::convex {

namespace {

constexpr double kArmijo = 0.25;
constexpr double kShrink = 0.5;
constexpr double kMinStep = 1e-14;

struct Eval {
  double value = 0.0;
  Vector grad;
  Matrix hess;
};

Matrix lmi_value(const Lmi& lmi, const Vector& x) {
  Matrix f = lmi.f0;
  for (std::size_t j = 0; j < lmi.coeffs.size(); ++j) {
    const double xj = x(static_cast<Index>(j));
    if (xj != 0.0) f += xj * lmi.coeffs[j];
  }
  return f;
}

// Barrier phi(x) plus t times the objective. Returns nullopt outside the interior.
std::optional<Eval> evaluate(const Problem& pb, const Vector& x, double t, bool derivs) {
  const Index d = pb.dim();
  Eval e;
  if (derivs) {
    e.grad = Vector::Zero(d);
    e.hess = Matrix::Zero(d, d);
  }

  if (pb.ineq.rows() > 0) {
    const Vector r = pb.ineq_rhs - pb.ineq * x;
    if (!(r.minCoeff() > 0.0)) return std::nullopt;
    e.value -= r.array().log().sum();
    if (derivs) {
      const Vector inv = r.cwiseInverse();
      e.grad += pb.ineq.transpose() * inv;
      e.hess += pb.ineq.transpose() * inv.cwiseAbs2().asDiagonal() * pb.ineq;
    }
  }

  for (const Lmi& lmi : pb.lmis) {
    const Eigen::LLT<Matrix> llt(lmi_value(lmi, x));
    if (llt.info() != Eigen::Success) return std::nullopt;
    const Vector diag = Matrix(llt.matrixL()).diagonal();
    if (!(diag.minCoeff() > 0.0)) return std::nullopt;
    e.value -= 2.0 * diag.array().log().sum();
    if (derivs) {
      // W_j = L^{-1} F_j L^{-T}: grad_j = -tr W_j, hess_jk = <W_j, W_k>.
      std::vector<Matrix> w(lmi.coeffs.size());
      for (std::size_t j = 0; j < lmi.coeffs.size(); ++j) {
        const Matrix half = llt.matrixL().solve(lmi.coeffs[j]);
        w[j] = llt.matrixL().solve(half.transpose()).transpose();
        e.grad(static_cast<Index>(j)) -= w[j].trace();
      }
      for (std::size_t j = 0; j < w.size(); ++j) {
        for (std::size_t k = 0; k <= j; ++k) {
          const double v = w[j].cwiseProduct(w[k]).sum();
          e.hess(static_cast<Index>(j), static_cast<Index>(k)) += v;
          if (k != j) e.hess(static_cast<Index>(k), static_cast<Index>(j)) += v;
        }
      }
    }
  }

  for (const SmoothFn& g : pb.constraints) {
    const auto gv = g(x);
    if (!gv || !(gv->value < 0.0)) return std::nullopt;
    const double slack = -gv->value;
    e.value -= std::log(slack);
    if (derivs) {
      e.grad += gv->grad / slack;
      e.hess += gv->grad * gv->grad.transpose() / (slack * slack) + gv->hess / slack;
    }
  }

  double obj = pb.cost.dot(x);
  if (pb.smooth_cost) {
    const auto sv = pb.smooth_cost(x);
    if (!sv) return std::nullopt;
    obj += sv->value;
    if (derivs) {
      e.grad += t * sv->grad;
      e.hess += t * sv->hess;
    }
  }
  e.value += t * obj;
  if (derivs) e.grad += t * pb.cost;
  if (!std::isfinite(e.value)) return std::nullopt;
  return e;
}

Vector newton_direction(const Matrix& hess, const Vector& grad) {
  const double scale = 1.0 + hess.diagonal().cwiseAbs().maxCoeff();
  double shift = 0.0;
  for (int attempt = 0; attempt < 40; ++attempt) {
    Matrix h = hess;
    h.diagonal().array() += shift;
    Eigen::LDLT<Matrix> ldlt(h);
    if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
      Vector dx = -ldlt.solve(grad);
      if (dx.allFinite()) return dx;
    }
    shift = shift == 0.0 ? 1e-14 * scale : shift * 10.0;
  }
  throw std::runtime_error("barrier: Newton system could not be solved");
}

// Newton's method on t f + phi from x; returns the number of steps taken.
int center(const Problem& pb, Vector& x, double t, const Options& opt, int budget) {
  int steps = 0;
  while (steps < budget) {
    const auto e = evaluate(pb, x, t, true);
    if (!e) throw std::logic_error("barrier: iterate left the interior");
    const Vector dx = newton_direction(e->hess, e->grad);
    const double slope = e->grad.dot(dx);
    const double lam2 = -slope;
    if (!(lam2 > 2.0 * opt.newton_tol)) break;
    ++steps;

    double s = 1.0;
    bool accepted = false;
    double feasible_s = 0.0;
    while (s >= kMinStep) {
      const auto trial = evaluate(pb, x + s * dx, t, false);
      if (trial) {
        if (feasible_s == 0.0) feasible_s = s;
        if (trial->value <= e->value + kArmijo * s * slope) {
          accepted = true;
          break;
        }
      }
      s *= kShrink;
    }
    if (!accepted) {
      // Round-off hides the decrease near the centre; fall back to the damped step.
      if (lam2 < 1e-6 && feasible_s > 0.0) {
        s = std::min(feasible_s, 1.0 / (1.0 + std::sqrt(lam2)));
      } else {
        break;
      }
    }
    const Vector next = x + s * dx;
    if (next == x) break;  // step below the resolution of x
    x = next;
  }
  return steps;
}

}  // namespace

void Problem::add_inequality(const Vector& row, double rhs) {
  if (row.size() != dim()) throw std::invalid_argument("barrier: inequality row has wrong length");
  ineq.conservativeResize(ineq.rows() + 1, Eigen::NoChange);
  ineq.row(ineq.rows() - 1) = row.transpose();
  ineq_rhs.conservativeResize(ineq_rhs.size() + 1);
  ineq_rhs(ineq_rhs.size() - 1) = rhs;
}

void Problem::add_bounds(Index i, double lower, double upper) {
  Vector row = Vector::Zero(dim());
  row(i) = -1.0;
  add_inequality(row, -lower);
  row(i) = 1.0;
  add_inequality(row, upper);
}

Index Problem::barrier_degree() const {
  Index m = ineq.rows() + static_cast<Index>(constraints.size());
  for (const Lmi& lmi : lmis) m += lmi.f0.rows();
  return m;
}

double Problem::objective(const Vector& x) const {
  double v = cost.dot(x);
  if (smooth_cost) {
    const auto sv = smooth_cost(x);
    v += sv ? sv->value : std::numeric_limits<double>::infinity();
  }
  return v;
}

bool Problem::strictly_feasible(const Vector& x) const {
  Problem bare = *this;
  bare.cost.setZero();
  bare.smooth_cost = nullptr;
  return evaluate(bare, x, 0.0, false).has_value();
}

Result minimize(const Problem& pb, const Vector& x0, const Options& opt) {
  if (x0.size() != pb.dim()) throw std::invalid_argument("barrier: start point has wrong length");
  if (!evaluate(pb, x0, opt.t0, false)) throw std::invalid_argument("barrier: start point is not strictly feasible");
  const double m = static_cast<double>(pb.barrier_degree());
  if (m == 0.0) throw std::invalid_argument("barrier: problem has no constraints");

  Result res;
  res.x = x0;
  double t = opt.t0;
  while (true) {
    res.newton_steps += center(pb, res.x, t, opt, opt.max_newton - res.newton_steps);
    ++res.centerings;
    res.gap = m / t;
    if (opt.on_center && opt.on_center(res.x)) break;
    if (res.gap < opt.gap_tol) {
      res.converged = true;
      break;
    }
    if (res.newton_steps >= opt.max_newton) break;
    t *= opt.growth;
  }
  res.objective = pb.objective(res.x);
  return res;
}

InteriorPoint find_interior_point(const Problem& pb, const Vector& hint, const Options& opt) {
  const Index d = pb.dim();
  if (hint.size() != d) throw std::invalid_argument("barrier: hint has wrong length");
  if (pb.strictly_feasible(hint)) return {true, hint, -std::numeric_limits<double>::infinity()};

  double worst = -std::numeric_limits<double>::infinity();
  if (pb.ineq.rows() > 0) worst = std::max(worst, (pb.ineq * hint - pb.ineq_rhs).maxCoeff());
  for (const Lmi& lmi : pb.lmis) {
    const Matrix f = lmi_value(lmi, hint);
    worst = std::max(worst, -Eigen::SelfAdjointEigenSolver<Matrix>(f, Eigen::EigenvaluesOnly).eigenvalues()(0));
  }
  for (const SmoothFn& g : pb.constraints) {
    const auto gv = g(hint);
    if (!gv) throw std::invalid_argument("barrier: hint outside the domain of a constraint");
    worst = std::max(worst, gv->value);
  }
  const double s0 = std::max(worst, 0.0) + 1.0;

  Problem aug(d + 1);
  aug.cost(d) = 1.0;
  aug.ineq = Matrix::Zero(pb.ineq.rows(), d + 1);
  aug.ineq.leftCols(d) = pb.ineq;
  aug.ineq.col(d).setConstant(-1.0);
  aug.ineq_rhs = pb.ineq_rhs;
  Vector floor_row = Vector::Zero(d + 1);
  floor_row(d) = -1.0;
  aug.add_inequality(floor_row, 1.0 + s0);
  for (const Lmi& lmi : pb.lmis) {
    Lmi relaxed = lmi;
    relaxed.coeffs.resize(static_cast<std::size_t>(d), Matrix::Zero(lmi.f0.rows(), lmi.f0.cols()));
    relaxed.coeffs.push_back(Matrix::Identity(lmi.f0.rows(), lmi.f0.cols()));
    aug.lmis.push_back(std::move(relaxed));
  }
  for (const SmoothFn& g : pb.constraints) {
    aug.constraints.push_back([g, d](const Vector& xs) -> std::optional<SmoothValue> {
      auto gv = g(xs.head(d));
      if (!gv) return std::nullopt;
      SmoothValue out;
      out.value = gv->value - xs(d);
      out.grad = Vector::Zero(d + 1);
      out.grad.head(d) = gv->grad;
      out.grad(d) = -1.0;
      out.hess = Matrix::Zero(d + 1, d + 1);
      out.hess.topLeftCorner(d, d) = gv->hess;
      return out;
    });
  }

  Vector start(d + 1);
  start << hint, s0;
  Options phase1 = opt;
  phase1.on_center = [d](const Vector& xs) { return xs(d) < 0.0; };
  const Result r = minimize(aug, start, phase1);
  InteriorPoint out;
  out.slack = r.x(d);
  out.x = r.x.head(d);
  out.found = out.slack < 0.0 && pb.strictly_feasible(out.x);
  return out;
}

}  // namespace agsp::convex
