#include "agsp/design.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "agsp/adaptive.hpp"
#include "agsp/barrier.hpp"
#include "agsp/linalg.hpp"

namespace agsp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_size(Index got, Index want, const char* what) {
  if (got != want) throw DimensionError(std::string(what) + ": dimension mismatch");
}

// Nodes with p_max_i > 0 are the only free variables; the rest stay at zero.
struct Reduced {
  std::vector<Index> active;
  Matrix rows;     // U_F restricted to active nodes
  Vector upper;    // p_max on active nodes
  Vector noise;    // sigma^2 on active nodes
  Index nodes = 0;

  explicit Reduced(const DesignSpec& spec) : nodes(spec.bandlimit.nodes()) {
    const Vector ub = spec.upper_bounds();
    for (Index i = 0; i < nodes; ++i) {
      if (ub(i) > 0.0) active.push_back(i);
    }
    const Index a = size();
    rows.resize(a, spec.bandlimit.bandwidth());
    upper.resize(a);
    noise.resize(a);
    for (Index k = 0; k < a; ++k) {
      const Index i = active[static_cast<std::size_t>(k)];
      rows.row(k) = spec.bandlimit.basis_slice().row(i);
      upper(k) = ub(i);
      noise(k) = spec.noise.variances()(i);
    }
  }

  Index size() const { return static_cast<Index>(active.size()); }
  Index bandwidth() const { return rows.cols(); }

  Vector expand(const Vector& pa) const {
    Vector p = Vector::Zero(nodes);
    for (Index k = 0; k < size(); ++k) {
      p(active[static_cast<std::size_t>(k)]) = std::clamp(pa(k), 0.0, upper(k));
    }
    return p;
  }

  Vector restrict(const Vector& p) const {
    Vector pa(size());
    for (Index k = 0; k < size(); ++k) pa(k) = p(active[static_cast<std::size_t>(k)]);
    return pa;
  }

  Matrix gram(const Vector& pa) const { return linalg::weighted_gram(rows, pa.head(size())); }

  // Coefficients u_i u_i^T of H(p) for the active variables.
  std::vector<Matrix> rank_ones() const {
    std::vector<Matrix> out;
    out.reserve(active.size());
    for (Index k = 0; k < size(); ++k) out.push_back(rows.row(k).transpose() * rows.row(k));
    return out;
  }

  // Box 0 <= p <= p_max on the first size() variables.
  void add_box(convex::Problem& pb) const {
    for (Index k = 0; k < size(); ++k) pb.add_bounds(k, 0.0, upper(k));
  }

  // 1^T p <= budget, only when it cuts into the box.
  void add_budget(convex::Problem& pb, double budget) const {
    if (budget < upper.sum()) {
      Vector row = Vector::Zero(pb.dim());
      row.head(size()).setOnes();
      pb.add_inequality(row, budget);
    }
  }
};

struct LmsQuantities {
  double lambda_min = 0.0;
  double msd = kInf;
  double bound = kInf;
};

LmsQuantities lms_quantities(const Vector& p, const DesignSpec& spec) {
  LmsQuantities q;
  q.lambda_min = reconstructability_lambda(p, spec.bandlimit);
  if (q.lambda_min > 0.0) {
    try {
      q.msd = lms_msd_theory(p, spec.mu, spec.noise, spec.bandlimit);
    } catch (const ReconstructabilityError&) {
    }
    q.bound = lms_msd_upper_bound(p, spec.mu, spec.noise, spec.bandlimit);
  }
  return q;
}

double rls_msd_or_inf(const Vector& p, const DesignSpec& spec) {
  try {
    return rls_msd_theory(p, spec.beta, spec.noise, spec.bandlimit);
  } catch (const ReconstructabilityError&) {
    return kInf;
  }
}

convex::Options barrier_options(double gap_tol) {
  convex::Options opt;
  opt.gap_tol = gap_tol;
  return opt;
}

// H(p) - t I >= 0 with t the last variable.
convex::Lmi lambda_lmi(const Reduced& r) {
  convex::Lmi lmi;
  const Index f = r.bandwidth();
  lmi.f0 = Matrix::Zero(f, f);
  lmi.coeffs = r.rank_ones();
  lmi.coeffs.push_back(-Matrix::Identity(f, f));
  return lmi;
}

// H(p) - a I >= 0 over p only.
convex::Lmi rate_lmi(const Reduced& r, double a) {
  convex::Lmi lmi;
  lmi.f0 = -a * Matrix::Identity(r.bandwidth(), r.bandwidth());
  lmi.coeffs = r.rank_ones();
  return lmi;
}

// Solves with on_center recording, returning the reduced solution.
Vector solve_traced(const convex::Problem& pb, const Vector& x0, double gap_tol, const Reduced& r,
                    const std::function<TraceEntry(const Vector&)>& entry, SolverTrace& trace) {
  convex::Options opt = barrier_options(gap_tol);
  trace.iterates.push_back(entry(r.expand(x0)));
  opt.on_center = [&](const Vector& x) {
    trace.iterates.push_back(entry(r.expand(x)));
    return false;
  };
  const convex::Result res = convex::minimize(pb, x0, opt);
  trace.iterations = res.centerings;
  trace.converged = res.converged;
  return res.x;
}

Vector start_or_interior(const convex::Problem& pb, const Vector& hint, const char* what) {
  const convex::InteriorPoint ip = convex::find_interior_point(pb, hint);
  if (!ip.found) throw InfeasibleError(std::string(what) + ": no strictly feasible point", ip.slack);
  return ip.x;
}

double violation_c(const Vector& p, const DesignSpec& spec, double lambda_min) {
  return std::max({spec.lambda_target() - lambda_min, p.sum() - spec.effective_budget(), 0.0});
}

}  // namespace

void DesignSpec::validate() const {
  const Index n = bandlimit.nodes();
  check_size(noise.size(), n, "design spec noise");
  if (bounds.size() != 0) {
    check_size(bounds.size(), n, "design spec bounds");
    for (Index i = 0; i < n; ++i) {
      if (!(bounds(i) >= 0.0 && bounds(i) <= 1.0)) throw InvariantError("p_max must lie in [0, 1]");
    }
  }
  if (!(mu > 0.0) || !std::isfinite(mu)) throw InvariantError("mu must be positive");
  if (!(beta > 0.0 && beta < 1.0)) throw InvariantError("beta must lie in (0, 1)");
  if (!(rate_target > 0.0 && rate_target < 1.0)) throw InvariantError("rate target must lie in (0, 1)");
  if (!(msd_target > 0.0)) throw InvariantError("MSD target must be positive");
  if (!(budget >= 0.0)) throw InvariantError("budget must be nonnegative");
}

Vector DesignSpec::upper_bounds() const {
  return bounds.size() == 0 ? Vector::Ones(bandlimit.nodes()) : bounds;
}

double DesignSpec::effective_budget() const { return std::min(budget, upper_bounds().sum()); }

double DesignSpec::lambda_target() const { return (1.0 - rate_target) / (2.0 * mu); }

Vector msd_gradient(const Vector& p, double mu, const NoiseModel& noise, const Bandlimit& b) {
  check_size(p.size(), b.nodes(), "msd_gradient");
  check_size(noise.size(), b.nodes(), "msd_gradient");
  const Matrix& u = b.basis_slice();
  const Matrix h = linalg::weighted_gram(u, p);
  const Matrix g = linalg::weighted_gram(u, p.cwiseProduct(noise.variances()));
  const Matrix y = linalg::invertible_factor(h, "msd_gradient").solve(u.transpose());  // H^{-1} u_i per column
  const Vector quad = u.cwiseProduct(y.transpose()).rowwise().sum();                  // u_i^T H^{-1} u_i
  const Vector sandwich = (g * y).cwiseProduct(y).colwise().sum().transpose();        // u_i^T H^{-1} G H^{-1} u_i
  return 0.5 * mu * (noise.variances().cwiseProduct(quad) - sandwich);
}

Vector lambda_min_subgradient(const Vector& p, const Bandlimit& b) {
  check_size(p.size(), b.nodes(), "lambda_min_subgradient");
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(linalg::weighted_gram(b.basis_slice(), p));
  const Vector proj = b.basis_slice() * eig.eigenvectors().col(0);
  return proj.cwiseAbs2();
}

double msd_surrogate(const Vector& p, const Vector& z, double tau, double mu, const NoiseModel& noise,
                     const Bandlimit& b) {
  check_size(p.size(), b.nodes(), "msd_surrogate");
  check_size(z.size(), b.nodes(), "msd_surrogate");
  const Matrix& u = b.basis_slice();
  const Vector& var = noise.variances();
  const Matrix hz = linalg::weighted_gram(u, z);
  const Matrix hp = linalg::weighted_gram(u, p);
  const double first = linalg::invertible_factor(hz, "msd_surrogate").solve(linalg::weighted_gram(u, p.cwiseProduct(var))).trace();
  const double second = linalg::invertible_factor(hp, "msd_surrogate").solve(linalg::weighted_gram(u, z.cwiseProduct(var))).trace();
  return 0.5 * tau * (p - z).squaredNorm() + 0.5 * mu * (first + second);
}

Vector msd_surrogate_gradient(const Vector& p, const Vector& z, double tau, double mu, const NoiseModel& noise,
                              const Bandlimit& b) {
  check_size(p.size(), b.nodes(), "msd_surrogate_gradient");
  check_size(z.size(), b.nodes(), "msd_surrogate_gradient");
  const Matrix& u = b.basis_slice();
  const Vector& var = noise.variances();
  const Matrix yz = linalg::invertible_factor(linalg::weighted_gram(u, z), "msd_surrogate_gradient").solve(u.transpose());
  const Matrix yp = linalg::invertible_factor(linalg::weighted_gram(u, p), "msd_surrogate_gradient").solve(u.transpose());
  const Matrix gz = linalg::weighted_gram(u, z.cwiseProduct(var));
  const Vector quad = u.cwiseProduct(yz.transpose()).rowwise().sum();
  const Vector sandwich = (gz * yp).cwiseProduct(yp).colwise().sum().transpose();
  return tau * (p - z) + 0.5 * mu * (var.cwiseProduct(quad) - sandwich);
}

MaxLambda max_lambda_min(const DesignSpec& spec) {
  spec.validate();
  const Reduced r(spec);
  const double budget = spec.effective_budget();
  MaxLambda out;
  if (r.size() == 0 || budget <= 0.0) {
    out.p = Vector::Zero(r.nodes);
    out.lambda = reconstructability_lambda(out.p, spec.bandlimit);
    return out;
  }
  const Index a = r.size();
  convex::Problem pb(a + 1);
  pb.cost(a) = -1.0;
  pb.lmis.push_back(lambda_lmi(r));
  r.add_box(pb);
  r.add_budget(pb, budget);

  Vector x0(a + 1);
  x0.head(a) = 0.5 * std::min(1.0, budget / r.upper.sum()) * r.upper;
  x0(a) = linalg::min_eigenvalue(r.gram(x0)) - 1.0;
  const convex::Result res = convex::minimize(pb, x0, barrier_options(1e-11));
  out.p = r.expand(res.x);
  out.lambda = reconstructability_lambda(out.p, spec.bandlimit);
  return out;
}

DesignResult solve_min_rate_convex(const DesignSpec& spec) {
  spec.validate();
  DesignSpec unbudgeted = spec;
  unbudgeted.budget = kInf;
  const double target = spec.lambda_target();
  const MaxLambda best = max_lambda_min(unbudgeted);
  if (!(best.lambda > target)) {
    throw InfeasibleError("rate target unattainable: largest lambda_min is " + std::to_string(best.lambda) +
                              ", need " + std::to_string(target),
                          best.lambda);
  }

  const Reduced r(spec);
  const Index a = r.size();
  const double c = 2.0 * spec.msd_target / spec.mu;
  convex::Problem pb(a + 1);
  pb.cost.head(a).setOnes();
  pb.lmis.push_back(lambda_lmi(r));
  Vector row = Vector::Zero(a + 1);
  row(a) = -1.0;
  pb.add_inequality(row, -target);  // t >= lambda target
  row.head(a) = r.noise.cwiseProduct(r.rows.rowwise().squaredNorm());
  row(a) = -c;
  pb.add_inequality(row, 0.0);  // Tr(G) <= c t
  r.add_box(pb);

  Vector hint(a + 1);
  hint.head(a) = r.restrict(best.p);
  hint(a) = 0.5 * (target + best.lambda);
  const convex::InteriorPoint ip = convex::find_interior_point(pb, hint);
  if (!ip.found) {
    throw InfeasibleError("MSD target unattainable under the rate constraint; largest lambda_min is " +
                              std::to_string(best.lambda),
                          best.lambda);
  }

  DesignResult out;
  auto entry = [&](const Vector& p) {
    const LmsQuantities q = lms_quantities(p, spec);
    return TraceEntry{p, p.sum(), q.msd,
                      std::max({target - q.lambda_min, q.bound - spec.msd_target, 0.0}), 0.0};
  };
  out.p = r.expand(solve_traced(pb, ip.x, 1e-10, r, entry, out.trace));
  return out;
}

DesignResult sca_min_rate(const DesignSpec& spec, const ScaOptions& options) {
  spec.validate();
  const Reduced r(spec);
  const double target = spec.lambda_target();
  const double gamma_msd = spec.msd_target;
  Vector p = options.start ? *options.start : solve_min_rate_convex(spec).p;
  check_size(p.size(), r.nodes, "sca_min_rate start");
  {
    const LmsQuantities q = lms_quantities(p, spec);
    const Vector ub = spec.upper_bounds();
    if (q.lambda_min < target - 1e-9 || !(q.msd <= gamma_msd * (1.0 + 1e-9)) || (p.array() < 0.0).any() ||
        (p.array() > ub.array()).any()) {
      throw InfeasibleError("sca_min_rate: starting point violates the constraints", q.lambda_min);
    }
  }

  auto entry = [&](const Vector& pf) {
    const LmsQuantities q = lms_quantities(pf, spec);
    return TraceEntry{pf, pf.sum(), q.msd, std::max({target - q.lambda_min, q.msd - gamma_msd, 0.0}), 0.0};
  };

  DesignResult out;
  out.trace.iterates.push_back(entry(p));
  double step = options.steps.gamma0;
  double lipschitz = -1.0;
  const Index a = r.size();

  for (int k = 0; k < options.max_iters; ++k) {
    const Vector z = r.restrict(p);
    const double msd_z = lms_msd_theory(p, spec.mu, spec.noise, spec.bandlimit);
    const Vector grad = r.restrict(msd_gradient(p, spec.mu, spec.noise, spec.bandlimit));
    if (lipschitz < 0.0) lipschitz = std::max(grad.norm(), 1e-12);
    lipschitz *= 0.5;

    auto surrogate = [&](const Vector& pa, double lip) {
      return msd_z + grad.dot(pa - z) + 0.5 * lip * (pa - z).squaredNorm();
    };
    auto exact = [&](const Vector& pa) {
      return lms_quantities(r.expand(pa), spec).msd;
    };

    Vector next = z;
    for (int doubling = 0; doubling < 200; ++doubling) {
      convex::Problem pb(a);
      pb.cost.setOnes();
      pb.smooth_cost = [&z, tau = options.tau](const Vector& x) -> std::optional<convex::SmoothValue> {
        const Vector d = x - z;
        return convex::SmoothValue{0.5 * tau * d.squaredNorm(), tau * d,
                                   tau * Matrix::Identity(x.size(), x.size())};
      };
      pb.lmis.push_back(rate_lmi(r, target));
      const double lip = lipschitz;
      pb.constraints.push_back([&, lip](const Vector& x) -> std::optional<convex::SmoothValue> {
        const Vector d = x - z;
        return convex::SmoothValue{surrogate(x, lip) - gamma_msd, grad + lip * d,
                                   lip * Matrix::Identity(x.size(), x.size())};
      });
      r.add_box(pb);

      Vector hat = z;
      const convex::InteriorPoint ip = convex::find_interior_point(pb, z);
      if (ip.found) hat = convex::minimize(pb, ip.x, barrier_options(1e-10)).x;
      next = z + step * (hat - z);
      const double tol = 1e-12 * std::max(1.0, gamma_msd);
      if (exact(hat) <= surrogate(hat, lip) + tol && exact(next) <= surrogate(next, lip) + tol) break;
      lipschitz *= 2.0;
    }

    p = r.expand(next);
    out.trace.iterates.push_back(entry(p));
    out.trace.iterations = k + 1;
    if ((next - z).cwiseAbs().maxCoeff() < options.tol) {
      out.trace.converged = true;
      break;
    }
    step = options.steps.next(step);
  }
  out.p = p;
  return out;
}

DesignResult dinkelbach_min_msd(const DesignSpec& spec, const DinkelbachOptions& options) {
  spec.validate();
  const double target = spec.lambda_target();
  const MaxLambda best = max_lambda_min(spec);
  if (!(best.lambda > target)) {
    throw InfeasibleError("rate target unattainable within the budget: largest lambda_min is " +
                              std::to_string(best.lambda),
                          best.lambda);
  }

  const Reduced r(spec);
  const Index a = r.size();
  const Vector w = r.noise.cwiseProduct(r.rows.rowwise().squaredNorm());  // Tr(G) = w^T p
  auto ratio_parts = [&](const Vector& pf) {
    return std::pair{w.dot(r.restrict(pf)), reconstructability_lambda(pf, spec.bandlimit)};
  };

  Vector p = options.start ? *options.start : best.p;
  check_size(p.size(), r.nodes, "dinkelbach start");
  auto [f0, g0] = ratio_parts(p);
  if (g0 < target - 1e-9 || p.sum() > spec.effective_budget() + 1e-9) {
    throw InfeasibleError("dinkelbach_min_msd: starting point violates the constraints", g0);
  }
  double omega = f0 / g0;

  DesignResult out;
  out.trace.iterates.push_back(TraceEntry{p, omega, lms_quantities(p, spec).msd, violation_c(p, spec, g0), 0.0});

  convex::Problem pb(a + 1);
  pb.lmis.push_back(lambda_lmi(r));
  Vector row = Vector::Zero(a + 1);
  row(a) = -1.0;
  pb.add_inequality(row, -target);
  r.add_box(pb);
  r.add_budget(pb, spec.effective_budget());

  for (int k = 0; k < options.max_iters; ++k) {
    pb.cost.head(a) = w;
    pb.cost(a) = -omega;
    Vector hint(a + 1);
    hint.head(a) = r.restrict(p);
    hint(a) = 0.5 * (target + reconstructability_lambda(p, spec.bandlimit));
    const Vector x0 = start_or_interior(pb, hint, "dinkelbach_min_msd");
    const convex::Result res = convex::minimize(pb, x0, barrier_options(1e-4 * options.tol));
    p = r.expand(res.x);
    const auto [f, g] = ratio_parts(p);
    const double h = f - omega * g;
    out.trace.iterates.push_back(TraceEntry{p, f / g, lms_quantities(p, spec).msd, violation_c(p, spec, g), h});
    out.trace.iterations = k + 1;
    if (std::abs(h) < options.tol) {
      out.trace.converged = true;
      break;
    }
    omega = f / g;
  }
  out.p = p;
  return out;
}

DesignResult sca_min_msd(const DesignSpec& spec, const ScaOptions& options) {
  spec.validate();
  const double target = spec.lambda_target();
  const Reduced r(spec);
  const Index a = r.size();

  convex::Problem base(a);
  base.lmis.push_back(rate_lmi(r, target));
  r.add_box(base);
  r.add_budget(base, spec.effective_budget());

  Vector p;
  if (options.start) {
    p = *options.start;
    check_size(p.size(), r.nodes, "sca_min_msd start");
  } else {
    const Vector half = r.expand(0.5 * r.upper);
    if (base.strictly_feasible(r.restrict(half))) {
      p = half;
    } else {
      const MaxLambda best = max_lambda_min(spec);
      if (!(best.lambda > target)) {
        throw InfeasibleError("rate target unattainable within the budget", best.lambda);
      }
      p = r.expand(start_or_interior(base, r.restrict(best.p), "sca_min_msd"));
    }
  }
  {
    const double lmin = reconstructability_lambda(p, spec.bandlimit);
    if (violation_c(p, spec, lmin) > 1e-9) {
      throw InfeasibleError("sca_min_msd: starting point violates the constraints", lmin);
    }
  }

  auto entry = [&](const Vector& pf) {
    const LmsQuantities q = lms_quantities(pf, spec);
    return TraceEntry{pf, q.msd, q.msd, violation_c(pf, spec, q.lambda_min), 0.0};
  };
  DesignResult out;
  out.trace.iterates.push_back(entry(p));
  double step = options.steps.gamma0;
  const double half_mu = 0.5 * spec.mu;

  for (int k = 0; k < options.max_iters; ++k) {
    const Vector z = r.restrict(p);
    const Eigen::LLT<Matrix> hz = linalg::invertible_factor(r.gram(z), "sca_min_msd");
    const Matrix gz = linalg::weighted_gram(r.rows, z.cwiseProduct(r.noise));
    // Linear term (mu/2) Tr[H(z)^{-1} G(p)] = sum_i p_i (mu/2) sigma_i^2 u_i^T H(z)^{-1} u_i.
    const Vector lin = half_mu * r.noise.cwiseProduct(
                                     r.rows.cwiseProduct(hz.solve(r.rows.transpose()).transpose()).rowwise().sum());

    convex::Problem pb = base;
    pb.cost = lin;
    const double tau = options.tau;
    pb.smooth_cost = [&, tau](const Vector& x) -> std::optional<convex::SmoothValue> {
      const Eigen::LLT<Matrix> hx(r.gram(x));
      if (hx.info() != Eigen::Success) return std::nullopt;
      const Matrix y = hx.solve(r.rows.transpose());  // H(x)^{-1} u_i per column
      const Matrix gy = gz * y;
      const Matrix b = r.rows * y;                    // u_i^T H^{-1} u_j
      const Matrix c = y.transpose() * gy;            // u_i^T H^{-1} G H^{-1} u_j
      const Vector d = x - z;
      convex::SmoothValue v;
      v.value = 0.5 * tau * d.squaredNorm() + half_mu * hx.solve(gz).trace();
      v.grad = tau * d - half_mu * c.diagonal();
      v.hess = 2.0 * half_mu * b.cwiseProduct(c);
      v.hess.diagonal().array() += tau;
      return v;
    };

    Vector x0 = z;
    if (!pb.strictly_feasible(x0)) x0 = start_or_interior(pb, z, "sca_min_msd");
    const double scale = std::max(lms_quantities(p, spec).msd, 1e-300);
    const Vector hat = convex::minimize(pb, x0, barrier_options(1e-10 * scale)).x;
    const Vector next = z + step * (hat - z);
    p = r.expand(next);
    out.trace.iterates.push_back(entry(p));
    out.trace.iterations = k + 1;
    if ((next - z).cwiseAbs().maxCoeff() < options.tol) {
      out.trace.converged = true;
      break;
    }
    step = options.steps.next(step);
  }
  out.p = p;
  return out;
}

DesignResult solve_rls_design(const DesignSpec& spec) {
  spec.validate();
  const Reduced r(spec);
  const Index a = r.size();
  const double factor = (1.0 - spec.beta) / (1.0 + spec.beta);
  const double limit = spec.msd_target / factor;  // bound on Tr(M(p)^{-1})
  const Matrix arows = r.noise.cwiseSqrt().cwiseInverse().asDiagonal() * r.rows;  // u_i / sigma_i

  auto trace_inverse = [&](const Vector& pa) -> double {
    const Matrix m = linalg::weighted_gram(arows, pa);
    const Eigen::LLT<Matrix> llt(m);
    if (llt.info() != Eigen::Success || a == 0) return kInf;
    return llt.solve(Matrix::Identity(m.rows(), m.cols())).trace();
  };

  const double at_max = a == 0 ? kInf : trace_inverse(r.upper);
  if (!(at_max <= limit)) {
    throw InfeasibleError("MSD target unattainable: p = p_max reaches MSD " + std::to_string(factor * at_max),
                          factor * at_max);
  }

  auto entry = [&](const Vector& pf) {
    const double msd = rls_msd_or_inf(pf, spec);
    return TraceEntry{pf, pf.sum(), msd, std::max(msd - spec.msd_target, 0.0), 0.0};
  };
  DesignResult out;
  if (at_max >= limit * (1.0 - 1e-12)) {
    out.p = r.expand(r.upper);
    out.trace.iterates.push_back(entry(out.p));
    out.trace.converged = true;
    return out;
  }

  convex::Problem pb(a);
  pb.cost.setOnes();
  pb.constraints.push_back([&](const Vector& x) -> std::optional<convex::SmoothValue> {
    const Eigen::LLT<Matrix> llt(linalg::weighted_gram(arows, x));
    if (llt.info() != Eigen::Success) return std::nullopt;
    const Matrix y = llt.solve(arows.transpose());  // M^{-1} a_i per column
    const Matrix b = arows * y;                     // a_i^T M^{-1} a_j
    const Matrix c = y.transpose() * y;             // a_i^T M^{-2} a_j
    convex::SmoothValue v;
    v.value = llt.solve(Matrix::Identity(arows.cols(), arows.cols())).trace() - limit;
    if (!std::isfinite(v.value)) return std::nullopt;
    v.grad = -c.diagonal();
    v.hess = 2.0 * b.cwiseProduct(c);
    return v;
  });
  r.add_box(pb);

  // Tr(M(theta p_max)^{-1}) = Tr(M(p_max)^{-1}) / theta, strictly below the limit.
  const double theta = 0.5 * (1.0 + at_max / limit);
  out.p = r.expand(solve_traced(pb, theta * r.upper, 1e-10, r, entry, out.trace));
  return out;
}

}  // namespace agsp
