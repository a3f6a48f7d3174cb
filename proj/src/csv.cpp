#include <iomanip>
#include <limits>
#include <ostream>

#include "agsp/experiment.hpp"

namespace agsp {

namespace {

struct PrecisionGuard {
  std::ostream& out;
  std::streamsize saved;
  explicit PrecisionGuard(std::ostream& o) : out(o), saved(o.precision(std::numeric_limits<double>::max_digits10)) {}
  ~PrecisionGuard() { out.precision(saved); }
};

}  // namespace

void write_curve_csv(const LearningCurve& curve, std::ostream& out) {
  PrecisionGuard guard(out);
  const double theory_db = to_db(curve.theory_msd);
  out << "iteration,msd_linear,msd_db,theory_msd_db,theory_rate\n";
  for (Index t = 0; t < curve.msd.size(); ++t) {
    out << t << ',' << curve.msd(t) << ',' << to_db(curve.msd(t)) << ',' << theory_db << ',' << curve.theory_rate
        << '\n';
  }
}

void write_centralized_csv(const LearningCurve& curve, std::ostream& out) {
  PrecisionGuard guard(out);
  out << "iteration,msd_linear,msd_db\n";
  for (Index t = 0; t < curve.centralized.size(); ++t) {
    out << t << ',' << curve.centralized(t) << ',' << to_db(curve.centralized(t)) << '\n';
  }
}

void write_comparison_csv(const std::vector<ComparisonRow>& rows, std::ostream& out) {
  PrecisionGuard guard(out);
  out << "alpha_bar,designed,max_det,leverage_score,uniform_mean,uniform_std\n";
  for (const ComparisonRow& r : rows) {
    out << r.alpha_bar << ',' << r.designed << ',' << r.max_det << ',' << r.leverage_score << ',' << r.uniform_mean
        << ',' << r.uniform_std << '\n';
  }
}

void write_probabilities_csv(const Vector& p, const NoiseModel& noise, const Vector& bounds, std::ostream& out) {
  if (noise.size() != p.size() || bounds.size() != p.size()) {
    throw DimensionError("write_probabilities_csv: dimension mismatch");
  }
  PrecisionGuard guard(out);
  out << "node,p,noise_variance,p_max\n";
  for (Index i = 0; i < p.size(); ++i) {
    out << i << ',' << p(i) << ',' << noise.variances()(i) << ',' << bounds(i) << '\n';
  }
}

void write_trace_csv(const SolverTrace& trace, std::ostream& out) {
  PrecisionGuard guard(out);
  out << "iteration,objective,msd\n";
  for (std::size_t k = 0; k < trace.iterates.size(); ++k) {
    out << k << ',' << trace.iterates[k].objective << ',' << trace.iterates[k].msd << '\n';
  }
}

}  // namespace agsp
