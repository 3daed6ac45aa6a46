#ifndef PROJGEOM_EQUIVALENCE_HPP
#define PROJGEOM_EQUIVALENCE_HPP

#include "projgeom/algebra.hpp"
#include "projgeom/two_projections.hpp"

#include <cmath>
#include <limits>

namespace projgeom {

/// Quantitative diagnostics for the equivalent finiteness conditions of a
/// projection pair.  In exact finite dimensions all conditions hold; the
/// report records how fast and how tightly.
struct EquivalenceReport {
  double norm_iterate_gap = 0.0;   // ||(pqp)^n - e|| at termination
  int iterations = 0;              // n at termination
  bool iterate_converged = false;  // iteration cap not reached (in-band)
  double spectral_gap_at_1 = 0.0;  // distance from 1 to the next cluster
  double c_value = 0.0;            // ||(p-e)(q-e)||
  bool join_in_algebra = false;
  double join_residual = 0.0;      // HS distance of p∨q from span-closure
  bool unit_in_algebra = false;
  double unit_join_gap = 0.0;      // ||unit - p∨q||
  double remark_i_value = 0.0;     // ||(f-p)(f-q)||
  double remark_ii_gap = 0.0;      // ||(p+q)^{1/n} - f|| at n = iterations
  bool contract_ok = false;        // iterate gap <= (1-gap)^n + eq_tol throughout
};

inline EquivalenceReport equivalence_battery(const ProjectionMatrix& p,
                                             const ProjectionMatrix& q,
                                             const Tolerance& tol = Tolerance{}) {
  require_same_dim(p, q);
  EquivalenceReport report;

  const Matrix e = meet(p, q, tol).matrix();
  const ProjectionMatrix f = join(p, q, tol);
  report.c_value = angle_c(p, q, tol);
  report.spectral_gap_at_1 = spectral_gap_at_one(p, q, tol);
  report.remark_i_value =
      op_norm((f.matrix() - p.matrix()) * (f.matrix() - q.matrix()));

  // Power iteration (pqp)^n -> e; rate bounded by the largest sub-1
  // eigenvalue, i.e. 1 - spectral gap.
  const Matrix pqp = p.matrix() * q.matrix() * p.matrix();
  const double rate = 1.0 - report.spectral_gap_at_1;
  Matrix power = pqp;
  report.contract_ok = true;
  for (int n = 1; n <= tol.iter_max; ++n) {
    report.iterations = n;
    report.norm_iterate_gap = op_norm(power - e);
    if (report.norm_iterate_gap > std::pow(rate, n) + tol.eq_tol)
      report.contract_ok = false;
    if (report.norm_iterate_gap <= tol.eq_tol) {
      report.iterate_converged = true;
      break;
    }
    power = power * pqp;
  }

  const SpanAlgebra alg =
      SpanAlgebra::span_closure({p.matrix(), q.matrix()}, tol);
  const double memb_tol = 100.0 * tol.eq_tol;
  report.join_residual = membership_residual(alg, f.matrix());
  report.join_in_algebra = report.join_residual <= memb_tol;

  if (const auto unit = unit_of(alg, tol)) {
    report.unit_join_gap = op_norm(unit->matrix() - f.matrix());
    report.unit_in_algebra = report.unit_join_gap <= memb_tol;
  } else {
    report.unit_join_gap = std::numeric_limits<double>::infinity();
    report.unit_in_algebra = false;
  }

  // n-th root of p+q via functional calculus, eigenvalues below the cluster
  // guard treated as zero.
  const int nroot = std::max(report.iterations, 1);
  const Matrix root = hermitian_function(
      p.matrix() + q.matrix(),
      [&](double lam) {
        return lam > tol.cluster_tol ? std::pow(lam, 1.0 / nroot) : 0.0;
      },
      tol);
  report.remark_ii_gap = op_norm(root - f.matrix());
  return report;
}

}  // namespace projgeom

#endif  // PROJGEOM_EQUIVALENCE_HPP
