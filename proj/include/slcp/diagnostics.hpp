#ifndef SLCP_DIAGNOSTICS_HPP
#define SLCP_DIAGNOSTICS_HPP

#include <optional>

#include <json.hpp>

#include "slcp/grid.hpp"
#include "slcp/solver.hpp"

// Numerical certification of the a-priori bounds satisfied by converged
// states: principal-curvature pinching, boundary obliqueness, the interior
// mean-curvature maximum principle, Hessian bounds, and uniqueness up to a
// constant.  Report sections keep the lemma-keyed names used by the
// diagnostics JSON schema.

namespace slcp {

struct DiagnosticsReport {
  double t = 0.0;
  double c = 0.0;
  double h = 0.0;          ///< grid mesh size entering tolerances
  double tolerance = 0.0;  ///< 1e-6 + 10 h^2

  // Curvature pinching (key "lemma_3_1"); only meaningful at t = 1.
  bool curvature_applicable = false;
  double theta0 = 0.0;
  double sigma1 = 0.0;  ///< (1 + R~^2)^{-(n+2)/2}, R~ = target bounding radius
  double sigma2 = 1.0;
  double m1 = 0.0;      ///< bound on min_i kappa_i
  double m2 = 0.0;      ///< bound on max_i kappa_i
  int curvature_violations = 0;
  double min_kappa_margin = 0.0;  ///< min over nodes of M1 + tol - min kappa
  double max_kappa_margin = 0.0;  ///< min over nodes of max kappa - M2 + tol

  // Boundary sign condition (key "lemma_3_3").
  double beta_dot_nu_min = 0.0;  ///< pass when >= -1e-8

  // Strict obliqueness (key "lemma_3_5").
  double obliqueness_min = 0.0;        ///< must be strictly positive
  double obliqueness_identity_error = 0.0;  ///< vs sqrt(beta'D2u beta * nu'(D2u)^-1 nu)

  // Mean-curvature maximum principle (key "lemma_4_4").
  double interior_h_sup = 0.0;
  double boundary_h_sup = 0.0;
  double mean_curvature_gap = 0.0;  ///< interior sup - boundary sup

  // Hessian pinching (key "lemma_4_12").
  double hessian_min = 0.0;
  double hessian_max = 0.0;

  // Uniqueness comparison (key "lemma_5_1"), set when two states supplied.
  std::optional<double> uniqueness_deviation;
  std::optional<double> uniqueness_delta_c;

  // Reported ratio sum (dG/dlambda_i) lambda_i^2 / sum F'_i kappa_i^2
  // (key "eq_2_16_ratio"); recorded, never asserted.
  double ratio_min = 0.0;
  double ratio_max = 0.0;

  // Bound sum F'_i kappa_i <= n pi / 2 (key "eq_2_17_bound").
  double fk_sum_max = 0.0;

  // det(a) v^{n+2} / det(D2u) across nodes.
  double det_identity_max_rel_error = 0.0;

  // Residual sanity of the certified state.
  double interior_residual_max = 0.0;
  double boundary_residual_max = 0.0;

  bool curvature_pass() const;
  bool sign_pass() const;
  bool obliqueness_pass() const;
  bool mean_curvature_pass() const;
  bool hessian_pass() const;
  bool bound_pass() const;
  bool det_identity_pass() const;
  bool residual_pass() const;
  bool c_bound_pass() const;
  bool uniqueness_pass() const;
  bool all_pass() const;

  nlohmann::json to_json() const;
};

/// Runs every section on a converged state; throws std::invalid_argument on
/// non-converged input.  Sections tied to the t = 1 problem are marked not
/// applicable for t < 1 and skipped by all_pass().
DiagnosticsReport run_diagnostics(const Grid& grid, const Domain& target,
                                  const SolveState& state);

/// max |u_a - u_b - mean(u_a - u_b)| over nodes; throws
/// std::invalid_argument on grid mismatch.
double uniqueness_check(const Grid& grid, const Eigen::VectorXd& u_a,
                        const Eigen::VectorXd& u_b);

}  // namespace slcp

#endif  // SLCP_DIAGNOSTICS_HPP
