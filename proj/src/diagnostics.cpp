#include "slcp/diagnostics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "slcp/operator_core.hpp"

namespace slcp {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kResidualTol = 1e-6;
}

bool DiagnosticsReport::curvature_pass() const {
  return !curvature_applicable || curvature_violations == 0;
}
bool DiagnosticsReport::sign_pass() const { return beta_dot_nu_min >= -1e-8; }
bool DiagnosticsReport::obliqueness_pass() const {
  return obliqueness_min > 0.0 &&
         obliqueness_identity_error <= 10.0 * h * h;
}
bool DiagnosticsReport::mean_curvature_pass() const {
  return mean_curvature_gap <= tolerance;
}
bool DiagnosticsReport::hessian_pass() const { return hessian_min > 0.0; }
bool DiagnosticsReport::bound_pass() const { return fk_sum_max <= kPi; }
bool DiagnosticsReport::det_identity_pass() const {
  return det_identity_max_rel_error <= 1e-8;
}
bool DiagnosticsReport::residual_pass() const {
  return interior_residual_max <= kResidualTol &&
         boundary_residual_max <= kResidualTol;
}
bool DiagnosticsReport::c_bound_pass() const { return std::abs(c) <= 2.0 * kPi; }
bool DiagnosticsReport::uniqueness_pass() const {
  if (!uniqueness_deviation) return true;
  return *uniqueness_deviation <= 1e-8 &&
         (!uniqueness_delta_c || std::abs(*uniqueness_delta_c) <= 1e-8);
}

bool DiagnosticsReport::all_pass() const {
  return curvature_pass() && sign_pass() && obliqueness_pass() &&
         mean_curvature_pass() && hessian_pass() && bound_pass() &&
         det_identity_pass() && residual_pass() && c_bound_pass() &&
         uniqueness_pass();
}

nlohmann::json DiagnosticsReport::to_json() const {
  nlohmann::json j;
  j["t"] = t;
  j["c"] = c;
  j["h"] = h;
  j["tolerance"] = tolerance;
  if (curvature_applicable) {
    j["lemma_3_1"] = {{"applicable", true},
                      {"pass", curvature_pass()},
                      {"theta0", theta0},
                      {"sigma1", sigma1},
                      {"sigma2", sigma2},
                      {"m1", m1},
                      {"m2", m2},
                      {"violations", curvature_violations},
                      {"min_kappa_margin", min_kappa_margin},
                      {"max_kappa_margin", max_kappa_margin}};
  } else {
    j["lemma_3_1"] = {{"applicable", false},
                      {"note", "not applicable (t<1)"}};
  }
  j["lemma_3_3"] = {{"pass", sign_pass()},
                    {"min_beta_dot_nu", beta_dot_nu_min}};
  j["lemma_3_5"] = {{"pass", obliqueness_pass()},
                    {"obliqueness_min", obliqueness_min},
                    {"identity_error", obliqueness_identity_error},
                    {"identity_tol", 10.0 * h * h}};
  j["lemma_4_4"] = {{"pass", mean_curvature_pass()},
                    {"gap", mean_curvature_gap},
                    {"interior_sup", interior_h_sup},
                    {"boundary_sup", boundary_h_sup}};
  j["lemma_4_12"] = {{"pass", hessian_pass()},
                     {"min", hessian_min},
                     {"max", hessian_max},
                     {"ratio", hessian_max / hessian_min}};
  if (uniqueness_deviation) {
    j["lemma_5_1"] = {{"applicable", true},
                      {"pass", uniqueness_pass()},
                      {"deviation", *uniqueness_deviation}};
    if (uniqueness_delta_c) {
      j["lemma_5_1"]["delta_c"] = *uniqueness_delta_c;
    }
  } else {
    j["lemma_5_1"] = {{"applicable", false}};
  }
  j["eq_2_16_ratio"] = {{"min", ratio_min}, {"max", ratio_max}};
  j["eq_2_17_bound"] = {{"pass", bound_pass()},
                        {"max", fk_sum_max},
                        {"bound", kPi}};
  j["det_identity"] = {{"pass", det_identity_pass()},
                       {"max_rel_error", det_identity_max_rel_error}};
  j["residuals"] = {{"pass", residual_pass()},
                    {"interior_max", interior_residual_max},
                    {"boundary_max", boundary_residual_max},
                    {"tol", kResidualTol}};
  j["c_bound"] = {{"pass", c_bound_pass()}, {"abs_c", std::abs(c)}};
  j["all_pass"] = all_pass();
  return j;
}

DiagnosticsReport run_diagnostics(const Grid& grid, const Domain& target,
                                  const SolveState& state) {
  if (!state.converged) {
    throw std::invalid_argument("run_diagnostics: state not converged");
  }
  const Domain& source = grid.domain();
  DiagnosticsReport rep;
  rep.t = state.t;
  rep.c = state.c;
  rep.h = grid.mesh_h();
  rep.tolerance = 1e-6 + 10.0 * rep.h * rep.h;

  rep.theta0 = theta0(source, target);
  const double rt = target.bounding_radius();
  rep.sigma1 = std::pow(1.0 + rt * rt, -2.0);  // n = 2: exponent (n+2)/2
  rep.sigma2 = 1.0;
  rep.m1 = std::tan((std::atan(std::sqrt(rep.sigma2 * rep.theta0)) +
                     0.5 * kPi) /
                    2.0);
  rep.m2 = std::tan(std::atan(std::sqrt(rep.sigma1 * rep.theta0)) / 2.0);
  rep.curvature_applicable = state.t >= 1.0;

  double min_margin = std::numeric_limits<double>::infinity();
  double max_margin = std::numeric_limits<double>::infinity();
  double interior_h = -std::numeric_limits<double>::infinity();
  double boundary_h = -std::numeric_limits<double>::infinity();
  double hess_min = std::numeric_limits<double>::infinity();
  double hess_max = -std::numeric_limits<double>::infinity();
  double ratio_min = std::numeric_limits<double>::infinity();
  double ratio_max = -std::numeric_limits<double>::infinity();
  double fk_max = -std::numeric_limits<double>::infinity();
  double det_err = 0.0;
  double int_res = 0.0;
  double bdry_res = 0.0;
  double beta_nu_min = std::numeric_limits<double>::infinity();
  double identity_err = 0.0;

  Vector du(2);
  for (int k = 0; k < grid.node_count(); ++k) {
    const Grid::Derivs d = grid.eval_derivatives(state.u, k);
    du << d.du[0], d.du[1];
    const GraphGeometry geo = graph_geometry(du, d.d2u);
    const double kmin = geo.kappa[0];
    const double kmax = geo.kappa[1];
    const double mean_curv = geo.kappa.sum();

    if (rep.curvature_applicable) {
      const bool ok = kmin <= rep.m1 + rep.tolerance &&
                      kmax >= rep.m2 - rep.tolerance;
      if (!ok) ++rep.curvature_violations;
      min_margin = std::min(min_margin, rep.m1 + rep.tolerance - kmin);
      max_margin = std::min(max_margin, kmax - rep.m2 + rep.tolerance);
    }

    Eigen::SelfAdjointEigenSolver<Mat2> es(d.d2u);
    hess_min = std::min(hess_min, es.eigenvalues()[0]);
    hess_max = std::max(hess_max, es.eigenvalues()[1]);

    const FDerivatives fd = f_derivatives(geo.kappa);
    fk_max = std::max(fk_max, (fd.gradient.array() * geo.kappa.array()).sum());

    const double det_ratio = geo.a.determinant() * std::pow(geo.v, 4) /
                             d.d2u.determinant();
    det_err = std::max(det_err, std::abs(det_ratio - 1.0));

    // Hessian-eigenvalue weighted trace of the curvature linearization,
    // against sum F'_i kappa_i^2.
    {
      const Linearization lin = linearization(1.0, du, d.d2u);
      double numer = 0.0;
      for (int i = 0; i < 2; ++i) {
        const Eigen::Vector2d q = es.eigenvectors().col(i);
        numer += q.dot(lin.g_matrix * q) * es.eigenvalues()[i] *
                 es.eigenvalues()[i];
      }
      const double denom =
          (fd.gradient.array() * geo.kappa.array().square()).sum();
      const double ratio = numer / denom;
      ratio_min = std::min(ratio_min, ratio);
      ratio_max = std::max(ratio_max, ratio);
    }

    if (grid.is_boundary(k)) {
      boundary_h = std::max(boundary_h, mean_curv);
      bdry_res = std::max(bdry_res, std::abs(target.h(d.du)));

      const Vec2 beta = target.grad_h(d.du);
      const Vec2 nu = grid.boundary_normal(grid.node_angle(k));
      const double bn = beta.dot(nu);
      beta_nu_min = std::min(beta_nu_min, bn);
      const double lhs_sq = beta.dot(d.d2u * beta) *
                            nu.dot(d.d2u.inverse() * nu);
      identity_err = std::max(
          identity_err, std::abs(bn - std::sqrt(std::max(0.0, lhs_sq))));
    } else {
      interior_h = std::max(interior_h, mean_curv);
      int_res = std::max(
          int_res, std::abs(homotopy_value(state.t, du, d.d2u) - state.c));
    }
  }

  rep.min_kappa_margin = min_margin;
  rep.max_kappa_margin = max_margin;
  rep.beta_dot_nu_min = beta_nu_min;
  rep.obliqueness_min = beta_nu_min;
  rep.obliqueness_identity_error = identity_err;
  rep.interior_h_sup = interior_h;
  rep.boundary_h_sup = boundary_h;
  rep.mean_curvature_gap = interior_h - boundary_h;
  rep.hessian_min = hess_min;
  rep.hessian_max = hess_max;
  rep.ratio_min = ratio_min;
  rep.ratio_max = ratio_max;
  rep.fk_sum_max = fk_max;
  rep.det_identity_max_rel_error = det_err;
  rep.interior_residual_max = int_res;
  rep.boundary_residual_max = bdry_res;
  return rep;
}

double uniqueness_check(const Grid& grid, const Eigen::VectorXd& u_a,
                        const Eigen::VectorXd& u_b) {
  if (u_a.size() != grid.node_count() || u_b.size() != grid.node_count()) {
    throw std::invalid_argument("uniqueness_check: grid mismatch");
  }
  const Eigen::VectorXd diff = u_a - u_b;
  return (diff.array() - diff.mean()).abs().maxCoeff();
}

}  // namespace slcp
