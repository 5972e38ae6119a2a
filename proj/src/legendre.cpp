#include "slcp/legendre.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "slcp/errors.hpp"
#include "slcp/operator_core.hpp"

namespace slcp {

namespace {
constexpr double kPi = std::numbers::pi;
}

DualField legendre_transform(const Grid& grid, const Eigen::VectorXd& u,
                             GridPtr grid_dual, double c, double t,
                             double convexity_guard) {
  const int n_src = grid.node_count();
  std::vector<Grid::Derivs> derivs(n_src);
  for (int k = 0; k < n_src; ++k) {
    derivs[k] = grid.eval_derivatives(u, k);
    Eigen::SelfAdjointEigenSolver<Mat2> es(derivs[k].d2u);
    if (es.eigenvalues()[0] < convexity_guard) {
      throw std::invalid_argument(
          "legendre_transform: field not convex on its grid");
    }
  }

  DualField dual;
  dual.grid_dual = std::move(grid_dual);
  dual.c_dual = kPi - c;  // n pi/2 with n = 2
  dual.t = t;
  dual.u_star.resize(dual.grid_dual->node_count());

  for (int q = 0; q < dual.grid_dual->node_count(); ++q) {
    const Vec2 y = dual.grid_dual->node_position(q);
    // Global conjugate scan; ties broken toward the lowest node index.
    int best = 0;
    double best_value = y.dot(grid.node_position(0)) - u[0];
    for (int k = 1; k < n_src; ++k) {
      const double value = y.dot(grid.node_position(k)) - u[k];
      if (value > best_value) {
        best_value = value;
        best = k;
      }
    }
    // One correction from the local quadratic model at the argmax node:
    // sup_x (y.x - model(x)) = y.x_k - u_k + 1/2 (y-g)^T H^{-1} (y-g).
    const Grid::Derivs& d = derivs[best];
    const Vec2 residual = y - d.du;
    dual.u_star[q] = y.dot(grid.node_position(best)) - u[best] +
                     0.5 * residual.dot(d.d2u.inverse() * residual);
  }
  return dual;
}

Eigen::VectorXd dual_residual(const DualField& dual) {
  const Grid& gd = *dual.grid_dual;
  Eigen::VectorXd res = Eigen::VectorXd::Zero(gd.node_count());
  Vector mu(2), lambda(2);
  for (int q = 0; q < gd.node_count(); ++q) {
    if (gd.is_boundary(q)) continue;
    const Grid::Derivs d = gd.eval_derivatives(dual.u_star, q);
    if (std::abs(d.d2u.determinant()) < 1e-14) {
      throw GeometryError("dual_residual: singular discrete dual Hessian");
    }
    const Vec2 y = gd.node_position(q);
    const double w = std::sqrt(1.0 + y.squaredNorm());
    Mat2 b_lower = Mat2::Identity() + y * y.transpose() / (1.0 + w);
    const Mat2 a_star = w * b_lower * d.d2u * b_lower;

    Eigen::SelfAdjointEigenSolver<Mat2> es_a(a_star);
    mu << es_a.eigenvalues()[0], es_a.eigenvalues()[1];
    Eigen::SelfAdjointEigenSolver<Mat2> es_h(d.d2u);
    lambda << es_h.eigenvalues()[0], es_h.eigenvalues()[1];

    res[q] = dual.t * principal_curvature_f(mu) +
             (1.0 - dual.t) * principal_curvature_f(lambda) - dual.c_dual;
  }
  return res;
}

GradientRoundtrip gradient_roundtrip(const Grid& grid,
                                     const Eigen::VectorXd& u,
                                     const Grid& grid_dual,
                                     const Eigen::VectorXd& u_star) {
  const int n_dual = grid_dual.node_count();
  Eigen::VectorXd dual_ux(n_dual), dual_uy(n_dual);
  for (int q = 0; q < n_dual; ++q) {
    const Grid::Derivs d = grid_dual.eval_derivatives(u_star, q);
    dual_ux[q] = d.du[0];
    dual_uy[q] = d.du[1];
  }

  GradientRoundtrip result;
  for (int k = 0; k < grid.node_count(); ++k) {
    if (grid.is_boundary(k)) continue;
    const Grid::Derivs d = grid.eval_derivatives(u, k);
    double rho = 0.0, phi = 0.0;
    if (!grid_dual.chart_coords(d.du, rho, phi)) {
      ++result.coverage_gaps;
      continue;
    }
    const Vec2 mapped(grid_dual.interpolate(dual_ux, rho, phi),
                      grid_dual.interpolate(dual_uy, rho, phi));
    result.max_error = std::max(
        result.max_error, (mapped - grid.node_position(k)).norm());
    ++result.samples;
  }
  return result;
}

}  // namespace slcp
