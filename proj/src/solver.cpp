#include "slcp/solver.hpp"

#include <Eigen/SparseLU>
#include <cmath>
#include <random>

#include "slcp/errors.hpp"
#include "slcp/operator_core.hpp"

namespace slcp {

namespace {

double min_eigenvalue_2x2(const Mat2& m) {
  const double tr = m.trace();
  const double det = m.determinant();
  const double disc = std::sqrt(std::max(0.0, tr * tr - 4.0 * det));
  return 0.5 * (tr - disc);
}

void check_convexity(const Mat2& d2u, double guard, int node) {
  if (min_eigenvalue_2x2(d2u) < guard) {
    throw ConvexityLostError("discrete Hessian lost convexity at node " +
                             std::to_string(node));
  }
}

double normalization_value(const Grid& grid, const Eigen::VectorXd& u,
                           SolveConfig::Normalization normalization) {
  if (normalization == SolveConfig::Normalization::kPoleZero) {
    return u[0];
  }
  const auto& w = grid.interior_weights();
  double acc = 0.0;
  for (int k = 0; k < grid.node_count(); ++k) {
    acc += w[k] * u[k];
  }
  return acc;
}

using SparseMat = Eigen::SparseMatrix<double>;
using LuSolver = Eigen::SparseLU<SparseMat, Eigen::COLAMDOrdering<int>>;

double infinity_norm(const SparseMat& m) {
  Eigen::VectorXd row_sums = Eigen::VectorXd::Zero(m.rows());
  for (int k = 0; k < m.outerSize(); ++k) {
    for (SparseMat::InnerIterator it(m, k); it; ++it) {
      row_sums[it.row()] += std::abs(it.value());
    }
  }
  return row_sums.maxCoeff();
}

double estimate_condition(const SparseMat& jac, LuSolver& lu) {
  // Crude but deterministic: ||J||_inf times a sampled lower bound on
  // ||J^{-1}||_inf from a few random sign vectors.
  std::mt19937_64 rng(0);
  double inv_norm = 0.0;
  Eigen::VectorXd b(jac.rows());
  for (int trial = 0; trial < 4; ++trial) {
    for (int i = 0; i < b.size(); ++i) {
      b[i] = (rng() & 1) ? 1.0 : -1.0;
    }
    const Eigen::VectorXd x = lu.solve(b);
    inv_norm = std::max(inv_norm, x.cwiseAbs().maxCoeff());
  }
  return infinity_norm(jac) * inv_norm;
}

}  // namespace

const char* to_string(SolveFailure failure) {
  switch (failure) {
    case SolveFailure::kNone: return "none";
    case SolveFailure::kLineSearchStall: return "line_search_stall";
    case SolveFailure::kMaxIterations: return "max_iterations";
    case SolveFailure::kConvexityLost: return "convexity_lost";
    case SolveFailure::kSingularSystem: return "singular_system";
    case SolveFailure::kStepUnderflow: return "step_underflow";
  }
  return "unknown";
}

void normalize_field(const Grid& grid, Eigen::VectorXd& u,
                     SolveConfig::Normalization normalization) {
  if (normalization == SolveConfig::Normalization::kPoleZero) {
    u.array() -= u[0];
    return;
  }
  const auto& w = grid.interior_weights();
  double total = 0.0;
  double acc = 0.0;
  for (int k = 0; k < grid.node_count(); ++k) {
    total += w[k];
    acc += w[k] * u[k];
  }
  u.array() -= acc / total;
}

Eigen::VectorXd assemble_residual(const Grid& grid, const Domain& target,
                                  const Eigen::VectorXd& u, double c, double t,
                                  double convexity_guard,
                                  SolveConfig::Normalization normalization) {
  const int n = grid.node_count();
  Eigen::VectorXd r(n + 1);
  Vector du(2);
  for (int k = 0; k < n; ++k) {
    const Grid::Derivs d = grid.eval_derivatives(u, k);
    check_convexity(d.d2u, convexity_guard, k);
    if (grid.is_boundary(k)) {
      r[k] = target.h(d.du);
    } else {
      du << d.du[0], d.du[1];
      r[k] = homotopy_value(t, du, d.d2u) - c;
    }
  }
  r[n] = normalization_value(grid, u, normalization);
  return r;
}

Eigen::SparseMatrix<double> assemble_jacobian(
    const Grid& grid, const Domain& target, const Eigen::VectorXd& u, double c,
    double t, double convexity_guard,
    SolveConfig::Normalization normalization) {
  (void)c;
  const int n = grid.node_count();
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<size_t>(n) * 18 + n + 2);

  Vector du(2);
  for (int k = 0; k < n; ++k) {
    const Grid::Derivs d = grid.eval_derivatives(u, k);
    check_convexity(d.d2u, convexity_guard, k);
    const Grid::Stencil& st = grid.stencil(k);
    const int m = static_cast<int>(st.nodes.size());

    Eigen::Matrix<double, 5, 1> sens;  // d(residual)/d(ux,uy,uxx,uxy,uyy)
    if (grid.is_boundary(k)) {
      const Vec2 beta = target.grad_h(d.du);
      sens << beta[0], beta[1], 0.0, 0.0, 0.0;
    } else {
      du << d.du[0], d.du[1];
      const Linearization lin = linearization(t, du, d.d2u);
      // The recovered cross term feeds both off-diagonal Hessian slots.
      sens << lin.g_gradient[0], lin.g_gradient[1], lin.g_matrix(0, 0),
          2.0 * lin.g_matrix(0, 1), lin.g_matrix(1, 1);
      triplets.emplace_back(k, n, -1.0);
    }
    double self_correction = 0.0;
    for (int s = 0; s < m; ++s) {
      const double w = sens.dot(st.weights.col(s));
      self_correction += w;
      triplets.emplace_back(k, st.nodes[s], w);
    }
    // Derivatives are taken of values centered at the node's own value.
    triplets.emplace_back(k, k, -self_correction);
  }

  if (normalization == SolveConfig::Normalization::kPoleZero) {
    triplets.emplace_back(n, 0, 1.0);
  } else {
    const auto& w = grid.interior_weights();
    for (int k = 0; k < n; ++k) {
      if (w[k] != 0.0) {
        triplets.emplace_back(n, k, w[k]);
      }
    }
  }

  Eigen::SparseMatrix<double> jac(n + 1, n + 1);
  jac.setFromTriplets(triplets.begin(), triplets.end());
  jac.makeCompressed();
  return jac;
}

SolveState solve_at_t(const Grid& grid, const Domain& target, double t,
                      SolveState initial, const SolveConfig& config) {
  SolveState state = std::move(initial);
  state.t = t;
  state.converged = false;
  state.failure = SolveFailure::kNone;
  state.newton_history.clear();

  const int n = grid.node_count();
  Eigen::VectorXd residual;
  try {
    residual = assemble_residual(grid, target, state.u, state.c, t,
                                 config.convexity_guard,
                                 config.normalization);
  } catch (const ConvexityLostError&) {
    state.failure = SolveFailure::kConvexityLost;
    return state;
  }
  double res_norm = residual.cwiseAbs().maxCoeff();
  state.newton_history.push_back({0, res_norm, 0.0});

  LuSolver lu;
  for (int iter = 1; iter <= config.max_newton_iters; ++iter) {
    if (res_norm <= config.newton_tol) break;

    Eigen::SparseMatrix<double> jac;
    try {
      jac = assemble_jacobian(grid, target, state.u, state.c, t,
                              config.convexity_guard, config.normalization);
    } catch (const ConvexityLostError&) {
      state.failure = SolveFailure::kConvexityLost;
      break;
    }
    lu.compute(jac);
    if (lu.info() != Eigen::Success) {
      state.failure = SolveFailure::kSingularSystem;
      break;
    }
    state.condition_estimate = estimate_condition(jac, lu);
    const Eigen::VectorXd step = lu.solve(-residual);

    // Armijo backtracking on the residual max-norm.
    double s = 1.0;
    bool accepted = false;
    while (s >= config.min_line_search_step) {
      const Eigen::VectorXd u_trial = state.u + s * step.head(n);
      const double c_trial = state.c + s * step[n];
      try {
        const Eigen::VectorXd r_trial =
            assemble_residual(grid, target, u_trial, c_trial, t,
                              config.convexity_guard, config.normalization);
        const double norm_trial = r_trial.cwiseAbs().maxCoeff();
        if (norm_trial <= (1.0 - config.armijo_factor * s) * res_norm) {
          state.u = u_trial;
          state.c = c_trial;
          residual = r_trial;
          res_norm = norm_trial;
          accepted = true;
          break;
        }
      } catch (const ConvexityLostError&) {
        // reject the trial step
      }
      s *= 0.5;
    }
    if (!accepted) {
      state.failure = SolveFailure::kLineSearchStall;
      break;
    }
    state.newton_history.push_back({iter, res_norm, s});
  }

  state.residual_norm = res_norm;
  if (res_norm <= config.newton_tol) {
    state.converged = true;
    state.failure = SolveFailure::kNone;
  } else if (state.failure == SolveFailure::kNone) {
    state.failure = SolveFailure::kMaxIterations;
  }
  return state;
}

Eigen::VectorXd quadratic_initial_guess(const Grid& grid,
                                        const Domain& target,
                                        double hessian_scale) {
  const Domain& source = grid.domain();
  const Vec2 xc = source.centroid();
  const Vec2 yc = target.centroid();
  const Mat2 cov_src =
      source.second_moment() - xc * xc.transpose();
  const Mat2 cov_tgt =
      target.second_moment() - yc * yc.transpose();

  // SPD transport map between the two covariances:
  // S = C^{-1/2} (C^{1/2} Ctilde C^{1/2})^{1/2} C^{-1/2}.
  const auto spd_sqrt = [](const Mat2& m) -> Mat2 {
    Eigen::SelfAdjointEigenSolver<Mat2> es(m);
    return es.eigenvectors() *
           es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
           es.eigenvectors().transpose();
  };
  const Mat2 root = spd_sqrt(cov_src);
  const Mat2 root_inv = root.inverse();
  const Mat2 mapped = spd_sqrt(root * cov_tgt * root);
  const Mat2 s = hessian_scale * (root_inv * mapped * root_inv);

  Eigen::VectorXd u(grid.node_count());
  for (int k = 0; k < grid.node_count(); ++k) {
    const Vec2 d = grid.node_position(k) - xc;
    u[k] = 0.5 * d.dot(s * d) + yc.dot(grid.node_position(k));
  }
  return u;
}

SolveState continuation_solve(const Grid& grid, const Domain& target,
                              const SolveConfig& config) {
  SolveState state;
  state.u = quadratic_initial_guess(grid, target);
  normalize_field(grid, state.u, config.normalization);

  // Start c at the mean interior operator value of the initial guess.
  {
    double acc = 0.0;
    int count = 0;
    Vector du(2);
    for (int k = 0; k < grid.node_count(); ++k) {
      if (grid.is_boundary(k)) continue;
      const Grid::Derivs d = grid.eval_derivatives(state.u, k);
      du << d.du[0], d.du[1];
      acc += homotopy_value(0.0, du, d.d2u);
      ++count;
    }
    state.c = acc / count;
  }

  const auto run_stage = [&](double t, SolveState& current) {
    SolveState next = solve_at_t(grid, target, t, current, config);
    next.t_trace = std::move(current.t_trace);
    if (next.converged) {
      next.t_trace.push_back(
          {t, next.c, static_cast<int>(next.newton_history.size()) - 1,
           next.residual_norm});
    }
    current = std::move(next);
    return current.converged;
  };

  if (!run_stage(0.0, state)) {
    return state;
  }

  if (!config.adaptive) {
    for (int k = 1; k <= config.homotopy_steps; ++k) {
      const double t = static_cast<double>(k) / config.homotopy_steps;
      if (!run_stage(t, state)) {
        return state;
      }
    }
    return state;
  }

  double t = 0.0;
  double dt = 1.0 / config.homotopy_steps;
  int easy_stages = 0;
  while (t < 1.0) {
    const double t_next = std::min(1.0, t + dt);
    SolveState trial = state;
    if (run_stage(t_next, trial)) {
      state = std::move(trial);
      t = t_next;
      const int iters = state.t_trace.back().newton_iters;
      easy_stages = (iters <= 4) ? easy_stages + 1 : 0;
      if (easy_stages >= 2 && dt < 0.25) {
        dt *= 2.0;
        easy_stages = 0;
      }
    } else {
      dt *= 0.5;
      if (dt < config.min_dt) {
        state.converged = false;
        state.failure = SolveFailure::kStepUnderflow;
        return state;
      }
    }
  }
  return state;
}

}  // namespace slcp
