#ifndef SLCP_SOLVER_HPP
#define SLCP_SOLVER_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <vector>

#include "slcp/grid.hpp"

// Damped Newton solver for the discretized problem
//   G^t(Du, D2u) = c   at interior nodes,
//   h_target(Du) = 0   at boundary nodes,
// with the constant c treated as a bordered unknown closed by a
// normalization row, continued in t from the Hessian-eigenvalue operator
// at t = 0 to the curvature operator at t = 1.

namespace slcp {

struct SolveConfig {
  double newton_tol = 1e-10;     ///< residual max-norm target
  int max_newton_iters = 30;
  double armijo_factor = 1e-4;
  double min_line_search_step = 1.0 / 1048576.0;  // 2^-20
  int homotopy_steps = 10;
  bool adaptive = false;
  double min_dt = 1.0 / 256.0;
  double convexity_guard = 1e-8;  ///< min allowed eigenvalue of discrete D2u
  enum class Normalization { kMeanZero, kPoleZero };
  Normalization normalization = Normalization::kMeanZero;
};

enum class SolveFailure {
  kNone,
  kLineSearchStall,
  kMaxIterations,
  kConvexityLost,
  kSingularSystem,
  kStepUnderflow,  // continuation could not proceed above min_dt
};

const char* to_string(SolveFailure failure);

struct NewtonRecord {
  int iteration = 0;
  double residual = 0.0;
  double step_length = 0.0;
};

struct StageRecord {
  double t = 0.0;
  double c = 0.0;
  int newton_iters = 0;
  double residual = 0.0;
};

struct SolveState {
  Eigen::VectorXd u;
  double c = 0.0;
  double t = 0.0;
  double residual_norm = 0.0;
  std::vector<NewtonRecord> newton_history;
  bool converged = false;
  SolveFailure failure = SolveFailure::kNone;
  std::vector<StageRecord> t_trace;
  double condition_estimate = 0.0;  ///< bordered system, at last factorization
};

/// One residual per node (interior: G^t - c; boundary: h_target(Du)) plus
/// the normalization row; length node_count() + 1.  Throws
/// ConvexityLostError when the discrete Hessian violates the guard.
Eigen::VectorXd assemble_residual(
    const Grid& grid, const Domain& target, const Eigen::VectorXd& u, double c,
    double t, double convexity_guard = 1e-8,
    SolveConfig::Normalization normalization =
        SolveConfig::Normalization::kMeanZero);

/// Jacobian of assemble_residual with respect to (u, c); the trailing
/// column is d/dc (-1 on interior rows).
Eigen::SparseMatrix<double> assemble_jacobian(
    const Grid& grid, const Domain& target, const Eigen::VectorXd& u, double c,
    double t, double convexity_guard = 1e-8,
    SolveConfig::Normalization normalization =
        SolveConfig::Normalization::kMeanZero);

/// Damped Newton (Armijo on the residual max-norm) at fixed t from the
/// given state.  Never throws on solve failure; inspect converged/failure.
SolveState solve_at_t(const Grid& grid, const Domain& target, double t,
                      SolveState initial, const SolveConfig& config);

/// Moment-matched uniformly convex quadratic whose gradient maps the
/// source approximately onto the target.
Eigen::VectorXd quadratic_initial_guess(const Grid& grid,
                                        const Domain& target,
                                        double hessian_scale = 1.0);

/// Full continuation from t = 0 to t = 1.  On stage failure the returned
/// state carries the partial trace and the failure kind.
SolveState continuation_solve(const Grid& grid, const Domain& target,
                              const SolveConfig& config);

/// Projects the field onto the normalization (mean-zero or pole-zero).
void normalize_field(const Grid& grid, Eigen::VectorXd& u,
                     SolveConfig::Normalization normalization);

}  // namespace slcp

#endif  // SLCP_SOLVER_HPP
