#ifndef SLCP_OPERATOR_CORE_HPP
#define SLCP_OPERATOR_CORE_HPP

#include <Eigen/Dense>
#include <cstdint>

// Point-wise algebra of the graph curvature operator F(kappa) = sum_i
// arctan(kappa_i) and of its homotopy blend with the Hessian-eigenvalue
// operator sum_i arctan(lambda_i(D2u)).  Everything here is pure and
// dimension-generic; the PDE solver instantiates it with n = 2.

namespace slcp {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Point-wise geometry of the graph of u derived from (Du, D2u):
/// induced inverse metric, its positive square root, and the symmetric
/// curvature matrix whose eigenvalues are the principal curvatures.
struct GraphGeometry {
  Vector du;        ///< gradient
  Matrix d2u;       ///< symmetrized Hessian
  double v = 1.0;   ///< sqrt(1 + |Du|^2)
  Matrix g_inv;     ///< I - du du^T / v^2
  Matrix b_upper;   ///< positive square root of g_inv
  Matrix b_lower;   ///< inverse of b_upper
  Matrix a;         ///< (1/v) b_upper d2u b_upper
  Vector kappa;     ///< eigenvalues of a, ascending
  Matrix a_eigvecs; ///< orthonormal eigenbasis of a, columns match kappa
};

/// Builds the point-wise geometry bundle.  Throws std::invalid_argument if
/// d2u is not symmetric to 1e-9 or the sizes are inconsistent.
GraphGeometry graph_geometry(const Vector& du, const Matrix& d2u);

/// F(kappa) = sum_i arctan(kappa_i), valued in (-n pi/2, n pi/2).
double principal_curvature_f(const Vector& kappa);

struct FDerivatives {
  Vector gradient;      ///< dF/dkappa_i = 1/(1+kappa_i^2)
  Vector hessian_diag;  ///< d2F/dkappa_i^2 = -2 kappa_i/(1+kappa_i^2)^2
};
FDerivatives f_derivatives(const Vector& kappa);

/// Homotopy operator value t*F[a(du,d2u)] + (1-t)*sum_i arctan(lambda_i(d2u)).
/// At t = 0 the value does not depend on du.
double homotopy_value(double t, const Vector& du, const Matrix& d2u);

/// First derivatives of the homotopy operator with respect to the Hessian
/// entries (full-entry convention: off-diagonal directions count both (i,j)
/// and (j,i)) and the gradient entries.  trace_g / trace_f carry the
/// curvature-part coefficient trace and sum_i dF/dkappa_i, which satisfy
/// sigma1 * trace_f <= trace_g <= sigma2 * trace_f with
/// sigma1 = lambda_min(g_inv)/v and sigma2 = lambda_max(g_inv)/v.
struct Linearization {
  Matrix g_matrix;   ///< d(G^t)/d(d2u), symmetric positive definite
  Vector g_gradient; ///< d(G^t)/d(du)
  double trace_g = 0.0;
  double trace_f = 0.0;
};

/// Analytic linearization of homotopy_value at (du, d2u).  Throws
/// std::domain_error if d2u is not positive definite.
Linearization linearization(double t, const Vector& du, const Matrix& d2u);

/// Random-sampling audit of the operator's structure conditions:
/// monotonicity and concavity of F on kappa >= 0, concavity of the
/// reciprocal-argument operator mu -> -F(1/mu), and measured brackets of
/// sum_i dF/dkappa_i and sum_i dF/dkappa_i kappa_i^2 over the slab
/// {min kappa <= s1, max kappa >= s2, kappa <= cap}.
struct StructureReport {
  int dimension = 0;
  int samples = 0;
  int monotonicity_violations = 0;
  int concavity_violations = 0;
  int dual_concavity_violations = 0;
  int slab_samples = 0;
  double sum_fprime_min = 0.0;        ///< measured Lambda_1 for sum dF/dk
  double sum_fprime_max = 0.0;        ///< measured Lambda_2 for sum dF/dk
  double sum_fprime_kappa2_min = 0.0; ///< measured Lambda_1 for sum dF/dk k^2
  double sum_fprime_kappa2_max = 0.0; ///< measured Lambda_2 for sum dF/dk k^2
  bool clean() const {
    return monotonicity_violations == 0 && concavity_violations == 0 &&
           dual_concavity_violations == 0;
  }
};

StructureReport check_structure_conditions(int sample_count, double s1,
                                           double s2, int dimension = 2,
                                           double cap = 1e3,
                                           std::uint64_t seed = 0);

/// Checks 2 Tr(ABC) <= Tr(ABB) + Tr(ACC) for A psd and B, C symmetric.
/// slack = RHS - LHS (equal to Tr(A (B-C)^2)).  Throws
/// std::invalid_argument if A is not psd to 1e-10 or inputs not symmetric.
struct TraceInequalityResult {
  bool holds = false;
  double slack = 0.0;
};
TraceInequalityResult trace_inequality_holds(const Matrix& A, const Matrix& B,
                                             const Matrix& C);

/// P = (sum F'_i k_i)(sum k_j^2) - (sum k_i)(sum F'_j k_j^2), evaluated via
/// the stable pairwise form
///   P = 1/2 sum_{i,j} k_i k_j (k_i + k_j)(k_i - k_j)^2 /
///       ((1+k_i^2)(1+k_j^2)),
/// which is manifestly >= 0 for kappa >= 0.
double p_nonnegativity(const Vector& kappa);

}  // namespace slcp

#endif  // SLCP_OPERATOR_CORE_HPP
