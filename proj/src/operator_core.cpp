#include "slcp/operator_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace slcp {

namespace {

void require_symmetric(const Matrix& m, const char* what) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument(std::string(what) + ": matrix not square");
  }
  const double defect = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (defect > 1e-9) {
    throw std::invalid_argument(std::string(what) +
                                ": symmetry defect exceeds 1e-9");
  }
}

Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

}  // namespace

GraphGeometry graph_geometry(const Vector& du, const Matrix& d2u) {
  const Eigen::Index n = du.size();
  if (n < 1) {
    throw std::invalid_argument("graph_geometry: dimension must be >= 1");
  }
  if (d2u.rows() != n || d2u.cols() != n) {
    throw std::invalid_argument("graph_geometry: size mismatch");
  }
  require_symmetric(d2u, "graph_geometry");

  GraphGeometry geo;
  geo.du = du;
  geo.d2u = symmetrize(d2u);
  geo.v = std::sqrt(1.0 + du.squaredNorm());

  geo.g_inv = Matrix::Identity(n, n) - du * du.transpose() / (geo.v * geo.v);

  // Square root and inverse square root through the eigendecomposition of
  // g_inv; uniform in n.  The rank-one closed form is kept as a test oracle.
  Eigen::SelfAdjointEigenSolver<Matrix> es_g(geo.g_inv);
  const Vector lam = es_g.eigenvalues();
  const Matrix& q = es_g.eigenvectors();
  geo.b_upper =
      symmetrize(q * lam.cwiseSqrt().asDiagonal() * q.transpose());
  geo.b_lower = symmetrize(
      q * lam.cwiseSqrt().cwiseInverse().asDiagonal() * q.transpose());

  geo.a = symmetrize(geo.b_upper * geo.d2u * geo.b_upper / geo.v);

  Eigen::SelfAdjointEigenSolver<Matrix> es_a(geo.a);
  geo.kappa = es_a.eigenvalues();  // ascending
  geo.a_eigvecs = es_a.eigenvectors();
  return geo;
}

double principal_curvature_f(const Vector& kappa) {
  double f = 0.0;
  for (Eigen::Index i = 0; i < kappa.size(); ++i) {
    f += std::atan(kappa[i]);
  }
  return f;
}

FDerivatives f_derivatives(const Vector& kappa) {
  FDerivatives d;
  d.gradient.resize(kappa.size());
  d.hessian_diag.resize(kappa.size());
  for (Eigen::Index i = 0; i < kappa.size(); ++i) {
    const double s = 1.0 + kappa[i] * kappa[i];
    d.gradient[i] = 1.0 / s;
    d.hessian_diag[i] = -2.0 * kappa[i] / (s * s);
  }
  return d;
}

double homotopy_value(double t, const Vector& du, const Matrix& d2u) {
  double hessian_part = 0.0;
  {
    Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(d2u));
    hessian_part = principal_curvature_f(es.eigenvalues());
  }
  if (t == 0.0) {
    return hessian_part;
  }
  const GraphGeometry geo = graph_geometry(du, d2u);
  return t * principal_curvature_f(geo.kappa) + (1.0 - t) * hessian_part;
}

Linearization linearization(double t, const Vector& du, const Matrix& d2u) {
  const GraphGeometry geo = graph_geometry(du, d2u);
  const Eigen::Index n = du.size();

  Eigen::SelfAdjointEigenSolver<Matrix> es_h(geo.d2u);
  const Vector lambda = es_h.eigenvalues();
  if (lambda[0] <= 0.0) {
    throw std::domain_error("linearization: d2u not positive definite");
  }

  // Curvature part.  dF/da is the matrix function (I + a^2)^{-1}, assembled
  // in the eigenbasis of a; smooth in a even when eigenvalues collide.
  const Matrix& q = geo.a_eigvecs;
  Vector fp(n), fpk(n);
  double tr_fa = 0.0;
  double trace_f = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double k = geo.kappa[i];
    fp[i] = 1.0 / (1.0 + k * k);
    fpk[i] = k * fp[i];
    tr_fa += fpk[i];
    trace_f += fp[i];
  }
  const Matrix f_prime = symmetrize(q * fp.asDiagonal() * q.transpose());
  const Matrix fa = symmetrize(q * fpk.asDiagonal() * q.transpose());

  const Matrix g_curv =
      symmetrize(geo.b_upper * f_prime * geo.b_upper / geo.v);
  const Vector g_grad_curv = -(du / (geo.v * geo.v)) * tr_fa -
                             (2.0 / geo.v) * (geo.b_upper * (fa * du));

  // Hessian part: d(sum arctan lambda)/d(d2u) = (I + d2u^2)^{-1}.
  Vector fpl(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    fpl[i] = 1.0 / (1.0 + lambda[i] * lambda[i]);
  }
  const Matrix g_hess = symmetrize(es_h.eigenvectors() * fpl.asDiagonal() *
                                   es_h.eigenvectors().transpose());

  Linearization lin;
  lin.g_matrix = t * g_curv + (1.0 - t) * g_hess;
  lin.g_gradient = t * g_grad_curv;
  lin.trace_g = g_curv.trace();
  lin.trace_f = trace_f;
  return lin;
}

StructureReport check_structure_conditions(int sample_count, double s1,
                                           double s2, int dimension,
                                           double cap, std::uint64_t seed) {
  if (s1 <= 0.0 || s2 <= 0.0) {
    throw std::invalid_argument(
        "check_structure_conditions: slab bounds must be positive");
  }
  StructureReport report;
  report.dimension = dimension;
  report.samples = sample_count;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int n = dimension;
  const double tol = 1e-12;

  Vector kappa(n);
  for (int s = 0; s < sample_count; ++s) {
    for (int i = 0; i < n; ++i) {
      kappa[i] = 10.0 * unit(rng);
    }
    const FDerivatives d = f_derivatives(kappa);
    if ((d.gradient.array() <= 0.0).any()) {
      ++report.monotonicity_violations;
    }
    if ((d.hessian_diag.array() > tol).any()) {
      ++report.concavity_violations;
    }
    // Dual operator -F(1/mu): second derivative in mu_i is
    // -2 mu_i/(1+mu_i^2)^2, again diagonal.
    bool dual_ok = true;
    for (int i = 0; i < n; ++i) {
      const double mu = kappa[i] + 1e-3;  // keep strictly inside Gamma+
      const double s2mu = 1.0 + mu * mu;
      if (-2.0 * mu / (s2mu * s2mu) > tol) {
        dual_ok = false;
      }
    }
    if (!dual_ok) {
      ++report.dual_concavity_violations;
    }
  }

  // Slab sweep: force min kappa <= s1 and max kappa >= s2, cap everything.
  report.slab_samples = sample_count;
  double fp_min = std::numeric_limits<double>::infinity();
  double fp_max = 0.0;
  double fpk2_min = std::numeric_limits<double>::infinity();
  double fpk2_max = 0.0;
  for (int s = 0; s < sample_count; ++s) {
    for (int i = 0; i < n; ++i) {
      kappa[i] = cap * unit(rng);
    }
    kappa[0] = s1 * unit(rng);
    kappa[n - 1] = s2 + (cap - s2) * unit(rng);
    std::shuffle(kappa.begin(), kappa.end(), rng);
    const FDerivatives d = f_derivatives(kappa);
    const double fp_sum = d.gradient.sum();
    const double fpk2_sum = (d.gradient.array() * kappa.array().square()).sum();
    fp_min = std::min(fp_min, fp_sum);
    fp_max = std::max(fp_max, fp_sum);
    fpk2_min = std::min(fpk2_min, fpk2_sum);
    fpk2_max = std::max(fpk2_max, fpk2_sum);
  }
  report.sum_fprime_min = fp_min;
  report.sum_fprime_max = fp_max;
  report.sum_fprime_kappa2_min = fpk2_min;
  report.sum_fprime_kappa2_max = fpk2_max;
  return report;
}

TraceInequalityResult trace_inequality_holds(const Matrix& A, const Matrix& B,
                                             const Matrix& C) {
  require_symmetric(A, "trace_inequality");
  require_symmetric(B, "trace_inequality");
  require_symmetric(C, "trace_inequality");
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(A));
  if (es.eigenvalues()[0] < -1e-10) {
    throw std::invalid_argument(
        "trace_inequality: A is not positive semi-definite");
  }
  const double lhs = 2.0 * (A * B * C).trace();
  const double rhs = (A * B * B).trace() + (A * C * C).trace();
  TraceInequalityResult r;
  r.slack = rhs - lhs;
  r.holds = r.slack >= -1e-10;
  return r;
}

double p_nonnegativity(const Vector& kappa) {
  const Eigen::Index n = kappa.size();
  double p = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double ki = kappa[i];
      const double kj = kappa[j];
      const double diff = ki - kj;
      p += ki * kj * (ki + kj) * diff * diff /
           ((1.0 + ki * ki) * (1.0 + kj * kj));
    }
  }
  return 0.5 * p;
}

}  // namespace slcp
