#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "slcp/operator_core.hpp"

using namespace slcp;

namespace {

constexpr double kPi = std::numbers::pi;

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

Matrix random_spd(int n, std::mt19937_64& rng, double shift = 0.1) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix r(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) r(i, j) = normal(rng);
  return r.transpose() * r + shift * Matrix::Identity(n, n);
}

Vector random_vec(int n, std::mt19937_64& rng, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = u(rng);
  return v;
}

Matrix random_sym(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = normal(rng);
  return 0.5 * (m + m.transpose());
}

// Oracle: principal curvatures as generalized eigenvalues of the second
// fundamental form h_ij = u_ij / v against the metric g_ij = I + du du^T.
Vector generalized_eigen_oracle(const Vector& du, const Matrix& d2u) {
  const double v = std::sqrt(1.0 + du.squaredNorm());
  const Matrix h = d2u / v;
  const Matrix g =
      Matrix::Identity(du.size(), du.size()) + du * du.transpose();
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> ges(h, g);
  return ges.eigenvalues();
}

// Directional derivative of homotopy_value by central differences with one
// Richardson step (base step 1e-5).
double fd_directional(double t, const Vector& du, const Matrix& d2u,
                      const Vector& ddu, const Matrix& dd2u) {
  const auto diff = [&](double eps) {
    return (homotopy_value(t, du + eps * ddu, d2u + eps * dd2u) -
            homotopy_value(t, du - eps * ddu, d2u - eps * dd2u)) /
           (2.0 * eps);
  };
  const double d1 = diff(1e-5);
  const double d2 = diff(5e-6);
  return (4.0 * d2 - d1) / 3.0;
}

}  // namespace

TEST_CASE("graph geometry at zero gradient reduces to the Hessian") {
  Matrix d2u(2, 2);
  d2u << 2.0, 0.0, 0.0, 3.0;
  const GraphGeometry geo = graph_geometry(vec2(0.0, 0.0), d2u);
  CHECK(geo.v == doctest::Approx(1.0).epsilon(1e-15));
  CHECK((geo.a - d2u).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(geo.kappa[0] == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(geo.kappa[1] == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("graph geometry for du=(1,0), d2u=I") {
  const GraphGeometry geo = graph_geometry(vec2(1.0, 0.0), Matrix::Identity(2, 2));
  // Hand-evaluable: g_inv = diag(1/2, 1), v = sqrt(2),
  // a = diag(1/(2 sqrt 2), 1/sqrt 2).
  CHECK(geo.kappa[0] == doctest::Approx(0.353553390593274).epsilon(1e-12));
  CHECK(geo.kappa[1] == doctest::Approx(0.707106781186548).epsilon(1e-12));
  // Same eigenvalues from the generalized eigenproblem oracle.
  const Vector oracle =
      generalized_eigen_oracle(vec2(1.0, 0.0), Matrix::Identity(2, 2));
  CHECK((geo.kappa - oracle).cwiseAbs().maxCoeff() < 1e-12);
  // det a = det D2u / v^4 = 1/4.
  CHECK(geo.a.determinant() == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("graph geometry rejects asymmetric input") {
  Matrix bad(2, 2);
  bad << 1.0, 0.5, 0.5 + 1e-6, 1.0;
  CHECK_THROWS_AS(graph_geometry(vec2(0.0, 0.0), bad), std::invalid_argument);
}

TEST_CASE("graph geometry invariants on random convex samples") {
  std::mt19937_64 rng(7);
  for (int n : {2, 3}) {
    for (int trial = 0; trial < 200; ++trial) {
      const Vector du = random_vec(n, rng, 3.0);
      const Matrix d2u = random_spd(n, rng);
      const GraphGeometry geo = graph_geometry(du, d2u);

      CHECK(geo.v * geo.v ==
            doctest::Approx(1.0 + du.squaredNorm()).epsilon(1e-14));
      CHECK((geo.b_upper * geo.b_upper - geo.g_inv).cwiseAbs().maxCoeff() <
            1e-12);
      CHECK((geo.b_upper * geo.b_lower - Matrix::Identity(n, n))
                .cwiseAbs()
                .maxCoeff() < 1e-12);
      CHECK((geo.a - geo.a.transpose()).cwiseAbs().maxCoeff() < 1e-12);
      CHECK(geo.kappa[0] > 0.0);  // convex input

      // det identity det(a) v^{n+2} = det(d2u)
      const double lhs = geo.a.determinant() * std::pow(geo.v, n + 2);
      CHECK(lhs == doctest::Approx(d2u.determinant()).epsilon(1e-10));

      // curvature equivalence with the generalized eigenproblem
      const Vector oracle = generalized_eigen_oracle(du, d2u);
      CHECK((geo.kappa - oracle).cwiseAbs().maxCoeff() < 1e-10);

      // closed-form rank-one square root cross-check
      const Matrix b_closed =
          Matrix::Identity(n, n) -
          du * du.transpose() / (geo.v * (1.0 + geo.v));
      CHECK((geo.b_upper - b_closed).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("principal curvature operator values") {
  CHECK(principal_curvature_f(vec2(0.0, 0.0)) == doctest::Approx(0.0));
  CHECK(principal_curvature_f(vec2(1.0, 1.0)) ==
        doctest::Approx(kPi / 2.0).epsilon(1e-15));
  // arctan 2 + arctan 3 = 3 pi / 4
  CHECK(principal_curvature_f(vec2(2.0, 3.0)) ==
        doctest::Approx(3.0 * kPi / 4.0).epsilon(1e-15));
}

TEST_CASE("operator derivative formulas") {
  const FDerivatives d0 = f_derivatives(vec2(0.0, 0.0));
  CHECK(d0.gradient[0] == doctest::Approx(1.0));
  CHECK(d0.gradient[1] == doctest::Approx(1.0));
  CHECK(d0.hessian_diag[0] == doctest::Approx(0.0));

  const FDerivatives d1 = f_derivatives(vec2(1.0, 1.0));
  CHECK(d1.gradient[0] == doctest::Approx(0.5));

  const FDerivatives d2 = f_derivatives(vec2(2.0, 3.0));
  CHECK(d2.gradient[0] == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(d2.gradient[1] == doctest::Approx(0.1).epsilon(1e-15));
}

TEST_CASE("homotopy operator endpoints and blend") {
  const Vector du = vec2(1.0, 0.0);
  const Matrix d2u = Matrix::Identity(2, 2);
  CHECK(homotopy_value(0.0, du, d2u) ==
        doctest::Approx(kPi / 2.0).epsilon(1e-15));
  // Frozen from the generalized-eigenvalue oracle of this sample:
  // arctan(1/(2 sqrt 2)) + arctan(1/ sqrt 2).
  CHECK(homotopy_value(1.0, du, d2u) ==
        doctest::Approx(0.955316618124509).epsilon(1e-12));
  CHECK(homotopy_value(0.5, du, d2u) ==
        doctest::Approx(0.5 * (kPi / 2.0 + 0.955316618124509))
            .epsilon(1e-12));
  // t = 0 ignores the gradient.
  CHECK(homotopy_value(0.0, vec2(0.3, -2.0), d2u) ==
        doctest::Approx(homotopy_value(0.0, du, d2u)).epsilon(1e-15));
}

TEST_CASE("homotopy value bounded by n pi/2") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const Vector du = random_vec(2, rng, 4.0);
    const Matrix d2u = random_spd(2, rng);
    std::uniform_real_distribution<double> ut(0.0, 1.0);
    const double value = homotopy_value(ut(rng), du, d2u);
    CHECK(std::abs(value) < kPi);
  }
}

TEST_CASE("linearization gradient term vanishes at du = 0") {
  std::mt19937_64 rng(3);
  const Linearization lin =
      linearization(1.0, vec2(0.0, 0.0), random_spd(2, rng));
  CHECK(lin.g_gradient.cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("linearization at the worked sample") {
  const Linearization lin =
      linearization(1.0, vec2(1.0, 0.0), Matrix::Identity(2, 2));
  // Diagonal-frame evaluation: trace_g = 4/(9 sqrt 2) + 2/(3 sqrt 2),
  // trace_f = 8/9 + 2/3.
  CHECK(lin.trace_g == doctest::Approx(0.785674201318386).epsilon(1e-12));
  CHECK(lin.trace_f == doctest::Approx(14.0 / 9.0).epsilon(1e-14));
  const double sigma1 = 1.0 / (2.0 * std::sqrt(2.0));
  const double sigma2 = 1.0 / std::sqrt(2.0);
  CHECK(lin.trace_g >= sigma1 * lin.trace_f);
  CHECK(lin.trace_g <= sigma2 * lin.trace_f);
}

TEST_CASE("linearization rejects non-convex input") {
  Matrix d2u(2, 2);
  d2u << 1.0, 0.0, 0.0, -0.5;
  CHECK_THROWS_AS(linearization(1.0, vec2(0.0, 0.0), d2u), std::domain_error);
}

TEST_CASE("linearization matches finite differences") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> ut(0.0, 1.0);
  int checked = 0;
  for (int n : {2, 3}) {
    for (int trial = 0; trial < 150; ++trial) {
      const double t = ut(rng);
      const Vector du = random_vec(n, rng, 2.0);
      const Matrix d2u = random_spd(n, rng, 0.3);
      const Linearization lin = linearization(t, du, d2u);

      // Hessian directions: symmetric basis elements.
      for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
          Matrix dir = Matrix::Zero(n, n);
          dir(i, j) = 1.0;
          dir(j, i) = 1.0;
          const double analytic = (lin.g_matrix.array() * dir.array()).sum();
          const double fd =
              fd_directional(t, du, d2u, Vector::Zero(n), dir);
          CHECK(std::abs(analytic - fd) <= 1e-6 * (1.0 + std::abs(fd)));
          ++checked;
        }
      }
      // Gradient directions.
      for (int i = 0; i < n; ++i) {
        Vector dir = Vector::Zero(n);
        dir[i] = 1.0;
        const double analytic = lin.g_gradient[i];
        const double fd =
            fd_directional(t, du, d2u, dir, Matrix::Zero(n, n));
        CHECK(std::abs(analytic - fd) <= 1e-6 * (1.0 + std::abs(fd)));
        ++checked;
      }

      // Trace sandwich with the exact metric eigen-bounds.
      Eigen::SelfAdjointEigenSolver<Matrix> es(
          Matrix::Identity(n, n) -
          du * du.transpose() / (1.0 + du.squaredNorm()));
      const double v = std::sqrt(1.0 + du.squaredNorm());
      const double sigma1 = es.eigenvalues().minCoeff() / v;
      const double sigma2 = es.eigenvalues().maxCoeff() / v;
      CHECK(lin.trace_g >= sigma1 * lin.trace_f - 1e-12);
      CHECK(lin.trace_g <= sigma2 * lin.trace_f + 1e-12);
    }
  }
  CHECK(checked > 1000);
}

TEST_CASE("dual symmetry F(1/kappa) = n pi/2 - F(kappa)") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.05, 20.0);
  for (int trial = 0; trial < 500; ++trial) {
    Vector kappa(3);
    for (int i = 0; i < 3; ++i) kappa[i] = u(rng);
    const double f = principal_curvature_f(kappa);
    const double f_inv = principal_curvature_f(kappa.cwiseInverse());
    CHECK(f + f_inv == doctest::Approx(3.0 * kPi / 2.0).epsilon(1e-13));
  }
}

TEST_CASE("sum F'_i kappa_i <= F(kappa) on the convex cone") {
  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (int trial = 0; trial < 2000; ++trial) {
    Vector kappa(3);
    for (int i = 0; i < 3; ++i) kappa[i] = u(rng);
    const FDerivatives d = f_derivatives(kappa);
    const double fk = (d.gradient.array() * kappa.array()).sum();
    CHECK(fk <= principal_curvature_f(kappa) + 1e-13);
    CHECK(principal_curvature_f(kappa) < 1.5 * kPi);
  }
}

TEST_CASE("structure conditions report") {
  SUBCASE("point values") {
    const FDerivatives d = f_derivatives(vec2(1.0, 1.0));
    CHECK(d.gradient.sum() == doctest::Approx(1.0));
    CHECK((d.gradient.array() * vec2(1.0, 1.0).array().square()).sum() ==
          doctest::Approx(1.0));
    const FDerivatives z = f_derivatives(Vector::Zero(3));
    CHECK(z.hessian_diag.cwiseAbs().maxCoeff() == doctest::Approx(0.0));
  }
  SUBCASE("random sweeps are clean for n = 2, 3") {
    for (int n : {2, 3}) {
      const StructureReport rep =
          check_structure_conditions(10000, 1.0, 1.0, n);
      CHECK(rep.clean());
      CHECK(rep.sum_fprime_min > 0.0);
      CHECK(rep.sum_fprime_min <= rep.sum_fprime_max);
      CHECK(rep.sum_fprime_kappa2_min > 0.0);
      CHECK(rep.sum_fprime_kappa2_min <= rep.sum_fprime_kappa2_max);
    }
  }
  SUBCASE("finite-difference Hessian oracle confirms concavity") {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    const double eps = 1e-4;
    for (int trial = 0; trial < 100; ++trial) {
      Vector kappa(3);
      for (int i = 0; i < 3; ++i) kappa[i] = u(rng);
      Matrix hess(3, 3);
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
          Vector kpp = kappa, kpm = kappa, kmp = kappa, kmm = kappa;
          kpp[i] += eps; kpp[j] += eps;
          kpm[i] += eps; kpm[j] -= eps;
          kmp[i] -= eps; kmp[j] += eps;
          kmm[i] -= eps; kmm[j] -= eps;
          hess(i, j) = (principal_curvature_f(kpp) -
                        principal_curvature_f(kpm) -
                        principal_curvature_f(kmp) +
                        principal_curvature_f(kmm)) /
                       (4.0 * eps * eps);
        }
      }
      Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (hess + hess.transpose()));
      CHECK(es.eigenvalues().maxCoeff() < 1e-6);
    }
  }
}

TEST_CASE("trace inequality") {
  SUBCASE("equality at B = C") {
    std::mt19937_64 rng(43);
    const Matrix b = random_sym(3, rng);
    const auto r = trace_inequality_holds(Matrix::Identity(3, 3), b, b);
    CHECK(r.holds);
    CHECK(std::abs(r.slack) < 1e-12);
  }
  SUBCASE("rank-one projector picks a single entry") {
    Matrix a = Matrix::Zero(2, 2);
    a(0, 0) = 1.0;
    Matrix b = Matrix::Zero(2, 2);
    b.diagonal() << 1.0, 2.0;
    Matrix c = Matrix::Zero(2, 2);
    c.diagonal() << 3.0, -1.0;
    const auto r = trace_inequality_holds(a, b, c);
    CHECK(r.holds);
    CHECK(r.slack == doctest::Approx(4.0).epsilon(1e-14));
  }
  SUBCASE("rejects indefinite A") {
    Matrix a = Matrix::Identity(2, 2);
    a(1, 1) = -1.0;
    CHECK_THROWS_AS(
        trace_inequality_holds(a, Matrix::Zero(2, 2), Matrix::Zero(2, 2)),
        std::invalid_argument);
  }
  SUBCASE("random triples never violate and match Tr(A(B-C)^2)") {
    std::mt19937_64 rng(47);
    std::uniform_int_distribution<int> dim(1, 5);
    for (int trial = 0; trial < 10000; ++trial) {
      const int n = dim(rng);
      const Matrix a = random_spd(n, rng, 0.0);
      const Matrix b = random_sym(n, rng);
      const Matrix c = random_sym(n, rng);
      const auto r = trace_inequality_holds(a, b, c);
      CHECK(r.holds);
      const Matrix diff = b - c;
      CHECK(r.slack ==
            doctest::Approx((a * diff * diff).trace()).epsilon(1e-9));
    }
  }
}

TEST_CASE("curvature mean inequality quantity P") {
  CHECK(p_nonnegativity(vec2(1.0, 1.0)) == doctest::Approx(0.0));

  // Brute-force oracle over index pairs for kappa = (1, 2):
  // P = (sum F'_i k_i)(sum k_j^2) - (sum k_i)(sum F'_j k_j^2)
  //   = (1/2 + 2/5) * 5 - 3 * (1/2 + 4/5) = 4.5 - 3.9 = 0.6.
  CHECK(p_nonnegativity(vec2(1.0, 2.0)) == doctest::Approx(0.6).epsilon(1e-14));

  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  std::uniform_int_distribution<int> dim(2, 5);
  double min_p = 1.0;
  for (int trial = 0; trial < 10000; ++trial) {
    const int n = dim(rng);
    Vector kappa(n);
    for (int i = 0; i < n; ++i) kappa[i] = u(rng);
    const double p = p_nonnegativity(kappa);
    min_p = std::min(min_p, p);

    // difference-form oracle
    const FDerivatives d = f_derivatives(kappa);
    const double direct =
        (d.gradient.array() * kappa.array()).sum() * kappa.squaredNorm() -
        kappa.sum() * (d.gradient.array() * kappa.array().square()).sum();
    CHECK(p == doctest::Approx(direct).epsilon(1e-9));
  }
  CHECK(min_p >= -1e-12);
}
