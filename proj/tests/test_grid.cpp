#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>
#include <numbers>

#include "slcp/errors.hpp"
#include "slcp/grid.hpp"

using namespace slcp;

namespace {

constexpr double kPi = std::numbers::pi;

Eigen::VectorXd sample_field(const Grid& grid,
                             const std::function<double(Vec2)>& f) {
  Eigen::VectorXd u(grid.node_count());
  for (int k = 0; k < grid.node_count(); ++k) {
    u[k] = f(grid.node_position(k));
  }
  return u;
}

struct FieldErrors {
  double du = 0.0;
  double d2u = 0.0;
};

FieldErrors recovery_errors(const Grid& grid,
                            const std::function<double(Vec2)>& f,
                            const std::function<Vec2(Vec2)>& grad,
                            const std::function<Mat2(Vec2)>& hess) {
  const Eigen::VectorXd u = sample_field(grid, f);
  FieldErrors err;
  for (int k = 0; k < grid.node_count(); ++k) {
    const Grid::Derivs d = grid.eval_derivatives(u, k);
    const Vec2 x = grid.node_position(k);
    err.du = std::max(err.du, (d.du - grad(x)).cwiseAbs().maxCoeff());
    err.d2u = std::max(err.d2u, (d.d2u - hess(x)).cwiseAbs().maxCoeff());
  }
  return err;
}

}  // namespace

TEST_CASE("grid construction constraints") {
  const auto disc = disc_domain(Vec2::Zero(), 1.0);
  CHECK_THROWS_AS(Grid(disc, 4, 32), ConfigError);
  CHECK_THROWS_AS(Grid(disc, 16, 33), ConfigError);
  CHECK_THROWS_AS(Grid(disc, 16, 8), ConfigError);
}

TEST_CASE("chart reduces to polar coordinates on the disc") {
  const auto disc = disc_domain(Vec2::Zero(), 1.0);
  const Grid grid(disc, 8, 16);
  for (int j = 0; j < grid.n_phi(); ++j) {
    CHECK(grid.gamma(j) == doctest::Approx(1.0).epsilon(1e-14));
  }
  CHECK(grid.node_count() == 1 + 8 * 16);
  // exact polar positions
  const Vec2 p = grid.node_position(grid.node_index(4, 4));
  CHECK(p[0] == doctest::Approx(0.5 * std::cos(kPi / 2)).epsilon(1e-13));
  CHECK(p[1] == doctest::Approx(0.5).epsilon(1e-13));
}

TEST_CASE("ellipse chart hits the semi-axes") {
  const auto ell = ellipse_domain(Vec2(1.3, 0.8));
  const Grid grid(ell, 8, 16);
  CHECK(grid.gamma(0) == doctest::Approx(1.3).epsilon(1e-12));
  CHECK(grid.gamma(4) == doctest::Approx(0.8).epsilon(1e-12));
}

TEST_CASE("superellipse diagonal ray equals the bisection root") {
  const auto sup = superellipse_domain(1.0, 1.0, 4, 0.25);
  const Grid grid(sup, 8, 16);
  double lo = 0.0, hi = 2.0;
  for (int i = 0; i < 120; ++i) {
    const double mid = 0.5 * (lo + hi);
    const Vec2 p(mid * std::cos(kPi / 4), mid * std::sin(kPi / 4));
    (sup->h(p) > 0.0 ? lo : hi) = mid;
  }
  CHECK(grid.gamma(2) == doctest::Approx(0.5 * (lo + hi)).epsilon(1e-12));
}

TEST_CASE("boundary ring sits on the level set with matching normals") {
  for (const auto& dom :
       {disc_domain(Vec2::Zero(), 1.0), ellipse_domain(Vec2(1.3, 0.8)),
        superellipse_domain(1.0, 1.0, 4, 0.25)}) {
    const Grid grid(dom, 16, 32);
    for (int j = 0; j < grid.n_phi(); ++j) {
      const int k = grid.node_index(grid.n_r(), j);
      CHECK(std::abs(dom->h(grid.node_position(k))) <= 1e-10);
      const Vec2 nu = dom->inward_normal(grid.node_position(k));
      CHECK((grid.boundary_normal(j) - nu).norm() <= 1e-10);
    }
  }
}

TEST_CASE("affine fields are recovered exactly") {
  for (const auto& dom :
       {disc_domain(Vec2::Zero(), 1.0), ellipse_domain(Vec2(1.3, 0.8)),
        superellipse_domain(1.0, 1.0, 4, 0.25)}) {
    for (const auto [n_r, n_phi] :
         {std::pair{16, 32}, std::pair{32, 64}, std::pair{64, 128}}) {
      const Grid grid(dom, n_r, n_phi);
      const FieldErrors err = recovery_errors(
          grid, [](Vec2 x) { return 3.0 + 2.0 * x[0] - x[1]; },
          [](Vec2) { return Vec2(2.0, -1.0); },
          [](Vec2) { return Mat2::Zero(); });
      CHECK(err.du <= 1e-12);
      CHECK(err.d2u <= 1e-12);
    }
  }
}

TEST_CASE("quadratics are recovered exactly on the disc") {
  const auto disc = disc_domain(Vec2::Zero(), 1.0);
  const Grid grid(disc, 32, 64);
  const FieldErrors err = recovery_errors(
      grid, [](Vec2 x) { return 0.5 * x.squaredNorm(); },
      [](Vec2 x) { return x; }, [](Vec2) { return Mat2::Identity(); });
  CHECK(err.du <= 1e-10);
  CHECK(err.d2u <= 1e-10);
}

TEST_CASE("anisotropic quadratics are exact on every catalog grid") {
  Mat2 s;
  s << 1.7, 0.3, 0.3, 0.9;
  for (const auto& dom :
       {disc_domain(Vec2::Zero(), 1.0), ellipse_domain(Vec2(1.3, 0.8)),
        superellipse_domain(1.0, 1.0, 4, 0.25)}) {
    const Grid grid(dom, 16, 32);
    const FieldErrors err = recovery_errors(
        grid, [&](Vec2 x) { return 0.5 * x.dot(s * x) + 0.2 * x[0]; },
        [&](Vec2 x) { return Vec2(s * x + Vec2(0.2, 0.0)); },
        [&](Vec2) { return s; });
    CHECK(err.du <= 1e-10);
    CHECK(err.d2u <= 1e-10);
  }
}

TEST_CASE("second-order convergence for a smooth transcendental field") {
  const auto f = [](Vec2 x) { return std::sin(x[0]) * std::cosh(x[1]); };
  const auto grad = [](Vec2 x) {
    return Vec2(std::cos(x[0]) * std::cosh(x[1]),
                std::sin(x[0]) * std::sinh(x[1]));
  };
  const auto hess = [](Vec2 x) {
    Mat2 m;
    m << -std::sin(x[0]) * std::cosh(x[1]), std::cos(x[0]) * std::sinh(x[1]),
        std::cos(x[0]) * std::sinh(x[1]), std::sin(x[0]) * std::cosh(x[1]);
    return m;
  };
  const auto disc = disc_domain(Vec2::Zero(), 1.0);
  double prev = 0.0;
  int level = 0;
  for (const auto [n_r, n_phi] :
       {std::pair{16, 32}, std::pair{32, 64}, std::pair{64, 128}}) {
    const Grid grid(disc, n_r, n_phi);
    const FieldErrors err = recovery_errors(grid, f, grad, hess);
    const double total = std::max(err.du, err.d2u);
    if (level > 0) {
      CHECK(prev / total >= 3.5);  // asymptotic factor 4
    }
    prev = total;
    ++level;
  }
}

TEST_CASE("normalization weights behave like an area measure") {
  for (const auto& dom :
       {disc_domain(Vec2::Zero(), 1.0), ellipse_domain(Vec2(1.3, 0.8))}) {
    const Grid grid(dom, 32, 64);
    const auto& w = grid.interior_weights();
    double total = 0.0;
    for (int k = 0; k < grid.node_count(); ++k) {
      CHECK(w[k] >= 0.0);
      if (grid.is_boundary(k)) CHECK(w[k] == 0.0);
      total += w[k];
    }
    // Interior cells cover everything but an O(h) boundary strip.
    CHECK(total < dom->area());
    CHECK(total > dom->area() * (1.0 - 2.0 / grid.n_r()));
  }
}

TEST_CASE("chart coordinate lookup and interpolation") {
  const auto ell = ellipse_domain(Vec2(1.3, 0.8));
  const Grid grid(ell, 32, 64);
  double rho = 0.0, phi = 0.0;
  CHECK(grid.chart_coords(Vec2(0.65, 0.0), rho, phi));
  CHECK(rho == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(phi == doctest::Approx(0.0));
  CHECK_FALSE(grid.chart_coords(Vec2(1.4, 0.0), rho, phi));

  const Eigen::VectorXd u =
      sample_field(grid, [](Vec2 x) { return x[0] + 2.0 * x[1]; });
  // Bilinear interpolation of a smooth field at off-node points.
  CHECK(grid.interpolate(u, 0.37, 1.1) ==
        doctest::Approx([&] {
          const double gamma = ell->ray_root(1.1);
          const Vec2 x = 0.37 * gamma * Vec2(std::cos(1.1), std::sin(1.1));
          return x[0] + 2.0 * x[1];
        }()).epsilon(1e-3));
}

TEST_CASE("eval guards") {
  const auto disc = disc_domain(Vec2::Zero(), 1.0);
  const Grid grid(disc, 8, 16);
  Eigen::VectorXd bad(3);
  CHECK_THROWS_AS(grid.eval_derivatives(bad, 0), std::invalid_argument);
  Eigen::VectorXd ok = Eigen::VectorXd::Zero(grid.node_count());
  CHECK_THROWS_AS(grid.eval_derivatives(ok, grid.node_count()),
                  std::out_of_range);
}
