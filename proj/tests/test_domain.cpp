#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "slcp/domain.hpp"
#include "slcp/errors.hpp"

using namespace slcp;

namespace {
constexpr double kPi = std::numbers::pi;

// Rejection-sampling area oracle.
double monte_carlo_area(const Domain& dom, double box, long samples,
                        unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-box, box);
  long hits = 0;
  for (long i = 0; i < samples; ++i) {
    if (dom.h(Vec2(u(rng), u(rng))) > 0.0) ++hits;
  }
  return 4.0 * box * box * static_cast<double>(hits) / samples;
}

}  // namespace

TEST_CASE("disc domain") {
  const auto disc = disc_domain(Vec2::Zero(), 1.0);
  CHECK(disc->theta() == doctest::Approx(1.0));
  CHECK(disc->area() == doctest::Approx(kPi).epsilon(1e-14));
  CHECK(disc->bounding_radius() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(disc->grad_h(Vec2(1.0, 0.0)).norm() == doctest::Approx(1.0));
  CHECK(disc->grad_h(Vec2(0.0, 1.0)).norm() == doctest::Approx(1.0));

  const auto disc2 = disc_domain(Vec2::Zero(), 2.0);
  CHECK(disc2->h(Vec2::Zero()) == doctest::Approx(1.0));
  CHECK(disc2->hess_h(Vec2(0.3, 0.1))(0, 0) == doctest::Approx(-0.5));
  CHECK(disc2->hess_h(Vec2(0.3, 0.1))(0, 1) == doctest::Approx(0.0));

  CHECK_THROWS_AS(disc_domain(Vec2::Zero(), 0.0), ConfigError);
}

TEST_CASE("unit ellipse with scale 1/2 matches the unit disc bit for bit") {
  const auto disc = disc_domain(Vec2::Zero(), 1.0);
  const auto ell = ellipse_domain(Vec2(1.0, 1.0));
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.2, 1.2);
  for (int i = 0; i < 1000; ++i) {
    const Vec2 p(u(rng), u(rng));
    CHECK(disc->h(p) == ell->h(p));
    CHECK((disc->grad_h(p) - ell->grad_h(p)).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("ellipse area and concavity constant") {
  const auto ell = ellipse_domain(Vec2(1.3, 0.8));
  CHECK(ell->area() == doctest::Approx(1.04 * kPi).epsilon(1e-14));
  CHECK(ell->theta() == doctest::Approx(1.0 / 1.69).epsilon(1e-14));
  CHECK(ell->bounding_radius() == doctest::Approx(1.3).epsilon(1e-10));
}

TEST_CASE("theta0 volume ratios") {
  const auto disc = disc_domain(Vec2::Zero(), 1.0);
  const auto disc2 = disc_domain(Vec2::Zero(), 2.0);
  const auto ell = ellipse_domain(Vec2(1.3, 0.8));
  CHECK(theta0(*disc, *disc) == doctest::Approx(1.0));
  CHECK(theta0(*disc, *disc2) == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(theta0(*disc, *ell) == doctest::Approx(1.04).epsilon(1e-12));
}

TEST_CASE("inward normals") {
  const auto disc = disc_domain(Vec2::Zero(), 1.0);
  CHECK((disc->inward_normal(Vec2(1.0, 0.0)) - Vec2(-1.0, 0.0)).norm() <
        1e-14);
  CHECK((disc->inward_normal(Vec2(0.0, -1.0)) - Vec2(0.0, 1.0)).norm() <
        1e-14);
  const auto ell = ellipse_domain(Vec2(2.0, 1.0));
  CHECK((ell->inward_normal(Vec2(2.0, 0.0)) - Vec2(-1.0, 0.0)).norm() <
        1e-14);
  CHECK_THROWS_AS(disc->inward_normal(Vec2(0.5, 0.0)), GeometryError);
}

TEST_CASE("superellipse family") {
  CHECK_THROWS_AS(superellipse_domain(1.0, 1.0, 5, 0.25), ConfigError);
  CHECK_THROWS_AS(superellipse_domain(1.0, 1.0, 4, 0.0), ConfigError);

  const auto sup = superellipse_domain(1.0, 1.0, 4, 1.0);
  CHECK(sup->h(Vec2::Zero()) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK((sup->grad_h(Vec2::Zero())).norm() == doctest::Approx(0.0));

  // The diagonal boundary root solves 2 (r/sqrt2)^4 ... = 0; bisection
  // oracle along the diagonal against ray_root.
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 100; ++i) {
    const double mid = 0.5 * (lo + hi);
    (sup->h(Vec2(mid, mid)) > 0.0 ? lo : hi) = mid;
  }
  const double diag_root = 0.5 * (lo + hi) * std::sqrt(2.0);
  CHECK(sup->ray_root(kPi / 4.0) == doctest::Approx(diag_root).epsilon(1e-12));

  // Level set is pinched between the diagonal disc and the axis box.
  const double axis_root = sup->ray_root(0.0);
  CHECK(diag_root <= axis_root);
  CHECK(axis_root <= 1.0);
}

TEST_CASE("superellipse area against the Monte Carlo oracle") {
  const auto sup = superellipse_domain(1.0, 1.0, 4, 0.25);
  const double mc = monte_carlo_area(*sup, 1.05, 10000000, 12345);
  CHECK(std::abs(sup->area() - mc) / sup->area() < 1e-3);
}

TEST_CASE("defining function concavity and boundary roots across catalog") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::vector<DomainPtr> catalog = {
      disc_domain(Vec2::Zero(), 1.0), disc_domain(Vec2(0.2, -0.1), 1.7),
      ellipse_domain(Vec2(1.3, 0.8)), superellipse_domain(1.0, 1.0, 4, 0.25),
      superellipse_domain(1.3, 0.7, 6, 0.5)};
  for (const auto& dom : catalog) {
    CHECK(dom->h(dom->center()) > 0.0);
    for (int i = 0; i < 10000; ++i) {
      const double phi = angle(rng);
      const double gamma = dom->ray_root(phi);
      const Vec2 dir(std::cos(phi), std::sin(phi));
      const double rho = unit(rng);
      const Vec2 p = dom->center() + rho * gamma * dir;
      Eigen::SelfAdjointEigenSolver<Mat2> es(dom->hess_h(p));
      CHECK(es.eigenvalues().maxCoeff() <= -dom->theta() + 1e-9);
    }
    for (int i = 0; i < 64; ++i) {
      const double phi = 2.0 * kPi * i / 64.0;
      const Vec2 bp = dom->boundary_point(phi);
      CHECK(std::abs(dom->h(bp)) < 1e-12);
      // Normal agrees with the gradient direction at the ray root.
      const Vec2 nu = dom->inward_normal(bp);
      const Vec2 g = dom->grad_h(bp);
      CHECK((nu - g / g.norm()).norm() < 1e-8);
    }
  }
}

TEST_CASE("descriptor round trip") {
  const std::vector<DomainPtr> catalog = {
      disc_domain(Vec2(0.1, 0.0), 2.0), ellipse_domain(Vec2(1.3, 0.8)),
      superellipse_domain(1.0, 1.0, 4, 0.25)};
  for (const auto& dom : catalog) {
    const auto copy = domain_from_json(dom->descriptor());
    CHECK(copy->type() == dom->type());
    CHECK(copy->area() == doctest::Approx(dom->area()).epsilon(1e-14));
    CHECK(copy->theta() == doctest::Approx(dom->theta()).epsilon(1e-14));
  }
  CHECK_THROWS_AS(domain_from_json({{"type", "square"}}), ConfigError);
  CHECK_THROWS_AS(domain_from_json({{"type", "disc"}}), ConfigError);
}
