#include "slcp/domain.hpp"

#include <cmath>
#include <numbers>

#include "slcp/errors.hpp"
#include "slcp/quadrature.hpp"

namespace slcp {

namespace {
constexpr double kPi = std::numbers::pi;
}

double Domain::ray_root(double phi) const {
  const Vec2 dir(std::cos(phi), std::sin(phi));
  if (h(center_) <= 0.0) {
    throw GeometryError("ray_root: defining function not positive at center");
  }
  // Bracket the boundary crossing, then bisect and polish with Newton.
  double lo = 0.0;
  double hi = 1.0;
  int expand = 0;
  while (h(center_ + hi * dir) > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (++expand > 60) {
      throw GeometryError("ray_root: boundary not found along ray");
    }
  }
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    (h(center_ + mid * dir) > 0.0 ? lo : hi) = mid;
  }
  double r = 0.5 * (lo + hi);
  for (int it = 0; it < 4; ++it) {
    const Vec2 p = center_ + r * dir;
    const double slope = grad_h(p).dot(dir);
    if (slope == 0.0) break;
    r -= h(p) / slope;
  }
  return r;
}

Vec2 Domain::boundary_point(double phi) const {
  const double r = ray_root(phi);
  return center_ + r * Vec2(std::cos(phi), std::sin(phi));
}

Vec2 Domain::inward_normal(const Vec2& p) const {
  if (std::abs(h(p)) > 1e-8) {
    throw GeometryError("inward_normal: point not on the boundary");
  }
  const Vec2 g = grad_h(p);
  const double norm = g.norm();
  if (norm < 1e-10) {
    throw GeometryError("inward_normal: degenerate boundary gradient");
  }
  return g / norm;
}

void Domain::finalize(const Vec2& center, double theta) {
  center_ = center;
  theta_ = theta;

  // Map (s, q) in [0,1]^2 to x = center + s*gamma(phi)*omega(phi) with
  // phi = 2 pi q; the Jacobian is s * gamma(phi)^2 * 2 pi.
  const auto& gl = gauss_legendre_64();
  double area = 0.0;
  Vec2 first = Vec2::Zero();
  Mat2 second = Mat2::Zero();
  double rmax = 0.0;
  for (int jq = 0; jq < 64; ++jq) {
    const double phi = 2.0 * kPi * gl.nodes[jq];
    const double gamma = ray_root(phi);
    const Vec2 dir(std::cos(phi), std::sin(phi));
    rmax = std::max(rmax, (center_ + gamma * dir).norm());
    const double wphi = 2.0 * kPi * gl.weights[jq] * gamma * gamma;
    for (int is = 0; is < 64; ++is) {
      const double s = gl.nodes[is];
      const double w = wphi * gl.weights[is] * s;
      const Vec2 x = center_ + s * gamma * dir;
      area += w;
      first += w * x;
      second += w * x * x.transpose();
    }
  }
  area_ = area;
  centroid_ = first / area;
  second_moment_ = second / area;

  // The quadrature sees only 64 rays; pad the boundary scan for the radius.
  for (int j = 0; j < 512; ++j) {
    const double phi = 2.0 * kPi * j / 512.0;
    rmax = std::max(rmax, boundary_point(phi).norm());
  }
  bounding_radius_ = rmax;
}

namespace {

class DiscDomain final : public Domain {
 public:
  DiscDomain(const Vec2& center, double radius) : radius_(radius) {
    if (radius <= 0.0) {
      throw ConfigError("disc: radius must be positive");
    }
    finalize(center, 1.0 / radius);
    override_area(kPi * radius * radius);
  }

  double h(const Vec2& p) const override {
    return (radius_ * radius_ - (p - center()).squaredNorm()) /
           (2.0 * radius_);
  }
  Vec2 grad_h(const Vec2& p) const override {
    return -(p - center()) / radius_;
  }
  Mat2 hess_h(const Vec2&) const override {
    return -Mat2::Identity() / radius_;
  }
  std::string type() const override { return "disc"; }
  nlohmann::json descriptor() const override {
    return {{"type", "disc"},
            {"center", {center()[0], center()[1]}},
            {"radius", radius_}};
  }

 private:
  double radius_;
};

class EllipseDomain final : public Domain {
 public:
  EllipseDomain(const Vec2& semi_axes, double scale)
      : axes_(semi_axes), scale_(scale) {
    if (semi_axes[0] <= 0.0 || semi_axes[1] <= 0.0) {
      throw ConfigError("ellipse: semi-axes must be positive");
    }
    if (scale <= 0.0) {
      throw ConfigError("ellipse: scale must be positive");
    }
    const double amax2 =
        std::max(axes_[0] * axes_[0], axes_[1] * axes_[1]);
    finalize(Vec2::Zero(), 2.0 * scale_ / amax2);
    override_area(kPi * axes_[0] * axes_[1]);
  }

  double h(const Vec2& p) const override {
    const double x = p[0] / axes_[0];
    const double y = p[1] / axes_[1];
    return scale_ * (1.0 - x * x - y * y);
  }
  Vec2 grad_h(const Vec2& p) const override {
    return {-2.0 * scale_ * p[0] / (axes_[0] * axes_[0]),
            -2.0 * scale_ * p[1] / (axes_[1] * axes_[1])};
  }
  Mat2 hess_h(const Vec2&) const override {
    Mat2 m = Mat2::Zero();
    m(0, 0) = -2.0 * scale_ / (axes_[0] * axes_[0]);
    m(1, 1) = -2.0 * scale_ / (axes_[1] * axes_[1]);
    return m;
  }
  std::string type() const override { return "ellipse"; }
  nlohmann::json descriptor() const override {
    return {{"type", "ellipse"},
            {"semi_axes", {axes_[0], axes_[1]}},
            {"scale", scale_}};
  }

 private:
  Vec2 axes_;
  double scale_;
};

class SuperellipseDomain final : public Domain {
 public:
  SuperellipseDomain(double a, double b, int m, double eps)
      : a_(a), b_(b), m_(m), eps_(eps) {
    if (a <= 0.0 || b <= 0.0) {
      throw ConfigError("superellipse: semi-axes must be positive");
    }
    if (m < 4 || m % 2 != 0) {
      throw ConfigError("superellipse: exponent must be even and >= 4");
    }
    if (eps <= 0.0 || eps > 1.0) {
      throw ConfigError("superellipse: eps must lie in (0, 1]");
    }
    const double amax2 = std::max(a * a, b * b);
    finalize(Vec2::Zero(), 2.0 * eps / ((1.0 + eps) * amax2));
  }

  double h(const Vec2& p) const override {
    const double x = p[0] / a_;
    const double y = p[1] / b_;
    return (1.0 - std::pow(x, m_) - std::pow(y, m_) -
            eps_ * (x * x + y * y)) /
           (1.0 + eps_);
  }
  Vec2 grad_h(const Vec2& p) const override {
    const double x = p[0] / a_;
    const double y = p[1] / b_;
    return {(-m_ * std::pow(x, m_ - 1) - 2.0 * eps_ * x) / (a_ * (1.0 + eps_)),
            (-m_ * std::pow(y, m_ - 1) - 2.0 * eps_ * y) /
                (b_ * (1.0 + eps_))};
  }
  Mat2 hess_h(const Vec2& p) const override {
    const double x = p[0] / a_;
    const double y = p[1] / b_;
    Mat2 mhess = Mat2::Zero();
    mhess(0, 0) = (-m_ * (m_ - 1) * std::pow(x, m_ - 2) - 2.0 * eps_) /
                  (a_ * a_ * (1.0 + eps_));
    mhess(1, 1) = (-m_ * (m_ - 1) * std::pow(y, m_ - 2) - 2.0 * eps_) /
                  (b_ * b_ * (1.0 + eps_));
    return mhess;
  }
  std::string type() const override { return "superellipse"; }
  nlohmann::json descriptor() const override {
    return {{"type", "superellipse"},
            {"a", a_},
            {"b", b_},
            {"m", m_},
            {"eps", eps_}};
  }

 private:
  double a_, b_;
  int m_;
  double eps_;
};

}  // namespace

DomainPtr disc_domain(const Vec2& center, double radius) {
  return std::make_shared<DiscDomain>(center, radius);
}

DomainPtr ellipse_domain(const Vec2& semi_axes, double scale) {
  return std::make_shared<EllipseDomain>(semi_axes, scale);
}

DomainPtr superellipse_domain(double a, double b, int m, double eps) {
  return std::make_shared<SuperellipseDomain>(a, b, m, eps);
}

double theta0(const Domain& source, const Domain& target) {
  return target.area() / source.area();
}

DomainPtr domain_from_json(const nlohmann::json& descriptor) {
  if (!descriptor.is_object() || !descriptor.contains("type") ||
      !descriptor["type"].is_string()) {
    throw ConfigError("domain descriptor: missing \"type\"");
  }
  const std::string type = descriptor["type"].get<std::string>();
  try {
    if (type == "disc") {
      Vec2 center = Vec2::Zero();
      if (descriptor.contains("center")) {
        center = Vec2(descriptor["center"].at(0).get<double>(),
                      descriptor["center"].at(1).get<double>());
      }
      return disc_domain(center, descriptor.at("radius").get<double>());
    }
    if (type == "ellipse") {
      const auto& axes = descriptor.at("semi_axes");
      const double scale = descriptor.value("scale", 0.5);
      return ellipse_domain(
          Vec2(axes.at(0).get<double>(), axes.at(1).get<double>()), scale);
    }
    if (type == "superellipse") {
      return superellipse_domain(
          descriptor.at("a").get<double>(), descriptor.at("b").get<double>(),
          descriptor.at("m").get<int>(), descriptor.at("eps").get<double>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("domain descriptor: ") + e.what());
  }
  throw ConfigError("domain descriptor: unknown type \"" + type + "\"");
}

}  // namespace slcp
