#ifndef SLCP_DOMAIN_HPP
#define SLCP_DOMAIN_HPP

#include <Eigen/Dense>
#include <memory>
#include <string>

#include <json.hpp>

// Uniformly convex planar domains described by smooth concave defining
// functions h: h > 0 inside, h = 0 on the boundary, D2h <= -theta I.
// The catalog covers discs, ellipses and smoothed superellipses; all are
// star-shaped about their center, which the grid chart relies on.

namespace slcp {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

class Domain {
 public:
  virtual ~Domain() = default;

  virtual double h(const Vec2& p) const = 0;
  virtual Vec2 grad_h(const Vec2& p) const = 0;
  virtual Mat2 hess_h(const Vec2& p) const = 0;

  virtual std::string type() const = 0;
  /// JSON descriptor round-trippable through domain_from_json.
  virtual nlohmann::json descriptor() const = 0;

  double theta() const { return theta_; }
  double area() const { return area_; }
  double bounding_radius() const { return bounding_radius_; }
  const Vec2& center() const { return center_; }
  const Vec2& centroid() const { return centroid_; }
  const Mat2& second_moment() const { return second_moment_; }

  /// Distance from center to the boundary along direction angle phi,
  /// i.e. the positive root gamma of h(center + gamma (cos phi, sin phi)).
  double ray_root(double phi) const;
  Vec2 boundary_point(double phi) const;

  /// Unit inward normal grad_h/|grad_h| at a boundary point.  Requires
  /// |h(p)| <= 1e-8; throws GeometryError on degenerate gradients.
  Vec2 inward_normal(const Vec2& p) const;

 protected:
  /// Computes area, centroid, moments and bounding radius by 64-point
  /// tensor Gauss quadrature over the star-shaped parametrization.
  /// Must be called at the end of every derived constructor.
  void finalize(const Vec2& center, double theta);
  void override_area(double area) { area_ = area; }

 private:
  Vec2 center_ = Vec2::Zero();
  double theta_ = 0.0;
  double area_ = 0.0;
  double bounding_radius_ = 0.0;
  Vec2 centroid_ = Vec2::Zero();
  Mat2 second_moment_ = Mat2::Zero();
};

using DomainPtr = std::shared_ptr<const Domain>;

/// h(p) = (radius^2 - |p-center|^2) / (2 radius); |Dh| = 1 on the boundary.
DomainPtr disc_domain(const Vec2& center, double radius);

/// h(p) = scale * (1 - sum_i p_i^2 / a_i^2); scale = 1/2 makes the unit
/// ellipse coincide bit-for-bit with the unit disc defining function.
DomainPtr ellipse_domain(const Vec2& semi_axes, double scale = 0.5);

/// h(p) = [1 - (x/a)^m - (y/b)^m - eps((x/a)^2 + (y/b)^2)] / (1 + eps)
/// for even m >= 4 and eps in (0, 1]; uniformly concave with
/// theta = 2 eps / ((1+eps) max(a,b)^2).
DomainPtr superellipse_domain(double a, double b, int m, double eps);

/// |target| / |source|; the volume ratio attained by det D2u.
double theta0(const Domain& source, const Domain& target);

DomainPtr domain_from_json(const nlohmann::json& descriptor);

}  // namespace slcp

#endif  // SLCP_DOMAIN_HPP
