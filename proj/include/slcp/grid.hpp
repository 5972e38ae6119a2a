#ifndef SLCP_GRID_HPP
#define SLCP_GRID_HPP

#include <Eigen/Dense>
#include <vector>

#include "slcp/domain.hpp"

// Boundary-fitted discretization of a star-shaped domain.  Nodes live on a
// polar-style chart x(i, j) = center + (i/n_r) gamma(phi_j) omega(phi_j)
// with a single shared node at the pole and the outer ring polished onto
// h = 0.  Gradients and Hessians are recovered in Cartesian components by
// per-node least-squares cubic fits over a fixed chart neighborhood, so the
// recovery is exact for cubic fields (in particular affine and quadratic
// ones) and second-order accurate for smooth fields, uniformly through the
// pole and up to the boundary.

namespace slcp {

class Grid {
 public:
  Grid(DomainPtr domain, int n_r, int n_phi);

  int n_r() const { return n_r_; }
  int n_phi() const { return n_phi_; }
  int node_count() const { return 1 + n_r_ * n_phi_; }

  /// Node numbering: 0 is the pole, then ring-major. j wraps periodically.
  int node_index(int i, int j) const;
  int node_ring(int node) const { return rings_[node]; }
  int node_angle(int node) const { return angles_[node]; }
  const Vec2& node_position(int node) const { return positions_[node]; }
  bool is_boundary(int node) const { return rings_[node] == n_r_; }

  const Domain& domain() const { return *domain_; }
  const DomainPtr& domain_ptr() const { return domain_; }

  double gamma(int j) const { return gammas_[j]; }
  double phi(int j) const;
  /// Cached unit inward normal at boundary node (n_r, j).
  const Vec2& boundary_normal(int j) const { return normals_[j]; }

  /// Largest cell extent; the h entering discretization tolerances.
  double mesh_h() const { return mesh_h_; }

  struct Derivs {
    double u = 0.0;
    Vec2 du = Vec2::Zero();
    Mat2 d2u = Mat2::Zero();
  };
  /// Recovers value, gradient and Hessian of the field at a node.
  Derivs eval_derivatives(const Eigen::VectorXd& field, int node) const;

  /// Recovery stencil: weights is 5 x nodes.size() with rows
  /// (ux, uy, uxx, uxy, uyy), applied to field values centered at the node.
  struct Stencil {
    std::vector<int> nodes;
    Eigen::Matrix<double, 5, Eigen::Dynamic> weights;
  };
  const Stencil& stencil(int node) const { return stencils_[node]; }

  /// Quadrature weights of the normalization functional; zero on the
  /// boundary ring, positive on interior nodes.
  const std::vector<double>& interior_weights() const { return weights_; }

  /// Chart coordinates of a point: rho in [0,1] scaled by the ray root,
  /// phi in [0, 2 pi).  Returns false if the point lies outside the domain
  /// closure (rho > 1 + 1e-12).
  bool chart_coords(const Vec2& x, double& rho, double& phi) const;

  /// Bilinear interpolation of nodal values in chart-index space.
  double interpolate(const Eigen::VectorXd& field, double rho,
                     double phi) const;

 private:
  void build_stencil(int node, const std::vector<int>& neighbors);

  DomainPtr domain_;
  int n_r_;
  int n_phi_;
  std::vector<Vec2> positions_;
  std::vector<int> rings_;
  std::vector<int> angles_;
  std::vector<double> gammas_;
  std::vector<Vec2> normals_;
  std::vector<double> weights_;
  std::vector<Stencil> stencils_;
  double mesh_h_ = 0.0;
};

}  // namespace slcp

#endif  // SLCP_GRID_HPP
