#ifndef SLCP_LEGENDRE_HPP
#define SLCP_LEGENDRE_HPP

#include <Eigen/Dense>
#include <memory>

#include "slcp/grid.hpp"

// Discrete Legendre transform u*(y) = x.y - u(x) of convex grid fields and
// evaluation of the dual equation on the target domain.

namespace slcp {

using GridPtr = std::shared_ptr<const Grid>;

struct DualField {
  GridPtr grid_dual;      ///< grid over the gradient image domain
  Eigen::VectorXd u_star;
  double c_dual = 0.0;    ///< n pi/2 - c, exact by construction
  double t = 1.0;         ///< homotopy parameter of the primal state
};

/// Conjugates a convex field: global max over source nodes refined by one
/// quadratic correction from the argmax node's recovered (Du, D2u).
/// Throws std::invalid_argument if the field is not convex on its grid.
DualField legendre_transform(const Grid& grid, const Eigen::VectorXd& u,
                             GridPtr grid_dual, double c, double t = 1.0,
                             double convexity_guard = 1e-8);

/// Residual of the dual equation at interior dual nodes (zero-filled on the
/// boundary ring): t F[a*] + (1-t) sum arctan lambda(D2u*) - c_dual, where
/// a* = sqrt(1+|y|^2) b*_lower D2u* b*_lower.  Throws GeometryError on a
/// singular discrete dual Hessian.
Eigen::VectorXd dual_residual(const DualField& dual);

struct GradientRoundtrip {
  double max_error = 0.0;
  int samples = 0;
  int coverage_gaps = 0;
};

/// max over interior source nodes of |Du*(Du(x)) - x| with Du* interpolated
/// on the dual grid; points falling outside the dual chart count as
/// coverage gaps, not failures.
GradientRoundtrip gradient_roundtrip(const Grid& grid,
                                     const Eigen::VectorXd& u,
                                     const Grid& grid_dual,
                                     const Eigen::VectorXd& u_star);

}  // namespace slcp

#endif  // SLCP_LEGENDRE_HPP
