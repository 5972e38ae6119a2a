#ifndef SLCP_RADIAL_ORACLE_HPP
#define SLCP_RADIAL_ORACLE_HPP

#include <vector>

// Independent 1-D reference solver for concentric-disc problems.  The
// radial slice u(r) of a rotationally symmetric solution satisfies an ODE
// in phi = u'(r) defined implicitly by the scalar operator equation; the
// constant c is found by shooting on the gradient-image condition
// phi(rho_src) = rho_tgt.  Used as ground truth for the 2-D solver.

namespace slcp {

struct RadialProfile {
  double rho_src = 0.0;
  double rho_tgt = 0.0;
  int n = 2;
  double t = 1.0;
  double c = 0.0;
  std::vector<double> r;
  std::vector<double> phi;        ///< u'(r)
  std::vector<double> kappa_rad;  ///< u''/(1+u'^2)^{3/2}
  std::vector<double> kappa_tan;  ///< u'/(r sqrt(1+u'^2))
  double endpoint_mismatch = 0.0;
  double tol = 0.0;
};

/// Shooting solver: RK4 on phi' with a series start at the pole, bisection
/// on c over a 32-sample bracket scan that certifies a monotone endpoint
/// map.  Throws ConfigError on invalid parameters and OracleError if no
/// bracket or no monotone response is found.
RadialProfile radial_solve(double rho_src, double rho_tgt, int n, double t,
                           double tol, int rk4_steps = 1024);

}  // namespace slcp

#endif  // SLCP_RADIAL_ORACLE_HPP
