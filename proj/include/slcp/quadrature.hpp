#ifndef SLCP_QUADRATURE_HPP
#define SLCP_QUADRATURE_HPP

#include <array>

namespace slcp {

/// 64-point Gauss-Legendre rule mapped to [0, 1].
struct GaussLegendre64 {
  std::array<double, 64> nodes;
  std::array<double, 64> weights;
};

const GaussLegendre64& gauss_legendre_64();

}  // namespace slcp

#endif  // SLCP_QUADRATURE_HPP
