#include "slcp/grid.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "slcp/errors.hpp"

namespace slcp {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr int kMonomials = 15;  // quartic basis in two variables

// Quartic monomial row at scaled offset (x, y).
void quartic_row(double x, double y,
                 Eigen::Matrix<double, 1, kMonomials>& row) {
  const double x2 = x * x, y2 = y * y;
  row << 1.0, x, y, x2, x * y, y2, x2 * x, x2 * y, x * y2, y2 * y, x2 * x2,
      x2 * x * y, x2 * y2, x * y2 * y, y2 * y2;
}

}  // namespace

Grid::Grid(DomainPtr domain, int n_r, int n_phi)
    : domain_(std::move(domain)), n_r_(n_r), n_phi_(n_phi) {
  if (n_r_ < 8 || n_phi_ < 16 || n_phi_ % 2 != 0) {
    throw ConfigError("grid: need n_r >= 8 and even n_phi >= 16");
  }
  if (domain_->h(domain_->center()) <= 0.0) {
    throw GeometryError("grid: defining function not positive at center");
  }

  const Vec2 c = domain_->center();
  gammas_.resize(n_phi_);
  normals_.resize(n_phi_);
  double gamma_max = 0.0;
  for (int j = 0; j < n_phi_; ++j) {
    gammas_[j] = domain_->ray_root(phi(j));
    gamma_max = std::max(gamma_max, gammas_[j]);
  }
  mesh_h_ = gamma_max * std::max(1.0 / n_r_, 2.0 * kPi / n_phi_);

  positions_.resize(node_count());
  rings_.resize(node_count());
  angles_.resize(node_count());
  positions_[0] = c;
  rings_[0] = 0;
  angles_[0] = 0;
  for (int i = 1; i <= n_r_; ++i) {
    for (int j = 0; j < n_phi_; ++j) {
      const int k = node_index(i, j);
      const double p = phi(j);
      positions_[k] =
          c + (double(i) / n_r_) * gammas_[j] * Vec2(std::cos(p), std::sin(p));
      rings_[k] = i;
      angles_[k] = j;
    }
  }
  for (int j = 0; j < n_phi_; ++j) {
    normals_[j] = domain_->inward_normal(positions_[node_index(n_r_, j)]);
  }

  // Normalization weights: chart cell measure rho gamma^2 drho dphi on
  // interior rings, the rho <= drho/2 cap at the pole, zero on the boundary.
  weights_.assign(node_count(), 0.0);
  const double drho = 1.0 / n_r_;
  const double dphi = 2.0 * kPi / n_phi_;
  double pole_w = 0.0;
  for (int j = 0; j < n_phi_; ++j) {
    pole_w += gammas_[j] * gammas_[j] * dphi * drho * drho / 8.0;
  }
  weights_[0] = pole_w;
  for (int i = 1; i < n_r_; ++i) {
    for (int j = 0; j < n_phi_; ++j) {
      weights_[node_index(i, j)] =
          (double(i) / n_r_) * gammas_[j] * gammas_[j] * drho * dphi;
    }
  }

  // Recovery stencils.
  stencils_.resize(node_count());
  std::vector<int> neighbors;
  for (int k = 0; k < node_count(); ++k) {
    neighbors.clear();
    const int i = rings_[k];
    const int j = angles_[k];
    if (i <= 1) {
      // The pole and its adjacent ring need full angular coverage: a
      // narrow arc of a few rings is a near-1D point set on which the
      // polynomial fit degenerates.
      neighbors.push_back(0);
      for (int ii = 1; ii <= 4; ++ii) {
        for (int jj = 0; jj < n_phi_; ++jj) {
          neighbors.push_back(node_index(ii, jj));
        }
      }
    } else {
      // Five consecutive rings (the quartic fit needs five radial levels)
      // with the angular arc kept comparable to the radial extent, else
      // inner-ring stencils thin out and the fit conditioning degrades.
      const double dphi = 2.0 * kPi / n_phi_;
      const int j_half =
          std::min((n_phi_ - 1) / 2,
                   std::max(2, static_cast<int>(std::ceil(2.4 / (i * dphi)))));
      const int i_lo = std::max(1, std::min(i - 2, n_r_ - 4));
      for (int ii = i_lo; ii <= i_lo + 4; ++ii) {
        for (int jj = j - j_half; jj <= j + j_half; ++jj) {
          neighbors.push_back(node_index(ii, jj));
        }
      }
    }
    build_stencil(k, neighbors);
  }
}

int Grid::node_index(int i, int j) const {
  if (i == 0) return 0;
  int jw = j % n_phi_;
  if (jw < 0) jw += n_phi_;
  return 1 + (i - 1) * n_phi_ + jw;
}

double Grid::phi(int j) const { return 2.0 * kPi * j / n_phi_; }

void Grid::build_stencil(int node, const std::vector<int>& neighbors) {
  const int m = static_cast<int>(neighbors.size());
  const Vec2 x0 = positions_[node];

  // Near the pole the neighborhood degenerates into a thin radial sliver,
  // so fit in the principal frame of the offsets with per-axis scaling.
  Mat2 cov = Mat2::Zero();
  for (int s = 0; s < m; ++s) {
    const Vec2 d = positions_[neighbors[s]] - x0;
    cov += d * d.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Mat2> es(cov);
  const Mat2 frame = es.eigenvectors();
  Vec2 extent = Vec2::Zero();
  std::vector<Vec2> local(m);
  for (int s = 0; s < m; ++s) {
    local[s] = frame.transpose() * (positions_[neighbors[s]] - x0);
    extent = extent.cwiseMax(local[s].cwiseAbs());
  }
  if (extent.minCoeff() <= 0.0) {
    throw GeometryError("grid: degenerate derivative stencil");
  }

  Eigen::MatrixXd vand(m, kMonomials);
  Eigen::Matrix<double, 1, kMonomials> row;
  for (int s = 0; s < m; ++s) {
    quartic_row(local[s][0] / extent[0], local[s][1] / extent[1], row);
    vand.row(s) = row;
  }
  const auto cod = vand.completeOrthogonalDecomposition();
  if (cod.rank() < kMonomials) {
    throw GeometryError("grid: degenerate derivative stencil");
  }
  const Eigen::MatrixXd pinv = cod.pseudoInverse();  // kMonomials x m

  // Two rounds of iterative refinement push the moment conditions
  // V^T w = e_r to the floating-point floor; this is what keeps affine
  // and quadratic recovery exact at fine resolutions.
  Eigen::Matrix<double, 5, Eigen::Dynamic> wxi(5, m);
  for (int r = 1; r <= 5; ++r) {
    Eigen::VectorXd w = pinv.row(r).transpose();
    for (int pass = 0; pass < 2; ++pass) {
      Eigen::VectorXd defect = vand.transpose() * w;
      defect[r] -= 1.0;
      w -= pinv.transpose() * defect;
    }
    wxi.row(r - 1) = w.transpose();
  }

  // Map scaled-frame derivatives back to Cartesian components:
  // grad_x = F S^-1 grad_xi, hess_x = F S^-1 hess_xi S^-1 F^T.
  const Mat2 back = frame * extent.cwiseInverse().asDiagonal();
  Stencil st;
  st.nodes = neighbors;
  st.weights.resize(5, m);
  for (int s = 0; s < m; ++s) {
    const Vec2 g_xi(wxi(0, s), wxi(1, s));
    Mat2 h_xi;
    h_xi << 2.0 * wxi(2, s), wxi(3, s), wxi(3, s), 2.0 * wxi(4, s);
    const Vec2 g = back * g_xi;
    const Mat2 h = back * h_xi * back.transpose();
    st.weights.col(s) << g[0], g[1], h(0, 0), h(0, 1), h(1, 1);
  }
  stencils_[node] = std::move(st);
}

Grid::Derivs Grid::eval_derivatives(const Eigen::VectorXd& field,
                                    int node) const {
  if (field.size() != node_count()) {
    throw std::invalid_argument("eval_derivatives: field length mismatch");
  }
  if (node < 0 || node >= node_count()) {
    throw std::out_of_range("eval_derivatives: node index out of range");
  }
  const Stencil& st = stencils_[node];
  const double u0 = field[node];
  Eigen::Matrix<double, 5, 1> d = Eigen::Matrix<double, 5, 1>::Zero();
  for (size_t s = 0; s < st.nodes.size(); ++s) {
    // Centering at the node's own value keeps the large-weight second
    // derivative rows free of O(|u|) cancellation.
    d += st.weights.col(static_cast<int>(s)) * (field[st.nodes[s]] - u0);
  }
  Derivs out;
  out.u = u0;
  out.du = Vec2(d[0], d[1]);
  out.d2u << d[2], d[3], d[3], d[4];
  return out;
}

bool Grid::chart_coords(const Vec2& x, double& rho, double& phi_out) const {
  const Vec2 d = x - domain_->center();
  const double r = d.norm();
  double p = std::atan2(d[1], d[0]);
  if (p < 0.0) p += 2.0 * kPi;
  phi_out = p;
  if (r == 0.0) {
    rho = 0.0;
    return true;
  }
  const double gamma = domain_->ray_root(p);
  rho = r / gamma;
  return rho <= 1.0 + 1e-12;
}

double Grid::interpolate(const Eigen::VectorXd& field, double rho,
                         double phi_in) const {
  if (field.size() != node_count()) {
    throw std::invalid_argument("interpolate: field length mismatch");
  }
  const double dphi = 2.0 * kPi / n_phi_;
  double p = std::fmod(phi_in, 2.0 * kPi);
  if (p < 0.0) p += 2.0 * kPi;
  const double fj = p / dphi;
  int j0 = static_cast<int>(std::floor(fj));
  const double tj = fj - j0;
  if (j0 >= n_phi_) j0 -= n_phi_;

  const double fr = std::min(std::max(rho, 0.0), 1.0) * n_r_;
  int i0 = static_cast<int>(std::floor(fr));
  if (i0 >= n_r_) i0 = n_r_ - 1;
  const double ti = fr - i0;

  const auto value = [&](int i, int j) {
    return i == 0 ? field[0] : field[node_index(i, j)];
  };
  const double lo =
      (1.0 - tj) * value(i0, j0) + tj * value(i0, j0 + 1);
  const double hi =
      (1.0 - tj) * value(i0 + 1, j0) + tj * value(i0 + 1, j0 + 1);
  return (1.0 - ti) * lo + ti * hi;
}

}  // namespace slcp
