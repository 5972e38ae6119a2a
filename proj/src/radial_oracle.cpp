#include "slcp/radial_oracle.hpp"

#include <cmath>
#include <numbers>

#include "slcp/errors.hpp"

namespace slcp {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kPhiBlowup = 1e12;

// Solves for the slope s = phi'(r) from
//   t arctan(s / w^3) + (1-t) arctan(s) = rhs,   w = sqrt(1 + phi^2),
// where rhs folds in c and the angular curvature/eigenvalue terms.  The
// left side is strictly increasing in s and the two pure closed forms
// bracket the root.
double solve_slope(double rhs, double w, double t) {
  const double w3 = w * w * w;
  const double clamped =
      std::min(0.5 * kPi - 1e-12, std::max(-0.5 * kPi + 1e-12, rhs));
  const double s0 = std::tan(clamped);
  if (t == 0.0) return s0;
  const double s1 = w3 * s0;
  if (t == 1.0) return s1;
  double lo = std::min(s0, s1);
  double hi = std::max(s0, s1);
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double g =
        t * std::atan(mid / w3) + (1.0 - t) * std::atan(mid) - clamped;
    (g < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double slope_field(double r, double phi, double c, double t, int n) {
  const double w = std::sqrt(1.0 + phi * phi);
  const double angular = t * (n - 1) * std::atan(phi / (r * w)) +
                         (1.0 - t) * (n - 1) * std::atan(phi / r);
  return solve_slope(c - angular, w, t);
}

// Integrates phi from the series start to rho_src; returns the endpoint
// value (capped on blow-up).
double integrate(double rho_src, double c, double t, int n, int steps,
                 RadialProfile* profile) {
  const double r0 = 1e-6 * rho_src;
  double phi = std::tan(c / n) * r0;
  double r = r0;
  const double dr = (rho_src - r0) / steps;

  if (profile) {
    profile->r.clear();
    profile->phi.clear();
    profile->kappa_rad.clear();
    profile->kappa_tan.clear();
    const auto record = [&](double rr, double pp) {
      const double w = std::sqrt(1.0 + pp * pp);
      profile->r.push_back(rr);
      profile->phi.push_back(pp);
      profile->kappa_rad.push_back(slope_field(rr, pp, c, t, n) / (w * w * w));
      profile->kappa_tan.push_back(pp / (rr * w));
    };
    record(r, phi);
    for (int k = 0; k < steps; ++k) {
      const double k1 = slope_field(r, phi, c, t, n);
      const double k2 = slope_field(r + 0.5 * dr, phi + 0.5 * dr * k1, c, t, n);
      const double k3 = slope_field(r + 0.5 * dr, phi + 0.5 * dr * k2, c, t, n);
      const double k4 = slope_field(r + dr, phi + dr * k3, c, t, n);
      phi += dr * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
      r += dr;
      if (!(phi < kPhiBlowup)) return 1e300;
      record(r, phi);
    }
    return phi;
  }

  for (int k = 0; k < steps; ++k) {
    const double k1 = slope_field(r, phi, c, t, n);
    const double k2 = slope_field(r + 0.5 * dr, phi + 0.5 * dr * k1, c, t, n);
    const double k3 = slope_field(r + 0.5 * dr, phi + 0.5 * dr * k2, c, t, n);
    const double k4 = slope_field(r + dr, phi + dr * k3, c, t, n);
    phi += dr * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
    r += dr;
    if (!(phi < kPhiBlowup)) return 1e300;
  }
  return phi;
}

}  // namespace

RadialProfile radial_solve(double rho_src, double rho_tgt, int n, double t,
                           double tol, int rk4_steps) {
  if (rho_src <= 0.0 || rho_tgt <= 0.0) {
    throw ConfigError("radial_solve: radii must be positive");
  }
  if (n < 2) {
    throw ConfigError("radial_solve: dimension must be >= 2");
  }
  if (t < 0.0 || t > 1.0) {
    throw ConfigError("radial_solve: homotopy parameter must be in [0,1]");
  }
  if (tol <= 0.0) {
    throw ConfigError("radial_solve: tolerance must be positive");
  }

  // Bracket scan over c: certifies the monotone endpoint response instead
  // of assuming it, then locates a sign change.
  constexpr int kScan = 32;
  const double c_lo_limit = 1e-4;
  const double c_hi_limit = 0.5 * n * kPi - 1e-4;
  double endpoints[kScan];
  double cs[kScan];
  for (int i = 0; i < kScan; ++i) {
    cs[i] = c_lo_limit +
            (c_hi_limit - c_lo_limit) * static_cast<double>(i) / (kScan - 1);
    endpoints[i] = integrate(rho_src, cs[i], t, n, rk4_steps, nullptr);
  }
  for (int i = 1; i < kScan; ++i) {
    // Blown-up endpoints saturate at the cap and may tie.
    if (endpoints[i] <= endpoints[i - 1] && endpoints[i] < 1e299) {
      throw OracleError("radial_solve: endpoint map not monotone in c");
    }
  }
  int bracket = -1;
  for (int i = 1; i < kScan; ++i) {
    if ((endpoints[i - 1] - rho_tgt) <= 0.0 &&
        (endpoints[i] - rho_tgt) >= 0.0) {
      bracket = i;
      break;
    }
  }
  if (bracket < 0) {
    throw OracleError("radial_solve: target radius not bracketed in c");
  }

  double c_lo = cs[bracket - 1];
  double c_hi = cs[bracket];
  double c_mid = 0.5 * (c_lo + c_hi);
  double mismatch = 0.0;
  for (int it = 0; it < 200; ++it) {
    c_mid = 0.5 * (c_lo + c_hi);
    const double endpoint = integrate(rho_src, c_mid, t, n, rk4_steps, nullptr);
    mismatch = endpoint - rho_tgt;
    if (std::abs(mismatch) <= tol || (c_hi - c_lo) < 1e-15) break;
    (mismatch < 0.0 ? c_lo : c_hi) = c_mid;
  }

  RadialProfile profile;
  profile.rho_src = rho_src;
  profile.rho_tgt = rho_tgt;
  profile.n = n;
  profile.t = t;
  profile.c = c_mid;
  profile.tol = tol;
  const double endpoint = integrate(rho_src, c_mid, t, n, rk4_steps, &profile);
  profile.endpoint_mismatch = endpoint - rho_tgt;
  return profile;
}

}  // namespace slcp
