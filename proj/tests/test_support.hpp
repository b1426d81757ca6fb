#pragma once

// Shared test helpers: independent oracles and finite-difference utilities.
// Everything here is written against textbook definitions, not against the
// library internals it is used to check.

#include <Eigen/Core>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "magshape/lie_se3.hpp"
#include "magshape/strain_basis.hpp"

namespace magshape::test {

inline std::mt19937_64 seeded_rng(std::uint64_t seed) {
  return std::mt19937_64(seed);
}

inline Twist random_twist(std::mt19937_64& rng, double k_max, double p_max) {
  std::uniform_real_distribution<double> uk(-k_max, k_max);
  std::uniform_real_distribution<double> up(-p_max, p_max);
  Twist xi;
  for (int i = 0; i < 3; ++i) xi(i) = uk(rng);
  for (int i = 3; i < 6; ++i) xi(i) = up(rng);
  return xi;
}

inline Eigen::VectorXd random_coeffs(std::mt19937_64& rng,
                                     const BasisConfig& cfg, double k_mag,
                                     double p_mag) {
  std::uniform_real_distribution<double> uk(-k_mag, k_mag);
  std::uniform_real_distribution<double> up(-p_mag, p_mag);
  Eigen::VectorXd q(cfg.dim());
  for (int c = 0; c < 6; ++c) {
    for (int j = 0; j < cfg.control_points[c]; ++j) {
      q(cfg.offset(c) + j) = c < 3 ? uk(rng) : up(rng);
    }
  }
  return q;
}

/// Coefficients following a random quadratic profile over the control-point
/// index. Gives strain fields with physically plausible arclength derivatives,
/// unlike iid coefficients whose splines wiggle at the knot scale.
inline Eigen::VectorXd smooth_coeffs(std::mt19937_64& rng,
                                     const BasisConfig& cfg, double k_mag,
                                     double p_mag) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::VectorXd q(cfg.dim());
  for (int c = 0; c < 6; ++c) {
    const int n = cfg.control_points[c];
    if (n == 0) continue;
    const double mag = c < 3 ? k_mag : p_mag;
    const double a = mag * u(rng);
    const double b = mag * u(rng);
    const double d = mag * u(rng);
    for (int j = 0; j < n; ++j) {
      const double x = static_cast<double>(j) / (n - 1);
      q(cfg.offset(c) + j) = a + b * x + d * x * x;
    }
  }
  return q;
}

/// Central difference Jacobian of f: R^n -> R^m.
template <class F>
Eigen::MatrixXd central_difference(F&& f, const Eigen::VectorXd& x,
                                   double step = 1e-6) {
  const Eigen::VectorXd f0 = f(x);
  Eigen::MatrixXd J(f0.size(), x.size());
  for (int j = 0; j < x.size(); ++j) {
    Eigen::VectorXd xp = x, xm = x;
    xp(j) += step;
    xm(j) -= step;
    J.col(j) = (f(xp) - f(xm)) / (2.0 * step);
  }
  return J;
}

/// max |A - B| / max(1, |A|_max).
inline double rel_error(const Eigen::MatrixXd& analytic,
                        const Eigen::MatrixXd& reference) {
  const double scale = std::max(1.0, reference.cwiseAbs().maxCoeff());
  return (analytic - reference).cwiseAbs().maxCoeff() / scale;
}

/// Plain RK4 integration of the matrix ODE g' = g hat(xi(s)) in R^{4x4}.
template <class StrainFn>
Eigen::Matrix4d rk4_pose_ode(StrainFn&& xi_of_s, double s0, double s1,
                             int steps,
                             Eigen::Matrix4d g0 = Eigen::Matrix4d::Identity()) {
  const double h = (s1 - s0) / steps;
  Eigen::Matrix4d g = g0;
  for (int i = 0; i < steps; ++i) {
    const double s = s0 + i * h;
    const Eigen::Matrix4d k1 = g * hat(xi_of_s(s));
    const Eigen::Matrix4d k2 = (g + 0.5 * h * k1) * hat(xi_of_s(s + 0.5 * h));
    const Eigen::Matrix4d k3 = (g + 0.5 * h * k2) * hat(xi_of_s(s + 0.5 * h));
    const Eigen::Matrix4d k4 = (g + h * k3) * hat(xi_of_s(s + h));
    g += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return g;
}

inline Pose pose_from_matrix(const Eigen::Matrix4d& m) {
  return Pose{m.topLeftCorner<3, 3>(), m.topRightCorner<3, 1>()};
}

/// Textbook Cox-de Boor recursion, 0/0 := 0. The final half-open interval is
/// treated as closed so the right endpoint evaluates sensibly.
inline double cox_de_boor(const std::vector<double>& knots, int i, int p,
                          double s) {
  if (p == 0) {
    const bool in = knots[i] <= s && s < knots[i + 1];
    const bool at_end =
        s == knots.back() && knots[i] < knots[i + 1] && knots[i + 1] == knots.back();
    return (in || at_end) ? 1.0 : 0.0;
  }
  double acc = 0.0;
  const double d1 = knots[i + p] - knots[i];
  if (d1 > 0.0) acc += (s - knots[i]) / d1 * cox_de_boor(knots, i, p - 1, s);
  const double d2 = knots[i + p + 1] - knots[i + 1];
  if (d2 > 0.0)
    acc += (knots[i + p + 1] - s) / d2 * cox_de_boor(knots, i + 1, p - 1, s);
  return acc;
}

/// Strain evaluation through the naive recursion (independent of basis_row).
inline Twist oracle_strain(const BasisConfig& cfg, const Eigen::VectorXd& q,
                           double s) {
  Twist xi = reference_strain();
  for (int c = 0; c < 6; ++c) {
    const int n = cfg.control_points[c];
    if (n == 0) continue;
    const auto t = cfg.knots(c);
    for (int j = 0; j < n; ++j) {
      xi(c) += cox_de_boor(t, j, BasisConfig::kDegree, s) * q(cfg.offset(c) + j);
    }
  }
  return xi;
}

}  // namespace magshape::test
