#pragma once

#include <Eigen/Core>
#include <array>
#include <string_view>
#include <utility>
#include <vector>

#include "magshape/lie_se3.hpp"

namespace magshape {

/// Strain component ordering used everywhere: [k_x, k_y, k_z, p_x, p_y, p_z].
inline constexpr std::array<std::string_view, 6> kStrainComponentNames = {
    "k_x", "k_y", "k_z", "p_x", "p_y", "p_z"};

/// Reference strain of the straight, unstretched rod.
inline Twist reference_strain() {
  Twist xi = Twist::Zero();
  xi(5) = 1.0;
  return xi;
}

/// Per-component clamped cubic B-spline layout for the strain field
/// xi(s; q) = Phi(s) q + xi_ref. A component with zero control points is
/// inactive (its row of Phi is identically zero). Coefficient blocks are
/// concatenated in the fixed component order, each block contiguous.
struct BasisConfig {
  static constexpr int kDegree = 3;

  double length = 0.4;
  std::array<int, 6> control_points{};  // 0 = inactive, otherwise >= 4

  /// Total coefficient dimension S.
  int dim() const;

  /// Column offset of a component's coefficient block.
  int offset(int component) const;

  bool active(int component) const { return control_points[component] > 0; }

  /// Throws std::invalid_argument if any active component has fewer than
  /// degree+1 control points or the length is not positive.
  void validate() const;

  /// Clamped uniform knot vector over [0, length] for one component.
  std::vector<double> knots(int component) const;
};

/// Evaluates the 6xS strain basis matrix Phi(s). Each active row carries at
/// most degree+1 = 4 nonzero entries that sum to one. Throws
/// std::invalid_argument for s outside [0, length].
Eigen::MatrixXd basis_row(const BasisConfig& cfg, double s);

/// xi(s; q) = Phi(s) q + xi_ref.
Twist eval_strain(const BasisConfig& cfg, const Eigen::VectorXd& q, double s);

struct FitResult {
  Eigen::VectorXd coeffs;
  double residual_norm = 0.0;  // sqrt of the summed squared fit residual
};

/// Least-squares projection of strain samples onto the basis. Throws
/// std::runtime_error naming the deficient component when a per-component
/// design matrix is rank deficient.
FitResult fit_coeffs(const BasisConfig& cfg,
                     const std::vector<std::pair<double, Twist>>& samples);

}  // namespace magshape
