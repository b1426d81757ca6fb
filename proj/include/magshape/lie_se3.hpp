#pragma once

#include <Eigen/Core>

namespace magshape {

using Vector6 = Eigen::Matrix<double, 6, 1>;
using Matrix6 = Eigen::Matrix<double, 6, 6>;

// Twist ordering is fixed throughout the project: [k; p], i.e. the angular
// strain components (k_x, k_y, k_z) stacked over the linear components
// (p_x, p_y, p_z).
using Twist = Vector6;

/// Rigid transform in SE(3), acting as the 4x4 matrix [R t; 0 1].
struct Pose {
  Eigen::Matrix3d R = Eigen::Matrix3d::Identity();
  Eigen::Vector3d t = Eigen::Vector3d::Zero();

  static Pose identity() { return Pose{}; }

  Pose operator*(const Pose& other) const {
    return Pose{R * other.R, R * other.t + t};
  }

  Pose inverse() const { return Pose{R.transpose(), -(R.transpose() * t)}; }

  Eigen::Matrix4d matrix() const;

  /// Frobenius distance of R'R from identity plus |det(R) - 1|; zero for a
  /// clean rotation.
  double rotation_defect() const;

  bool is_valid(double tol = 1e-9) const { return rotation_defect() <= tol; }

  /// Nearest-rotation projection (polar decomposition). Intended for
  /// user-input boundaries only; solver internals never re-project.
  Pose projected() const;
};

Eigen::Matrix3d skew(const Eigen::Vector3d& v);

/// hat: R^6 -> se(3), [k; p] -> [[skew(k), p], [0, 0]].
Eigen::Matrix4d hat(const Twist& xi);

/// vee: se(3) -> R^6, exact inverse of hat. Throws std::domain_error when the
/// skew block is asymmetric beyond 1e-9 (upstream numerical corruption).
Twist vee(const Eigen::Matrix4d& X);

Eigen::Matrix3d so3_exp(const Eigen::Vector3d& w);

/// Rotation logarithm. Throws std::domain_error when the rotation angle is
/// within 1e-6 of pi (branch ambiguity).
Eigen::Vector3d so3_log(const Eigen::Matrix3d& R);

/// Left Jacobian of SO(3); also the V matrix of the SE(3) exponential.
Eigen::Matrix3d so3_left_jacobian(const Eigen::Vector3d& w);
Eigen::Matrix3d so3_left_jacobian_inverse(const Eigen::Vector3d& w);

/// Closed-form SE(3) exponential: R = exp(skew(k)), t = V(k) p.
Pose se3_exp(const Twist& xi);

/// SE(3) logarithm; exp(log(g)) = g. Same near-pi rejection as so3_log.
Twist se3_log(const Pose& g);

/// Little adjoint: ad(a) b = vee([hat(a), hat(b)]).
Matrix6 ad(const Twist& xi);

/// Big adjoint: Ad(g) xi = vee(g hat(xi) g^-1).
Matrix6 Ad(const Pose& g);

/// Right Jacobian of SE(3): d/de log(exp(xi)^-1 exp(xi + e d))|_0 = Jr(xi) d.
Matrix6 se3_right_jacobian(const Twist& xi);
Matrix6 se3_right_jacobian_inverse(const Twist& xi);

namespace detail {

// Branch selection for the trigonometric coefficients. kAuto switches to the
// 4th-order Taylor series below 1e-6 rad; the other values force a branch so
// tests can check agreement across the switch.
enum class Branch { kAuto, kClosedForm, kSeries };

inline constexpr double kSmallAngle = 1e-6;

double coeff_sinc(double th, Branch b = Branch::kAuto);            // sin(t)/t
double coeff_one_minus_cos(double th, Branch b = Branch::kAuto);   // (1-cos t)/t^2
double coeff_theta_minus_sin(double th, Branch b = Branch::kAuto); // (t-sin t)/t^3
double coeff_q2(double th, Branch b = Branch::kAuto);              // (t^2/2+cos t-1)/t^4
double coeff_q3(double th, Branch b = Branch::kAuto);              // (t-sin t-t^3/6)/t^5
double coeff_jl_inv(double th, Branch b = Branch::kAuto);          // 1/t^2-(1+cos t)/(2t sin t)

Eigen::Matrix3d so3_exp_b(const Eigen::Vector3d& w, Branch b);
Eigen::Matrix3d so3_left_jacobian_b(const Eigen::Vector3d& w, Branch b);
Eigen::Matrix3d so3_left_jacobian_inverse_b(const Eigen::Vector3d& w, Branch b);

// Coupling block Q of the SE(3) left Jacobian (angular-first ordering puts it
// in the lower-left corner).
Eigen::Matrix3d se3_q_matrix_b(const Eigen::Vector3d& phi,
                               const Eigen::Vector3d& rho, Branch b);

Matrix6 se3_right_jacobian_b(const Twist& xi, Branch b);
Matrix6 se3_right_jacobian_inverse_b(const Twist& xi, Branch b);

}  // namespace detail

}  // namespace magshape
