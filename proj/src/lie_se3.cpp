#include "magshape/lie_se3.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>
#include <cmath>
#include <stdexcept>

namespace magshape {

namespace detail {

namespace {

bool use_series(double th, Branch b) {
  return b == Branch::kSeries || (b == Branch::kAuto && th < kSmallAngle);
}

// The closed forms of the (t - sin t)-style coefficients cancel
// catastrophically well above the small-angle switch, so the production
// branch evaluates them by a long series below this bound. Truncation error
// there is below machine precision.
constexpr double kStableSeriesBound = 0.1;

}  // namespace

double coeff_sinc(double th, Branch b) {
  if (use_series(th, b)) {
    const double t2 = th * th;
    return 1.0 - t2 / 6.0 + t2 * t2 / 120.0;
  }
  return std::sin(th) / th;
}

double coeff_one_minus_cos(double th, Branch b) {
  if (use_series(th, b)) {
    const double t2 = th * th;
    return 0.5 - t2 / 24.0 + t2 * t2 / 720.0;
  }
  const double s = std::sin(0.5 * th);
  return 2.0 * s * s / (th * th);
}

double coeff_theta_minus_sin(double th, Branch b) {
  if (use_series(th, b)) {
    const double t2 = th * th;
    return 1.0 / 6.0 - t2 / 120.0 + t2 * t2 / 5040.0;
  }
  if (th < kStableSeriesBound) {
    const double t2 = th * th;
    return 1.0 / 6.0 +
           t2 * (-1.0 / 120.0 +
                 t2 * (1.0 / 5040.0 +
                       t2 * (-1.0 / 362880.0 + t2 / 39916800.0)));
  }
  return (th - std::sin(th)) / (th * th * th);
}

double coeff_q2(double th, Branch b) {
  if (use_series(th, b)) {
    const double t2 = th * th;
    return 1.0 / 24.0 - t2 / 720.0 + t2 * t2 / 40320.0;
  }
  const double t2 = th * th;
  if (th < kStableSeriesBound) {
    return 1.0 / 24.0 +
           t2 * (-1.0 / 720.0 +
                 t2 * (1.0 / 40320.0 +
                       t2 * (-1.0 / 3628800.0 + t2 / 479001600.0)));
  }
  return (0.5 * t2 + std::cos(th) - 1.0) / (t2 * t2);
}

double coeff_q3(double th, Branch b) {
  if (use_series(th, b)) {
    const double t2 = th * th;
    return -1.0 / 120.0 + t2 / 5040.0 - t2 * t2 / 362880.0;
  }
  const double t2 = th * th;
  if (th < kStableSeriesBound) {
    return -1.0 / 120.0 +
           t2 * (1.0 / 5040.0 +
                 t2 * (-1.0 / 362880.0 +
                       t2 * (1.0 / 39916800.0 - t2 / 6227020800.0)));
  }
  return (th - std::sin(th) - th * t2 / 6.0) / (t2 * t2 * th);
}

double coeff_jl_inv(double th, Branch b) {
  if (use_series(th, b)) {
    const double t2 = th * th;
    return 1.0 / 12.0 + t2 / 720.0 + t2 * t2 / 30240.0;
  }
  const double t2 = th * th;
  if (th < kStableSeriesBound) {
    return 1.0 / 12.0 +
           t2 * (1.0 / 720.0 +
                 t2 * (1.0 / 30240.0 +
                       t2 * (1.0 / 1209600.0 + t2 / 47900160.0)));
  }
  return 1.0 / t2 - (1.0 + std::cos(th)) / (2.0 * th * std::sin(th));
}

Eigen::Matrix3d so3_exp_b(const Eigen::Vector3d& w, Branch b) {
  const double th = w.norm();
  const Eigen::Matrix3d W = skew(w);
  return Eigen::Matrix3d::Identity() + coeff_sinc(th, b) * W +
         coeff_one_minus_cos(th, b) * W * W;
}

Eigen::Matrix3d so3_left_jacobian_b(const Eigen::Vector3d& w, Branch b) {
  const double th = w.norm();
  const Eigen::Matrix3d W = skew(w);
  return Eigen::Matrix3d::Identity() + coeff_one_minus_cos(th, b) * W +
         coeff_theta_minus_sin(th, b) * W * W;
}

Eigen::Matrix3d so3_left_jacobian_inverse_b(const Eigen::Vector3d& w, Branch b) {
  const double th = w.norm();
  const Eigen::Matrix3d W = skew(w);
  return Eigen::Matrix3d::Identity() - 0.5 * W + coeff_jl_inv(th, b) * W * W;
}

Eigen::Matrix3d se3_q_matrix_b(const Eigen::Vector3d& phi,
                               const Eigen::Vector3d& rho, Branch b) {
  const double th = phi.norm();
  const Eigen::Matrix3d P = skew(phi);
  const Eigen::Matrix3d Rh = skew(rho);
  const Eigen::Matrix3d PR = P * Rh;
  const Eigen::Matrix3d RP = Rh * P;
  const Eigen::Matrix3d PRP = PR * P;

  const double c1 = coeff_theta_minus_sin(th, b);
  const double c2 = coeff_q2(th, b);
  const double c3 = coeff_q3(th, b);
  const double c4 = 0.5 * c2 + 1.5 * c3;

  return 0.5 * Rh + c1 * (PR + RP + PRP) + c2 * (P * PR + RP * P - 3.0 * PRP) +
         c4 * (PRP * P + P * PRP);
}

Matrix6 se3_right_jacobian_b(const Twist& xi, Branch b) {
  const Eigen::Vector3d phi = -xi.head<3>();
  const Eigen::Vector3d rho = -xi.tail<3>();
  const Eigen::Matrix3d J = so3_left_jacobian_b(phi, b);
  Matrix6 out = Matrix6::Zero();
  out.topLeftCorner<3, 3>() = J;
  out.bottomRightCorner<3, 3>() = J;
  out.bottomLeftCorner<3, 3>() = se3_q_matrix_b(phi, rho, b);
  return out;
}

Matrix6 se3_right_jacobian_inverse_b(const Twist& xi, Branch b) {
  const Eigen::Vector3d phi = -xi.head<3>();
  const Eigen::Vector3d rho = -xi.tail<3>();
  const Eigen::Matrix3d Jinv = so3_left_jacobian_inverse_b(phi, b);
  const Eigen::Matrix3d Q = se3_q_matrix_b(phi, rho, b);
  Matrix6 out = Matrix6::Zero();
  out.topLeftCorner<3, 3>() = Jinv;
  out.bottomRightCorner<3, 3>() = Jinv;
  out.bottomLeftCorner<3, 3>() = -Jinv * Q * Jinv;
  return out;
}

}  // namespace detail

Eigen::Matrix4d Pose::matrix() const {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = R;
  m.topRightCorner<3, 1>() = t;
  return m;
}

double Pose::rotation_defect() const {
  const double ortho =
      (R.transpose() * R - Eigen::Matrix3d::Identity()).norm();
  return ortho + std::abs(R.determinant() - 1.0);
}

Pose Pose::projected() const {
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(
      R, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d U = svd.matrixU();
  Eigen::Matrix3d V = svd.matrixV();
  Eigen::Vector3d s(1.0, 1.0, (U * V.transpose()).determinant() > 0 ? 1.0 : -1.0);
  return Pose{U * s.asDiagonal() * V.transpose(), t};
}

Eigen::Matrix3d skew(const Eigen::Vector3d& v) {
  Eigen::Matrix3d s;
  // clang-format off
  s <<     0.0, -v.z(),  v.y(),
         v.z(),    0.0, -v.x(),
        -v.y(),  v.x(),    0.0;
  // clang-format on
  return s;
}

Eigen::Matrix4d hat(const Twist& xi) {
  Eigen::Matrix4d X = Eigen::Matrix4d::Zero();
  X.topLeftCorner<3, 3>() = skew(xi.head<3>());
  X.topRightCorner<3, 1>() = xi.tail<3>();
  return X;
}

Twist vee(const Eigen::Matrix4d& X) {
  const Eigen::Matrix3d W = X.topLeftCorner<3, 3>();
  if ((W + W.transpose()).cwiseAbs().maxCoeff() > 1e-9) {
    throw std::domain_error("vee: skew block asymmetric beyond 1e-9");
  }
  Twist xi;
  xi << 0.5 * (W(2, 1) - W(1, 2)), 0.5 * (W(0, 2) - W(2, 0)),
      0.5 * (W(1, 0) - W(0, 1)), X(0, 3), X(1, 3), X(2, 3);
  return xi;
}

Eigen::Matrix3d so3_exp(const Eigen::Vector3d& w) {
  return detail::so3_exp_b(w, detail::Branch::kAuto);
}

Eigen::Vector3d so3_log(const Eigen::Matrix3d& R) {
  const double cos_th = std::clamp(0.5 * (R.trace() - 1.0), -1.0, 1.0);
  const Eigen::Vector3d w(0.5 * (R(2, 1) - R(1, 2)),
                          0.5 * (R(0, 2) - R(2, 0)),
                          0.5 * (R(1, 0) - R(0, 1)));  // sin(th) * axis
  const double sin_th = w.norm();
  const double th = std::atan2(sin_th, cos_th);
  if (th >= M_PI - 1e-6) {
    throw std::domain_error("so3_log: rotation angle within 1e-6 of pi");
  }
  if (th < detail::kSmallAngle) {
    return w * (1.0 + th * th / 6.0);
  }
  if (th > 3.0) {
    // Close to pi the antisymmetric part degrades; recover the axis from the
    // symmetric part, sign from w.
    const Eigen::Matrix3d B = 0.5 * (R + R.transpose());
    const Eigen::Matrix3d aat =
        (B - cos_th * Eigen::Matrix3d::Identity()) / (1.0 - cos_th);
    int j = 0;
    aat.diagonal().maxCoeff(&j);
    Eigen::Vector3d a = aat.col(j) / std::sqrt(aat(j, j));
    if (a.dot(w) < 0.0) a = -a;
    return th * a;
  }
  return w * (th / sin_th);
}

Eigen::Matrix3d so3_left_jacobian(const Eigen::Vector3d& w) {
  return detail::so3_left_jacobian_b(w, detail::Branch::kAuto);
}

Eigen::Matrix3d so3_left_jacobian_inverse(const Eigen::Vector3d& w) {
  return detail::so3_left_jacobian_inverse_b(w, detail::Branch::kAuto);
}

Pose se3_exp(const Twist& xi) {
  const Eigen::Vector3d k = xi.head<3>();
  return Pose{so3_exp(k), so3_left_jacobian(k) * xi.tail<3>()};
}

Twist se3_log(const Pose& g) {
  const Eigen::Vector3d k = so3_log(g.R);
  Twist xi;
  xi.head<3>() = k;
  xi.tail<3>() = so3_left_jacobian_inverse(k) * g.t;
  return xi;
}

Matrix6 ad(const Twist& xi) {
  Matrix6 out = Matrix6::Zero();
  const Eigen::Matrix3d K = skew(xi.head<3>());
  out.topLeftCorner<3, 3>() = K;
  out.bottomRightCorner<3, 3>() = K;
  out.bottomLeftCorner<3, 3>() = skew(xi.tail<3>());
  return out;
}

Matrix6 Ad(const Pose& g) {
  Matrix6 out = Matrix6::Zero();
  out.topLeftCorner<3, 3>() = g.R;
  out.bottomRightCorner<3, 3>() = g.R;
  out.bottomLeftCorner<3, 3>() = skew(g.t) * g.R;
  return out;
}

Matrix6 se3_right_jacobian(const Twist& xi) {
  return detail::se3_right_jacobian_b(xi, detail::Branch::kAuto);
}

Matrix6 se3_right_jacobian_inverse(const Twist& xi) {
  return detail::se3_right_jacobian_inverse_b(xi, detail::Branch::kAuto);
}

}  // namespace magshape
