#include <doctest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include "magshape/lie_se3.hpp"
#include "test_support.hpp"

using namespace magshape;
using test::central_difference;
using test::random_twist;
using test::rel_error;
using test::seeded_rng;

namespace {
Twist make_twist(double a, double b, double c, double d, double e, double f) {
  Twist xi;
  xi << a, b, c, d, e, f;
  return xi;
}
}  // namespace

TEST_CASE("hat places components in the se(3) layout") {
  const Eigen::Matrix4d X = hat(make_twist(0, 0, 0, 0, 0, 1));
  Eigen::Matrix4d expected = Eigen::Matrix4d::Zero();
  expected(2, 3) = 1.0;
  CHECK((X - expected).cwiseAbs().maxCoeff() == 0.0);

  const Eigen::Matrix4d Y = hat(make_twist(0, M_PI, 0, 0, 0, 0));
  CHECK(Y(0, 2) == doctest::Approx(M_PI));
  CHECK(Y(2, 0) == doctest::Approx(-M_PI));
  CHECK(Y.row(3).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("vee inverts hat") {
  const Twist xi = make_twist(1, 2, 3, 4, 5, 6);
  CHECK((vee(hat(xi)) - xi).cwiseAbs().maxCoeff() == 0.0);

  auto rng = seeded_rng(42);
  for (int i = 0; i < 50; ++i) {
    const Twist x = random_twist(rng, 3.0, 2.0);
    const Eigen::Matrix4d X = hat(x);
    CHECK((hat(vee(X)) - X).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("vee rejects an asymmetric skew block") {
  Eigen::Matrix4d X = hat(make_twist(1, 0, 0, 0, 0, 0));
  X(1, 2) += 1e-6;
  CHECK_THROWS_AS(vee(X), std::domain_error);
}

TEST_CASE("se3_exp pure translation") {
  const Pose g = se3_exp(make_twist(0, 0, 0, 0, 0, 0.4));
  CHECK((g.R - Eigen::Matrix3d::Identity()).norm() == doctest::Approx(0.0));
  CHECK((g.t - Eigen::Vector3d(0, 0, 0.4)).norm() == doctest::Approx(0.0));
}

TEST_CASE("se3_exp pure rotation about y") {
  const Pose g = se3_exp(make_twist(0, M_PI / 2, 0, 0, 0, 0));
  Eigen::Matrix3d expected;
  expected << 0, 0, 1, 0, 1, 0, -1, 0, 0;  // +90 deg about y
  CHECK((g.R - expected).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(g.t.norm() == doctest::Approx(0.0));
}

TEST_CASE("se3_exp constant-curvature arc matches closed form and dense ODE") {
  const double L = 0.4;
  const double kappa = M_PI / (2.0 * L);
  const Twist xi = L * make_twist(0, kappa, 0, 0, 0, 1);
  const Pose g = se3_exp(xi);

  const Eigen::Vector3d tip(1.0 / kappa, 0.0, 1.0 / kappa);
  CHECK((g.t - tip).norm() < 1e-12);
  Eigen::Matrix3d roty90;
  roty90 << 0, 0, 1, 0, 1, 0, -1, 0, 0;
  CHECK((g.R - roty90).cwiseAbs().maxCoeff() < 1e-12);

  // Dense integration of g' = g hat(xi) with the constant strain field.
  const Twist field = make_twist(0, kappa, 0, 0, 0, 1);
  const Eigen::Matrix4d g_ode =
      test::rk4_pose_ode([&](double) { return field; }, 0.0, L, 20000);
  CHECK((g.matrix() - g_ode).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("se3_log basics") {
  CHECK(se3_log(Pose::identity()).cwiseAbs().maxCoeff() == 0.0);

  const Pose trans{Eigen::Matrix3d::Identity(), Eigen::Vector3d(0.1, -0.2, 0.3)};
  const Twist xi = se3_log(trans);
  CHECK(xi.head<3>().cwiseAbs().maxCoeff() == 0.0);
  CHECK((xi.tail<3>() - trans.t).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("exp/log round trip over the working range") {
  auto rng = seeded_rng(7);
  for (int i = 0; i < 1000; ++i) {
    Twist xi = random_twist(rng, 1.0, 2.0);
    std::uniform_real_distribution<double> mag(0.0, 3.0);
    if (xi.head<3>().norm() > 0) {
      xi.head<3>() *= mag(rng) / xi.head<3>().norm();
    }
    const Twist back = se3_log(se3_exp(xi));
    CHECK((back - xi).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("so3_log near-pi branch stays accurate") {
  auto rng = seeded_rng(11);
  std::uniform_real_distribution<double> ang(3.0, M_PI - 1e-5);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    Eigen::Vector3d axis(gauss(rng), gauss(rng), gauss(rng));
    axis.normalize();
    const Eigen::Vector3d w = ang(rng) * axis;
    CHECK((so3_log(so3_exp(w)) - w).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("so3_log rejects rotations at pi") {
  const Eigen::Matrix3d R = so3_exp(Eigen::Vector3d(M_PI, 0, 0));
  CHECK_THROWS_AS(so3_log(R), std::domain_error);
}

TEST_CASE("group closure keeps poses valid") {
  auto rng = seeded_rng(13);
  Pose g = Pose::identity();
  for (int i = 0; i < 200; ++i) {
    g = g * se3_exp(random_twist(rng, 2.0, 1.0));
    CHECK(g.is_valid(1e-9));
  }
}

TEST_CASE("ad commutator identities") {
  auto rng = seeded_rng(17);
  for (int i = 0; i < 50; ++i) {
    const Twist a = random_twist(rng, 2.0, 2.0);
    const Twist b = random_twist(rng, 2.0, 2.0);
    CHECK((ad(a) * a).cwiseAbs().maxCoeff() < 1e-14);
    const Twist lhs = ad(a) * b;
    const Twist rhs = vee(hat(a) * hat(b) - hat(b) * hat(a));
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("Ad of identity and exp correspondence") {
  CHECK((Ad(Pose::identity()) - Matrix6::Identity()).cwiseAbs().maxCoeff() ==
        0.0);

  auto rng = seeded_rng(19);
  for (int i = 0; i < 50; ++i) {
    const Twist xi = random_twist(rng, 0.8, 0.8);
    const Matrix6 lhs = Ad(se3_exp(xi));
    const Matrix6 rhs = Matrix6(ad(xi)).exp();  // scaling-and-squaring oracle
    CHECK(rel_error(lhs, rhs) < 1e-12);
  }
}

TEST_CASE("Ad matches conjugation") {
  auto rng = seeded_rng(23);
  for (int i = 0; i < 50; ++i) {
    const Pose g = se3_exp(random_twist(rng, 2.0, 1.0));
    const Twist xi = random_twist(rng, 2.0, 2.0);
    const Twist lhs = Ad(g) * xi;
    const Twist rhs = vee(g.matrix() * hat(xi) * g.inverse().matrix());
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("right Jacobian basics") {
  CHECK((se3_right_jacobian(Twist::Zero()) - Matrix6::Identity())
            .cwiseAbs()
            .maxCoeff() == 0.0);

  auto rng = seeded_rng(29);
  for (int i = 0; i < 100; ++i) {
    const Twist xi = random_twist(rng, 2.5, 2.0);
    const Matrix6 J = se3_right_jacobian(xi);
    const Matrix6 Jinv = se3_right_jacobian_inverse(xi);
    CHECK(((J * Jinv) - Matrix6::Identity()).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("right Jacobian matches the finite difference of its definition") {
  auto rng = seeded_rng(31);
  for (int i = 0; i < 100; ++i) {
    const Twist xi = random_twist(rng, 2.0, 2.0);
    auto f = [&](const Eigen::VectorXd& d) -> Eigen::VectorXd {
      return se3_log(se3_exp(xi).inverse() * se3_exp(xi + Twist(d)));
    };
    const Eigen::MatrixXd fd =
        central_difference(f, Eigen::VectorXd::Zero(6), 1e-6);
    CHECK(rel_error(se3_right_jacobian(xi), fd) < 1e-6);
  }
}

TEST_CASE("series and closed-form branches agree across the switch band") {
  using detail::Branch;
  auto rng = seeded_rng(37);
  std::uniform_real_distribution<double> logmag(std::log(1e-7), std::log(1e-5));
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    Eigen::Vector3d axis(gauss(rng), gauss(rng), gauss(rng));
    axis.normalize();
    const double th = std::exp(logmag(rng));
    const Eigen::Vector3d w = th * axis;
    Twist xi;
    xi << w, gauss(rng), gauss(rng), gauss(rng);

    CHECK((detail::so3_exp_b(w, Branch::kSeries) -
           detail::so3_exp_b(w, Branch::kClosedForm))
              .cwiseAbs()
              .maxCoeff() < 1e-10);
    CHECK((detail::so3_left_jacobian_b(w, Branch::kSeries) -
           detail::so3_left_jacobian_b(w, Branch::kClosedForm))
              .cwiseAbs()
              .maxCoeff() < 1e-10);
    CHECK((detail::so3_left_jacobian_inverse_b(w, Branch::kSeries) -
           detail::so3_left_jacobian_inverse_b(w, Branch::kClosedForm))
              .cwiseAbs()
              .maxCoeff() < 1e-10);
    CHECK((detail::se3_right_jacobian_b(xi, Branch::kSeries) -
           detail::se3_right_jacobian_b(xi, Branch::kClosedForm))
              .cwiseAbs()
              .maxCoeff() < 1e-10);
  }
}

TEST_CASE("projected recovers a rotation from a perturbed matrix") {
  auto rng = seeded_rng(41);
  const Pose g = se3_exp(random_twist(rng, 2.0, 1.0));
  Pose dirty = g;
  dirty.R += 1e-5 * Eigen::Matrix3d::Constant(1.0);
  CHECK_FALSE(dirty.is_valid(1e-9));
  const Pose clean = dirty.projected();
  CHECK(clean.is_valid(1e-12));
  CHECK((clean.R - g.R).cwiseAbs().maxCoeff() < 1e-4);
}
