#pragma once

#include <Eigen/Core>
#include <span>

#include "magshape/lie_se3.hpp"
#include "magshape/strain_basis.hpp"

namespace magshape {

/// Fourth-order Magnus step over one arclength interval: the twist Omega with
/// g(s_{i+1}) = g(s_i) exp(hat(Omega)), plus its sensitivity to the strain
/// coefficients.
struct MagnusIncrement {
  Twist omega = Twist::Zero();
  Eigen::MatrixXd domega_dq;  // 6 x S
};

/// Two-point Gauss-Legendre collocation of the Magnus series truncated after
/// the commutator term. Exact for arclength-constant strain fields. Throws
/// std::invalid_argument for a degenerate interval (s_hi <= s_lo).
MagnusIncrement magnus_increment(const BasisConfig& cfg,
                                 const Eigen::VectorXd& q, double s_lo,
                                 double s_hi);

/// g(s_hi) = g_lo * exp(hat(Omega)) over [s_lo, s_hi].
Pose propagate(const BasisConfig& cfg, const Eigen::VectorXd& q,
               const Pose& g_lo, double s_lo, double s_hi);

/// Continuous backbone reconstruction: propagates from the nearest node at or
/// below s. `nodes` holds the N+1 poses at uniform arclengths i * L / N. At a
/// node arclength the stored pose is returned unchanged.
Pose dense_query(const BasisConfig& cfg, const Eigen::VectorXd& q,
                 std::span<const Pose> nodes, double s);

}  // namespace magshape
