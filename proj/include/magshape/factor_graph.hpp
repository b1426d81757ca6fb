#pragma once

#include <Eigen/Core>
#include <memory>
#include <string>
#include <vector>

#include "magshape/lie_se3.hpp"
#include "magshape/magnus.hpp"
#include "magshape/strain_basis.hpp"

namespace magshape {

/// Variables of the shape estimation graph: N+1 backbone poses plus one
/// strain-coefficient vector.
struct VariableKey {
  enum class Kind { kPose, kCoeffs };
  Kind kind = Kind::kPose;
  int index = 0;  // pose node index; unused for kCoeffs

  static VariableKey pose(int i) { return {Kind::kPose, i}; }
  static VariableKey coeffs() { return {Kind::kCoeffs, 0}; }
};

/// Tangent-space bookkeeping: pose blocks first (6 each, contiguous from
/// node 0), the coefficient block last.
struct VariableLayout {
  int num_pose_nodes = 0;  // N + 1
  int coeff_dim = 0;       // S

  int tangent_dim() const { return 6 * num_pose_nodes + coeff_dim; }
  int offset(const VariableKey& key) const {
    return key.kind == VariableKey::Kind::kPose ? 6 * key.index
                                                : 6 * num_pose_nodes;
  }
  int block_dim(const VariableKey& key) const {
    return key.kind == VariableKey::Kind::kPose ? 6 : coeff_dim;
  }
};

/// One assignment of all variables.
struct Values {
  std::vector<Pose> poses;
  Eigen::VectorXd coeffs;
};

/// Straight-rod configuration: q = 0 and g_i = (I, [0, 0, i h]).
Values straight_rod_values(double length, int num_intervals, int coeff_dim);

/// Gaussian factor with an unwhitened residual e and covariance Sigma,
/// contributing ||e||^2_Sigma to the graph objective. Whitening uses the
/// inverse Cholesky factor of Sigma, so the squared whitened norm equals the
/// Mahalanobis distance.
class Factor {
 public:
  virtual ~Factor() = default;

  virtual int residual_dim() const = 0;
  virtual const std::vector<VariableKey>& variables() const = 0;
  virtual std::string name() const = 0;

  /// Unwhitened residual; when `jacobians` is non-null it receives one block
  /// per connected variable, in variables() order, using the right
  /// perturbation convention g <- g exp(hat(delta)) for poses.
  virtual Eigen::VectorXd evaluate(
      const Values& x, std::vector<Eigen::MatrixXd>* jacobians) const = 0;

  const Eigen::MatrixXd& sqrt_information() const { return sqrt_info_; }

 protected:
  /// Sets the whitener from a covariance (must be SPD).
  void set_covariance(const Eigen::MatrixXd& cov);
  /// Sets the whitener directly (used by the hard root constraint).
  void set_sqrt_information(const Eigen::MatrixXd& sqrt_info) {
    sqrt_info_ = sqrt_info;
  }

 private:
  Eigen::MatrixXd sqrt_info_;
};

/// Ternary kinematic factor: e = [log(exp(-hat(Omega(q))) g_i^-1 g_{i+1})]^v.
class MagnusFactor : public Factor {
 public:
  MagnusFactor(const BasisConfig& cfg, int node, double s_lo, double s_hi,
               const Matrix6& covariance);

  int residual_dim() const override { return 6; }
  const std::vector<VariableKey>& variables() const override { return vars_; }
  std::string name() const override;
  Eigen::VectorXd evaluate(
      const Values& x, std::vector<Eigen::MatrixXd>* jacobians) const override;

  double interval_start() const { return s_lo_; }
  double interval_end() const { return s_hi_; }

 private:
  const BasisConfig* cfg_;
  int node_;
  double s_lo_, s_hi_;
  std::vector<VariableKey> vars_;
};

/// e = (Phi(s) q + xi_ref) - xi_meas; touches only the coefficient vector and
/// honors the exact (possibly off-node) arclength.
class StrainMeasurementFactor : public Factor {
 public:
  StrainMeasurementFactor(const BasisConfig& cfg, double s, const Twist& meas,
                          const Matrix6& covariance);

  int residual_dim() const override { return 6; }
  const std::vector<VariableKey>& variables() const override { return vars_; }
  std::string name() const override;
  Eigen::VectorXd evaluate(
      const Values& x, std::vector<Eigen::MatrixXd>* jacobians) const override;

 private:
  Eigen::MatrixXd phi_;  // cached basis row
  Twist meas_;
  double s_;
  std::vector<VariableKey> vars_;
};

/// e = [log(g_meas^-1 g_j)]^v.
class PoseMeasurementFactor : public Factor {
 public:
  PoseMeasurementFactor(int node, const Pose& meas, const Matrix6& covariance);

  int residual_dim() const override { return 6; }
  const std::vector<VariableKey>& variables() const override { return vars_; }
  std::string name() const override;
  Eigen::VectorXd evaluate(
      const Values& x, std::vector<Eigen::MatrixXd>* jacobians) const override;

 private:
  Pose meas_inv_;
  int node_;
  std::vector<VariableKey> vars_;
};

/// e = t(g_j) - r_meas; orientation-blind.
class PositionMeasurementFactor : public Factor {
 public:
  PositionMeasurementFactor(int node, const Eigen::Vector3d& meas,
                            const Eigen::Matrix3d& covariance);

  int residual_dim() const override { return 3; }
  const std::vector<VariableKey>& variables() const override { return vars_; }
  std::string name() const override;
  Eigen::VectorXd evaluate(
      const Values& x, std::vector<Eigen::MatrixXd>* jacobians) const override;

 private:
  Eigen::Vector3d meas_;
  int node_;
  std::vector<VariableKey> vars_;
};

/// e = [log(g_0)]^v. The constrained form uses a fixed information weight of
/// 1e12 per axis instead of a zero covariance.
class RootPosePriorFactor : public Factor {
 public:
  static constexpr double kConstrainedInformation = 1e12;

  /// Hard-constrained root.
  RootPosePriorFactor();
  /// Soft prior with the given covariance.
  explicit RootPosePriorFactor(const Matrix6& covariance);

  int residual_dim() const override { return 6; }
  const std::vector<VariableKey>& variables() const override { return vars_; }
  std::string name() const override { return "root_pose_prior"; }
  Eigen::VectorXd evaluate(
      const Values& x, std::vector<Eigen::MatrixXd>* jacobians) const override;

 private:
  std::vector<VariableKey> vars_;
};

/// e = q (Tikhonov regularization of the strain coefficients).
class CoeffPriorFactor : public Factor {
 public:
  explicit CoeffPriorFactor(const Eigen::MatrixXd& covariance);

  int residual_dim() const override { return dim_; }
  const std::vector<VariableKey>& variables() const override { return vars_; }
  std::string name() const override { return "coeff_prior"; }
  Eigen::VectorXd evaluate(
      const Values& x, std::vector<Eigen::MatrixXd>* jacobians) const override;

 private:
  int dim_;
  std::vector<VariableKey> vars_;
};

/// Sensor readings feeding build_graph. Pose and position readings must sit
/// on estimation nodes; strain readings may use any arclength in [0, L].
struct MeasurementSet {
  struct StrainReading {
    double s = 0.0;
    Twist value = Twist::Zero();
    Matrix6 covariance = Matrix6::Identity();
  };
  struct PoseReading {
    double s = 0.0;
    Pose value;
    Matrix6 covariance = Matrix6::Identity();
  };
  struct PositionReading {
    double s = 0.0;
    Eigen::Vector3d value = Eigen::Vector3d::Zero();
    Eigen::Matrix3d covariance = Eigen::Matrix3d::Identity();
  };

  std::vector<StrainReading> strains;
  std::vector<PoseReading> poses;
  std::vector<PositionReading> positions;
};

class FactorGraph {
 public:
  explicit FactorGraph(VariableLayout layout) : layout_(layout) {}

  const VariableLayout& layout() const { return layout_; }
  void add(std::unique_ptr<Factor> factor);
  int num_factors() const { return static_cast<int>(factors_.size()); }
  const Factor& factor(int i) const { return *factors_[i]; }

  /// Sum of whitened squared residuals (the negative log posterior up to a
  /// constant).
  double cost(const Values& x) const;

  /// Dense whitened linearization: rows stacked per factor in insertion
  /// order, columns per VariableLayout.
  void linearize(const Values& x, Eigen::MatrixXd* jacobian,
                 Eigen::VectorXd* residual) const;

  /// Whitened residual norm of each factor at x.
  std::vector<double> factor_residual_norms(const Values& x) const;

  int total_residual_dim() const;

 private:
  VariableLayout layout_;
  std::vector<std::unique_ptr<Factor>> factors_;
};

/// Estimation-grid plus covariance settings needed to assemble the graph;
/// estimator-cli's Scenario carries one of these.
struct GraphSpec {
  BasisConfig basis;
  int num_intervals = 10;
  Matrix6 magnus_covariance = 1e-6 * Matrix6::Identity();
  Eigen::VectorXd coeff_prior_diagonal;  // length S
  bool root_constrained = true;
  Matrix6 root_covariance = Matrix6::Identity();  // used when unconstrained
};

/// Assembles the full graph: root prior, coefficient prior, N Magnus factors,
/// one factor per measurement. Pose/position readings whose arclength does
/// not coincide with an estimation node are rejected with a nearest-node
/// hint.
FactorGraph build_graph(const GraphSpec& spec, const MeasurementSet& meas);

}  // namespace magshape
