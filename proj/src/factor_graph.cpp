#include "magshape/factor_graph.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <stdexcept>

namespace magshape {

Values straight_rod_values(double length, int num_intervals, int coeff_dim) {
  Values v;
  v.poses.resize(num_intervals + 1);
  const double h = length / num_intervals;
  for (int i = 0; i <= num_intervals; ++i) {
    v.poses[i] = Pose{Eigen::Matrix3d::Identity(),
                      Eigen::Vector3d(0.0, 0.0, i * h)};
  }
  v.coeffs = Eigen::VectorXd::Zero(coeff_dim);
  return v;
}

void Factor::set_covariance(const Eigen::MatrixXd& cov) {
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument("Factor: covariance is not positive definite");
  }
  // Sigma = L L^T  =>  ||L^-1 e||^2 = e^T Sigma^-1 e
  sqrt_info_ = Eigen::MatrixXd(llt.matrixL())
                   .triangularView<Eigen::Lower>()
                   .solve(Eigen::MatrixXd::Identity(cov.rows(), cov.cols()));
}

// ---------------------------------------------------------------------------
// MagnusFactor

MagnusFactor::MagnusFactor(const BasisConfig& cfg, int node, double s_lo,
                           double s_hi, const Matrix6& covariance)
    : cfg_(&cfg), node_(node), s_lo_(s_lo), s_hi_(s_hi) {
  vars_ = {VariableKey::pose(node), VariableKey::pose(node + 1),
           VariableKey::coeffs()};
  set_covariance(covariance);
}

std::string MagnusFactor::name() const {
  return "magnus[" + std::to_string(node_) + "]";
}

Eigen::VectorXd MagnusFactor::evaluate(
    const Values& x, std::vector<Eigen::MatrixXd>* jacobians) const {
  const MagnusIncrement inc =
      magnus_increment(*cfg_, x.coeffs, s_lo_, s_hi_);
  const Pose exp_neg_omega = se3_exp(-inc.omega);
  const Pose rel = x.poses[node_].inverse() * x.poses[node_ + 1];
  const Twist e = se3_log(exp_neg_omega * rel);

  if (jacobians) {
    jacobians->resize(3);
    const Matrix6 jr_inv_neg = se3_right_jacobian_inverse(Twist(-e));
    // right perturbation of g_i enters on the left of the residual argument,
    // conjugated by exp(-Omega)
    const Matrix6 j_gi = -jr_inv_neg * Ad(exp_neg_omega);
    (*jacobians)[0] = j_gi;
    (*jacobians)[1] = se3_right_jacobian_inverse(e);
    // de/dOmega = j_gi * Jr(-Omega); chain through dOmega/dq
    (*jacobians)[2] =
        j_gi * se3_right_jacobian(Twist(-inc.omega)) * inc.domega_dq;
  }
  return e;
}

// ---------------------------------------------------------------------------
// StrainMeasurementFactor

StrainMeasurementFactor::StrainMeasurementFactor(const BasisConfig& cfg,
                                                 double s, const Twist& meas,
                                                 const Matrix6& covariance)
    : phi_(basis_row(cfg, s)), meas_(meas), s_(s) {
  vars_ = {VariableKey::coeffs()};
  set_covariance(covariance);
}

std::string StrainMeasurementFactor::name() const {
  return "strain_meas[s=" + std::to_string(s_) + "]";
}

Eigen::VectorXd StrainMeasurementFactor::evaluate(
    const Values& x, std::vector<Eigen::MatrixXd>* jacobians) const {
  if (jacobians) {
    jacobians->resize(1);
    (*jacobians)[0] = phi_;
  }
  return phi_ * x.coeffs + reference_strain() - meas_;
}

// ---------------------------------------------------------------------------
// PoseMeasurementFactor

PoseMeasurementFactor::PoseMeasurementFactor(int node, const Pose& meas,
                                             const Matrix6& covariance)
    : meas_inv_(meas.inverse()), node_(node) {
  vars_ = {VariableKey::pose(node)};
  set_covariance(covariance);
}

std::string PoseMeasurementFactor::name() const {
  return "pose_meas[" + std::to_string(node_) + "]";
}

Eigen::VectorXd PoseMeasurementFactor::evaluate(
    const Values& x, std::vector<Eigen::MatrixXd>* jacobians) const {
  const Twist e = se3_log(meas_inv_ * x.poses[node_]);
  if (jacobians) {
    jacobians->resize(1);
    (*jacobians)[0] = se3_right_jacobian_inverse(e);
  }
  return e;
}

// ---------------------------------------------------------------------------
// PositionMeasurementFactor

PositionMeasurementFactor::PositionMeasurementFactor(
    int node, const Eigen::Vector3d& meas, const Eigen::Matrix3d& covariance)
    : meas_(meas), node_(node) {
  vars_ = {VariableKey::pose(node)};
  set_covariance(covariance);
}

std::string PositionMeasurementFactor::name() const {
  return "position_meas[" + std::to_string(node_) + "]";
}

Eigen::VectorXd PositionMeasurementFactor::evaluate(
    const Values& x, std::vector<Eigen::MatrixXd>* jacobians) const {
  const Pose& g = x.poses[node_];
  if (jacobians) {
    jacobians->resize(1);
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(3, 6);
    j.rightCols<3>() = g.R;  // d t(g exp(d)) / d p = R
    (*jacobians)[0] = j;
  }
  return g.t - meas_;
}

// ---------------------------------------------------------------------------
// priors

RootPosePriorFactor::RootPosePriorFactor() {
  vars_ = {VariableKey::pose(0)};
  set_sqrt_information(std::sqrt(kConstrainedInformation) *
                       Eigen::MatrixXd::Identity(6, 6));
}

RootPosePriorFactor::RootPosePriorFactor(const Matrix6& covariance) {
  vars_ = {VariableKey::pose(0)};
  set_covariance(covariance);
}

Eigen::VectorXd RootPosePriorFactor::evaluate(
    const Values& x, std::vector<Eigen::MatrixXd>* jacobians) const {
  const Twist e = se3_log(x.poses[0]);
  if (jacobians) {
    jacobians->resize(1);
    (*jacobians)[0] = se3_right_jacobian_inverse(e);
  }
  return e;
}

CoeffPriorFactor::CoeffPriorFactor(const Eigen::MatrixXd& covariance)
    : dim_(static_cast<int>(covariance.rows())) {
  vars_ = {VariableKey::coeffs()};
  set_covariance(covariance);
}

Eigen::VectorXd CoeffPriorFactor::evaluate(
    const Values& x, std::vector<Eigen::MatrixXd>* jacobians) const {
  if (jacobians) {
    jacobians->resize(1);
    (*jacobians)[0] = Eigen::MatrixXd::Identity(dim_, dim_);
  }
  return x.coeffs;
}

// ---------------------------------------------------------------------------
// FactorGraph

void FactorGraph::add(std::unique_ptr<Factor> factor) {
  factors_.push_back(std::move(factor));
}

int FactorGraph::total_residual_dim() const {
  int d = 0;
  for (const auto& f : factors_) d += f->residual_dim();
  return d;
}

double FactorGraph::cost(const Values& x) const {
  double c = 0.0;
  for (const auto& f : factors_) {
    c += (f->sqrt_information() * f->evaluate(x, nullptr)).squaredNorm();
  }
  return c;
}

void FactorGraph::linearize(const Values& x, Eigen::MatrixXd* jacobian,
                            Eigen::VectorXd* residual) const {
  const int rows = total_residual_dim();
  const int cols = layout_.tangent_dim();
  jacobian->setZero(rows, cols);
  residual->setZero(rows);

  int row = 0;
  std::vector<Eigen::MatrixXd> blocks;
  for (const auto& f : factors_) {
    const int d = f->residual_dim();
    const Eigen::VectorXd e = f->evaluate(x, &blocks);
    const Eigen::MatrixXd& w = f->sqrt_information();
    residual->segment(row, d) = w * e;
    const auto& vars = f->variables();
    for (std::size_t k = 0; k < vars.size(); ++k) {
      jacobian->block(row, layout_.offset(vars[k]), d,
                      layout_.block_dim(vars[k])) = w * blocks[k];
    }
    row += d;
  }
}

std::vector<double> FactorGraph::factor_residual_norms(const Values& x) const {
  std::vector<double> norms;
  norms.reserve(factors_.size());
  for (const auto& f : factors_) {
    norms.push_back((f->sqrt_information() * f->evaluate(x, nullptr)).norm());
  }
  return norms;
}

FactorGraph build_graph(const GraphSpec& spec, const MeasurementSet& meas) {
  spec.basis.validate();
  if (spec.num_intervals < 2) {
    throw std::invalid_argument("build_graph: need at least two intervals");
  }
  const int s_dim = spec.basis.dim();
  if (spec.coeff_prior_diagonal.size() != s_dim) {
    throw std::invalid_argument(
        "build_graph: coefficient prior diagonal has wrong length");
  }

  const double length = spec.basis.length;
  const int n = spec.num_intervals;
  const double h = length / n;

  FactorGraph graph(VariableLayout{n + 1, s_dim});

  if (spec.root_constrained) {
    graph.add(std::make_unique<RootPosePriorFactor>());
  } else {
    graph.add(std::make_unique<RootPosePriorFactor>(spec.root_covariance));
  }
  graph.add(std::make_unique<CoeffPriorFactor>(
      Eigen::MatrixXd(spec.coeff_prior_diagonal.asDiagonal())));

  for (int i = 0; i < n; ++i) {
    graph.add(std::make_unique<MagnusFactor>(spec.basis, i, i * h, (i + 1) * h,
                                             spec.magnus_covariance));
  }

  // Pose/position readings snap to grid nodes; tolerance covers float noise
  // in arclength arithmetic only.
  const double tol = 1e-9;
  auto node_at = [&](double s, const char* what) {
    const int i = static_cast<int>(std::lround(s / h));
    if (i < 0 || i > n || std::abs(s - i * h) > tol) {
      const int nearest = std::clamp(i, 0, n);
      throw std::invalid_argument(
          std::string(what) + " measurement at s=" + std::to_string(s) +
          " does not coincide with an estimation node (nearest node " +
          std::to_string(nearest) + " at s=" + std::to_string(nearest * h) +
          ")");
    }
    return i;
  };

  for (const auto& r : meas.strains) {
    if (r.s < 0.0 || r.s > length) {
      throw std::invalid_argument("strain measurement outside [0, L]");
    }
    graph.add(std::make_unique<StrainMeasurementFactor>(spec.basis, r.s,
                                                        r.value, r.covariance));
  }
  for (const auto& r : meas.poses) {
    graph.add(std::make_unique<PoseMeasurementFactor>(
        node_at(r.s, "pose"), r.value, r.covariance));
  }
  for (const auto& r : meas.positions) {
    graph.add(std::make_unique<PositionMeasurementFactor>(
        node_at(r.s, "position"), r.value, r.covariance));
  }
  return graph;
}

}  // namespace magshape
