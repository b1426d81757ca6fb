#include "magshape/strain_basis.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <stdexcept>
#include <string>

namespace magshape {

namespace {

// Span index i such that knots[i] <= s < knots[i+1], clamped to the last
// non-degenerate span at the right end.
int find_span(const std::vector<double>& knots, int n_ctrl, int degree,
              double s) {
  if (s >= knots[n_ctrl]) return n_ctrl - 1;
  int lo = degree;
  int hi = n_ctrl;
  while (hi - lo > 1) {
    const int mid = (lo + hi) / 2;
    (s < knots[mid] ? hi : lo) = mid;
  }
  return lo;
}

// The degree+1 nonzero basis values at s (de Boor / NURBS book A2.2).
void basis_values(const std::vector<double>& knots, int span, int degree,
                  double s, double* out) {
  out[0] = 1.0;
  std::array<double, BasisConfig::kDegree + 1> left{}, right{};
  for (int j = 1; j <= degree; ++j) {
    left[j] = s - knots[span + 1 - j];
    right[j] = knots[span + j] - s;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      const double tmp = out[r] / (right[r + 1] + left[j - r]);
      out[r] = saved + right[r + 1] * tmp;
      saved = left[j - r] * tmp;
    }
    out[j] = saved;
  }
}

}  // namespace

int BasisConfig::dim() const {
  int s = 0;
  for (int n : control_points) s += n;
  return s;
}

int BasisConfig::offset(int component) const {
  int off = 0;
  for (int c = 0; c < component; ++c) off += control_points[c];
  return off;
}

void BasisConfig::validate() const {
  if (length <= 0.0) {
    throw std::invalid_argument("BasisConfig: length must be positive");
  }
  for (int c = 0; c < 6; ++c) {
    if (control_points[c] != 0 && control_points[c] < kDegree + 1) {
      throw std::invalid_argument(
          "BasisConfig: component " + std::string(kStrainComponentNames[c]) +
          " needs at least " + std::to_string(kDegree + 1) +
          " control points (or 0 for inactive)");
    }
  }
  if (dim() < 1) {
    throw std::invalid_argument("BasisConfig: no active components");
  }
}

std::vector<double> BasisConfig::knots(int component) const {
  const int n = control_points[component];
  const int p = kDegree;
  std::vector<double> t(n + p + 1);
  const int spans = n - p;  // number of knot intervals
  for (int i = 0; i <= p; ++i) t[i] = 0.0;
  for (int j = 1; j < spans; ++j) t[p + j] = length * j / spans;
  for (int i = n; i <= n + p; ++i) t[i] = length;
  return t;
}

Eigen::MatrixXd basis_row(const BasisConfig& cfg, double s) {
  if (s < 0.0 || s > cfg.length) {
    throw std::invalid_argument("basis_row: arclength outside [0, L]");
  }
  Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(6, cfg.dim());
  constexpr int p = BasisConfig::kDegree;
  for (int c = 0; c < 6; ++c) {
    if (!cfg.active(c)) continue;
    const int n = cfg.control_points[c];
    const auto t = cfg.knots(c);
    const int span = find_span(t, n, p, s);
    double vals[p + 1];
    basis_values(t, span, p, s, vals);
    const int off = cfg.offset(c);
    for (int j = 0; j <= p; ++j) phi(c, off + span - p + j) = vals[j];
  }
  return phi;
}

Twist eval_strain(const BasisConfig& cfg, const Eigen::VectorXd& q, double s) {
  if (q.size() != cfg.dim()) {
    throw std::invalid_argument("eval_strain: coefficient dimension mismatch");
  }
  return basis_row(cfg, s) * q + reference_strain();
}

FitResult fit_coeffs(const BasisConfig& cfg,
                     const std::vector<std::pair<double, Twist>>& samples) {
  cfg.validate();
  const int m = static_cast<int>(samples.size());
  const Twist xi_ref = reference_strain();

  FitResult result;
  result.coeffs = Eigen::VectorXd::Zero(cfg.dim());
  double sq_residual = 0.0;

  for (int c = 0; c < 6; ++c) {
    const int n = cfg.control_points[c];
    if (n == 0) {
      // Inactive rows still contribute their (constant) mismatch to the
      // reported objective value.
      for (const auto& [s, xi] : samples) {
        (void)s;
        const double r = xi_ref(c) - xi(c);
        sq_residual += r * r;
      }
      continue;
    }
    if (m < n) {
      throw std::runtime_error(
          "fit_coeffs: component " + std::string(kStrainComponentNames[c]) +
          " has fewer samples than control points");
    }
    Eigen::MatrixXd A(m, n);
    Eigen::VectorXd y(m);
    const auto t = cfg.knots(c);
    constexpr int p = BasisConfig::kDegree;
    for (int j = 0; j < m; ++j) {
      const double s = samples[j].first;
      if (s < 0.0 || s > cfg.length) {
        throw std::invalid_argument("fit_coeffs: sample arclength outside [0, L]");
      }
      A.row(j).setZero();
      const int span = find_span(t, n, p, s);
      double vals[p + 1];
      basis_values(t, span, p, s, vals);
      for (int k = 0; k <= p; ++k) A(j, span - p + k) = vals[k];
      y(j) = samples[j].second(c) - xi_ref(c);
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    if (qr.rank() < n) {
      throw std::runtime_error(
          "fit_coeffs: rank-deficient design matrix for component " +
          std::string(kStrainComponentNames[c]) +
          " (samples do not span its knot intervals)");
    }
    const Eigen::VectorXd qc = qr.solve(y);
    result.coeffs.segment(cfg.offset(c), n) = qc;
    sq_residual += (A * qc - y).squaredNorm();
  }

  result.residual_norm = std::sqrt(sq_residual);
  return result;
}

}  // namespace magshape
