#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ib/curve.hpp"

namespace ib {

/// Closed-form trade-off point for a doubly symmetric binary source with
/// crossover p and a binary symmetric test channel with flip probability q:
/// complexity 1 - h2(q) bits, relevance 1 - h2(p*q) bits.
inline CurvePoint binary_ib(double p, double q) {
  if (p < 0.0 || p > 0.5) throw OutOfRange("binary_ib: crossover outside [0, 1/2]");
  if (q < 0.0 || q > 1.0) throw OutOfRange("binary_ib: test-channel noise outside [0, 1]");
  CurvePoint cp;
  cp.complexity_nats = (1.0 - binary_entropy(q).bits()) * kLn2;
  cp.relevance_nats = (1.0 - binary_entropy(binary_convolve(p, q)).bits()) * kLn2;
  cp.parameter = q;
  return cp;
}

/// Scalar Gaussian trade-off: relevance at complexity R for X observed
/// through a unit-variance AWGN channel at the given snr. Nats in, nats out.
inline double scalar_gaussian_ib(double snr, double complexity_nats) {
  if (snr < 0.0) throw OutOfRange("scalar_gaussian_ib: snr must be non-negative");
  if (complexity_nats < 0.0) throw OutOfRange("scalar_gaussian_ib: complexity must be non-negative");
  return 0.5 * std::log1p(snr) - 0.5 * std::log1p(snr * std::exp(-2.0 * complexity_nats));
}

namespace detail {

using SymMat = Eigen::MatrixXd;

inline void require_symmetric(const SymMat& m, const char* what) {
  if (m.rows() != m.cols() || (m - m.transpose()).cwiseAbs().maxCoeff() > 1e-9 * (1.0 + m.cwiseAbs().maxCoeff()))
    throw ShapeMismatch(std::string(what) + ": matrix is not symmetric");
}

// Symmetric square root and inverse square root via the spectral form.
inline std::pair<SymMat, SymMat> sqrt_and_inv_sqrt(const SymMat& m, const char* what) {
  Eigen::SelfAdjointEigenSolver<SymMat> es(m);
  if (es.info() != Eigen::Success) throw EigenFailure(std::string(what) + ": eigensolver failed");
  const Eigen::VectorXd d = es.eigenvalues();
  if (d.minCoeff() <= 0.0) throw NotPositiveDefinite(std::string(what) + ": not positive definite");
  const Eigen::VectorXd s = d.cwiseSqrt();
  return {es.eigenvectors() * s.asDiagonal() * es.eigenvectors().transpose(),
          es.eigenvectors() * s.cwiseInverse().asDiagonal() * es.eigenvectors().transpose()};
}

inline double log_det_spd(const SymMat& m, const char* what) {
  Eigen::LLT<SymMat> llt(m);
  if (llt.info() != Eigen::Success) throw NotPositiveDefinite(std::string(what) + ": not positive definite");
  double ld = 0.0;
  for (int i = 0; i < m.rows(); ++i) ld += std::log(llt.matrixL()(i, i));
  return 2.0 * ld;
}

}  // namespace detail

/// Jointly Gaussian (X, Y) described by the source covariance and the
/// conditional covariance of X given Y. The spectrum of the whitened
/// conditional covariance drives the optimal projection: eigenvalues are
/// the per-direction MMSE ratios, in [0, 1], sorted ascending.
class GaussianIBModel {
 public:
  static GaussianIBModel from_covariances(const Eigen::MatrixXd& sigma_x,
                                          const Eigen::MatrixXd& sigma_x_given_y) {
    detail::require_symmetric(sigma_x, "sigma_x");
    detail::require_symmetric(sigma_x_given_y, "sigma_x_given_y");
    if (sigma_x.rows() != sigma_x_given_y.rows())
      throw ShapeMismatch("gaussian model: covariance dimensions disagree");
    GaussianIBModel m;
    m.sigma_x_ = (sigma_x + sigma_x.transpose()) / 2.0;
    m.sigma_x_given_y_ = (sigma_x_given_y + sigma_x_given_y.transpose()) / 2.0;
    auto [sqrt_x, inv_sqrt_x] = detail::sqrt_and_inv_sqrt(m.sigma_x_, "sigma_x");
    Eigen::MatrixXd s = inv_sqrt_x * m.sigma_x_given_y_ * inv_sqrt_x;
    s = (s + s.transpose()) / 2.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
    if (es.info() != Eigen::Success) throw EigenFailure("gaussian model: eigensolver failed");
    m.lambda_ = es.eigenvalues();
    for (int i = 0; i < m.lambda_.size(); ++i) {
      if (m.lambda_[i] < -1e-7 || m.lambda_[i] > 1.0 + 1e-7)
        throw NotPositiveDefinite("gaussian model: whitened eigenvalue outside [0, 1]");
      m.lambda_[i] = std::clamp(m.lambda_[i], 0.0, 1.0);
    }
    // Left eigenvectors of sigma_x_given_y * sigma_x^{-1}, one per row,
    // recovered from the whitened basis. Ascending eigenvalue order.
    m.left_vectors_ = (inv_sqrt_x * es.eigenvectors()).transpose();
    m.r_.resize(m.lambda_.size());
    for (int i = 0; i < m.lambda_.size(); ++i)
      m.r_[i] = m.left_vectors_.row(i) * m.sigma_x_ * m.left_vectors_.row(i).transpose();
    return m;
  }

  /// Channel form X = H Y + N with noise covariance sigma_noise:
  /// sigma_x = H sigma_y H^T + sigma_noise and sigma_x_given_y = sigma_noise.
  static GaussianIBModel from_channel(const Eigen::MatrixXd& h, const Eigen::MatrixXd& sigma_noise,
                                      const Eigen::MatrixXd& sigma_y) {
    detail::require_symmetric(sigma_y, "sigma_y");
    if (h.cols() != sigma_y.rows() || h.rows() != sigma_noise.rows())
      throw ShapeMismatch("gaussian model: channel dimensions disagree");
    return from_covariances(h * sigma_y * h.transpose() + sigma_noise, sigma_noise);
  }

  int dim() const { return static_cast<int>(lambda_.size()); }
  const Eigen::VectorXd& eigenvalues() const { return lambda_; }
  /// Row i is the left eigenvector paired with eigenvalues()[i].
  const Eigen::MatrixXd& left_vectors() const { return left_vectors_; }
  const Eigen::VectorXd& projection_energy() const { return r_; }
  const Eigen::MatrixXd& sigma_x() const { return sigma_x_; }
  const Eigen::MatrixXd& sigma_x_given_y() const { return sigma_x_given_y_; }

  /// I(X;Y) in nats; infinite when the conditional covariance is singular.
  double mutual_information_xy() const {
    const double num = detail::log_det_spd(sigma_x_, "sigma_x");
    Eigen::LLT<Eigen::MatrixXd> llt(sigma_x_given_y_);
    if (llt.info() != Eigen::Success) return kInfinity;
    double den = 0.0;
    for (int i = 0; i < sigma_x_given_y_.rows(); ++i) den += 2.0 * std::log(llt.matrixL()(i, i));
    return 0.5 * (num - den);
  }

 private:
  Eigen::MatrixXd sigma_x_, sigma_x_given_y_;
  Eigen::VectorXd lambda_, r_;
  Eigen::MatrixXd left_vectors_;
};

/// Trade-off values at which successive eigen-directions activate,
/// 1 / (1 - lambda_i); a direction with lambda = 1 never activates.
inline std::vector<double> critical_betas(const GaussianIBModel& m) {
  std::vector<double> out;
  out.reserve(m.dim());
  for (int i = 0; i < m.dim(); ++i) {
    const double l = m.eigenvalues()[i];
    out.push_back(l >= 1.0 ? kInfinity : 1.0 / (1.0 - l));
  }
  return out;
}

/// Noisy linear projection U = A X + xi with unit noise covariance; rows of
/// A are the activated scaled eigenvectors.
struct GaussianIBProjection {
  Eigen::MatrixXd a;  // active_dims x N_x; empty when nothing is active
  int active_dims = 0;
  double gamma = 0.0;
};

/// Optimal Gaussian projection at trade-off gamma and the trade-off point it
/// achieves: complexity = 1/2 log det(I + A Sx A^T) and relevance =
/// complexity - 1/2 log det(I + A Sx|y A^T).
inline std::pair<GaussianIBProjection, CurvePoint> vector_gaussian_ib(const GaussianIBModel& m,
                                                                      double gamma) {
  if (gamma < 0.0) throw OutOfRange("vector_gaussian_ib: gamma must be non-negative");
  const auto betas = critical_betas(m);
  std::vector<Eigen::RowVectorXd> rows;
  for (int i = 0; i < m.dim(); ++i) {
    if (gamma <= betas[i]) continue;
    const double l = m.eigenvalues()[i];
    if (l <= kSupportEps)
      throw NotPositiveDefinite("vector_gaussian_ib: deterministic direction gives an unbounded projection");
    const double alpha = std::sqrt((gamma * (1.0 - l) - 1.0) / (l * m.projection_energy()[i]));
    rows.push_back(alpha * m.left_vectors().row(i));
  }
  GaussianIBProjection proj;
  proj.gamma = gamma;
  proj.active_dims = static_cast<int>(rows.size());
  proj.a.resize(proj.active_dims, m.dim());
  for (int i = 0; i < proj.active_dims; ++i) proj.a.row(i) = rows[i];

  CurvePoint cp;
  cp.parameter = gamma;
  if (proj.active_dims > 0) {
    const int k = proj.active_dims;
    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(k, k);
    const double ld_x = detail::log_det_spd(eye + proj.a * m.sigma_x() * proj.a.transpose(),
                                            "vector_gaussian_ib");
    const double ld_xy = detail::log_det_spd(
        eye + proj.a * m.sigma_x_given_y() * proj.a.transpose(), "vector_gaussian_ib");
    cp.complexity_nats = 0.5 * ld_x;
    cp.relevance_nats = 0.5 * (ld_x - ld_xy);
  }
  return {std::move(proj), cp};
}

}  // namespace ib
