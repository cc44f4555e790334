#pragma once

#include <cmath>
#include <limits>

#include <Eigen/Core>

#include "ib/error.hpp"

namespace ib {

using Vec = Eigen::VectorXd;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr double kLn2 = 0.6931471805599453;

// Probabilities below this are treated as exact zeros in support checks,
// so 0 log 0 = 0 throughout.
inline constexpr double kSupportEps = 1e-15;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// An information quantity. Stored in nats; bits are a view.
struct InfoValue {
  double nats = 0.0;

  double bits() const { return nats / kLn2; }
  bool is_infinite() const { return std::isinf(nats); }

  static InfoValue from_bits(double b) { return {b * kLn2}; }
  static InfoValue infinity() { return {kInfinity}; }
};

/// Clamps the tiny negative values entropy/MI sums can produce by rounding.
inline double clamp_info(double nats) {
  if (nats < 0.0 && nats > -1e-12) return 0.0;
  return nats;
}

inline double plogp(double p) { return p > kSupportEps ? p * std::log(p) : 0.0; }

/// Shannon entropy of a distribution, in nats.
inline double entropy(const Vec& p) {
  double h = 0.0;
  for (int i = 0; i < p.size(); ++i) h -= plogp(p[i]);
  return clamp_info(h);
}

/// Joint entropy over all cells of a joint table, in nats.
inline double entropy(const Mat& joint) {
  double h = 0.0;
  for (int r = 0; r < joint.rows(); ++r)
    for (int c = 0; c < joint.cols(); ++c) h -= plogp(joint(r, c));
  return clamp_info(h);
}

/// Mutual information between the row and column variables of a joint
/// table, I = H(row) + H(col) - H(row, col), clamped at zero.
inline double mutual_information_joint(const Mat& joint) {
  const Vec pr = joint.rowwise().sum();
  const Vec pc = joint.colwise().sum();
  const double mi = entropy(pr) + entropy(pc) - entropy(joint);
  return std::max(0.0, clamp_info(mi));
}

/// H(col | row) computed from a joint table, in nats.
inline double conditional_entropy_cols(const Mat& joint) {
  const Vec pr = joint.rowwise().sum();
  return clamp_info(entropy(joint) - entropy(pr));
}

inline InfoValue kl_divergence(const Vec& p, const Vec& q) {
  if (p.size() != q.size())
    throw LengthMismatch("kl_divergence: distributions have different lengths");
  double d = 0.0;
  for (int i = 0; i < p.size(); ++i) {
    if (p[i] <= kSupportEps) continue;
    if (q[i] <= kSupportEps) return InfoValue::infinity();
    d += p[i] * std::log(p[i] / q[i]);
  }
  return {std::max(0.0, clamp_info(d))};
}

/// Binary entropy h2(x), zero at both endpoints.
inline InfoValue binary_entropy(double x) {
  if (x < 0.0 || x > 1.0) throw OutOfRange("binary_entropy: argument outside [0, 1]");
  return {-plogp(x) - plogp(1.0 - x)};
}

/// Per-letter logarithmic loss, log(1 / yhat[y]); infinite off support.
inline InfoValue log_loss(int y_index, const Vec& yhat) {
  if (y_index < 0 || y_index >= yhat.size())
    throw IndexOutOfRange("log_loss: symbol index outside prediction support");
  const double p = yhat[y_index];
  if (p <= kSupportEps) return InfoValue::infinity();
  return {-std::log(p)};
}

/// Binary convolution p(1-q) + q(1-p).
inline double binary_convolve(double p, double q) { return p * (1.0 - q) + q * (1.0 - p); }

}  // namespace ib
