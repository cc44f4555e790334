#pragma once

#include <utility>
#include <vector>

#include "ib/info.hpp"

namespace ib {

/// Finite joint distribution of (X, Y). Immutable after construction; both
/// marginals have full support because zero-probability symbols are pruned
/// when the table is validated.
class JointPMF {
 public:
  /// Validates a raw table: rectangular, non-negative, total mass within
  /// 1e-6 of one (unless `renormalize`). The accepted table is rescaled to
  /// sum to one exactly and zero-marginal rows/columns are dropped.
  static JointPMF validate(const Mat& raw, bool renormalize = false) {
    if (raw.rows() == 0 || raw.cols() == 0)
      throw EmptyAlphabet("joint pmf: empty alphabet");
    for (int r = 0; r < raw.rows(); ++r)
      for (int c = 0; c < raw.cols(); ++c)
        if (raw(r, c) < 0.0)
          throw NegativeEntry("joint pmf: negative entry at row " + std::to_string(r) +
                              ", column " + std::to_string(c));
    const double total = raw.sum();
    if (total <= 0.0) throw NotNormalized("joint pmf: total mass is zero");
    if (!renormalize && std::abs(total - 1.0) > 1e-6)
      throw NotNormalized("joint pmf: entries sum to " + std::to_string(total));

    Mat p = raw / total;
    // Prune symbols carrying no mass so conditionals are defined everywhere.
    std::vector<int> xs, ys;
    for (int r = 0; r < p.rows(); ++r)
      if (p.row(r).sum() > kSupportEps) xs.push_back(r);
    for (int c = 0; c < p.cols(); ++c)
      if (p.col(c).sum() > kSupportEps) ys.push_back(c);
    if (xs.empty() || ys.empty()) throw EmptyAlphabet("joint pmf: no supported symbols");
    Mat kept(static_cast<int>(xs.size()), static_cast<int>(ys.size()));
    for (size_t r = 0; r < xs.size(); ++r)
      for (size_t c = 0; c < ys.size(); ++c) kept(r, c) = p(xs[r], ys[c]);
    kept /= kept.sum();
    return JointPMF(std::move(kept), static_cast<int>(p.rows() - xs.size()),
                    static_cast<int>(p.cols() - ys.size()));
  }

  /// Doubly symmetric binary source: uniform X, Y = X xor Bern(p).
  static JointPMF dsbs(double p) {
    if (p < 0.0 || p > 1.0) throw OutOfRange("dsbs: crossover outside [0, 1]");
    Mat m(2, 2);
    m << (1.0 - p) / 2.0, p / 2.0, p / 2.0, (1.0 - p) / 2.0;
    return validate(m);
  }

  int x_card() const { return static_cast<int>(p_.rows()); }
  int y_card() const { return static_cast<int>(p_.cols()); }
  const Mat& pmf() const { return p_; }
  const Vec& px() const { return px_; }
  const Vec& py() const { return py_; }
  /// Rows are the channel P(Y | X = x).
  const Mat& y_given_x() const { return y_given_x_; }
  /// Rows are the reverse channel P(X | Y = y).
  Mat x_given_y() const {
    Mat m(y_card(), x_card());
    for (int y = 0; y < y_card(); ++y)
      for (int x = 0; x < x_card(); ++x) m(y, x) = p_(x, y) / py_[y];
    return m;
  }

  double entropy_x() const { return entropy(px_); }
  double entropy_y() const { return entropy(py_); }
  double entropy_joint() const { return entropy(p_); }
  double entropy_y_given_x() const { return clamp_info(entropy(p_) - entropy(px_)); }
  double entropy_x_given_y() const { return clamp_info(entropy(p_) - entropy(py_)); }

  /// Same distribution with the roles of X and Y exchanged.
  JointPMF swapped() const { return JointPMF(p_.transpose(), y_pruned_, x_pruned_); }

  int x_pruned() const { return x_pruned_; }
  int y_pruned() const { return y_pruned_; }

 private:
  JointPMF(Mat p, int x_pruned, int y_pruned)
      : p_(std::move(p)), x_pruned_(x_pruned), y_pruned_(y_pruned) {
    px_ = p_.rowwise().sum();
    py_ = p_.colwise().sum();
    y_given_x_.resize(p_.rows(), p_.cols());
    for (int x = 0; x < p_.rows(); ++x) y_given_x_.row(x) = p_.row(x) / px_[x];
  }

  Mat p_;
  Vec px_, py_;
  Mat y_given_x_;
  int x_pruned_ = 0, y_pruned_ = 0;
};

inline InfoValue mutual_information(const JointPMF& j) {
  return {mutual_information_joint(j.pmf())};
}

/// Stochastic mapping P(U | X): row x is the distribution over U given X=x.
class Encoder {
 public:
  static Encoder validate(const Mat& rows) {
    if (rows.rows() == 0 || rows.cols() == 0)
      throw EmptyAlphabet("encoder: empty alphabet");
    for (int r = 0; r < rows.rows(); ++r) {
      double s = 0.0;
      for (int c = 0; c < rows.cols(); ++c) {
        if (rows(r, c) < 0.0)
          throw NegativeEntry("encoder: negative entry at row " + std::to_string(r) +
                              ", column " + std::to_string(c));
        s += rows(r, c);
      }
      if (std::abs(s - 1.0) > 1e-9)
        throw NotNormalized("encoder: row " + std::to_string(r) + " sums to " +
                            std::to_string(s));
    }
    Mat m = rows;
    for (int r = 0; r < m.rows(); ++r) m.row(r) /= m.row(r).sum();
    return Encoder(std::move(m));
  }

  /// Deterministic identity map U = X.
  static Encoder identity(int n) { return Encoder(Mat::Identity(n, n)); }

  /// Maps every x to the single symbol U = 0.
  static Encoder constant(int x_card) { return Encoder(Mat::Ones(x_card, 1)); }

  /// Binary symmetric test channel with flip probability q.
  static Encoder bsc(double q) {
    if (q < 0.0 || q > 1.0) throw OutOfRange("bsc: flip probability outside [0, 1]");
    Mat m(2, 2);
    m << 1.0 - q, q, q, 1.0 - q;
    return Encoder(std::move(m));
  }

  int x_card() const { return static_cast<int>(rows_.rows()); }
  int u_card() const { return static_cast<int>(rows_.cols()); }
  const Mat& rows() const { return rows_; }
  double operator()(int x, int u) const { return rows_(x, u); }

 private:
  explicit Encoder(Mat rows) : rows_(std::move(rows)) {}
  Mat rows_;
};

/// Distributions induced by an encoder under the Markov factorization
/// p(x, u, y) = p(x) p(y|x) p(u|x).
struct InducedDistributions {
  Vec p_u;
  Mat y_given_u;            // rows P(Y | U = u); zero rows flagged below
  Mat u_given_y;            // rows P(U | Y = y)
  std::vector<bool> u_defined;  // false where P(U = u) = 0
  Mat joint_ux;             // p(u, x), u_card x x_card
  Mat joint_uy;             // p(u, y), u_card x y_card
};

inline InducedDistributions induced_distributions(const JointPMF& j, const Encoder& e) {
  if (e.x_card() != j.x_card())
    throw CardinalityMismatch("induced_distributions: encoder rows do not match |X|");
  InducedDistributions out;
  const int xc = j.x_card(), yc = j.y_card(), uc = e.u_card();
  out.joint_ux.resize(uc, xc);
  for (int u = 0; u < uc; ++u)
    for (int x = 0; x < xc; ++x) out.joint_ux(u, x) = j.px()[x] * e(x, u);
  out.p_u = out.joint_ux.rowwise().sum();
  out.joint_uy = out.joint_ux * j.y_given_x();
  out.y_given_u.setZero(uc, yc);
  out.u_defined.assign(uc, true);
  for (int u = 0; u < uc; ++u) {
    if (out.p_u[u] > kSupportEps) {
      out.y_given_u.row(u) = out.joint_uy.row(u) / out.p_u[u];
    } else {
      out.u_defined[u] = false;
    }
  }
  out.u_given_y.resize(yc, uc);
  for (int y = 0; y < yc; ++y)
    for (int u = 0; u < uc; ++u) out.u_given_y(y, u) = out.joint_uy(u, y) / j.py()[y];
  return out;
}

/// Entropy of the full induced joint (X, U, Y), in nats.
inline double induced_joint_entropy(const JointPMF& j, const Encoder& e) {
  if (e.x_card() != j.x_card())
    throw CardinalityMismatch("induced_joint_entropy: encoder rows do not match |X|");
  double h = 0.0;
  for (int x = 0; x < j.x_card(); ++x)
    for (int u = 0; u < e.u_card(); ++u)
      for (int y = 0; y < j.y_card(); ++y) h -= plogp(j.pmf()(x, y) * e(x, u));
  return clamp_info(h);
}

}  // namespace ib
