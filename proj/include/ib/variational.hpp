#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "ib/prob.hpp"
#include "ib/rng.hpp"

namespace ib {

/// Variational decoder Q(Y|U) and prior S(U) used to lower-bound the
/// trade-off objective.
struct VariationalComponents {
  Mat decoder;  // u_card x y_card, rows are distributions
  Vec prior;    // over u_card symbols

  static VariationalComponents validate(const Mat& decoder, const Vec& prior) {
    if (decoder.rows() == 0 || decoder.cols() == 0 || prior.size() != decoder.rows())
      throw CardinalityMismatch("variational components: decoder/prior sizes disagree");
    for (int u = 0; u < decoder.rows(); ++u) {
      if (decoder.row(u).minCoeff() < 0.0)
        throw NegativeEntry("variational components: negative decoder entry");
      if (std::abs(decoder.row(u).sum() - 1.0) > 1e-9)
        throw NotNormalized("variational components: decoder row " + std::to_string(u));
    }
    if (prior.minCoeff() < 0.0) throw NegativeEntry("variational components: negative prior entry");
    if (std::abs(prior.sum() - 1.0) > 1e-9)
      throw NotNormalized("variational components: prior does not sum to one");
    return {decoder, prior};
  }
};

/// The components that make the bound tight: the induced decoder and
/// marginal. Undefined decoder rows (unused symbols) fall back to the
/// target marginal; they carry no probability mass.
inline VariationalComponents optimal_components(const JointPMF& j, const Encoder& e) {
  auto ind = induced_distributions(j, e);
  for (int u = 0; u < e.u_card(); ++u)
    if (!ind.u_defined[u]) ind.y_given_u.row(u) = j.py().transpose();
  return {ind.y_given_u, ind.p_u};
}

/// Variational objective E[log Q(Y|U)] - beta * E_X[KL(P(U|X) || S(U))],
/// evaluated by exact summation. Throws when some encoder row puts mass
/// where the prior has none; returns -inf when the decoder misses support
/// that the induced joint reaches.
inline double eval_vib_bound(const JointPMF& j, const Encoder& e, const VariationalComponents& v,
                             double beta) {
  if (e.x_card() != j.x_card() || v.decoder.rows() != e.u_card() ||
      v.decoder.cols() != j.y_card())
    throw CardinalityMismatch("eval_vib_bound: dimensions disagree");
  if (beta < 0.0) throw OutOfRange("eval_vib_bound: beta must be non-negative");
  double decoder_term = 0.0;
  double kl_term = 0.0;
  for (int x = 0; x < j.x_card(); ++x) {
    const double px = j.px()[x];
    for (int u = 0; u < e.u_card(); ++u) {
      const double pux = e(x, u);
      if (pux <= kSupportEps) continue;
      if (v.prior[u] <= kSupportEps)
        throw InfiniteBound("eval_vib_bound: encoder mass escapes the prior support at u=" +
                            std::to_string(u));
      kl_term += px * pux * std::log(pux / v.prior[u]);
      for (int y = 0; y < j.y_card(); ++y) {
        const double w = px * j.y_given_x()(x, y) * pux;
        if (w <= kSupportEps) continue;
        if (v.decoder(u, y) <= kSupportEps) return -kInfinity;
        decoder_term += w * std::log(v.decoder(u, y));
      }
    }
  }
  return decoder_term - beta * kl_term;
}

/// Joint report of the exact objective, the variational bound, and the gap
/// split into its two divergence terms. The bound matches the objective
/// once the target entropy is added back to the decoder term, so
/// `vib_adjusted = vib_bound + H(Y)` and
/// `gap = ib_lagrangian - vib_adjusted = decoder_kl + beta * prior_kl`.
struct VibReport {
  double ib_lagrangian = 0.0;
  double vib_bound = 0.0;
  double vib_adjusted = 0.0;
  double gap = 0.0;
  double decoder_kl = 0.0;  // E_U[ KL(P(Y|U) || Q(Y|U)) ]
  double prior_kl = 0.0;    // KL(P(U) || S(U))
};

inline VibReport vib_report(const JointPMF& j, const Encoder& e, const VariationalComponents& v,
                            double beta) {
  VibReport rep;
  rep.vib_bound = eval_vib_bound(j, e, v, beta);
  rep.vib_adjusted = rep.vib_bound + j.entropy_y();
  const auto ind = induced_distributions(j, e);
  rep.ib_lagrangian = mutual_information_joint(ind.joint_uy) -
                      beta * mutual_information_joint(ind.joint_ux);
  rep.gap = rep.ib_lagrangian - rep.vib_adjusted;
  for (int u = 0; u < e.u_card(); ++u) {
    if (!ind.u_defined[u]) continue;
    const auto kl = kl_divergence(ind.y_given_u.row(u).transpose(), v.decoder.row(u).transpose());
    rep.decoder_kl += ind.p_u[u] * kl.nats;
  }
  rep.prior_kl = kl_divergence(ind.p_u, v.prior).nats;
  return rep;
}

/// Monte Carlo estimate of the variational objective from labelled samples:
/// for each (x_i, y_i), `m_draws` latent symbols are drawn from P(U|x_i) and
/// the decoder term is averaged; the per-sample KL against the prior is
/// evaluated in closed form. Deterministic for a fixed seed.
inline double empirical_vib(const std::vector<std::pair<int, int>>& samples, const Encoder& e,
                            const VariationalComponents& v, double beta, int m_draws,
                            std::uint64_t seed) {
  if (samples.empty()) throw EmptyDataset("empirical_vib: no samples");
  if (m_draws < 1) throw OutOfRange("empirical_vib: need at least one latent draw");
  if (v.decoder.rows() != e.u_card())
    throw CardinalityMismatch("empirical_vib: decoder does not match encoder symbols");
  double acc = 0.0;
  for (size_t i = 0; i < samples.size(); ++i) {
    const auto [x, y] = samples[i];
    if (x < 0 || x >= e.x_card() || y < 0 || y >= v.decoder.cols())
      throw IndexOutOfRange("empirical_vib: sample index outside alphabets");
    CounterRng rng(seed, static_cast<std::uint64_t>(i));
    double dec = 0.0;
    for (int m = 0; m < m_draws; ++m) {
      // Inverse-CDF draw from the encoder row.
      const double r = rng.next_unit();
      double cum = 0.0;
      int u = e.u_card() - 1;
      for (int c = 0; c < e.u_card(); ++c) {
        cum += e(x, c);
        if (r <= cum) {
          u = c;
          break;
        }
      }
      dec += v.decoder(u, y) <= kSupportEps ? -kInfinity : std::log(v.decoder(u, y));
    }
    const auto kl = kl_divergence(e.rows().row(x).transpose(), v.prior);
    acc += dec / m_draws - beta * kl.nats;
  }
  return acc / static_cast<double>(samples.size());
}

/// Location-scale reparameterization u = mu + scale * z for caller-supplied
/// standard normal noise.
inline Vec sample_gaussian_reparam(const Vec& mu, const Mat& scale, const Vec& z) {
  if (scale.rows() != mu.size() || scale.cols() != z.size())
    throw ShapeMismatch("sample_gaussian_reparam: shapes disagree");
  return mu + scale * z;
}

/// Parameters of a Concrete (Gumbel-Softmax) relaxation over D categories.
struct ConcreteParams {
  Vec pi;
  double lambda = 1.0;

  static ConcreteParams validate(Vec pi, double lambda) {
    if (lambda <= 0.0) throw NonPositiveTemperature("concrete: temperature must be positive");
    if (pi.size() == 0) throw EmptyAlphabet("concrete: empty category set");
    if (pi.minCoeff() < 0.0) throw NegativeEntry("concrete: negative class probability");
    if (std::abs(pi.sum() - 1.0) > 1e-9) throw NotNormalized("concrete: probabilities do not sum to one");
    // Floor before logs so one-hot parameter vectors stay finite.
    for (int i = 0; i < pi.size(); ++i) pi[i] = std::max(pi[i], 1e-12);
    return {std::move(pi), lambda};
  }
};

/// Softmax((log pi_d + g_d) / lambda) for caller-supplied standard Gumbel
/// noise, computed in the log domain with max subtraction.
inline Vec sample_gumbel_softmax(const ConcreteParams& c, const Vec& gumbels) {
  if (gumbels.size() != c.pi.size()) throw ShapeMismatch("sample_gumbel_softmax: noise length");
  if (c.lambda <= 0.0) throw NonPositiveTemperature("sample_gumbel_softmax: temperature");
  Vec logits(c.pi.size());
  for (int d = 0; d < c.pi.size(); ++d) logits[d] = (std::log(c.pi[d]) + gumbels[d]) / c.lambda;
  const double m = logits.maxCoeff();
  Vec out = (logits.array() - m).exp();
  return out / out.sum();
}

/// The least achievable expected log-loss when predicting Y from U is the
/// conditional entropy, attained by the posterior decoder. Returns both the
/// floor and the posterior decoder's achieved loss (equal by construction,
/// up to summation order).
struct LogLossFloor {
  double achieved_nats = 0.0;
  double floor_nats = 0.0;
};

/// Expected log-loss of an arbitrary decoder (rows P-hat(Y|U)) under a joint
/// table over (U, Y); infinite off support.
inline double expected_log_loss(const Mat& joint_uy, const Mat& decoder) {
  if (decoder.rows() != joint_uy.rows() || decoder.cols() != joint_uy.cols())
    throw CardinalityMismatch("expected_log_loss: decoder does not match joint");
  double acc = 0.0;
  for (int u = 0; u < joint_uy.rows(); ++u)
    for (int y = 0; y < joint_uy.cols(); ++y) {
      const double w = joint_uy(u, y);
      if (w <= kSupportEps) continue;
      if (decoder(u, y) <= kSupportEps) return kInfinity;
      acc -= w * std::log(decoder(u, y));
    }
  return acc;
}

inline LogLossFloor log_loss_floor_check(const Mat& joint_uy) {
  const Vec pu = joint_uy.rowwise().sum();
  Mat posterior = Mat::Zero(joint_uy.rows(), joint_uy.cols());
  for (int u = 0; u < joint_uy.rows(); ++u)
    if (pu[u] > kSupportEps) posterior.row(u) = joint_uy.row(u) / pu[u];
  LogLossFloor out;
  out.floor_nats = conditional_entropy_cols(joint_uy);
  out.achieved_nats = 0.0;
  for (int u = 0; u < joint_uy.rows(); ++u)
    for (int y = 0; y < joint_uy.cols(); ++y) {
      const double w = joint_uy(u, y);
      if (w > kSupportEps) out.achieved_nats -= w * std::log(posterior(u, y));
    }
  return out;
}

}  // namespace ib
