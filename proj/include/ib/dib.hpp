#pragma once

#include <cstdint>
#include <vector>

#include "ib/prob.hpp"
#include "ib/rng.hpp"

namespace ib {

namespace detail {

// Mixed-radix flattening of K-tuples, first digit slowest.
class ProfileIndex {
 public:
  explicit ProfileIndex(std::vector<int> cards) : cards_(std::move(cards)) {
    strides_.assign(cards_.size(), 1);
    size_ = 1;
    for (int k = static_cast<int>(cards_.size()) - 1; k >= 0; --k) {
      strides_[k] = size_;
      size_ *= cards_[k];
    }
  }

  int size() const { return size_; }
  int stride(int k) const { return strides_[k]; }
  int card(int k) const { return cards_[k]; }
  int digits() const { return static_cast<int>(cards_.size()); }

  int digit(int flat, int k) const { return (flat / strides_[k]) % cards_[k]; }

 private:
  std::vector<int> cards_;
  std::vector<int> strides_;
  int size_ = 1;
};

}  // namespace detail

/// Joint law of (Y, X_1, ..., X_K) in which the observations are
/// conditionally independent given the target: a prior on Y plus one
/// conditional table per encoder.
class DistributedJoint {
 public:
  static DistributedJoint validate(const Vec& p_y, std::vector<Mat> conditionals) {
    if (p_y.size() == 0 || conditionals.empty())
      throw EmptyAlphabet("distributed joint: empty target alphabet or no encoders");
    if (p_y.minCoeff() < 0.0) throw NegativeEntry("distributed joint: negative prior entry");
    if (std::abs(p_y.sum() - 1.0) > 1e-9)
      throw NotNormalized("distributed joint: prior does not sum to one");
    for (size_t k = 0; k < conditionals.size(); ++k) {
      const Mat& c = conditionals[k];
      if (c.rows() != p_y.size())
        throw CardinalityMismatch("distributed joint: conditional " + std::to_string(k) +
                                  " does not match |Y|");
      for (int y = 0; y < c.rows(); ++y) {
        if (c.row(y).minCoeff() < 0.0)
          throw NegativeEntry("distributed joint: negative entry in conditional " +
                              std::to_string(k));
        if (std::abs(c.row(y).sum() - 1.0) > 1e-9)
          throw NotNormalized("distributed joint: conditional " + std::to_string(k) + " row " +
                              std::to_string(y));
      }
    }
    DistributedJoint dj;
    dj.p_y_ = p_y / p_y.sum();
    dj.x_given_y_ = std::move(conditionals);
    return dj;
  }

  /// K symmetric binary views of a uniform bit: X_k = Y xor Bern(p).
  static DistributedJoint symmetric_binary(double p, int k_encoders) {
    Vec py(2);
    py << 0.5, 0.5;
    Mat c(2, 2);
    c << 1.0 - p, p, p, 1.0 - p;
    return validate(py, std::vector<Mat>(k_encoders, c));
  }

  int n_encoders() const { return static_cast<int>(x_given_y_.size()); }
  int y_card() const { return static_cast<int>(p_y_.size()); }
  int x_card(int k) const { return static_cast<int>(x_given_y_[k].cols()); }
  const Vec& p_y() const { return p_y_; }
  const Mat& x_given_y(int k) const { return x_given_y_[k]; }

  Vec p_x(int k) const { return x_given_y_[k].transpose() * p_y_; }

  /// Pairwise joint of (X_k, Y).
  JointPMF pair_joint(int k) const {
    Mat m(x_card(k), y_card());
    for (int x = 0; x < x_card(k); ++x)
      for (int y = 0; y < y_card(); ++y) m(x, y) = p_y_[y] * x_given_y_[k](y, x);
    return JointPMF::validate(m, true);
  }

 private:
  Vec p_y_;
  std::vector<Mat> x_given_y_;
};

using EncoderBank = std::vector<Encoder>;

namespace detail {

inline void check_bank(const DistributedJoint& dj, const EncoderBank& eb) {
  if (static_cast<int>(eb.size()) != dj.n_encoders())
    throw CardinalityMismatch("encoder bank: wrong number of encoders");
  for (int k = 0; k < dj.n_encoders(); ++k)
    if (eb[k].x_card() != dj.x_card(k))
      throw CardinalityMismatch("encoder bank: encoder " + std::to_string(k) +
                                " does not match |X_k|");
}

constexpr long long kJointCellCap = 10'000'000;

// p(u_k | y) for every k: the y-conditioned latent channels.
inline std::vector<Mat> latent_given_y(const DistributedJoint& dj, const EncoderBank& eb) {
  std::vector<Mat> out;
  out.reserve(eb.size());
  for (int k = 0; k < dj.n_encoders(); ++k) out.push_back(dj.x_given_y(k) * eb[k].rows());
  return out;
}

// Joint table p(y, u_subset) over the flattened profile of the given
// encoder subset (ascending k order). Columns are profiles.
inline Mat joint_y_profiles(const DistributedJoint& dj, const std::vector<Mat>& uy,
                            const std::vector<int>& subset) {
  std::vector<int> cards;
  cards.reserve(subset.size());
  for (int k : subset) cards.push_back(static_cast<int>(uy[k].cols()));
  ProfileIndex idx(cards);
  if (static_cast<long long>(idx.size()) * dj.y_card() > kJointCellCap)
    throw EnumerationTooLarge("distributed joint: latent profile table exceeds the cell cap");
  Mat out(dj.y_card(), idx.size());
  for (int y = 0; y < dj.y_card(); ++y) {
    for (int t = 0; t < idx.size(); ++t) {
      double v = dj.p_y()[y];
      for (size_t d = 0; d < subset.size(); ++d)
        v *= uy[subset[d]](y, idx.digit(t, static_cast<int>(d)));
      out(y, t) = v;
    }
  }
  return out;
}

inline std::vector<int> all_indices(int k) {
  std::vector<int> v(k);
  for (int i = 0; i < k; ++i) v[i] = i;
  return v;
}

// I(X_k; U_k | Y) = sum_y p(y) I(X_k; U_k | Y=y) under the Markov chain.
inline double conditional_rate_term(const DistributedJoint& dj, const EncoderBank& eb, int k) {
  double acc = 0.0;
  for (int y = 0; y < dj.y_card(); ++y) {
    Mat joint(dj.x_card(k), eb[k].u_card());
    for (int x = 0; x < dj.x_card(k); ++x)
      joint.row(x) = dj.x_given_y(k)(y, x) * eb[k].rows().row(x);
    acc += dj.p_y()[y] * mutual_information_joint(joint);
  }
  return acc;
}

}  // namespace detail

struct SubsetBound {
  std::uint32_t subset_mask = 0;  // bit k set when encoder k is in S
  double bound_nats = 0.0;
  double slack_nats = 0.0;  // bound - delta
};

struct RegionReport {
  bool feasible = false;
  double min_bound_nats = 0.0;
  std::vector<SubsetBound> bounds;
};

/// Evaluates every subset inequality of the relevance region at the given
/// encoders, rates and candidate relevance; exact on the induced joint.
inline RegionReport dib_region_check(const DistributedJoint& dj, const EncoderBank& eb,
                                     double delta, const Vec& rates) {
  detail::check_bank(dj, eb);
  const int k_enc = dj.n_encoders();
  if (k_enc > 10) throw EnumerationTooLarge("dib_region_check: more than 10 encoders");
  if (rates.size() != k_enc) throw CardinalityMismatch("dib_region_check: rate vector length");
  if (delta < 0.0) throw OutOfRange("dib_region_check: delta must be non-negative");

  const auto uy = detail::latent_given_y(dj, eb);
  std::vector<double> cond_rate(k_enc);
  for (int k = 0; k < k_enc; ++k) cond_rate[k] = detail::conditional_rate_term(dj, eb, k);

  RegionReport rep;
  rep.min_bound_nats = kInfinity;
  for (std::uint32_t mask = 0; mask < (1u << k_enc); ++mask) {
    double bound = 0.0;
    std::vector<int> complement;
    for (int k = 0; k < k_enc; ++k) {
      if (mask & (1u << k))
        bound += rates[k] - cond_rate[k];
      else
        complement.push_back(k);
    }
    bound += mutual_information_joint(detail::joint_y_profiles(dj, uy, complement));
    rep.bounds.push_back({mask, bound, bound - delta});
    rep.min_bound_nats = std::min(rep.min_bound_nats, bound);
  }
  rep.feasible = rep.min_bound_nats >= delta - 1e-12;
  return rep;
}

/// Sum-rate trade-off objective
/// -H(Y | U_1..U_K) - s * sum_k [ H(Y | U_k) + I(X_k; U_k) ].
inline double dib_lagrangian(const DistributedJoint& dj, const EncoderBank& eb, double s) {
  detail::check_bank(dj, eb);
  const auto uy = detail::latent_given_y(dj, eb);
  const Mat joint_all =
      detail::joint_y_profiles(dj, uy, detail::all_indices(dj.n_encoders()));
  double value = -(entropy(joint_all) - entropy(Vec(joint_all.colwise().sum())));
  for (int k = 0; k < dj.n_encoders(); ++k) {
    const Mat jk = detail::joint_y_profiles(dj, uy, {k});
    const double h_y_uk = entropy(jk) - entropy(Vec(jk.colwise().sum()));
    Mat joint_xu(dj.x_card(k), eb[k].u_card());
    const Vec px = dj.p_x(k);
    for (int x = 0; x < dj.x_card(k); ++x) joint_xu.row(x) = px[x] * eb[k].rows().row(x);
    value -= s * (h_y_uk + mutual_information_joint(joint_xu));
  }
  return value;
}

/// Decoders and priors entering the variational bound: a joint decoder over
/// full latent profiles plus per-encoder decoders and priors.
struct DibComponents {
  Mat joint_decoder;               // profiles x y_card rows Q(Y | u_1..u_K)
  std::vector<Mat> marg_decoders;  // per k: u_k x y_card
  std::vector<Vec> priors;         // per k: over u_k
};

/// The unique maximizing components: every decoder and prior is the one the
/// encoders induce. Unused profiles fall back to the target marginal.
inline DibComponents induced_dib_components(const DistributedJoint& dj, const EncoderBank& eb) {
  detail::check_bank(dj, eb);
  const auto uy = detail::latent_given_y(dj, eb);
  const Mat joint_all =
      detail::joint_y_profiles(dj, uy, detail::all_indices(dj.n_encoders()));
  DibComponents out;
  out.joint_decoder.resize(joint_all.cols(), joint_all.rows());
  for (int t = 0; t < joint_all.cols(); ++t) {
    const double pt = joint_all.col(t).sum();
    if (pt > kSupportEps)
      out.joint_decoder.row(t) = joint_all.col(t).transpose() / pt;
    else
      out.joint_decoder.row(t) = dj.p_y().transpose();
  }
  for (int k = 0; k < dj.n_encoders(); ++k) {
    const Mat jk = detail::joint_y_profiles(dj, uy, {k});
    Mat dec(jk.cols(), jk.rows());
    Vec prior = jk.colwise().sum();
    for (int u = 0; u < jk.cols(); ++u) {
      if (prior[u] > kSupportEps)
        dec.row(u) = jk.col(u).transpose() / prior[u];
      else
        dec.row(u) = dj.p_y().transpose();
    }
    out.marg_decoders.push_back(std::move(dec));
    out.priors.push_back(std::move(prior));
  }
  return out;
}

/// Variational sum-rate objective
/// E[log Q(Y|U_K)] + s * sum_k ( E[log Q(Y|U_k)] - E_X[KL(P(U_k|X_k) || Q(U_k))] ).
/// Equals dib_lagrangian when the components are the induced ones and is
/// strictly smaller otherwise.
inline double eval_vdib_bound(const DistributedJoint& dj, const EncoderBank& eb,
                              const DibComponents& q, double s) {
  detail::check_bank(dj, eb);
  const int k_enc = dj.n_encoders();
  const auto uy = detail::latent_given_y(dj, eb);
  const Mat joint_all = detail::joint_y_profiles(dj, uy, detail::all_indices(k_enc));
  if (q.joint_decoder.rows() != joint_all.cols() || q.joint_decoder.cols() != dj.y_card() ||
      static_cast<int>(q.marg_decoders.size()) != k_enc ||
      static_cast<int>(q.priors.size()) != k_enc)
    throw CardinalityMismatch("eval_vdib_bound: component shapes disagree");

  double value = 0.0;
  for (int t = 0; t < joint_all.cols(); ++t)
    for (int y = 0; y < dj.y_card(); ++y) {
      const double w = joint_all(y, t);
      if (w <= kSupportEps) continue;
      if (q.joint_decoder(t, y) <= kSupportEps) return -kInfinity;
      value += w * std::log(q.joint_decoder(t, y));
    }
  for (int k = 0; k < k_enc; ++k) {
    if (q.marg_decoders[k].rows() != eb[k].u_card() || q.priors[k].size() != eb[k].u_card())
      throw CardinalityMismatch("eval_vdib_bound: component " + std::to_string(k) + " shape");
    const Mat jk = detail::joint_y_profiles(dj, uy, {k});
    for (int u = 0; u < jk.cols(); ++u)
      for (int y = 0; y < dj.y_card(); ++y) {
        const double w = jk(y, u);
        if (w <= kSupportEps) continue;
        if (q.marg_decoders[k](u, y) <= kSupportEps) return -kInfinity;
        value += s * w * std::log(q.marg_decoders[k](u, y));
      }
    const Vec px = dj.p_x(k);
    for (int x = 0; x < dj.x_card(k); ++x) {
      const auto kl = kl_divergence(eb[k].rows().row(x).transpose(), q.priors[k]);
      if (kl.is_infinite())
        throw InfiniteBound("eval_vdib_bound: encoder " + std::to_string(k) +
                            " escapes its prior support");
      value -= s * px[x] * kl.nats;
    }
  }
  return value;
}

/// The divergence gap of the variational bound at the given components:
/// KL(P(Y|U_K) || Q(Y|U_K)) averaged over profiles, plus s times the
/// per-encoder decoder and prior gaps.
inline double vdib_gap_terms(const DistributedJoint& dj, const EncoderBank& eb,
                             const DibComponents& q, double s) {
  const auto uy = detail::latent_given_y(dj, eb);
  const Mat joint_all = detail::joint_y_profiles(dj, uy, detail::all_indices(dj.n_encoders()));
  double gap = 0.0;
  for (int t = 0; t < joint_all.cols(); ++t) {
    const double pt = joint_all.col(t).sum();
    if (pt <= kSupportEps) continue;
    gap += pt * kl_divergence(Vec(joint_all.col(t) / pt), q.joint_decoder.row(t).transpose()).nats;
  }
  for (int k = 0; k < dj.n_encoders(); ++k) {
    const Mat jk = detail::joint_y_profiles(dj, uy, {k});
    const Vec pu = jk.colwise().sum();
    for (int u = 0; u < jk.cols(); ++u) {
      if (pu[u] <= kSupportEps) continue;
      gap += s * pu[u] *
             kl_divergence(Vec(jk.col(u) / pu[u]), q.marg_decoders[k].row(u).transpose()).nats;
    }
    gap += s * kl_divergence(pu, q.priors[k]).nats;
  }
  return gap;
}

struct DibSolveConfig {
  std::vector<int> u_cards;  // empty means |X_k| + 1 per encoder
  double tol = 1e-8;
  int max_iter = 3000;
  int n_restarts = 10;
  std::uint64_t rng_seed = 0;
};

struct DibSolution {
  EncoderBank bank;
  double delta_nats = 0.0;     // relevance of the boundary point
  double sum_rate_nats = 0.0;  // its sum complexity
  double lagrangian = 0.0;
  int iterations = 0;
  bool converged = false;
  int restart_index = 0;
};

namespace detail {

// One pass of the self-consistent encoder update for encoder k with the
// others fixed; decoders/priors are the induced optima. For s > 0 the row
// weight is q(u_k) * exp(-psi) with
//   psi = KL(P(Y|x_k) || Q(Y|u_k))
//       + (1/s) E_{U_rest|x_k} KL(P(Y|U_rest, x_k) || Q(Y|U_rest, u_k)).
// At s = 0 only the joint-decoder term matters and the maximizing row is the
// deterministic argmax of the expected joint log-score.
inline Mat update_encoder_rows(const DistributedJoint& dj, const EncoderBank& eb, int k,
                               double s) {
  const int k_enc = dj.n_encoders();
  const int xc = dj.x_card(k), ucard = eb[k].u_card(), yc = dj.y_card();
  const auto uy = latent_given_y(dj, eb);
  const auto comps = induced_dib_components(dj, eb);

  std::vector<int> cards;
  for (int j = 0; j < k_enc; ++j) cards.push_back(eb[j].u_card());
  ProfileIndex full(cards);
  std::vector<int> rest;
  for (int j = 0; j < k_enc; ++j)
    if (j != k) rest.push_back(j);
  std::vector<int> rest_cards;
  for (int j : rest) rest_cards.push_back(eb[j].u_card());
  ProfileIndex rest_idx(rest_cards);

  // p(y | x_k) by Bayes on the pair marginal.
  Mat y_given_xk(xc, yc);
  {
    const Vec px = dj.p_x(k);
    for (int x = 0; x < xc; ++x)
      for (int y = 0; y < yc; ++y)
        y_given_xk(x, y) = dj.p_y()[y] * dj.x_given_y(k)(y, x) / px[x];
  }

  Mat score(xc, ucard);  // s>0: -psi up to a per-row constant; s=0: log-score
  score.setConstant(-kInfinity);
  Vec cond(yc);
  for (int x = 0; x < xc; ++x) {
    for (int u = 0; u < ucard; ++u) {
      const double prior = comps.priors[k][u];
      if (s > 0.0 && prior <= kSupportEps) continue;  // unused symbol stays off
      double joint_term = 0.0;  // E_{U_rest|x} of the joint-decoder cross term
      bool infinite = false;
      for (int t = 0; t < rest_idx.size() && !infinite; ++t) {
        double mass = 0.0;
        for (int y = 0; y < yc; ++y) {
          double v = y_given_xk(x, y);
          for (int d = 0; d < rest_idx.digits(); ++d) v *= uy[rest[d]](y, rest_idx.digit(t, d));
          cond[y] = v;
          mass += v;
        }
        if (mass <= kSupportEps) continue;
        int flat = u * full.stride(k);
        for (int d = 0; d < rest_idx.digits(); ++d)
          flat += rest_idx.digit(t, d) * full.stride(rest[d]);
        for (int y = 0; y < yc; ++y) {
          if (cond[y] <= kSupportEps) continue;
          const double qv = comps.joint_decoder(flat, y);
          if (qv <= kSupportEps) {
            infinite = true;
            break;
          }
          joint_term += cond[y] * std::log(qv);
        }
      }
      if (infinite) continue;
      if (s == 0.0) {
        score(x, u) = joint_term;
        continue;
      }
      double marg_term = 0.0;  // E_y[log Q(y|u_k)] under p(y|x_k)
      bool marg_inf = false;
      for (int y = 0; y < yc; ++y) {
        const double w = y_given_xk(x, y);
        if (w <= kSupportEps) continue;
        const double qv = comps.marg_decoders[k](u, y);
        if (qv <= kSupportEps) {
          marg_inf = true;
          break;
        }
        marg_term += w * std::log(qv);
      }
      if (marg_inf) continue;
      score(x, u) = std::log(prior) + marg_term + joint_term / s;
    }
  }

  Mat rows(xc, ucard);
  for (int x = 0; x < xc; ++x) {
    const double m = score.row(x).maxCoeff();
    if (std::isinf(m)) throw Error("dib update: no admissible symbol for some x");
    if (s == 0.0) {
      rows.row(x).setZero();
      int arg = 0;
      score.row(x).maxCoeff(&arg);
      rows(x, arg) = 1.0;
      continue;
    }
    double z = 0.0;
    for (int u = 0; u < ucard; ++u) {
      rows(x, u) = std::isinf(score(x, u)) ? 0.0 : std::exp(score(x, u) - m);
      z += rows(x, u);
    }
    rows.row(x) /= z;
  }
  return rows;
}

}  // namespace detail

/// Alternating best-of-restarts maximization of the sum-rate objective.
/// Returns the boundary point (sum rate, relevance) the winning encoders
/// parameterize. Non-convergence is reported, never thrown.
inline DibSolution solve_dib_discrete(const DistributedJoint& dj, double s,
                                      const DibSolveConfig& cfg) {
  if (s < 0.0) throw OutOfRange("solve_dib_discrete: s must be non-negative");
  if (cfg.tol <= 0.0) throw OutOfRange("solve_dib_discrete: tol must be positive");
  const int k_enc = dj.n_encoders();
  std::vector<int> u_cards = cfg.u_cards;
  if (u_cards.empty())
    for (int k = 0; k < k_enc; ++k) u_cards.push_back(dj.x_card(k) + 1);
  if (static_cast<int>(u_cards.size()) != k_enc)
    throw CardinalityMismatch("solve_dib_discrete: one symbol budget per encoder required");

  DibSolution best;
  double best_obj = -kInfinity;
  bool all_converged = true;
  for (int r = 0; r < cfg.n_restarts; ++r) {
    CounterRng rng(cfg.rng_seed, static_cast<std::uint64_t>(r));
    EncoderBank bank;
    for (int k = 0; k < k_enc; ++k) {
      Mat rows(dj.x_card(k), u_cards[k]);
      for (int x = 0; x < rows.rows(); ++x) rows.row(x) = rng.next_simplex(u_cards[k]).transpose();
      bank.push_back(Encoder::validate(rows));
    }
    int it = 0;
    bool converged = false;
    for (; it < cfg.max_iter; ++it) {
      double change = 0.0;
      for (int k = 0; k < k_enc; ++k) {
        Mat rows = detail::update_encoder_rows(dj, bank, k, s);
        change = std::max(change, (rows - bank[k].rows()).cwiseAbs().maxCoeff());
        bank[k] = Encoder::validate(rows);
      }
      if (change < cfg.tol) {
        converged = true;
        ++it;
        break;
      }
    }
    all_converged = all_converged && converged;
    const double obj = dib_lagrangian(dj, bank, s);
    if (obj > best_obj + 1e-12) {
      best_obj = obj;
      best.bank = bank;
      best.iterations = it;
      best.restart_index = r;
      best.lagrangian = obj;
    }
  }
  best.converged = all_converged;

  // Boundary parametrization at the winning encoders:
  //   R_s = I(Y;U_all) + sum_k [ I(X_k;U_k) - I(Y;U_k) ]
  //   (1+s) Delta_s = (1+sK) H(Y) + s R_s + L_s.
  const auto uy = detail::latent_given_y(dj, best.bank);
  const Mat joint_all = detail::joint_y_profiles(dj, uy, detail::all_indices(k_enc));
  double r_s = mutual_information_joint(joint_all);
  for (int k = 0; k < k_enc; ++k) {
    const Mat jk = detail::joint_y_profiles(dj, uy, {k});
    Mat joint_xu(dj.x_card(k), best.bank[k].u_card());
    const Vec px = dj.p_x(k);
    for (int x = 0; x < dj.x_card(k); ++x)
      joint_xu.row(x) = px[x] * best.bank[k].rows().row(x);
    r_s += mutual_information_joint(joint_xu) - mutual_information_joint(jk);
  }
  best.sum_rate_nats = r_s;
  const double h_y = entropy(dj.p_y());
  best.delta_nats =
      ((1.0 + s * k_enc) * h_y + s * r_s + best.lagrangian) / (1.0 + s);
  return best;
}

}  // namespace ib
