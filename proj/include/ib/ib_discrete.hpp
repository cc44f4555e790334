#pragma once

#include <cstdint>
#include <vector>

#include "ib/curve.hpp"
#include "ib/prob.hpp"
#include "ib/rng.hpp"

namespace ib {

/// Solver configuration. `gamma` multiplies the relevance force in the
/// exponent of the encoder update; values below one collapse the encoder,
/// large values drive it toward U = X. Use a large finite gamma instead of
/// infinity -- the exponent is computed in the log domain with per-row max
/// subtraction, so no overflow occurs either way.
struct IBSolveConfig {
  double gamma = 1.0;
  int u_card = 0;  // 0 means |X| + 1
  double tol = 1e-8;
  int max_iter = 10000;
  int n_restarts = 10;
  std::uint64_t rng_seed = 0;
};

struct IBSolution {
  Encoder encoder = Encoder::constant(1);
  double relevance_nats = 0.0;
  double complexity_nats = 0.0;
  double lagrangian = 0.0;  // relevance - complexity / gamma
  int iterations = 0;
  bool converged = false;
  int restart_index = 0;
};

namespace detail {

// Scale-free objective gamma * relevance - complexity. Monotone under the
// alternating update and defined at gamma = 0, unlike the reported
// Lagrangian whose multiplier is 1/gamma.
inline double ib_objective(const JointPMF& j, const Encoder& e, double gamma) {
  const auto ind = induced_distributions(j, e);
  return gamma * mutual_information_joint(ind.joint_uy) -
         mutual_information_joint(ind.joint_ux);
}

inline double eq3_lagrangian(double relevance, double complexity, double gamma) {
  if (gamma == 0.0) return -complexity;
  return relevance - complexity / gamma;
}

}  // namespace detail

/// One synchronous pass of the self-consistent encoder update: the marginal
/// and decoder are recomputed from `e`, then every row x is reweighted as
/// p(u) * exp(-gamma * KL(P(Y|x) || P(Y|u))) and renormalized. Symbols with
/// zero marginal keep probability zero.
inline Encoder ba_step(const JointPMF& j, const Encoder& e, double gamma) {
  if (e.x_card() != j.x_card())
    throw CardinalityMismatch("ba_step: encoder rows do not match |X|");
  const auto ind = induced_distributions(j, e);
  const int xc = j.x_card(), uc = e.u_card(), yc = j.y_card();

  Mat logit(xc, uc);
  for (int u = 0; u < uc; ++u) {
    if (!ind.u_defined[u]) {
      logit.col(u).setConstant(-kInfinity);
      continue;
    }
    const double log_pu = std::log(ind.p_u[u]);
    for (int x = 0; x < xc; ++x) {
      double kl = 0.0;
      for (int y = 0; y < yc; ++y) {
        const double pyx = j.y_given_x()(x, y);
        if (pyx <= kSupportEps) continue;
        const double pyu = ind.y_given_u(u, y);
        if (pyu <= kSupportEps) {
          kl = kInfinity;
          break;
        }
        kl += pyx * std::log(pyx / pyu);
      }
      logit(x, u) = std::isinf(kl) ? -kInfinity : log_pu - gamma * kl;
    }
  }

  Mat rows(xc, uc);
  for (int x = 0; x < xc; ++x) {
    const double m = logit.row(x).maxCoeff();
    double z = 0.0;
    for (int u = 0; u < uc; ++u) {
      rows(x, u) = std::isinf(logit(x, u)) ? 0.0 : std::exp(logit(x, u) - m);
      z += rows(x, u);
    }
    rows.row(x) /= z;
  }
  return Encoder::validate(rows);
}

namespace detail {

// Drops symbols with vanishing marginal and merges symbols whose decoder
// rows coincide; neither changes relevance and merging only lowers the rate.
inline Encoder prune_encoder(const JointPMF& j, const Encoder& e) {
  const auto ind = induced_distributions(j, e);
  const int uc = e.u_card();
  std::vector<int> rep(uc, -1);
  std::vector<int> keep;
  for (int u = 0; u < uc; ++u) {
    if (ind.p_u[u] <= 1e-12) continue;
    for (int k : keep) {
      if ((ind.y_given_u.row(u) - ind.y_given_u.row(k)).cwiseAbs().maxCoeff() < 1e-6) {
        rep[u] = k;
        break;
      }
    }
    if (rep[u] < 0) {
      rep[u] = u;
      keep.push_back(u);
    }
  }
  if (static_cast<int>(keep.size()) == uc) return e;
  Mat rows = Mat::Zero(e.x_card(), static_cast<int>(keep.size()));
  for (int u = 0; u < uc; ++u) {
    if (rep[u] < 0) continue;
    const int col = static_cast<int>(std::find(keep.begin(), keep.end(), rep[u]) - keep.begin());
    rows.col(col) += e.rows().col(u);
  }
  for (int x = 0; x < rows.rows(); ++x) rows.row(x) /= rows.row(x).sum();
  return Encoder::validate(rows);
}

inline Encoder random_encoder(int x_card, int u_card, CounterRng& rng) {
  Mat rows(x_card, u_card);
  for (int x = 0; x < x_card; ++x) rows.row(x) = rng.next_simplex(u_card).transpose();
  return Encoder::validate(rows);
}

struct RunResult {
  Encoder encoder;
  int iterations;
  bool converged;
};

inline RunResult run_from(const JointPMF& j, Encoder e, double gamma, double tol,
                          int max_iter) {
  int it = 0;
  bool converged = false;
  for (; it < max_iter; ++it) {
    Encoder next = ba_step(j, e, gamma);
    const double change = (next.rows() - e.rows()).cwiseAbs().maxCoeff();
    e = next;
    if (change < tol) {
      converged = true;
      ++it;
      break;
    }
  }
  return {std::move(e), it, converged};
}

inline IBSolution finish_solution(const JointPMF& j, const RunResult& run, double gamma,
                                  int restart_index) {
  IBSolution sol;
  sol.encoder = prune_encoder(j, run.encoder);
  const auto ind = induced_distributions(j, sol.encoder);
  sol.relevance_nats = mutual_information_joint(ind.joint_uy);
  sol.complexity_nats = mutual_information_joint(ind.joint_ux);
  sol.lagrangian = eq3_lagrangian(sol.relevance_nats, sol.complexity_nats, gamma);
  sol.iterations = run.iterations;
  sol.converged = run.converged;
  sol.restart_index = restart_index;
  return sol;
}

}  // namespace detail

/// Best-of-restarts alternating minimization. Each restart draws the
/// encoder rows uniformly on the simplex from its own counter stream, so a
/// fixed seed reproduces the full run. Restarts are ranked by the scale-free
/// objective; exact ties keep the lowest restart index. Non-convergence is
/// reported via the flag, never thrown.
inline IBSolution solve_ib(const JointPMF& j, const IBSolveConfig& cfg) {
  if (cfg.gamma < 0.0) throw OutOfRange("solve_ib: gamma must be non-negative");
  if (cfg.tol <= 0.0) throw OutOfRange("solve_ib: tol must be positive");
  const int uc = cfg.u_card > 0 ? cfg.u_card : j.x_card() + 1;

  IBSolution best;
  double best_obj = -kInfinity;
  bool all_converged = true;
  for (int r = 0; r < cfg.n_restarts; ++r) {
    CounterRng rng(cfg.rng_seed, static_cast<std::uint64_t>(r));
    auto run = detail::run_from(j, detail::random_encoder(j.x_card(), uc, rng), cfg.gamma,
                                cfg.tol, cfg.max_iter);
    all_converged = all_converged && run.converged;
    const double obj = detail::ib_objective(j, run.encoder, cfg.gamma);
    if (obj > best_obj + 1e-12) {
      best_obj = obj;
      best = detail::finish_solution(j, run, cfg.gamma, r);
    }
  }
  best.converged = all_converged;
  return best;
}

struct SweepOptions {
  bool warm_start = true;
};

struct SweepEntry {
  double gamma = 0.0;
  IBSolution solution;
  bool warm_started = false;
};

/// Sweeps the trade-off curve over a gamma grid. With warm starting on, each
/// gamma additionally tries the previous best encoder as an initial point;
/// the result is ordered by complexity.
inline std::vector<SweepEntry> sweep_curve(const JointPMF& j, const std::vector<double>& gammas,
                                           IBSolveConfig cfg, SweepOptions opts = {}) {
  if (gammas.empty()) throw OutOfRange("sweep_curve: empty gamma grid");
  std::vector<SweepEntry> out;
  out.reserve(gammas.size());
  std::optional<Encoder> prev;
  for (double g : gammas) {
    if (g < 0.0) throw OutOfRange("sweep_curve: gamma must be non-negative");
    cfg.gamma = g;
    IBSolution sol = solve_ib(j, cfg);
    bool warmed = false;
    if (opts.warm_start && prev && prev->u_card() >= 1) {
      // Re-embed the previous encoder in the full symbol budget.
      const int uc = cfg.u_card > 0 ? cfg.u_card : j.x_card() + 1;
      Mat rows = Mat::Zero(j.x_card(), std::max(uc, prev->u_card()));
      rows.topLeftCorner(prev->x_card(), prev->u_card()) = prev->rows();
      auto run = detail::run_from(j, Encoder::validate(rows), g, cfg.tol, cfg.max_iter);
      if (detail::ib_objective(j, run.encoder, g) >
          detail::ib_objective(j, sol.encoder, g) + 1e-12) {
        sol = detail::finish_solution(j, run, g, -1);
        warmed = true;
      }
    }
    prev = sol.encoder;
    out.push_back({g, std::move(sol), warmed});
  }
  std::sort(out.begin(), out.end(), [](const SweepEntry& a, const SweepEntry& b) {
    return a.solution.complexity_nats < b.solution.complexity_nats;
  });
  return out;
}

inline std::vector<CurvePoint> to_curve_points(const std::vector<SweepEntry>& entries) {
  std::vector<CurvePoint> pts;
  pts.reserve(entries.size());
  for (const auto& e : entries)
    pts.push_back({e.solution.complexity_nats, e.solution.relevance_nats, e.gamma,
                   e.solution.encoder});
  return pts;
}

}  // namespace ib
