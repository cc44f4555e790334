#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include "ib/prob.hpp"

namespace ib {

/// One point on a relevance-complexity trade-off curve. Complexity is
/// I(U;X), relevance is I(U;Y); `parameter` is the trade-off value that
/// produced the point (gamma for single-encoder sweeps, s for distributed).
struct CurvePoint {
  double complexity_nats = 0.0;
  double relevance_nats = 0.0;
  double parameter = 0.0;
  std::optional<Encoder> encoder;
};

/// Pareto-maximal subset (maximal relevance, minimal complexity), sorted by
/// complexity. Equal points are deduplicated.
inline std::vector<CurvePoint> pareto_frontier(std::vector<CurvePoint> pts) {
  std::sort(pts.begin(), pts.end(), [](const CurvePoint& a, const CurvePoint& b) {
    if (a.complexity_nats != b.complexity_nats) return a.complexity_nats < b.complexity_nats;
    return a.relevance_nats > b.relevance_nats;
  });
  std::vector<CurvePoint> out;
  double best = -kInfinity;
  for (auto& p : pts) {
    if (p.relevance_nats > best) {
      best = p.relevance_nats;
      out.push_back(std::move(p));
    }
  }
  return out;
}

/// Upper concave envelope of a set of achievable (complexity, relevance)
/// points. Interpolation exploits concavity: the chord between hull vertices
/// is a lower bound and extended neighbor slopes give an upper bound, so a
/// query reports both the value and the residual interpolation uncertainty.
class ConcaveEnvelope {
 public:
  /// `ceiling` caps relevance (I(X;Y) for IB curves); pass +inf to disable.
  explicit ConcaveEnvelope(const std::vector<CurvePoint>& pts, double ceiling = kInfinity)
      : ceiling_(ceiling) {
    std::vector<std::pair<double, double>> cand;
    cand.reserve(pts.size() + 1);
    cand.emplace_back(0.0, 0.0);  // U independent of X is always achievable
    for (const auto& p : pts) cand.emplace_back(p.complexity_nats, p.relevance_nats);
    std::sort(cand.begin(), cand.end());
    // Upper hull scan over points sorted by complexity.
    for (const auto& c : cand) {
      while (!hull_.empty() && hull_.back().first >= c.first) {
        if (hull_.back().second >= c.second) goto skip;
        hull_.pop_back();
      }
      while (hull_.size() >= 2 && cross(hull_[hull_.size() - 2], hull_.back(), c) >= 0.0)
        hull_.pop_back();
      hull_.push_back(c);
    skip:;
    }
  }

  const std::vector<std::pair<double, double>>& vertices() const { return hull_; }

  /// Chord interpolation; a lower bound on the concave curve.
  double lower(double r) const {
    if (r <= hull_.front().first) return hull_.front().second;
    if (r >= hull_.back().first) return hull_.back().second;
    const auto [i, j] = bracket(r);
    const auto [r0, d0] = hull_[i];
    const auto [r1, d1] = hull_[j];
    return d0 + (d1 - d0) * (r - r0) / (r1 - r0);
  }

  /// Upper bound from the neighboring segment slopes, the global slope-one
  /// cap (relevance never exceeds complexity), and the ceiling.
  double upper(double r) const {
    double up = std::min(ceiling_, r);
    if (r >= hull_.back().first) {
      // Past the last vertex the curve can still rise at the last slope.
      if (hull_.size() >= 2) {
        const auto [r0, d0] = hull_[hull_.size() - 2];
        const auto [r1, d1] = hull_.back();
        up = std::min(up, d1 + (d1 - d0) / (r1 - r0) * (r - r1));
      }
      return std::max(up, hull_.back().second);
    }
    if (r <= hull_.front().first) return std::min(up, hull_.front().second);
    const auto [i, j] = bracket(r);
    if (i > 0) {
      const double s = slope(i - 1, i);
      up = std::min(up, hull_[i].second + s * (r - hull_[i].first));
    }
    if (j + 1 < hull_.size()) {
      const double s = slope(j, j + 1);
      up = std::min(up, hull_[j].second + s * (r - hull_[j].first));
    }
    return std::max(up, lower(r));
  }

 private:
  static double cross(const std::pair<double, double>& a, const std::pair<double, double>& b,
                      const std::pair<double, double>& c) {
    return (b.first - a.first) * (c.second - a.second) -
           (b.second - a.second) * (c.first - a.first);
  }

  std::pair<size_t, size_t> bracket(double r) const {
    size_t j = 1;
    while (j < hull_.size() - 1 && hull_[j].first < r) ++j;
    return {j - 1, j};
  }

  double slope(size_t i, size_t j) const {
    return (hull_[j].second - hull_[i].second) / (hull_[j].first - hull_[i].first);
  }

  std::vector<std::pair<double, double>> hull_;
  double ceiling_;
};

}  // namespace ib
