#pragma once

#include <cmath>
#include <cstdint>

#include <Eigen/Core>

namespace ib {

// Counter-based generator: output k is mix64(key + k * GAMMA), the splitmix64
// sequence. Streams are derived from (seed, stream) so independent restarts
// and samples get non-overlapping sequences without shared state.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(mix64(mix64(seed + kGamma) ^ mix64(stream * kGamma + 1))) {}

  std::uint64_t next_u64() {
    counter_ += kGamma;
    return mix64(key_ + counter_);
  }

  /// Uniform draw on the open interval (0, 1).
  double next_unit() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller; draws two uniforms per pair.
  double next_normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = next_unit();
    const double u2 = next_unit();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  /// Standard Gumbel draw, g = -log(-log(u)).
  double next_gumbel() { return -std::log(-std::log(next_unit())); }

  /// Uniform draw on the probability simplex (symmetric Dirichlet with
  /// unit concentration), via normalized exponentials.
  Eigen::VectorXd next_simplex(int n) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = -std::log(next_unit());
    return v / v.sum();
  }

 private:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

  static std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace ib
