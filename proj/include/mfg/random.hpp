#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace mfg {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Deterministic random stream. The engine is the standard-pinned mt19937_64
// and all variate transforms are done here rather than with the
// implementation-defined std distributions, so a (seed, stream) pair yields
// the same sequence on every platform. Independent streams derived from the
// same seed stay reproducible under parallel use (one stream per worker).
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) {
    std::uint64_t s = seed;
    std::uint64_t mixed = splitmix64(s);
    s = mixed ^ (stream * 0xda942042e4dd58b5ull + 0x2545f4914f6cdd1dull);
    engine_.seed(splitmix64(s));
  }

  std::uint64_t bits() { return engine_(); }

  // Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  // Uniform integer in [0, n).
  Eigen::Index below(Eigen::Index n) {
    return static_cast<Eigen::Index>(engine_() % static_cast<std::uint64_t>(n));
  }

  // Draw an index from a probability vector. Never returns a zero-mass index.
  Eigen::Index categorical(const Eigen::Ref<const Eigen::VectorXd>& probs) {
    const double u = uniform();
    double acc = 0.0;
    for (Eigen::Index i = 0; i < probs.size(); ++i) {
      acc += probs[i];
      if (u < acc) return i;
    }
    for (Eigen::Index i = probs.size() - 1; i >= 0; --i) {
      if (probs[i] > 0.0) return i;
    }
    return 0;
  }

  template <class T>
  void shuffle(std::vector<T>& values) {
    for (Eigen::Index i = static_cast<Eigen::Index>(values.size()) - 1; i > 0; --i) {
      std::swap(values[i], values[below(i + 1)]);
    }
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace mfg
