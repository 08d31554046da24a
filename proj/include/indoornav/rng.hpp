#pragma once

#include <cstdint>
#include <random>

namespace indoornav {

/// Seeded generator handle. All randomness in a simulation flows through one
/// of these so that (scenario, seed) fully determines a run.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  double normal(double sigma) {
    if (sigma <= 0.0) return 0.0;
    std::normal_distribution<double> dist(0.0, sigma);
    return dist(engine_);
  }

  /// Uniform in (0, upper].
  double uniform_positive(double upper) {
    std::uniform_real_distribution<double> dist(0.0, upper);
    return upper - dist(engine_);
  }

  std::mt19937_64& engine() { return engine_; }
  bool operator==(const Rng&) const = default;

 private:
  std::mt19937_64 engine_;
};

}  // namespace indoornav
