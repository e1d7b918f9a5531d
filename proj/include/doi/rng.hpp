#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <span>

namespace doi {

/// Counter-based seed derivation. Mixes a master seed with a stream path
/// (component id, replicate id, ...) through splitmix64 so that every
/// substream is fixed by its coordinates alone, independent of scheduling.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t component,
                          std::uint64_t index = 0);

/// Stable component ids for derive_seed. Changing a value changes results.
enum class Stream : std::uint64_t {
  kGraph = 1,
  kDataset = 2,
  kChain = 3,
  kTruth = 4,
  kAssignment = 5,
  kReplicate = 6,
};

inline std::uint64_t derive_seed(std::uint64_t master, Stream s, std::uint64_t index = 0) {
  return derive_seed(master, static_cast<std::uint64_t>(s), index);
}

/// Random source used throughout the library. Thin wrapper over mt19937_64
/// with the handful of distributions the sampler needs.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::mt19937_64& engine() { return engine_; }

  /// Uniform on the open interval (0, 1).
  double uniform();
  double normal() { return normal_(engine_); }
  double normal(double mean, double sd) { return mean + sd * normal(); }
  /// Gamma with shape/scale parameterization.
  double gamma(double shape, double scale);
  /// Inverse-Gamma with shape/scale: 1 / Gamma(shape, 1/scale).
  double inv_gamma(double shape, double scale);
  double beta(double a, double b);
  bool bernoulli(double p) { return uniform() < p; }
  std::size_t uniform_index(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
  }
  /// Draw an index with probability proportional to weights (nonnegative, not all zero).
  std::size_t categorical(std::span<const double> weights);
  /// Draw an index with probability proportional to exp(log_weights), using log-sum-exp.
  std::size_t categorical_log(std::span<const double> log_weights);

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace doi
