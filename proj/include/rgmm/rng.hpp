#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Core>

namespace rgmm {

/// Seedable, splittable random source.
///
/// Engine: std::mt19937_64, whose output sequence is fixed by the C++
/// standard. Seeds and child streams are derived with the SplitMix64
/// finalizer, and normal variates come from a Box-Muller transform written
/// here rather than std::normal_distribution (whose algorithm is
/// implementation-defined). The same seed therefore produces the same
/// numbers on every conforming toolchain.
///
/// split(stream) returns an independent generator that depends only on the
/// parent seed and the stream id, never on how many numbers the parent has
/// drawn, so parallel consumers stay reproducible.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }
  Rng split(std::uint64_t stream) const;

  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  double normal();
  Eigen::MatrixXd gaussian(Eigen::Index rows, Eigen::Index cols);

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Combines two seeds into one (order-sensitive).
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

}  // namespace rgmm
