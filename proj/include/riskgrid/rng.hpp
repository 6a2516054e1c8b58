#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace riskgrid {

/// SplitMix64 finalizer; used to decorrelate derived seeds.
std::uint64_t mix64(std::uint64_t x);

/// Child seed for a labelled stage ("synth", "efficiency", ...).
std::uint64_t derive_seed(std::uint64_t parent, std::string_view label);
/// Child seed for the n-th independent stream under a parent seed.
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t stream);

/// Portable random source. The engine sequence is fixed by the standard and
/// the distributions below are implemented here, so draws are identical on
/// every platform (std:: distributions are not).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform integer on [0, n); n must be positive.
  std::uint64_t bounded(std::uint64_t n);
  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace riskgrid
