#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace cssdpp {

/// Reproducible identity of a random stream.
struct RngState {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  friend bool operator==(const RngState&, const RngState&) = default;
};

/// Seeded random source with portable draws.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard. The distributions are implemented here rather than taken from
/// <random> because the standard leaves their algorithms unspecified, and
/// results must be identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);
  explicit Rng(RngState state) : Rng(state.seed, state.stream) {}

  RngState state() const { return state_; }

  /// Independent child stream; depends only on (seed, stream, index).
  Rng substream(std::uint64_t index) const;

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi);
  double normal();
  double exponential();

  /// Inverse-CDF draw from nonnegative weights (not necessarily normalized).
  /// Returns the smallest index whose cumulative weight exceeds u * total.
  std::size_t categorical(std::span<const double> weights);

 private:
  RngState state_;
  std::mt19937_64 engine_;
};

}  // namespace cssdpp
