#pragma once

#include <cstdint>

namespace rcgan {

struct StreamPath {
  std::uint64_t experiment = 0;
  std::uint64_t context = 0;
  std::uint64_t replicate = 0;

  friend bool operator==(const StreamPath&, const StreamPath&) = default;
};

/// Names one reproducible random stream. Identical (seed, path) pairs always
/// produce identical draws.
struct SeededStream {
  std::uint64_t seed = 0;
  StreamPath path;

  SeededStream with_context(std::uint64_t context) const {
    return {seed, {path.experiment, context, path.replicate}};
  }
  SeededStream with_replicate(std::uint64_t replicate) const {
    return {seed, {path.experiment, path.context, replicate}};
  }

  friend bool operator==(const SeededStream&, const SeededStream&) = default;
};

/// Counter-based generator: draw k of lane L is a pure function of
/// (seed, path, L, k), so any partition of lanes across workers reproduces
/// the same numbers. Output is SplitMix64's finalizer applied to a keyed
/// counter.
class CounterRng {
 public:
  CounterRng(const SeededStream& stream, std::uint64_t lane);

  std::uint64_t next_u64();
  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform();
  /// Standard normal by inverse CDF of uniform().
  double gaussian();

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Φ⁻¹(u) for u in (0, 1).
double normal_quantile(double u);

}  // namespace rcgan
