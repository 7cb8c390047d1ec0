#include "rcgan/rng.hpp"

#include <boost/math/special_functions/erf.hpp>
#include <cmath>
#include <numbers>

namespace rcgan {
namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t absorb(std::uint64_t h, std::uint64_t word) {
  return mix64(h ^ mix64(word + kGolden));
}

}  // namespace

CounterRng::CounterRng(const SeededStream& stream, std::uint64_t lane) {
  std::uint64_t h = mix64(stream.seed ^ 0x5253474E'4C414231ULL);
  h = absorb(h, stream.path.experiment);
  h = absorb(h, stream.path.context);
  h = absorb(h, stream.path.replicate);
  key_ = absorb(h, lane);
}

std::uint64_t CounterRng::next_u64() {
  ++counter_;
  return mix64(key_ + counter_ * kGolden);
}

double CounterRng::uniform() {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::gaussian() { return normal_quantile(uniform()); }

double normal_quantile(double u) {
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * u);
}

}  // namespace rcgan
