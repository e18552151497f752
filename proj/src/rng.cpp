#include "relent/rng.hpp"

#include <cmath>
#include <numbers>

namespace relent {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t splitmix_finalize(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream) {
  key_ = splitmix_finalize(splitmix_finalize(seed + kGolden) ^
                           splitmix_finalize(stream + 0x5851F42D4C957F2DULL));
}

CounterRng CounterRng::substream(std::uint64_t seed, std::string_view label,
                                 std::uint64_t index) {
  return CounterRng(seed, splitmix_finalize(fnv1a(label)) + index);
}

CounterRng::result_type CounterRng::operator()() {
  return splitmix_finalize(key_ + (++counter_) * kGolden);
}

double CounterRng::uniform() {
  return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

double CounterRng::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform();
}

double CounterRng::gaussian() {
  if (has_cached_gaussian_) {
    has_cached_gaussian_ = false;
    return cached_gaussian_;
  }
  // u1 in (0, 1] so the log is finite.
  const double u1 =
      (static_cast<double>((*this)() >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  cached_gaussian_ = r * std::sin(theta);
  has_cached_gaussian_ = true;
  return r * std::cos(theta);
}

std::uint64_t CounterRng::uniform_int(std::uint64_t n) {
  // Rejection-free multiply-shift; bias is negligible for the small n used.
  return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)) % n;
}

}  // namespace relent
