#pragma once

#include <cstdint>
#include <string_view>

namespace relent {

// Counter-based generator: SplitMix64 finalizer applied to a keyed counter.
// Output depends only on (key, counter), so substreams derived from
// (seed, label, index) are reproducible regardless of draw order in other
// streams; parallel campaign cells cannot perturb each other's samples.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0);

  // Stream keyed by (seed, hash(label), index).
  static CounterRng substream(std::uint64_t seed, std::string_view label,
                              std::uint64_t index);

  result_type operator()();
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~std::uint64_t{0}; }

  double uniform();  // [0, 1)
  double uniform(double lo, double hi);
  double gaussian();  // standard normal (Box-Muller)
  std::uint64_t uniform_int(std::uint64_t n);  // [0, n), n > 0

 private:
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
  double cached_gaussian_ = 0.0;
  bool has_cached_gaussian_ = false;
};

}  // namespace relent
