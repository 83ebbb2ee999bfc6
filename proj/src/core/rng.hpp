#ifndef SMAGDA_CORE_RNG_HPP
#define SMAGDA_CORE_RNG_HPP

#include <cstdint>
#include <span>
#include <vector>

namespace smagda::rng {

// Sub-stream tags. Every consumer draws from its own tag so that, e.g., the
// x-noise and y-noise of one iteration are independent and insensitive to
// evaluation order.
enum class Tag : std::uint64_t {
  kNoiseX = 1,
  kNoiseY = 2,
  kBatchX = 3,
  kBatchY = 4,
  kInit = 5,
  kMatrix = 6,
  kSelect = 7,
  kSearch = 8,
  kTrial = 9,
};

// SplitMix64 finalizer. Invertible, strong avalanche.
std::uint64_t mix64(std::uint64_t x);

// Counter-based stream keyed by (base_seed, path_index). Each output is a
// pure function of (key, tag, step, counter); there is no mutable state, so
// identical keys reproduce identical draws regardless of call order.
//
// Gaussians use Box-Muller on pairs of 53-bit uniforms (fixed choice, so
// trajectories reproduce across builds of this library).
class Stream {
 public:
  Stream(std::uint64_t base_seed, std::uint64_t path_index = 0);

  std::uint64_t raw(Tag tag, std::uint64_t step, std::uint64_t counter) const;

  // Uniform on the open interval (0, 1).
  double uniform(Tag tag, std::uint64_t step, std::uint64_t counter) const;

  // Standard normals; component i consumes counters (base+2i, base+2i+1).
  void fill_gaussian(Tag tag, std::uint64_t step, std::span<double> out,
                     std::uint64_t counter_base = 0) const;

  // Uniform integer in [0, bound) via the fixed-point multiply reduction.
  // Bias is bound/2^64, negligible for the sizes used here.
  std::uint64_t uniform_int(Tag tag, std::uint64_t step, std::uint64_t counter,
                            std::uint64_t bound) const;

  // k distinct indices out of [0, n), returned ascending (Floyd's algorithm).
  std::vector<std::int32_t> sample_without_replacement(Tag tag, std::uint64_t step,
                                                       std::int64_t n, std::int64_t k) const;

  std::uint64_t key() const { return key_; }

 private:
  std::uint64_t key_;
};

}  // namespace smagda::rng

#endif  // SMAGDA_CORE_RNG_HPP
