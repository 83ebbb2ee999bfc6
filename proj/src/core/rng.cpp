#include "core/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace smagda::rng {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;
constexpr std::uint64_t kKeySalt = 0xA0761D6478BD642Full;
constexpr std::uint64_t kPathSalt = 0xE7037ED1A0B428DBull;
constexpr std::uint64_t kTagSalt = 0x8EBC6AF09C88C6E3ull;
constexpr std::uint64_t kStepSalt = 0x589965CC75374CC3ull;

inline std::uint64_t absorb(std::uint64_t h, std::uint64_t v, std::uint64_t salt) {
  return mix64(h ^ mix64(v + salt));
}

}  // namespace

std::uint64_t mix64(std::uint64_t x) {
  x += kGolden;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

Stream::Stream(std::uint64_t base_seed, std::uint64_t path_index) {
  std::uint64_t h = mix64(base_seed ^ kKeySalt);
  key_ = absorb(h, path_index, kPathSalt);
}

std::uint64_t Stream::raw(Tag tag, std::uint64_t step, std::uint64_t counter) const {
  std::uint64_t h = key_;
  h = absorb(h, static_cast<std::uint64_t>(tag), kTagSalt);
  h = absorb(h, step, kStepSalt);
  return mix64(h ^ mix64(counter));
}

double Stream::uniform(Tag tag, std::uint64_t step, std::uint64_t counter) const {
  // (bits + 0.5) / 2^53: symmetric, never exactly 0 or 1.
  const std::uint64_t bits = raw(tag, step, counter) >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

void Stream::fill_gaussian(Tag tag, std::uint64_t step, std::span<double> out,
                           std::uint64_t counter_base) const {
  const std::size_t n = out.size();
  for (std::size_t i = 0; i < n; i += 2) {
    const double u1 = uniform(tag, step, counter_base + 2 * i);
    const double u2 = uniform(tag, step, counter_base + 2 * i + 1);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    out[i] = r * std::cos(a);
    if (i + 1 < n) out[i + 1] = r * std::sin(a);
  }
}

std::uint64_t Stream::uniform_int(Tag tag, std::uint64_t step, std::uint64_t counter,
                                  std::uint64_t bound) const {
  if (bound == 0) throw std::invalid_argument("uniform_int: bound must be positive");
  const unsigned __int128 m =
      static_cast<unsigned __int128>(raw(tag, step, counter)) * bound;
  return static_cast<std::uint64_t>(m >> 64);
}

std::vector<std::int32_t> Stream::sample_without_replacement(Tag tag, std::uint64_t step,
                                                             std::int64_t n,
                                                             std::int64_t k) const {
  if (k < 0 || n < 0 || k > n)
    throw std::invalid_argument("sample_without_replacement: need 0 <= k <= n");
  std::vector<std::int32_t> out;
  out.reserve(static_cast<std::size_t>(k));
  std::uint64_t counter = 0;
  // Floyd: marginally uniform over k-subsets; insertion keeps `out` sorted.
  for (std::int64_t j = n - k; j < n; ++j) {
    const auto t = static_cast<std::int32_t>(
        uniform_int(tag, step, counter++, static_cast<std::uint64_t>(j) + 1));
    auto it = std::lower_bound(out.begin(), out.end(), t);
    if (it != out.end() && *it == t) {
      const auto jj = static_cast<std::int32_t>(j);
      out.insert(std::lower_bound(out.begin(), out.end(), jj), jj);
    } else {
      out.insert(it, t);
    }
  }
  return out;
}

}  // namespace smagda::rng
