#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "faultsort/math_util.hpp"

namespace faultsort {

inline constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;

// SplitMix64 finalizer. Bijective on 64-bit words with full avalanche.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}

// Counter-based splittable generator: output i is mix64(key + i*gamma).
// Streams derived via split() are keyed independently, so trial workers can
// own disjoint deterministic streams derived from one master seed.
class SplitRng {
 public:
  explicit SplitRng(std::uint64_t seed) : key_(mix64(seed ^ kGoldenGamma)) {}

  std::uint64_t next_u64() {
    counter_ += kGoldenGamma;
    return mix64(key_ + counter_);
  }

  // Uniform double in [0, 1).
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Independent stream identified by tag; deterministic in (seed, tag).
  SplitRng split(std::uint64_t tag) const {
    SplitRng r(0);
    r.key_ = mix64(key_ ^ mix64(tag + kGoldenGamma));
    r.counter_ = 0;
    return r;
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// Uniform integer in [0, bound) by masked rejection.
inline std::uint64_t sample_uniform_int(SplitRng& rng, std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("sample_uniform_int: bound must be >= 1");
  if (bound == 1) return 0;
  const int width = ceil_log2(bound);
  const std::uint64_t mask = (width >= 64) ? ~0ULL : ((1ULL << width) - 1);
  for (;;) {
    const std::uint64_t v = rng.next_u64() & mask;
    if (v < bound) return v;
  }
}

class BitBudgetExhausted : public std::runtime_error {
 public:
  BitBudgetExhausted() : std::runtime_error("bit source exhausted") {}
};

// Single-consumer stream of random bits with exact consumption accounting.
class BitSource {
 public:
  virtual ~BitSource() = default;
  virtual bool next_bit() = 0;
  std::uint64_t bits_consumed() const { return consumed_; }

 protected:
  std::uint64_t consumed_ = 0;
};

// Unbounded bits drawn from a SplitRng stream.
class RngBitSource final : public BitSource {
 public:
  explicit RngBitSource(SplitRng rng) : rng_(rng) {}

  bool next_bit() override {
    if (avail_ == 0) {
      buf_ = rng_.next_u64();
      avail_ = 64;
    }
    const bool b = buf_ & 1u;
    buf_ >>= 1;
    --avail_;
    ++consumed_;
    return b;
  }

 private:
  SplitRng rng_;
  std::uint64_t buf_ = 0;
  int avail_ = 0;
};

// Bits served from a fixed pre-harvested pool; throws once drained.
class PoolBitSource final : public BitSource {
 public:
  PoolBitSource(const std::vector<std::uint64_t>& words, std::uint64_t bit_count)
      : words_(&words), bit_count_(bit_count) {}

  bool next_bit() override {
    if (pos_ >= bit_count_) throw BitBudgetExhausted();
    const std::uint64_t word = (*words_)[pos_ >> 6];
    const bool b = (word >> (pos_ & 63u)) & 1u;
    ++pos_;
    ++consumed_;
    return b;
  }

  std::uint64_t bits_remaining() const { return bit_count_ - pos_; }

 private:
  const std::vector<std::uint64_t>* words_;
  std::uint64_t bit_count_;
  std::uint64_t pos_ = 0;
};

struct UniformDraw {
  std::uint64_t value = 0;
  std::uint64_t bits_used = 0;
};

// Rejection-sampled uniform integer in [0, bound) from raw bits: draw
// ceil(log2(bound)) bits, accept if below bound, retry otherwise.
// bound == 1 consumes no bits.
inline UniformDraw sample_uniform_int(BitSource& bits, std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("sample_uniform_int: bound must be >= 1");
  UniformDraw draw;
  if (bound == 1) return draw;
  const int width = ceil_log2(bound);
  for (;;) {
    std::uint64_t v = 0;
    for (int i = 0; i < width; ++i) v = (v << 1) | static_cast<std::uint64_t>(bits.next_bit());
    draw.bits_used += static_cast<std::uint64_t>(width);
    if (v < bound) {
      draw.value = v;
      return draw;
    }
  }
}

}  // namespace faultsort
