#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>

#include "rngscale/wideuint.hpp"

namespace rngscale {

enum class BackendKind { xorshift128, counter, bbs };

BackendKind parse_backend(std::string_view name);
std::string to_string(BackendKind k);

// Marsaglia's 128-bit xorshift (shift triple 11/8/19). The 64-bit seed is
// expanded to the four state words with splitmix64; a zero seed is remapped
// to kZeroSeedReplacement so the state can never be all-zero.
class XorshiftEngine {
 public:
  static constexpr uint64_t kZeroSeedReplacement = 0x9E3779B97F4A7C15ull;

  struct State {
    uint32_t x, y, z, w;
    friend bool operator==(const State&, const State&) = default;
  };

  explicit XorshiftEngine(uint64_t seed = 0);

  uint32_t next32() {
    uint32_t t = x_ ^ (x_ << 11);
    t ^= t >> 8;
    x_ = y_;
    y_ = z_;
    z_ = w_;
    w_ = (w_ ^ (w_ >> 19)) ^ t;
    return w_;
  }

  uint64_t next64() {
    uint64_t hi = next32();
    return (hi << 32) | next32();
  }

  State state() const { return {x_, y_, z_, w_}; }

 private:
  uint32_t x_, y_, z_, w_;
};

// Arithmetic-progression "generator"; useful to measure harness overhead
// and as a deterministic non-random negative control.
class CounterEngine {
 public:
  explicit CounterEngine(uint64_t seed = 0) : next_(seed) {}

  uint32_t next32() { return static_cast<uint32_t>(next_++); }

  uint64_t next64() {
    uint64_t hi = next32();
    return (hi << 32) | next32();
  }

 private:
  uint64_t next_;
};

// Blum-Blum-Shub over a product of two primes, both congruent 3 mod 4.
// Each step squares the residue mod M and extracts the low bits_per_step
// bits. Default modulus uses two fixed 130-bit primes; no cryptographic
// strength is claimed — this back-end exists as a slow-generator reference.
class BbsEngine {
 public:
  static constexpr unsigned kDefaultBitsPerStep = 8;

  explicit BbsEngine(uint64_t seed = 0);
  BbsEngine(const U512& p, const U512& q, const U512& x0,
            unsigned bits_per_step = kDefaultBitsPerStep);

  // residue <- residue^2 mod M; returns its low bits_per_step bits
  uint32_t step();

  uint32_t next32() { return static_cast<uint32_t>(gather(32)); }
  uint64_t next64() { return gather(64); }

  const U512& residue() const { return x_; }
  const U512& modulus() const { return m_; }
  unsigned bits_per_step() const { return bits_per_step_; }

 private:
  uint64_t gather(unsigned width);
  void validate(const U512& p, const U512& q) const;

  U512 m_;
  U512 x_;
  unsigned bits_per_step_;
};

// Uniform facade so scalers, ad hoc functions and benchmarks can switch
// back-ends by a runtime tag.
class Backend {
 public:
  Backend(BackendKind kind, uint64_t seed);

  uint32_t next32() {
    return std::visit([](auto& e) { return e.next32(); }, impl_);
  }
  uint64_t next64() {
    return std::visit([](auto& e) { return e.next64(); }, impl_);
  }

  BackendKind kind() const { return kind_; }

 private:
  BackendKind kind_;
  std::variant<XorshiftEngine, CounterEngine, BbsEngine> impl_;
};

}  // namespace rngscale
