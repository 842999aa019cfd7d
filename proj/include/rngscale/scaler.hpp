#pragma once

#include <bit>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

#include "rngscale/backend.hpp"
#include "rngscale/bit_source.hpp"
#include "rngscale/metrics.hpp"

namespace rngscale {

// The nine uniform-modulus generators.
enum class ScalerVariant {
  simple32,
  simple40,
  simple48,
  simple64,
  bbr,
  bbr_faster,
  bbr_cheating,
  simple_recycler,
  bbr_32,
};

ScalerVariant parse_variant(std::string_view name);
std::string to_string(ScalerVariant v);
bool is_recycling(ScalerVariant v);

enum class RefillPlan { bits2, mixed };

// Recycler state (m, r): r is uniform of modulus m at every quiescent point.
// capacity is the refill target N; refills stop as soon as m >= N, so with
// k-bit chunks the settled m lies in [N, 2^k * N). Keeping every intermediate
// in range therefore needs N <= 2^(width-2) for 2-bit chunks, which is where
// the 2^62 / 2^30 defaults come from.
template <class UInt>
struct RecyclerStateT {
  static constexpr UInt kMaxCapacity =
      UInt(1) << (std::numeric_limits<UInt>::digits - 2);

  UInt m = 1;
  UInt r = 0;
  UInt capacity = kMaxCapacity;

  RecyclerStateT() = default;
  explicit RecyclerStateT(UInt cap) : capacity(cap) {
    if (cap < 8 || cap > kMaxCapacity || !std::has_single_bit(cap))
      throw std::invalid_argument(
          "recycler capacity must be a power of two in [8, 2^(width-2)]");
  }
};

using RecyclerState = RecyclerStateT<uint64_t>;     // default N = 2^62
using RecyclerState32 = RecyclerStateT<uint32_t>;   // default N = 2^30

// Fill the state until m >= capacity. bits2 pops pairs of bits; mixed pops
// 16-bit words while m < N/2^16, then bytes while m < N/2^8, then pairs, so
// the shifted m never leaves the representable range.
template <class UInt, class Src>
void refill(RecyclerStateT<UInt>& st, Src& bits, RefillPlan plan,
            EfficiencyCounters* counters = nullptr) {
  const UInt cap = st.capacity;
  while (st.m < cap) {
    unsigned k = 2;
    if (plan == RefillPlan::mixed) {
      if (st.m < (cap >> 16))
        k = 16;
      else if (st.m < (cap >> 8))
        k = 8;
    }
    uint32_t chunk = bits.pop(k);
    st.r = static_cast<UInt>((st.r << k) | chunk);
    st.m = static_cast<UInt>(st.m << k);
    if (counters) counters->bits_consumed += k;
  }
  assert(st.r < st.m);
}

// Uniform draw of modulus n by bit recycling: refill, split m as n*q + rest;
// accept r < n*q and push the quotient back into the state, otherwise keep
// the remainder-range leftover and loop.
template <class UInt, class Src>
uint64_t recycle_draw(RecyclerStateT<UInt>& st, Src& bits, UInt n,
                      RefillPlan plan, EfficiencyCounters* counters = nullptr) {
  if (n < 1 || n >= st.capacity)
    throw std::invalid_argument("recycle_draw: modulus must be in [1, capacity)");
  for (int fails = 0; fails <= kRejectionLoopCap; ++fails) {
    refill(st, bits, plan, counters);
    UInt q = st.m / n;
    UInt nq = n * q;
    if (st.r < nq) {
      UInt d = st.r % n;
      st.r /= n;
      st.m = q;
      assert(st.m >= 1 && st.r < st.m);
      if (counters) {
        ++counters->draws;
        counters->add_entropy(std::log2(static_cast<double>(n)));
      }
      return d;
    }
    // failure: r is still uniform on the leftover range [0, m mod n)
    st.r -= nq;
    st.m -= nq;
    assert(st.m >= 1 && st.r < st.m);
    if (counters) ++counters->failures;
  }
  throw std::runtime_error("recycle_draw: rejection loop cap exceeded");
}

// The cheating flavour: no accept test, r mod n is always returned. When the
// exact method would have failed (probability < 2^-30 at N = 2^62, n < 2^32)
// the pushed-back quotient is clamped to q-1 to keep r < m; the event is
// tallied as a failure.
template <class UInt, class Src>
uint64_t recycle_draw_cheating(RecyclerStateT<UInt>& st, Src& bits, UInt n,
                               RefillPlan plan,
                               EfficiencyCounters* counters = nullptr) {
  if (n < 1 || n >= st.capacity)
    throw std::invalid_argument("recycle_draw: modulus must be in [1, capacity)");
  refill(st, bits, plan, counters);
  UInt q = st.m / n;
  UInt d = st.r % n;
  UInt quotient = st.r / n;
  if (quotient >= q) {
    quotient = q - 1;
    if (counters) ++counters->failures;
  }
  st.r = quotient;
  st.m = q;
  assert(st.m >= 1 && st.r < st.m);
  if (counters) {
    ++counters->draws;
    counters->add_entropy(std::log2(static_cast<double>(n)));
  }
  return d;
}

enum class SimpleWidth { b32, b40, b48, b64 };

// Rejection scaler over a fixed b-bit state: draw b bits, accept when
// r < n * floor(N/n). The 40/48-bit flavours splice one 32-bit word (low)
// with one byte/16-bit word (high) from the bit buffer.
uint64_t simple_draw(SimpleWidth width, Backend& backend, BitBuffer& bits,
                     uint64_t n, EfficiencyCounters* counters = nullptr);

// 32-bit-word rejection scaler whose state is reinitialized only when it has
// drained below max(n^2, 2^16); useful only for small n (enforced n < 2^16).
struct SimpleRecyclerState {
  uint64_t m = 0;  // 0 = not yet initialized; live values in (0, 2^32]
  uint32_t r = 0;
};

uint64_t simple_recycler_draw(SimpleRecyclerState& st, Backend& backend,
                              uint64_t n, EfficiencyCounters* counters = nullptr);

// 32-bit-state hybrid: bit recycling below n = 2^29, raw k-bit draws with a
// plain r < n rejection above (k = bit width of n-1).
template <class Src>
uint64_t bbr32_draw(RecyclerState32& st, Src& bits, uint64_t n,
                    EfficiencyCounters* counters = nullptr) {
  if (n < 1 || n > 0xFFFFFFFFull)
    throw std::invalid_argument("bbr_32: modulus must be in [1, 2^32)");
  if (n < (1ull << 29))
    return recycle_draw(st, bits, static_cast<uint32_t>(n), RefillPlan::bits2,
                        counters);
  unsigned k = std::bit_width(static_cast<uint32_t>(n - 1));
  for (int fails = 0; fails <= kRejectionLoopCap; ++fails) {
    uint32_t r = bits.pop(k);
    if (counters) counters->bits_consumed += k;
    if (r < n) {
      if (counters) {
        ++counters->draws;
        counters->add_entropy(std::log2(static_cast<double>(n)));
      }
      return r;
    }
    if (counters) ++counters->failures;
  }
  throw std::runtime_error("bbr_32: rejection loop cap exceeded");
}

// R = Q*N + D for R of modulus M*N: Q (modulus M) and D (modulus N) are
// uniform and independent.
std::pair<uint64_t, uint64_t> split_quotient_remainder(uint64_t value,
                                                       uint64_t m, uint64_t n);

// Owns a backend, its bit buffer and every per-variant state, and keeps the
// entropy ledger across calls. Single-owner; not copyable.
class Scaler {
 public:
  struct Config {
    ScalerVariant variant = ScalerVariant::bbr;
    BackendKind backend = BackendKind::xorshift128;
    uint64_t seed = 0;
    uint64_t capacity = RecyclerState::kMaxCapacity;  // bbr family refill target
    bool refill32 = false;  // serve buffer refills from next32 instead of next64
  };

  explicit Scaler(const Config& cfg);
  Scaler(ScalerVariant v, BackendKind b, uint64_t seed);

  Scaler(const Scaler&) = delete;
  Scaler& operator=(const Scaler&) = delete;

  uint64_t draw(uint64_t n);

  // inclusive largest supported modulus for this variant/configuration
  uint64_t max_modulus() const;

  // log2(m) of the live recycler state; zero for the stateless variants
  double state_entropy() const;

  const EfficiencyCounters& counters() const { return counters_; }
  ScalerVariant variant() const { return cfg_.variant; }
  const Config& config() const { return cfg_; }
  const RecyclerState& recycler_state() const { return st64_; }
  const RecyclerState32& recycler_state32() const { return st32_; }

 private:
  Config cfg_;
  Backend backend_;
  BitBuffer buf_;
  RecyclerState st64_;
  RecyclerState32 st32_;
  SimpleRecyclerState srec_;
  EfficiencyCounters counters_;
};

}  // namespace rngscale
