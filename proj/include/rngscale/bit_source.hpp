#pragma once

#include <array>
#include <cassert>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "rngscale/backend.hpp"
#include "rngscale/metrics.hpp"

namespace rngscale {

// Buffered bit extractor over a backend word stream. Bits are served
// least-significant-first from each refilled word; a chunk that straddles a
// refill keeps the old bits in its low positions (chunk = old | new << n_old),
// so the concatenated chunk stream is exactly the concatenated word stream.
class BitBuffer {
 public:
  explicit BitBuffer(Backend& source, bool refill32 = false)
      : source_(&source), refill32_(refill32) {}

  // next k bits (1..32), LSB-first
  uint32_t pop(unsigned k) {
    assert(k >= 1 && k <= 32);
    uint32_t out = 0;
    unsigned got = 0;
    while (got < k) {
      if (available_ == 0) refill();
      unsigned take = k - got < available_ ? k - got : available_;
      out |= static_cast<uint32_t>(store_ & ((1ull << take) - 1)) << got;
      store_ >>= take;
      available_ -= take;
      got += take;
    }
    return out;
  }

  uint32_t next_bit() { return pop(1); }
  uint32_t next_2bits() { return pop(2); }
  uint32_t next_byte() { return pop(8); }
  uint32_t next_word16() { return pop(16); }

  unsigned available() const { return available_; }
  uint64_t consumed_bits() const { return consumed_bits_; }

 private:
  void refill() {
    if (refill32_) {
      store_ = source_->next32();
      available_ = 32;
    } else {
      store_ = source_->next64();
      available_ = 64;
    }
    consumed_bits_ += available_;
  }

  uint64_t store_ = 0;
  unsigned available_ = 0;
  uint64_t consumed_bits_ = 0;
  Backend* source_;
  bool refill32_;
};

// Thrown by ReplayBits when the scripted tape runs out.
struct OutOfBits : std::runtime_error {
  OutOfBits() : std::runtime_error("scripted bit tape exhausted") {}
};

// Scripted drop-in for BitBuffer: serves a finite, explicit bit string.
// A pop either consumes exactly k bits or throws without consuming any,
// which the enumeration oracle relies on to keep resumption points clean.
class ReplayBits {
 public:
  ReplayBits() = default;
  explicit ReplayBits(std::vector<uint8_t> bits) : bits_(std::move(bits)) {}

  uint32_t pop(unsigned k) {
    assert(k >= 1 && k <= 32);
    if (cursor_ + k > bits_.size()) throw OutOfBits();
    uint32_t out = 0;
    for (unsigned i = 0; i < k; ++i)
      out |= static_cast<uint32_t>(bits_[cursor_ + i] & 1u) << i;
    cursor_ += k;
    return out;
  }

  uint32_t next_bit() { return pop(1); }

  void append(uint8_t bit) { bits_.push_back(bit & 1u); }
  size_t consumed() const { return cursor_; }
  size_t remaining() const { return bits_.size() - cursor_; }
  std::vector<uint8_t> tail() const {
    return {bits_.begin() + static_cast<long>(cursor_), bits_.end()};
  }

 private:
  std::vector<uint8_t> bits_;
  size_t cursor_ = 0;
};

// One card from a 52-deck: draw a 32-bit word r, accept when r < 52*q with
// q = floor((2^32-1)/52), return r mod 52, otherwise redraw.
uint32_t next_card(Backend& source, uint64_t* failures = nullptr);

// "Prefilled" card dealer: a 64-entry batch is recomputed whole whenever the
// cursor runs off the end, so the served sequence equals next_card's.
class CardDealer {
 public:
  static constexpr size_t kBatchLen = 64;

  explicit CardDealer(Backend& source) : source_(&source) {}

  uint32_t next(uint64_t* failures = nullptr) {
    if (cursor_ == kBatchLen) {
      for (auto& c : cards_) c = static_cast<uint8_t>(next_card(*source_, failures));
      cursor_ = 0;
      ++refills_;
    }
    return cards_[cursor_++];
  }

  uint64_t refills() const { return refills_; }

 private:
  std::array<uint8_t, kBatchLen> cards_{};
  size_t cursor_ = kBatchLen;
  Backend* source_;
  uint64_t refills_ = 0;
};

}  // namespace rngscale
