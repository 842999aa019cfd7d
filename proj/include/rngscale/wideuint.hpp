#pragma once

#include <array>
#include <bit>
#include <cassert>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>

namespace rngscale {

// Fixed-width 512-bit unsigned integer, little-endian 64-bit limbs.
// Just enough arithmetic for Blum-Blum-Shub over ~260-bit moduli:
// values stay far below 2^512, products go through a double-width
// buffer and are reduced by binary long division.
struct U512 {
  static constexpr int kLimbs = 8;
  std::array<uint64_t, kLimbs> limb{};

  constexpr U512() = default;
  constexpr U512(uint64_t v) : limb{v} {}

  static constexpr U512 from_limbs(std::initializer_list<uint64_t> le) {
    U512 r;
    int i = 0;
    for (uint64_t v : le) r.limb[i++] = v;
    return r;
  }

  bool is_zero() const {
    for (uint64_t v : limb)
      if (v) return false;
    return true;
  }

  uint64_t low64() const { return limb[0]; }

  unsigned bit(unsigned i) const {
    return (limb[i / 64] >> (i % 64)) & 1u;
  }

  unsigned bit_length() const {
    for (int i = kLimbs - 1; i >= 0; --i)
      if (limb[i]) return 64u * i + (64 - std::countl_zero(limb[i]));
    return 0;
  }

  friend bool operator==(const U512&, const U512&) = default;

  friend std::strong_ordering operator<=>(const U512& a, const U512& b) {
    for (int i = kLimbs - 1; i >= 0; --i) {
      if (a.limb[i] != b.limb[i])
        return a.limb[i] < b.limb[i] ? std::strong_ordering::less
                                     : std::strong_ordering::greater;
    }
    return std::strong_ordering::equal;
  }

  U512& operator+=(const U512& o) {
    unsigned __int128 carry = 0;
    for (int i = 0; i < kLimbs; ++i) {
      carry += limb[i];
      carry += o.limb[i];
      limb[i] = static_cast<uint64_t>(carry);
      carry >>= 64;
    }
    assert(carry == 0);
    return *this;
  }

  // requires *this >= o
  U512& operator-=(const U512& o) {
    uint64_t borrow = 0;
    for (int i = 0; i < kLimbs; ++i) {
      uint64_t d = limb[i] - o.limb[i];
      uint64_t b2 = (limb[i] < o.limb[i]) || (d < borrow);
      limb[i] = d - borrow;
      borrow = b2;
    }
    assert(borrow == 0);
    return *this;
  }

  friend U512 operator+(U512 a, const U512& b) { return a += b; }
  friend U512 operator-(U512 a, const U512& b) { return a -= b; }

  // top bit must be clear
  void shl1() {
    uint64_t carry = 0;
    for (int i = 0; i < kLimbs; ++i) {
      uint64_t next = limb[i] >> 63;
      limb[i] = (limb[i] << 1) | carry;
      carry = next;
    }
    assert(carry == 0);
  }

  // plain product; the operands' combined width must not exceed 512 bits
  static U512 mul(const U512& a, const U512& b) {
    if (a.bit_length() + b.bit_length() > 512)
      throw std::overflow_error("U512::mul overflow");
    std::array<uint64_t, 2 * kLimbs> prod{};
    for (int i = 0; i < kLimbs; ++i) {
      uint64_t carry = 0;
      for (int j = 0; j < kLimbs; ++j) {
        unsigned __int128 cur =
            static_cast<unsigned __int128>(a.limb[i]) * b.limb[j] +
            prod[i + j] + carry;
        prod[i + j] = static_cast<uint64_t>(cur);
        carry = static_cast<uint64_t>(cur >> 64);
      }
      prod[i + kLimbs] = carry;
    }
    U512 r;
    for (int i = 0; i < kLimbs; ++i) r.limb[i] = prod[i];
    return r;
  }

  // a*b mod m, m > 0; operands must already be < m for the "values below
  // 2^511 after shift" guarantee to hold (callers pass reduced residues).
  static U512 mulmod(const U512& a, const U512& b, const U512& m) {
    if (m.is_zero()) throw std::invalid_argument("mulmod: zero modulus");
    std::array<uint64_t, 2 * kLimbs> prod{};
    for (int i = 0; i < kLimbs; ++i) {
      uint64_t carry = 0;
      for (int j = 0; j < kLimbs; ++j) {
        unsigned __int128 cur =
            static_cast<unsigned __int128>(a.limb[i]) * b.limb[j] +
            prod[i + j] + carry;
        prod[i + j] = static_cast<uint64_t>(cur);
        carry = static_cast<uint64_t>(cur >> 64);
      }
      prod[i + kLimbs] = carry;
    }
    return reduce(prod, m);
  }

  friend U512 operator%(const U512& a, const U512& m) {
    if (m.is_zero()) throw std::invalid_argument("mod: zero modulus");
    if (a < m) return a;
    std::array<uint64_t, 2 * kLimbs> wide{};
    for (int i = 0; i < kLimbs; ++i) wide[i] = a.limb[i];
    return reduce(wide, m);
  }

 private:
  static U512 reduce(const std::array<uint64_t, 2 * kLimbs>& p, const U512& m) {
    int top = -1;
    for (int i = 2 * kLimbs - 1; i >= 0 && top < 0; --i)
      if (p[i]) top = 64 * i + (63 - std::countl_zero(p[i]));
    U512 r;
    for (int i = top; i >= 0; --i) {
      r.shl1();
      r.limb[0] |= (p[i / 64] >> (i % 64)) & 1u;
      if (r >= m) r -= m;
    }
    return r;
  }
};

}  // namespace rngscale
