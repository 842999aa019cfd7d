#include "rngscale/backend.hpp"

#include <cassert>
#include <stdexcept>

namespace rngscale {

namespace {

uint64_t splitmix64(uint64_t& s) {
  s += 0x9E3779B97F4A7C15ull;
  uint64_t z = s;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Two fixed 130-bit primes, both = 3 mod 4:
//   P = 2^129 + 0x4b
//   Q = 2^129 + 2^64 + 0x17
constexpr U512 kBbsP = U512::from_limbs({0x4b, 0x0, 0x2});
constexpr U512 kBbsQ = U512::from_limbs({0x17, 0x1, 0x2});
// M = P*Q (259 bits)
constexpr U512 kBbsM = U512::from_limbs({0x6bd, 0x4b, 0xc4, 0x2, 0x4});

}  // namespace

BackendKind parse_backend(std::string_view name) {
  if (name == "xorshift") return BackendKind::xorshift128;
  if (name == "counter") return BackendKind::counter;
  if (name == "bbs") return BackendKind::bbs;
  throw std::invalid_argument("unknown backend: " + std::string(name));
}

std::string to_string(BackendKind k) {
  switch (k) {
    case BackendKind::xorshift128: return "xorshift";
    case BackendKind::counter: return "counter";
    case BackendKind::bbs: return "bbs";
  }
  return "?";
}

XorshiftEngine::XorshiftEngine(uint64_t seed) {
  uint64_t s = seed ? seed : kZeroSeedReplacement;
  uint64_t a = splitmix64(s);
  uint64_t b = splitmix64(s);
  x_ = static_cast<uint32_t>(a);
  y_ = static_cast<uint32_t>(a >> 32);
  z_ = static_cast<uint32_t>(b);
  w_ = static_cast<uint32_t>(b >> 32);
  if ((x_ | y_ | z_ | w_) == 0) w_ = 1;  // unreachable with splitmix64
}

BbsEngine::BbsEngine(uint64_t seed)
    : m_(kBbsM), bits_per_step_(kDefaultBitsPerStep) {
  // x0 = 128-bit splitmix expansion of the seed, plus 2. The result is
  // strictly below either prime factor, hence > 1 and coprime to M.
  uint64_t s = seed;
  uint64_t a = splitmix64(s);
  uint64_t b = splitmix64(s);
  x_ = U512::from_limbs({b, a});
  x_ += U512(2);
}

BbsEngine::BbsEngine(const U512& p, const U512& q, const U512& x0,
                     unsigned bits_per_step)
    : x_(x0), bits_per_step_(bits_per_step) {
  validate(p, q);
  m_ = U512::mul(p, q);
  if (!(U512(1) < x_ && x_ < m_))
    throw std::invalid_argument("bbs: residue must satisfy 1 < x < M");
  if ((x_ % p).is_zero() || (x_ % q).is_zero())
    throw std::invalid_argument("bbs: seed residue shares a factor with M");
}

void BbsEngine::validate(const U512& p, const U512& q) const {
  if (bits_per_step_ < 1 || bits_per_step_ > 32)
    throw std::invalid_argument("bbs: bits_per_step must be in 1..32");
  if (p.bit_length() > 255 || q.bit_length() > 255)
    throw std::invalid_argument("bbs: prime factors too large");
  if ((p.limb[0] & 3) != 3 || (q.limb[0] & 3) != 3)
    throw std::invalid_argument("bbs: both primes must be = 3 mod 4");
  if (p == q) throw std::invalid_argument("bbs: primes must differ");
}

uint32_t BbsEngine::step() {
  x_ = U512::mulmod(x_, x_, m_);
  assert(U512(1) < x_ && x_ < m_);
  uint32_t mask = bits_per_step_ >= 32
                      ? 0xFFFFFFFFu
                      : ((1u << bits_per_step_) - 1);
  return static_cast<uint32_t>(x_.low64()) & mask;
}

uint64_t BbsEngine::gather(unsigned width) {
  // Extracted groups are concatenated least-significant-first until the
  // word is full; surplus bits of the last group are dropped.
  uint64_t acc = 0;
  unsigned off = 0;
  while (off < width) {
    acc |= static_cast<uint64_t>(step()) << off;
    off += bits_per_step_;
  }
  return width >= 64 ? acc : (acc & ((1ull << width) - 1));
}

Backend::Backend(BackendKind kind, uint64_t seed) : kind_(kind), impl_(CounterEngine(0)) {
  switch (kind) {
    case BackendKind::xorshift128: impl_ = XorshiftEngine(seed); break;
    case BackendKind::counter: impl_ = CounterEngine(seed); break;
    case BackendKind::bbs: impl_ = BbsEngine(seed); break;
  }
}

}  // namespace rngscale
