#include "rngscale/scaler.hpp"

namespace rngscale {

ScalerVariant parse_variant(std::string_view name) {
  if (name == "simple32") return ScalerVariant::simple32;
  if (name == "simple40") return ScalerVariant::simple40;
  if (name == "simple48") return ScalerVariant::simple48;
  if (name == "simple64") return ScalerVariant::simple64;
  if (name == "bbr") return ScalerVariant::bbr;
  if (name == "bbr_faster") return ScalerVariant::bbr_faster;
  if (name == "bbr_cheating") return ScalerVariant::bbr_cheating;
  if (name == "simple_recycler") return ScalerVariant::simple_recycler;
  if (name == "bbr_32") return ScalerVariant::bbr_32;
  throw std::invalid_argument("unknown variant: " + std::string(name));
}

std::string to_string(ScalerVariant v) {
  switch (v) {
    case ScalerVariant::simple32: return "simple32";
    case ScalerVariant::simple40: return "simple40";
    case ScalerVariant::simple48: return "simple48";
    case ScalerVariant::simple64: return "simple64";
    case ScalerVariant::bbr: return "bbr";
    case ScalerVariant::bbr_faster: return "bbr_faster";
    case ScalerVariant::bbr_cheating: return "bbr_cheating";
    case ScalerVariant::simple_recycler: return "simple_recycler";
    case ScalerVariant::bbr_32: return "bbr_32";
  }
  return "?";
}

bool is_recycling(ScalerVariant v) {
  switch (v) {
    case ScalerVariant::bbr:
    case ScalerVariant::bbr_faster:
    case ScalerVariant::bbr_cheating:
    case ScalerVariant::bbr_32:
      return true;
    default:
      return false;
  }
}

namespace {

uint64_t simple_accept_loop_32(Backend& backend, uint32_t n,
                               EfficiencyCounters* counters) {
  // 32-bit internals on purpose: N = 2^32-1 and q, n*q never leave uint32
  const uint32_t q = 0xFFFFFFFFu / n;
  const uint32_t nq = n * q;
  for (int fails = 0; fails <= kRejectionLoopCap; ++fails) {
    uint32_t r = backend.next32();
    if (counters) counters->bits_consumed += 32;
    if (r < nq) {
      if (counters) {
        ++counters->draws;
        counters->add_entropy(std::log2(static_cast<double>(n)));
      }
      return r % n;
    }
    if (counters) ++counters->failures;
  }
  throw std::runtime_error("simple32: rejection loop cap exceeded");
}

uint64_t simple_accept_loop_wide(SimpleWidth width, Backend& backend,
                                 BitBuffer& bits, uint64_t n,
                                 EfficiencyCounters* counters) {
  const uint64_t cap = width == SimpleWidth::b40   ? (1ull << 40)
                       : width == SimpleWidth::b48 ? (1ull << 48)
                                                   : ~0ull;
  const uint64_t q = cap / n;
  const uint64_t nq = n * q;
  for (int fails = 0; fails <= kRejectionLoopCap; ++fails) {
    uint64_t r;
    switch (width) {
      case SimpleWidth::b40:
        r = backend.next32() | (static_cast<uint64_t>(bits.pop(8)) << 32);
        if (counters) counters->bits_consumed += 40;
        break;
      case SimpleWidth::b48:
        r = backend.next32() | (static_cast<uint64_t>(bits.pop(16)) << 32);
        if (counters) counters->bits_consumed += 48;
        break;
      default:
        r = backend.next64();
        if (counters) counters->bits_consumed += 64;
        break;
    }
    if (r < nq) {
      if (counters) {
        ++counters->draws;
        counters->add_entropy(std::log2(static_cast<double>(n)));
      }
      return r % n;
    }
    if (counters) ++counters->failures;
  }
  throw std::runtime_error("simple: rejection loop cap exceeded");
}

}  // namespace

uint64_t simple_draw(SimpleWidth width, Backend& backend, BitBuffer& bits,
                     uint64_t n, EfficiencyCounters* counters) {
  switch (width) {
    case SimpleWidth::b32:
      if (n < 1 || n > 0xFFFFFFFFull)
        throw std::invalid_argument("simple32: modulus must be in [1, 2^32-1]");
      return simple_accept_loop_32(backend, static_cast<uint32_t>(n), counters);
    case SimpleWidth::b40:
      if (n < 1 || n >= (1ull << 40))
        throw std::invalid_argument("simple40: modulus must be in [1, 2^40)");
      break;
    case SimpleWidth::b48:
      if (n < 1 || n >= (1ull << 48))
        throw std::invalid_argument("simple48: modulus must be in [1, 2^48)");
      break;
    case SimpleWidth::b64:
      if (n < 1)
        throw std::invalid_argument("simple64: modulus must be >= 1");
      break;
  }
  return simple_accept_loop_wide(width, backend, bits, n, counters);
}

uint64_t simple_recycler_draw(SimpleRecyclerState& st, Backend& backend,
                              uint64_t n, EfficiencyCounters* counters) {
  if (n < 1 || n >= (1ull << 16))
    throw std::invalid_argument("simple_recycler: modulus must be in [1, 2^16)");
  for (int fails = 0; fails <= kRejectionLoopCap; ++fails) {
    if (st.m < n * n || st.m < (1ull << 16)) {
      st.m = 1ull << 32;
      st.r = backend.next32();
      if (counters) counters->bits_consumed += 32;
    }
    uint64_t q = st.m / n;
    uint64_t nq = n * q;
    if (st.r < nq) {
      uint64_t d = st.r % n;
      st.r = static_cast<uint32_t>(st.r / n);
      st.m = q;
      if (counters) {
        ++counters->draws;
        counters->add_entropy(std::log2(static_cast<double>(n)));
      }
      return d;
    }
    st.r = static_cast<uint32_t>(st.r - nq);
    st.m -= nq;
    if (counters) ++counters->failures;
  }
  throw std::runtime_error("simple_recycler: rejection loop cap exceeded");
}

std::pair<uint64_t, uint64_t> split_quotient_remainder(uint64_t value,
                                                       uint64_t m, uint64_t n) {
  if (m < 1 || n < 1)
    throw std::invalid_argument("split_quotient_remainder: moduli must be >= 1");
  if (static_cast<unsigned __int128>(value) >=
      static_cast<unsigned __int128>(m) * n)
    throw std::out_of_range("split_quotient_remainder: value must be < M*N");
  return {value / n, value % n};
}

Scaler::Scaler(const Config& cfg)
    : cfg_(cfg),
      backend_(cfg.backend, cfg.seed),
      buf_(backend_, cfg.refill32),
      st64_(cfg.capacity) {}

Scaler::Scaler(ScalerVariant v, BackendKind b, uint64_t seed)
    : Scaler(Config{.variant = v, .backend = b, .seed = seed}) {}

uint64_t Scaler::draw(uint64_t n) {
  switch (cfg_.variant) {
    case ScalerVariant::simple32:
      return simple_draw(SimpleWidth::b32, backend_, buf_, n, &counters_);
    case ScalerVariant::simple40:
      return simple_draw(SimpleWidth::b40, backend_, buf_, n, &counters_);
    case ScalerVariant::simple48:
      return simple_draw(SimpleWidth::b48, backend_, buf_, n, &counters_);
    case ScalerVariant::simple64:
      return simple_draw(SimpleWidth::b64, backend_, buf_, n, &counters_);
    case ScalerVariant::bbr:
    case ScalerVariant::bbr_faster:
    case ScalerVariant::bbr_cheating: {
      if (n > 0xFFFFFFFFull)
        throw std::invalid_argument("bbr family: modulus must be < 2^32");
      RefillPlan plan = cfg_.variant == ScalerVariant::bbr ? RefillPlan::bits2
                                                           : RefillPlan::mixed;
      if (cfg_.variant == ScalerVariant::bbr_cheating)
        return recycle_draw_cheating(st64_, buf_, n, plan, &counters_);
      return recycle_draw(st64_, buf_, n, plan, &counters_);
    }
    case ScalerVariant::simple_recycler:
      return simple_recycler_draw(srec_, backend_, n, &counters_);
    case ScalerVariant::bbr_32:
      return bbr32_draw(st32_, buf_, n, &counters_);
  }
  throw std::logic_error("unreachable");
}

uint64_t Scaler::max_modulus() const {
  switch (cfg_.variant) {
    case ScalerVariant::simple32: return 0xFFFFFFFFull;
    case ScalerVariant::simple40: return (1ull << 40) - 1;
    case ScalerVariant::simple48: return (1ull << 48) - 1;
    case ScalerVariant::simple64: return ~0ull;
    case ScalerVariant::bbr:
    case ScalerVariant::bbr_faster:
    case ScalerVariant::bbr_cheating: {
      uint64_t cap = cfg_.capacity < (1ull << 32) ? cfg_.capacity : (1ull << 32);
      return cap - 1;
    }
    case ScalerVariant::simple_recycler: return (1ull << 16) - 1;
    case ScalerVariant::bbr_32: return 0xFFFFFFFFull;
  }
  return 0;
}

double Scaler::state_entropy() const {
  switch (cfg_.variant) {
    case ScalerVariant::bbr:
    case ScalerVariant::bbr_faster:
    case ScalerVariant::bbr_cheating:
      return std::log2(static_cast<double>(st64_.m));
    case ScalerVariant::bbr_32:
      return std::log2(static_cast<double>(st32_.m));
    case ScalerVariant::simple_recycler:
      return srec_.m ? std::log2(static_cast<double>(srec_.m)) : 0.0;
    default:
      return 0.0;
  }
}

}  // namespace rngscale
