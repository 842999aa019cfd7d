#include "rngscale/bit_source.hpp"

namespace rngscale {

uint32_t next_card(Backend& source, uint64_t* failures) {
  constexpr uint32_t kQ = 0xFFFFFFFFu / 52;  // 82595524
  constexpr uint32_t kLimit = kQ * 52;       // 4294967248
  for (int tries = 0; tries <= kRejectionLoopCap; ++tries) {
    uint32_t r = source.next32();
    if (r < kLimit) return r % 52;
    if (failures) ++*failures;
  }
  throw std::runtime_error("next_card: rejection loop cap exceeded");
}

}  // namespace rngscale
