#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "rngscale/scaler.hpp"

namespace rngscale {

// Exact output distribution of a recycling scaler, obtained by enumerating
// the binary tree of NextBit outcomes. Masses are kept as integer counts of
// 2^-depth grains, so sums are exact: sum of all outcome grains plus the
// residual equals 2^depth by construction.
struct ExactDistribution {
  using Grains = unsigned __int128;

  unsigned depth = 0;
  std::map<std::vector<uint64_t>, Grains> outcome_grains;
  Grains residual_grains = 0;

  double probability(const std::vector<uint64_t>& key) const {
    auto it = outcome_grains.find(key);
    return it == outcome_grains.end() ? 0.0 : to_mass(it->second);
  }

  double residual_mass() const { return to_mass(residual_grains); }

  double total_mass() const {
    Grains t = residual_grains;
    for (const auto& [k, g] : outcome_grains) t += g;
    return to_mass(t);
  }

  double to_mass(Grains g) const {
    return static_cast<double>(g) * std::ldexp(1.0, -static_cast<int>(depth));
  }
};

// Enumerates every bit string up to `depth` bits against the real draw code
// of `variant` (one of the recycling variants), recording the probability of
// each completed output tuple. Limits: capacity a power of two in [8, 1024],
// depth <= 64, at most 4 draws.
ExactDistribution exact_output_distribution(ScalerVariant variant,
                                            uint64_t capacity,
                                            std::span<const uint64_t> moduli,
                                            unsigned depth);

}  // namespace rngscale
