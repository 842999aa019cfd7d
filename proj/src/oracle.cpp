#include "rngscale/oracle.hpp"

#include <cassert>
#include <stdexcept>
#include <tuple>

namespace rngscale {

namespace {

// A resumption point: the machine ran out of tape mid-refill. (m, r) is
// consistent (pops update them atomically), `outs` holds completed draws and
// `pending` the tape tail the machine has not consumed yet (always shorter
// than the chunk it will ask for next). `weight` counts how many depth-level
// bit prefixes lead here; merging identical nodes keeps the frontier small.
struct Node {
  uint64_t m, r;
  std::vector<uint64_t> outs;
  std::vector<uint8_t> pending;

  auto key() const { return std::tie(m, r, outs, pending); }
  friend bool operator<(const Node& a, const Node& b) { return a.key() < b.key(); }
};

struct RunResult {
  bool completed;
  uint64_t m, r;
  std::vector<uint64_t> outs;
  std::vector<uint8_t> tail;
};

RunResult run_from(ScalerVariant variant, uint64_t capacity, uint64_t m,
                   uint64_t r, std::vector<uint64_t> outs,
                   const std::vector<uint8_t>& feed,
                   std::span<const uint64_t> moduli) {
  ReplayBits src(feed);
  RunResult res;
  res.completed = false;
  if (variant == ScalerVariant::bbr_32) {
    RecyclerState32 st(static_cast<uint32_t>(capacity));
    st.m = static_cast<uint32_t>(m);
    st.r = static_cast<uint32_t>(r);
    try {
      while (outs.size() < moduli.size())
        outs.push_back(bbr32_draw(st, src, moduli[outs.size()]));
      res.completed = true;
    } catch (const OutOfBits&) {
      // (m, r) stay consistent: a pop either lands whole or not at all
    }
    res.m = st.m;
    res.r = st.r;
  } else {
    RecyclerState st(capacity);
    st.m = m;
    st.r = r;
    RefillPlan plan =
        variant == ScalerVariant::bbr ? RefillPlan::bits2 : RefillPlan::mixed;
    try {
      while (outs.size() < moduli.size()) {
        uint64_t n = moduli[outs.size()];
        uint64_t d = variant == ScalerVariant::bbr_cheating
                         ? recycle_draw_cheating(st, src, n, plan)
                         : recycle_draw(st, src, n, plan);
        outs.push_back(d);
      }
      res.completed = true;
    } catch (const OutOfBits&) {
    }
    res.m = st.m;
    res.r = st.r;
  }
  res.outs = std::move(outs);
  res.tail = src.tail();
  return res;
}

}  // namespace

ExactDistribution exact_output_distribution(ScalerVariant variant,
                                            uint64_t capacity,
                                            std::span<const uint64_t> moduli,
                                            unsigned depth) {
  if (!is_recycling(variant))
    throw std::invalid_argument("exact_output_distribution: recycling variants only");
  if (capacity < 8 || capacity > 1024 || (capacity & (capacity - 1)))
    throw std::invalid_argument("oracle capacity must be a power of two in [8, 1024]");
  if (depth < 1 || depth > 64)
    throw std::invalid_argument("oracle depth must be in [1, 64]");
  if (moduli.empty() || moduli.size() > 4)
    throw std::invalid_argument("oracle supports 1..4 draws");
  for (uint64_t n : moduli)
    if (n < 1 || n >= capacity)
      throw std::invalid_argument("oracle moduli must be in [1, capacity)");

  ExactDistribution dist;
  dist.depth = depth;
  const auto one = static_cast<ExactDistribution::Grains>(1);

  std::map<Node, ExactDistribution::Grains> frontier;
  frontier[Node{1, 0, {}, {}}] = one;

  for (unsigned level = 0; level < depth && !frontier.empty(); ++level) {
    std::map<Node, ExactDistribution::Grains> next;
    for (const auto& [node, weight] : frontier) {
      for (uint8_t b = 0; b < 2; ++b) {
        std::vector<uint8_t> feed = node.pending;
        feed.push_back(b);
        RunResult res = run_from(variant, capacity, node.m, node.r, node.outs,
                                 feed, moduli);
        if (res.completed) {
          // a completing run always uses the fresh bit, so it ends exactly
          // at level+1 consumed bits
          assert(res.tail.empty());
          dist.outcome_grains[res.outs] += weight << (depth - (level + 1));
        } else {
          next[Node{res.m, res.r, std::move(res.outs), std::move(res.tail)}] +=
              weight;
        }
      }
    }
    frontier = std::move(next);
  }

  for (const auto& [node, weight] : frontier) dist.residual_grains += weight;

  if (dist.outcome_grains.empty())
    throw std::logic_error("exact_output_distribution: no draw ever completed");
  return dist;
}

}  // namespace rngscale
