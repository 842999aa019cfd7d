#include "rngscale/splitting.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace rngscale {

EventSet::EventSet(uint32_t alphabet_size, std::initializer_list<uint32_t> members)
    : alphabet_(alphabet_size), member_(alphabet_size, 0) {
  init(std::vector<uint32_t>(members));
}

EventSet::EventSet(uint32_t alphabet_size, const std::vector<uint32_t>& members)
    : alphabet_(alphabet_size), member_(alphabet_size, 0) {
  init(members);
}

void EventSet::init(const std::vector<uint32_t>& members) {
  if (alphabet_ < 2)
    throw std::invalid_argument("EventSet: alphabet needs at least 2 symbols");
  for (uint32_t x : members) {
    if (x >= alphabet_) throw std::invalid_argument("EventSet: member out of range");
    if (!member_[x]) {
      member_[x] = 1;
      ++count_;
    }
  }
  if (count_ == 0 || count_ == alphabet_)
    throw std::invalid_argument("EventSet: need 0 < |S| < |E|");
}

SplitQueues split(std::span<const uint32_t> stream, const EventSet& s) {
  SplitQueues q;
  q.b.reserve(stream.size());
  for (uint32_t x : stream) {
    if (x >= s.alphabet_size())
      throw std::invalid_argument("split: symbol outside alphabet");
    if (s.contains(x)) {
      q.b.push_back(1);
      q.y.push_back(x);
    } else {
      q.b.push_back(0);
      q.z.push_back(x);
    }
  }
  return q;
}

std::vector<uint32_t> unsplit(const SplitQueues& queues) {
  std::vector<uint32_t> out;
  out.reserve(queues.b.size());
  size_t yi = 0, zi = 0;
  for (uint8_t b : queues.b) {
    if (b) {
      if (yi >= queues.y.size())
        throw std::runtime_error("unsplit: Y queue starved");
      out.push_back(queues.y[yi++]);
    } else {
      if (zi >= queues.z.size())
        throw std::runtime_error("unsplit: Z queue starved");
      out.push_back(queues.z[zi++]);
    }
  }
  return out;
}

double verify_factorization_exact(uint32_t alphabet_size, const EventSet& s,
                                  unsigned prefix_len, unsigned k_success,
                                  unsigned m_unsuccess) {
  if (s.alphabet_size() != alphabet_size)
    throw std::invalid_argument("verify_factorization_exact: alphabet mismatch");
  if (prefix_len == 0 || prefix_len > 20)
    throw std::invalid_argument("verify_factorization_exact: prefix_len out of range");
  double total_d = std::pow(double(alphabet_size), double(prefix_len));
  if (total_d > 1e6)
    throw std::invalid_argument("verify_factorization_exact: enumeration too large");
  const uint64_t total = static_cast<uint64_t>(total_d + 0.5);

  // key encodings: B-pattern as a bit mask, Y/Z tuples in radix |E|
  std::map<uint64_t, uint64_t> joint, b_marg, y_marg, z_marg;
  uint64_t determined = 0;

  std::vector<uint32_t> seq(prefix_len, 0);
  for (uint64_t idx = 0; idx < total; ++idx) {
    uint64_t v = idx;
    for (unsigned i = 0; i < prefix_len; ++i) {
      seq[i] = static_cast<uint32_t>(v % alphabet_size);
      v /= alphabet_size;
    }

    // success/unsuccess return times are consecutive within each family
    uint64_t b_pattern = 0;
    std::vector<uint32_t> y_tuple, z_tuple;
    for (unsigned i = 0; i < prefix_len; ++i) {
      bool in_s = s.contains(seq[i]);
      if (in_s) {
        b_pattern |= (1ull << i);
        if (y_tuple.size() <= k_success) y_tuple.push_back(seq[i]);
      } else {
        if (z_tuple.size() <= m_unsuccess) z_tuple.push_back(seq[i]);
      }
    }
    if (y_tuple.size() <= k_success || z_tuple.size() <= m_unsuccess)
      continue;  // U_K or V_M not determined within the prefix

    uint64_t y_key = 0, z_key = 0;
    for (uint32_t y : y_tuple) y_key = y_key * alphabet_size + y;
    for (uint32_t z : z_tuple) z_key = z_key * alphabet_size + z;
    uint64_t cell = (b_pattern * (total + 1) + y_key) * (total + 1) + z_key;

    ++determined;
    ++joint[cell];
    ++b_marg[b_pattern];
    ++y_marg[y_key];
    ++z_marg[z_key];
  }

  if (determined == 0)
    throw std::runtime_error(
        "verify_factorization_exact: no sequence determines the requested variables");

  // max |joint - product of marginals| over every (b, y, z) combination,
  // including cells with zero joint mass
  long double max_dev = 0;
  const long double t = determined;
  for (const auto& [bk, bc] : b_marg) {
    for (const auto& [yk, yc] : y_marg) {
      for (const auto& [zk, zc] : z_marg) {
        uint64_t cell = (bk * (total + 1) + yk) * (total + 1) + zk;
        auto it = joint.find(cell);
        uint64_t jc = it == joint.end() ? 0 : it->second;
        // exact integer cross-difference: |jc*t^2 - bc*yc*zc| / t^3
        unsigned __int128 lhs = static_cast<unsigned __int128>(jc) * determined * determined;
        unsigned __int128 rhs = static_cast<unsigned __int128>(bc) * yc * zc;
        unsigned __int128 diff = lhs > rhs ? lhs - rhs : rhs - lhs;
        long double dev = static_cast<long double>(diff) / (t * t * t);
        max_dev = std::max(max_dev, dev);
      }
    }
  }
  return static_cast<double>(max_dev);
}

SplitTestReport statistical_split_test(Backend& backend, const EventSet& s,
                                       uint64_t samples) {
  if (samples < 10000)
    throw std::invalid_argument("statistical_split_test: need >= 10^4 samples");
  const uint32_t alpha = s.alphabet_size();

  // dense index of S and E\S members for the chi-square bins
  std::vector<uint32_t> y_index(alpha, 0), z_index(alpha, 0);
  uint32_t ys = 0, zs = 0;
  for (uint32_t x = 0; x < alpha; ++x) {
    if (s.contains(x))
      y_index[x] = ys++;
    else
      z_index[x] = zs++;
  }

  std::vector<uint64_t> y_counts(ys, 0), z_counts(zs, 0);
  std::vector<uint64_t> y_seq;
  y_seq.reserve(static_cast<size_t>(samples * s.probability() * 1.1));
  uint64_t successes = 0;

  for (uint64_t i = 0; i < samples; ++i) {
    uint32_t x = backend.next32() % alpha;
    if (s.contains(x)) {
      ++successes;
      ++y_counts[y_index[x]];
      y_seq.push_back(y_index[x]);
    } else {
      ++z_counts[z_index[x]];
    }
  }

  SplitTestReport rep;
  rep.samples = samples;
  rep.b_expected = s.probability();
  rep.b_frequency = double(successes) / double(samples);
  rep.b_sigma = std::sqrt(rep.b_expected * (1 - rep.b_expected) / double(samples));
  rep.y_uniform = ys >= 2 ? chi_square_uniform(y_counts)
                          : ChiSquareReport{0.0, 0, 1.0};
  rep.z_uniform = zs >= 2 ? chi_square_uniform(z_counts)
                          : ChiSquareReport{0.0, 0, 1.0};
  rep.y_serial = ys >= 2 ? serial_pair_test(y_seq, ys)
                         : ChiSquareReport{0.0, 0, 1.0};
  return rep;
}

}  // namespace rngscale
