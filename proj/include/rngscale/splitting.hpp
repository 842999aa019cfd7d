#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

#include "rngscale/backend.hpp"
#include "rngscale/metrics.hpp"

namespace rngscale {

// A distinguished event S over the finite alphabet E = {0..alphabet_size-1},
// with 0 < |S| < |E| so the indicator is a nondegenerate Bernoulli.
class EventSet {
 public:
  EventSet(uint32_t alphabet_size, std::initializer_list<uint32_t> members);
  EventSet(uint32_t alphabet_size, const std::vector<uint32_t>& members);

  bool contains(uint32_t x) const { return member_[x] != 0; }
  uint32_t alphabet_size() const { return alphabet_; }
  uint32_t count() const { return count_; }
  double probability() const { return double(count_) / alphabet_; }

 private:
  void init(const std::vector<uint32_t>& members);

  uint32_t alphabet_;
  uint32_t count_ = 0;
  std::vector<uint8_t> member_;
};

// Indicator, success and failure queues produced by splitting a stream.
struct SplitQueues {
  std::vector<uint8_t> b;
  std::vector<uint32_t> y;
  std::vector<uint32_t> z;
};

// Route every symbol: members of S to Y, the rest to Z, the indicator to B.
SplitQueues split(std::span<const uint32_t> stream, const EventSet& s);

// Rebuild the interleaving from the queues; throws on starved queues.
std::vector<uint32_t> unsplit(const SplitQueues& queues);

// Exact check of the splitting theorem over the uniform law on E: enumerates
// all alphabet^prefix_len equiprobable inputs, restricts to those where
// Y_0..Y_K and Z_0..Z_M are determined within the prefix, and returns the
// largest deviation |P(b, y, z) - P(b) P(y) P(z)| over all cells of the
// (B-pattern, Y-tuple, Z-tuple) joint. All probabilities are exact rationals
// with denominator alphabet^prefix_len; the deviation is exact up to one
// final long-double division.
double verify_factorization_exact(uint32_t alphabet_size, const EventSet& s,
                                  unsigned prefix_len, unsigned k_success,
                                  unsigned m_unsuccess);

struct SplitTestReport {
  ChiSquareReport y_uniform;
  ChiSquareReport z_uniform;
  ChiSquareReport y_serial;
  double b_frequency = 0;   // observed success rate
  double b_expected = 0;    // |S| / |E|
  double b_sigma = 0;       // binomial standard deviation of the estimate
  uint64_t samples = 0;

  bool b_within_4sigma() const {
    return b_frequency >= b_expected - 4 * b_sigma &&
           b_frequency <= b_expected + 4 * b_sigma;
  }
  bool pass(double lo = 0.001, double hi = 0.999) const {
    return y_uniform.in_band(lo, hi) && z_uniform.in_band(lo, hi) &&
           y_serial.in_band(lo, hi) && b_within_4sigma();
  }
};

// Split `samples` backend words reduced mod |E| and chi-square the pieces:
// Y uniform on S, Z uniform on E\S, B frequency within 4 sigma, and a serial
// pair test on Y.
SplitTestReport statistical_split_test(Backend& backend, const EventSet& s,
                                       uint64_t samples);

}  // namespace rngscale
