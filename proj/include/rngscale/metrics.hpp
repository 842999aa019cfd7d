#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace rngscale {

// Entropy/failure ledger. entropy_emitted accumulates log2(n) per draw with
// Neumaier compensation: the ledger identity checks need ~1e-6 bits of
// accuracy over 1e7 terms, which a naive double sum does not deliver.
class EfficiencyCounters {
 public:
  uint64_t bits_consumed = 0;
  uint64_t failures = 0;
  uint64_t draws = 0;

  void add_entropy(double log2n) {
    double t = sum_ + log2n;
    if (std::abs(sum_) >= std::abs(log2n))
      comp_ += (sum_ - t) + log2n;
    else
      comp_ += (log2n - t) + sum_;
    sum_ = t;
  }

  double entropy_emitted() const { return sum_ + comp_; }

  void merge(const EfficiencyCounters& o) {
    bits_consumed += o.bits_consumed;
    failures += o.failures;
    draws += o.draws;
    add_entropy(o.sum_);
    add_entropy(o.comp_);
  }

 private:
  double sum_ = 0;
  double comp_ = 0;
};

// (entropy emitted + entropy still held in the scaler state) / bits consumed
double efficiency(const EfficiencyCounters& c, double final_state_entropy);

struct ChiSquareReport {
  double statistic = 0;
  uint64_t dof = 0;
  double p_value = 1;

  bool in_band(double lo = 0.001, double hi = 0.999) const {
    return p_value >= lo && p_value <= hi;
  }
};

// Upper regularized incomplete gamma Q(s, x); relative error < 1e-8.
double regularized_gamma_q(double s, double x);

// Survival function of the chi-square distribution.
double chi_square_sf(double statistic, double dof);

// Pearson test against the uniform expectation total/bins.
// Requires >= 2 bins and expected count >= 5 per bin.
ChiSquareReport chi_square_uniform(std::span<const uint64_t> counts);

// Pearson test against explicit cell probabilities (sum to 1).
ChiSquareReport chi_square_expected(std::span<const uint64_t> counts,
                                    std::span<const double> probs);

// Chi-square over non-overlapping consecutive pairs (s_2i, s_2i+1),
// n*n bins, dof = n^2 - 1. Samples must lie in 0..n-1.
ChiSquareReport serial_pair_test(std::span<const uint64_t> samples, uint64_t n);

// Helpers for moduli too large to give every residue its own bin: values are
// bucketed by b = floor(v * bins / n) and tested against the exact bucket
// probabilities (bucket sizes differ by at most one when bins does not
// divide n).
ChiSquareReport uniformity_report(std::span<const uint64_t> samples, uint64_t n,
                                  uint64_t max_bins = 1024);
ChiSquareReport serial_report(std::span<const uint64_t> samples, uint64_t n,
                              uint64_t max_base = 16);

// Rejection loops in this project terminate almost surely; the cap turns the
// impossible nonterminating case (probability < 2^-10000 anywhere it is used)
// into a detectable error.
inline constexpr int kRejectionLoopCap = 10000;

inline const double kLog2Of3 = std::log2(3.0);

// Two-bit rejection demo: draw two bits, reject 11, map 00/01/10 to 1/2/3.
// Runs until `draws` values were accepted; counts every consumed bit.
template <class Src>
EfficiencyCounters example1_naive(uint64_t draws, Src& bits,
                                  std::vector<uint32_t>* outputs = nullptr) {
  EfficiencyCounters c;
  while (c.draws < draws) {
    int rejected = 0;
    for (;;) {
      uint32_t hi = bits.pop(1);
      uint32_t lo = bits.pop(1);
      c.bits_consumed += 2;
      uint32_t v = (hi << 1) | lo;
      if (v != 3) {
        ++c.draws;
        c.add_entropy(kLog2Of3);
        if (outputs) outputs->push_back(v + 1);
        break;
      }
      ++c.failures;
      if (++rejected > kRejectionLoopCap)
        throw std::runtime_error("example1: rejection loop cap exceeded");
    }
  }
  return c;
}

// Base-3 radix demo: draw a byte, reject > 242, else emit its five base-3
// digits (least significant digit first) as five samples.
template <class Src>
EfficiencyCounters example2_radix(uint64_t batches, Src& bits,
                                  std::vector<uint32_t>* outputs = nullptr) {
  EfficiencyCounters c;
  for (uint64_t b = 0; b < batches; ++b) {
    int rejected = 0;
    for (;;) {
      uint32_t x = bits.pop(8);
      c.bits_consumed += 8;
      if (x <= 242) {
        for (int d = 0; d < 5; ++d) {
          if (outputs) outputs->push_back(x % 3);
          x /= 3;
          ++c.draws;
          c.add_entropy(kLog2Of3);
        }
        break;
      }
      ++c.failures;
      if (++rejected > kRejectionLoopCap)
        throw std::runtime_error("example2: rejection loop cap exceeded");
    }
  }
  return c;
}

}  // namespace rngscale
