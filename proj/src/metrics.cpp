#include "rngscale/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace rngscale {

double efficiency(const EfficiencyCounters& c, double final_state_entropy) {
  if (c.bits_consumed == 0)
    throw std::invalid_argument("efficiency: no bits consumed");
  return (c.entropy_emitted() + final_state_entropy) /
         static_cast<double>(c.bits_consumed);
}

namespace {

// lower regularized incomplete gamma P(s, x) by series, x < s + 1
double gamma_p_series(double s, double x) {
  double ap = s;
  double sum = 1.0 / s;
  double del = sum;
  for (int i = 0; i < 10000; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * 1e-16)
      return sum * std::exp(-x + s * std::log(x) - std::lgamma(s));
  }
  throw std::runtime_error("gamma series did not converge");
}

// upper regularized incomplete gamma Q(s, x) by Lentz continued fraction
double gamma_q_cf(double s, double x) {
  const double tiny = std::numeric_limits<double>::min() / 1e-30;
  double b = x + 1.0 - s;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    double an = -double(i) * (double(i) - s);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16)
      return h * std::exp(-x + s * std::log(x) - std::lgamma(s));
  }
  throw std::runtime_error("gamma continued fraction did not converge");
}

}  // namespace

double regularized_gamma_q(double s, double x) {
  if (s <= 0 || x < 0)
    throw std::invalid_argument("regularized_gamma_q: need s > 0, x >= 0");
  if (x == 0) return 1.0;
  if (x < s + 1.0) return 1.0 - gamma_p_series(s, x);
  return gamma_q_cf(s, x);
}

double chi_square_sf(double statistic, double dof) {
  return regularized_gamma_q(dof / 2.0, statistic / 2.0);
}

ChiSquareReport chi_square_uniform(std::span<const uint64_t> counts) {
  if (counts.size() < 2)
    throw std::invalid_argument("chi_square_uniform: need >= 2 bins");
  uint64_t total = 0;
  for (uint64_t c : counts) total += c;
  double expected = double(total) / double(counts.size());
  if (expected < 5.0)
    throw std::invalid_argument("chi_square_uniform: underpopulated bins");
  double stat = 0;
  for (uint64_t c : counts) {
    double d = double(c) - expected;
    stat += d * d / expected;
  }
  ChiSquareReport rep;
  rep.statistic = stat;
  rep.dof = counts.size() - 1;
  rep.p_value = chi_square_sf(stat, double(rep.dof));
  return rep;
}

ChiSquareReport chi_square_expected(std::span<const uint64_t> counts,
                                    std::span<const double> probs) {
  if (counts.size() < 2 || counts.size() != probs.size())
    throw std::invalid_argument("chi_square_expected: bad bin shape");
  uint64_t total = 0;
  for (uint64_t c : counts) total += c;
  double stat = 0;
  for (size_t i = 0; i < counts.size(); ++i) {
    double expected = double(total) * probs[i];
    if (expected < 5.0)
      throw std::invalid_argument("chi_square_expected: underpopulated bins");
    double d = double(counts[i]) - expected;
    stat += d * d / expected;
  }
  ChiSquareReport rep;
  rep.statistic = stat;
  rep.dof = counts.size() - 1;
  rep.p_value = chi_square_sf(stat, double(rep.dof));
  return rep;
}

ChiSquareReport serial_pair_test(std::span<const uint64_t> samples, uint64_t n) {
  if (n < 2) throw std::invalid_argument("serial_pair_test: need n >= 2");
  size_t pairs = samples.size() / 2;
  if (pairs / (n * n) < 5)
    throw std::invalid_argument("serial_pair_test: underpopulated bins");
  std::vector<uint64_t> counts(n * n, 0);
  for (size_t i = 0; i + 1 < samples.size(); i += 2) {
    uint64_t a = samples[i], b = samples[i + 1];
    if (a >= n || b >= n)
      throw std::invalid_argument("serial_pair_test: sample out of range");
    ++counts[a * n + b];
  }
  double expected = double(pairs) / double(n * n);
  double stat = 0;
  for (uint64_t c : counts) {
    double d = double(c) - expected;
    stat += d * d / expected;
  }
  ChiSquareReport rep;
  rep.statistic = stat;
  rep.dof = n * n - 1;
  rep.p_value = chi_square_sf(stat, double(rep.dof));
  return rep;
}

namespace {

// bucket b covers residues [ceil(b*n/bins), ceil((b+1)*n/bins))
uint64_t bucket_of(uint64_t value, uint64_t n, uint64_t bins) {
  return static_cast<uint64_t>(
      (static_cast<unsigned __int128>(value) * bins) / n);
}

std::vector<double> bucket_probs(uint64_t n, uint64_t bins) {
  std::vector<double> probs(bins);
  auto lower = [&](uint64_t b) -> uint64_t {
    unsigned __int128 num = static_cast<unsigned __int128>(b) * n;
    return static_cast<uint64_t>((num + bins - 1) / bins);
  };
  for (uint64_t b = 0; b < bins; ++b)
    probs[b] = double(lower(b + 1) - lower(b)) / double(n);
  return probs;
}

}  // namespace

ChiSquareReport uniformity_report(std::span<const uint64_t> samples, uint64_t n,
                                  uint64_t max_bins) {
  if (n < 2) throw std::invalid_argument("uniformity_report: need n >= 2");
  if (n <= max_bins && samples.size() / n >= 5) {
    std::vector<uint64_t> counts(n, 0);
    for (uint64_t v : samples) ++counts[v];
    return chi_square_uniform(counts);
  }
  uint64_t bins = std::min<uint64_t>(n, max_bins);
  std::vector<uint64_t> counts(bins, 0);
  for (uint64_t v : samples) ++counts[bucket_of(v, n, bins)];
  return chi_square_expected(counts, bucket_probs(n, bins));
}

ChiSquareReport serial_report(std::span<const uint64_t> samples, uint64_t n,
                              uint64_t max_base) {
  if (n < 2) throw std::invalid_argument("serial_report: need n >= 2");
  size_t pairs = samples.size() / 2;
  if (n <= max_base && pairs / (n * n) >= 5) return serial_pair_test(samples, n);

  uint64_t base = std::min<uint64_t>(n, max_base);
  std::vector<double> marginal = bucket_probs(n, base);
  std::vector<double> probs(base * base);
  for (uint64_t a = 0; a < base; ++a)
    for (uint64_t b = 0; b < base; ++b)
      probs[a * base + b] = marginal[a] * marginal[b];
  std::vector<uint64_t> counts(base * base, 0);
  for (size_t i = 0; i + 1 < samples.size(); i += 2) {
    uint64_t a = bucket_of(samples[i], n, base);
    uint64_t b = bucket_of(samples[i + 1], n, base);
    ++counts[a * base + b];
  }
  ChiSquareReport rep = chi_square_expected(counts, probs);
  return rep;
}

}  // namespace rngscale
