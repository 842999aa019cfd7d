// Acceptance suite: one line per criterion, PASS/FAIL, nonzero exit when any
// criterion fails. Every tolerance is pinned in code next to its check.

#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "rngscale/bench.hpp"
#include "rngscale/bit_source.hpp"
#include "rngscale/metrics.hpp"
#include "rngscale/oracle.hpp"
#include "rngscale/scaler.hpp"
#include "rngscale/splitting.hpp"

using namespace rngscale;

namespace {

int g_failures = 0;

struct Criterion {
  int id;
  const char* name;
  double time_limit_s;  // 0 = no limit
};

void run_criterion(const Criterion& c, const std::function<bool(std::string&)>& body) {
  std::string detail;
  bool ok = false;
  auto t0 = std::chrono::steady_clock::now();
  try {
    ok = body(detail);
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (c.time_limit_s > 0 && secs >= c.time_limit_s) {
    ok = false;
    detail += " [over time limit]";
  }
  if (!ok) ++g_failures;
  std::printf("%s %2d %-24s %s (%.2fs)\n", ok ? "PASS" : "FAIL", c.id, c.name,
              detail.c_str(), secs);
  std::fflush(stdout);
}

const uint64_t kCycle[] = {2, 3, 52, 1000000, (1ull << 31) + 1};

char buf[256];

bool example1_efficiency(std::string& detail) {
  Backend b(BackendKind::xorshift128, 1);
  BitBuffer bits(b);
  auto c = example1_naive(1000000, bits);
  double eff = efficiency(c, 0.0);
  std::snprintf(buf, sizeof buf, "efficiency=%.4f expected=0.594+-0.01", eff);
  detail = buf;
  return std::abs(eff - 0.594) <= 0.01;
}

bool example2_efficiency(std::string& detail) {
  Backend b(BackendKind::xorshift128, 1);
  BitBuffer bits(b);
  auto c = example2_radix(1000000, bits);
  double eff = efficiency(c, 0.0);
  double exact = 5.0 * std::log2(3.0) * 243.0 / 2048.0;
  std::snprintf(buf, sizeof buf,
                "efficiency=%.4f asserted-band=0.979+-0.01; exact value of the "
                "procedure as specified is 5*log2(3)*243/2048=%.4f (accept "
                "probability 243/256 costs 2048/243 bits per batch; the 0.979 "
                "figure stems from an erroneous 2048/253) -- see README",
                eff, exact);
  detail = buf;
  return std::abs(eff - 0.979) <= 0.01;
}

bool recycling_ledger(std::string& detail) {
  Scaler s(ScalerVariant::bbr, BackendKind::xorshift128, 1);
  for (uint64_t i = 0; i < 1000000; ++i) (void)s.draw(kCycle[i % 5]);
  double slack = double(s.counters().bits_consumed) -
                 s.counters().entropy_emitted() - s.state_entropy();
  std::snprintf(buf, sizeof buf, "slack=%.6f bits, required [0,1)", slack);
  detail = buf;
  return slack >= 0.0 && slack < 1.0;
}

bool failure_rarity(std::string& detail) {
  Scaler s(ScalerVariant::bbr, BackendKind::xorshift128, 1);
  for (uint64_t i = 0; i < 10000000; ++i) (void)s.draw(kCycle[i % 5]);
  uint64_t fails = s.counters().failures;
  std::snprintf(buf, sizeof buf, "failures=%" PRIu64 " over 1e7 draws, allowed <= 3",
                fails);
  detail = buf;
  return fails <= 3;
}

bool exact_uniformity_oracle(std::string& detail) {
  const double residual_bound = std::ldexp(1.0, -20);
  double worst_dev = 0, worst_residual = 0, worst_joint = 0;
  for (ScalerVariant v : {ScalerVariant::bbr, ScalerVariant::bbr_faster}) {
    for (uint64_t cap : {8ull, 16ull}) {
      for (uint64_t n : {2ull, 3ull, 5ull, 6ull}) {
        std::vector<uint64_t> single{n};
        auto d = exact_output_distribution(v, cap, single, 40);
        if (d.residual_mass() >= residual_bound) return false;
        worst_residual = std::max(worst_residual, d.residual_mass());
        for (uint64_t val = 0; val < n; ++val) {
          double dev = std::abs(d.probability({val}) - 1.0 / double(n));
          worst_dev = std::max(worst_dev, dev);
          if (dev > d.residual_mass()) return false;
        }
        std::vector<uint64_t> two{n, n};
        auto d2 = exact_output_distribution(v, cap, two, 40);
        if (d2.residual_mass() >= residual_bound) return false;
        for (uint64_t a = 0; a < n; ++a) {
          double pa = 0;
          for (uint64_t b2 = 0; b2 < n; ++b2) pa += d2.probability({a, b2});
          for (uint64_t b2 = 0; b2 < n; ++b2) {
            double pb = 0;
            for (uint64_t a2 = 0; a2 < n; ++a2) pb += d2.probability({a2, b2});
            double dev = std::abs(d2.probability({a, b2}) - pa * pb);
            worst_joint = std::max(worst_joint, dev);
            if (dev > 2 * d2.residual_mass()) return false;
          }
        }
      }
    }
  }
  std::snprintf(buf, sizeof buf,
                "exact variants (bbr, bbr_faster): max|p-1/n|=%.3g "
                "max residual=%.3g max joint dev=%.3g",
                worst_dev, worst_residual, worst_joint);
  detail = buf;
  return true;
}

bool lemma_brute_force(std::string& detail) {
  for (uint64_t m = 1; m <= 16; ++m) {
    for (uint64_t n = 1; n <= 16; ++n) {
      std::vector<int> seen(m * n, 0);
      for (uint64_t r = 0; r < m * n; ++r) {
        auto [q, d] = split_quotient_remainder(r, m, n);
        if (q >= m || d >= n) return false;
        ++seen[q * n + d];
      }
      for (int count : seen)
        if (count != 1) return false;
    }
  }
  detail = "bijection over all M,N <= 16";
  return true;
}

bool splitting_exact(std::string& detail) {
  double max_dev = 0;
  for (auto members : {std::vector<uint32_t>{0}, {1}, {2}, {0, 1}, {0, 2}, {1, 2}}) {
    EventSet s(3, members);
    max_dev = std::max(max_dev, verify_factorization_exact(3, s, 6, 0, 0));
  }
  if (max_dev >= 1e-12) return false;

  XorshiftEngine rng(1);
  for (int trial = 0; trial < 10000; ++trial) {
    uint32_t alpha = 2 + rng.next32() % 5;
    std::vector<uint32_t> members;
    for (uint32_t x = 0; x < alpha; ++x)
      if (rng.next32() & 1) members.push_back(x);
    if (members.empty() || members.size() == alpha) continue;
    EventSet s(alpha, members);
    std::vector<uint32_t> stream(rng.next32() % 80);
    for (auto& x : stream) x = rng.next32() % alpha;
    if (unsplit(split(stream, s)) != stream) return false;
  }
  std::snprintf(buf, sizeof buf,
                "max factorization deviation=%.3g (< 1e-12); 1e4 round-trips ok",
                max_dev);
  detail = buf;
  return true;
}

bool statistical_suite(std::string& detail) {
  const ScalerVariant variants[] = {
      ScalerVariant::simple32,        ScalerVariant::simple40,
      ScalerVariant::simple48,        ScalerVariant::simple64,
      ScalerVariant::bbr,             ScalerVariant::bbr_faster,
      ScalerVariant::bbr_cheating,    ScalerVariant::simple_recycler,
      ScalerVariant::bbr_32};
  const uint64_t moduli[] = {3, 52, 1000, (1ull << 31) + 1};
  const uint64_t samples = 1000000;
  double min_p = 1.0, max_p = 0.0;
  int runs = 0;

  for (ScalerVariant v : variants) {
    Scaler s(v, BackendKind::xorshift128, 1);
    for (uint64_t n : moduli) {
      if (n > s.max_modulus()) continue;  // simple_recycler skips 2^31+1
      std::vector<uint64_t> values(samples);
      for (auto& val : values) val = s.draw(n);
      auto uni = uniformity_report(values, n);
      auto ser = serial_report(values, n, /*max_base=*/64);
      for (double p : {uni.p_value, ser.p_value}) {
        min_p = std::min(min_p, p);
        max_p = std::max(max_p, p);
        if (p < 0.001 || p > 0.999) {
          std::snprintf(buf, sizeof buf, "%s n=%" PRIu64 " p=%.6g out of band",
                        to_string(v).c_str(), n, p);
          detail = buf;
          return false;
        }
      }
      ++runs;
    }
  }

  // negative control: the arithmetic progression is nothing like uniform
  Scaler ctrl(ScalerVariant::bbr, BackendKind::counter, 0);
  std::vector<uint64_t> values(samples);
  for (auto& val : values) val = ctrl.draw(52);
  auto uni = uniformity_report(values, 52);
  if (uni.in_band()) {
    detail = "counter negative control unexpectedly passed";
    return false;
  }
  std::snprintf(buf, sizeof buf,
                "%d variant/modulus runs, p in [%.4f, %.4f]; counter control "
                "p=%.3g rejected",
                runs, min_p, max_p, uni.p_value);
  detail = buf;
  return true;
}

bool exact_vs_cheating(std::string& detail) {
  Scaler exact(ScalerVariant::bbr_faster, BackendKind::xorshift128, 1);
  Scaler cheat(ScalerVariant::bbr_cheating, BackendKind::xorshift128, 1);
  uint64_t divergences = 0;
  for (uint64_t i = 0; i < 1000000; ++i) {
    uint64_t n = kCycle[i % 5];
    if (exact.draw(n) != cheat.draw(n)) ++divergences;
  }
  std::snprintf(buf, sizeof buf,
                "divergences=%" PRIu64 " over 1e6 draws (exact failures=%" PRIu64
                ", clamps=%" PRIu64 ")",
                divergences, exact.counters().failures, cheat.counters().failures);
  detail = buf;
  return divergences == 0;
}

bool bench_harness(std::string& detail) {
  auto sweep = sweep_moduli();
  // the generation rule, rechecked inline
  if (sweep.size() < 33) return false;
  for (uint64_t i = 0; i < 32; ++i)
    if (sweep[i] != i + 2) return false;
  for (size_t i = 1; i < sweep.size(); ++i) {
    if (sweep[i] <= sweep[i - 1] || sweep[i] >= (1ull << 32)) return false;
    if (sweep[i - 1] >= 32 && sweep[i] != sweep[i - 1] + (sweep[i - 1] >> 5))
      return false;
  }
  if (sweep != sweep_moduli()) return false;  // deterministic
  if (sweep.size() != 656) {
    detail = "sweep rule no longer yields the documented 656 entries";
    return false;
  }

  auto cal = calibrate();
  BenchOptions opt;
  opt.calls = 1ull << 14;
  Scaler s(ScalerVariant::bbr_faster, BackendKind::counter, 0);
  auto res = bench_scaler(s, sweep, cal, opt);
  if (res.records.size() != sweep.size()) return false;
  for (const auto& r : res.records)
    if (!std::isfinite(r.ns_per_call) || r.ns_per_call <= 0) return false;

  auto tmp = std::filesystem::temp_directory_path() / "rngscale_acceptance.csv";
  emit_csv_file(res.records, tmp);
  std::ifstream in(tmp);
  std::string line;
  if (!std::getline(in, line) || line != "n,cycles_per_call,ns_per_call,calls")
    return false;
  size_t rows = 0;
  while (std::getline(in, line)) {
    unsigned long long n, calls;
    double cyc, ns;
    if (std::sscanf(line.c_str(), "%llu,%lf,%lf,%llu", &n, &cyc, &ns, &calls) != 4)
      return false;
    if (n != sweep[rows] || calls != opt.calls) return false;
    if (!std::isfinite(ns) || ns <= 0) return false;
    ++rows;
  }
  std::filesystem::remove(tmp);
  if (rows != sweep.size()) return false;

  std::snprintf(buf, sizeof buf,
                "sweep=656 moduli (deterministic rule; the often-quoted 733 "
                "count is reconciled in the README), csv header+%zu rows, "
                "timings finite and positive; absolute ns values intentionally "
                "not asserted",
                rows);
  detail = buf;
  return true;
}

}  // namespace

int main() {
  std::printf("acceptance suite (fixed seeds; statistical bands p in [0.001, 0.999])\n");
  run_criterion({1, "example1-efficiency", 1.0}, example1_efficiency);
  run_criterion({2, "example2-efficiency", 1.0}, example2_efficiency);
  run_criterion({3, "recycling-ledger", 0}, recycling_ledger);
  run_criterion({4, "failure-rarity", 0}, failure_rarity);
  run_criterion({5, "exact-uniformity-oracle", 30.0}, exact_uniformity_oracle);
  run_criterion({6, "lemma-brute-force", 1.0}, lemma_brute_force);
  run_criterion({7, "splitting-exact", 10.0}, splitting_exact);
  run_criterion({8, "statistical-suite", 120.0}, statistical_suite);
  run_criterion({9, "exact-vs-cheating", 0}, exact_vs_cheating);
  run_criterion({10, "bench-harness", 0}, bench_harness);
  if (g_failures)
    std::printf("%d criterion(s) failed\n", g_failures);
  else
    std::printf("all criteria passed\n");
  return g_failures == 0 ? 0 : 1;
}
