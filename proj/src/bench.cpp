#include "rngscale/bench.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <limits>
#include <ostream>
#include <stdexcept>

#if defined(__x86_64__) || defined(__i386__)
#include <x86intrin.h>
#define RNGSCALE_HAVE_CYCLES 1
#elif defined(__aarch64__)
#define RNGSCALE_HAVE_CYCLES 1
#else
#define RNGSCALE_HAVE_CYCLES 0
#endif

namespace rngscale {

bool cycle_counter_available() { return RNGSCALE_HAVE_CYCLES != 0; }

uint64_t read_cycle_counter() {
#if defined(__x86_64__) || defined(__i386__)
  return __rdtsc();
#elif defined(__aarch64__)
  uint64_t v;
  asm volatile("mrs %0, cntvct_el0" : "=r"(v));
  return v;
#else
  return 0;
#endif
}

TimerCalibration calibrate(unsigned windows, double window_seconds) {
  TimerCalibration cal;
  if (!cycle_counter_available()) return cal;
  if (windows < 2) throw std::invalid_argument("calibrate: need >= 2 windows");

  std::vector<double> ratios;
  ratios.reserve(windows);
  const auto window_ticks =
      static_cast<std::clock_t>(window_seconds * CLOCKS_PER_SEC);
  for (unsigned w = 0; w < windows; ++w) {
    std::clock_t c0 = std::clock();
    uint64_t t0 = read_cycle_counter();
    std::clock_t c1;
    while ((c1 = std::clock()) - c0 < window_ticks) {
    }
    uint64_t t1 = read_cycle_counter();
    double seconds = double(c1 - c0) / CLOCKS_PER_SEC;
    ratios.push_back(double(t1 - t0) / seconds);
  }

  double mean = 0;
  for (double r : ratios) mean += r;
  mean /= ratios.size();
  double var = 0;
  for (double r : ratios) {
    double d = std::log(r) - std::log(mean);
    var += d * d;
  }
  var /= ratios.size();

  cal.has_cycles = true;
  cal.cycles_per_clock_mean = mean;
  cal.log_stddev = std::sqrt(var);
  return cal;
}

std::vector<uint64_t> sweep_moduli() {
  std::vector<uint64_t> out;
  for (uint64_t n = 2; n <= 32; ++n) out.push_back(n);
  for (uint64_t n = 32 + (32 >> 5); n < (1ull << 32); n += n >> 5)
    out.push_back(n);
  return out;
}

namespace {

template <class Body>
SweepRecord timed_loop(uint64_t n, const TimerCalibration& cal,
                       const BenchOptions& opt, uint64_t& sink, Body&& body) {
  for (uint64_t i = 0; i < opt.warmup; ++i) {
    uint64_t v = body();
    if (opt.use_sink) sink ^= v;
  }
  uint64_t c0 = read_cycle_counter();
  auto t0 = std::chrono::steady_clock::now();
  for (uint64_t i = 0; i < opt.calls; ++i) {
    uint64_t v = body();
    if (opt.use_sink) sink ^= v;
  }
  uint64_t c1 = read_cycle_counter();
  auto t1 = std::chrono::steady_clock::now();

  SweepRecord rec;
  rec.n = n;
  rec.calls = opt.calls;
  if (cal.has_cycles) {
    rec.cycles_per_call = double(c1 - c0) / double(opt.calls);
    rec.ns_per_call = rec.cycles_per_call / cal.cycles_per_ns();
  } else {
    rec.cycles_per_call = std::numeric_limits<double>::quiet_NaN();
    rec.ns_per_call =
        double(std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0)
                   .count()) /
        double(opt.calls);
  }
  return rec;
}

}  // namespace

BenchResult bench_scaler(Scaler& scaler, std::span<const uint64_t> moduli,
                         const TimerCalibration& cal, const BenchOptions& opt) {
  BenchResult res;
  res.records.reserve(moduli.size());
  for (uint64_t n : moduli) {
    res.records.push_back(timed_loop(n, cal, opt, res.sink,
                                     [&] { return scaler.draw(n); }));
  }
  return res;
}

ArithKind parse_arith_kind(std::string_view name) {
  for (ArithKind k : all_arith_kinds())
    if (to_string(k) == name) return k;
  throw std::invalid_argument("unknown arith kind: " + std::string(name));
}

std::string to_string(ArithKind k) {
  switch (k) {
    case ArithKind::div32: return "div32";
    case ArithKind::div32_24: return "div32_24";
    case ArithKind::div48: return "div48";
    case ArithKind::div64: return "div64";
    case ArithKind::mod32: return "mod32";
    case ArithKind::mod32_24: return "mod32_24";
    case ArithKind::mod48: return "mod48";
    case ArithKind::mod64: return "mod64";
    case ArithKind::prod32: return "prod32";
    case ArithKind::prod32_24: return "prod32_24";
    case ArithKind::prod48: return "prod48";
    case ArithKind::prod64: return "prod64";
  }
  return "?";
}

std::vector<ArithKind> all_arith_kinds() {
  return {ArithKind::div32,  ArithKind::div32_24, ArithKind::div48,
          ArithKind::div64,  ArithKind::mod32,    ArithKind::mod32_24,
          ArithKind::mod48,  ArithKind::mod64,    ArithKind::prod32,
          ArithKind::prod32_24, ArithKind::prod48, ArithKind::prod64};
}

BenchResult bench_arith(ArithKind kind, Backend& backend,
                        std::span<const uint64_t> moduli,
                        const TimerCalibration& cal, const BenchOptions& opt) {
  BenchResult res;
  res.records.reserve(moduli.size());
  for (uint64_t n64 : moduli) {
    if (n64 < 1 || n64 > 0xFFFFFFFFull)
      throw std::invalid_argument("bench_arith: operand must be a 32-bit value >= 1");
    const uint32_t n = static_cast<uint32_t>(n64);
    auto time_kernel = [&](auto&& kernel) {
      return timed_loop(n64, cal, opt, res.sink, kernel);
    };
    switch (kind) {
      case ArithKind::div32:
        res.records.push_back(time_kernel([&]() -> uint64_t {
          return backend.next32() / n;
        }));
        break;
      case ArithKind::div32_24:
        res.records.push_back(time_kernel([&]() -> uint64_t {
          return (backend.next32() & 0xFF000000u) / n;
        }));
        break;
      case ArithKind::div48:
        res.records.push_back(time_kernel([&]() -> uint64_t {
          uint64_t r = backend.next32();
          return (r << 16) / n;
        }));
        break;
      case ArithKind::div64:
        res.records.push_back(time_kernel([&]() -> uint64_t {
          return backend.next64() / n;
        }));
        break;
      case ArithKind::mod32:
        res.records.push_back(time_kernel([&]() -> uint64_t {
          return backend.next32() % n;
        }));
        break;
      case ArithKind::mod32_24:
        res.records.push_back(time_kernel([&]() -> uint64_t {
          return (backend.next32() & 0xFF000000u) % n;
        }));
        break;
      case ArithKind::mod48:
        res.records.push_back(time_kernel([&]() -> uint64_t {
          uint64_t r = backend.next32();
          return (r << 16) % n;
        }));
        break;
      case ArithKind::mod64:
        res.records.push_back(time_kernel([&]() -> uint64_t {
          return backend.next64() % n;
        }));
        break;
      case ArithKind::prod32:
        res.records.push_back(time_kernel([&]() -> uint64_t {
          return backend.next32() * n;
        }));
        break;
      case ArithKind::prod32_24:
        res.records.push_back(time_kernel([&]() -> uint64_t {
          return (backend.next32() & 0xFFu) * n;
        }));
        break;
      case ArithKind::prod48:
        res.records.push_back(time_kernel([&]() -> uint64_t {
          uint64_t r = backend.next32();
          return (r << 16) * n;
        }));
        break;
      case ArithKind::prod64:
        res.records.push_back(time_kernel([&]() -> uint64_t {
          return backend.next64() * n;
        }));
        break;
    }
  }
  return res;
}

namespace {

void format_record(const SweepRecord& r, char* buf, size_t cap, bool csv) {
  if (std::isnan(r.cycles_per_call)) {
    if (csv)
      std::snprintf(buf, cap, "%llu,,%.6g,%llu",
                    static_cast<unsigned long long>(r.n), r.ns_per_call,
                    static_cast<unsigned long long>(r.calls));
    else
      std::snprintf(buf, cap, "%llu %.6g",
                    static_cast<unsigned long long>(r.n), r.ns_per_call);
  } else {
    if (csv)
      std::snprintf(buf, cap, "%llu,%.6g,%.6g,%llu",
                    static_cast<unsigned long long>(r.n), r.cycles_per_call,
                    r.ns_per_call, static_cast<unsigned long long>(r.calls));
    else
      std::snprintf(buf, cap, "%llu %.6g",
                    static_cast<unsigned long long>(r.n), r.ns_per_call);
  }
}

}  // namespace

void emit_csv(std::span<const SweepRecord> records, std::ostream& out) {
  if (records.empty()) throw std::invalid_argument("emit_csv: no records");
  out << "n,cycles_per_call,ns_per_call,calls\n";
  char buf[128];
  for (const auto& r : records) {
    format_record(r, buf, sizeof buf, true);
    out << buf << '\n';
  }
}

void emit_plot_data(std::span<const SweepRecord> records, std::ostream& out) {
  if (records.empty()) throw std::invalid_argument("emit_plot_data: no records");
  char buf[128];
  for (const auto& r : records) {
    format_record(r, buf, sizeof buf, false);
    out << buf << '\n';
  }
}

namespace {

template <class Emitter>
void emit_to_file(const std::filesystem::path& dest, Emitter&& emit) {
  std::ofstream out(dest);
  if (!out)
    throw std::runtime_error("cannot open for writing: " + dest.string());
  emit(out);
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + dest.string());
}

}  // namespace

void emit_csv_file(std::span<const SweepRecord> records,
                   const std::filesystem::path& dest) {
  emit_to_file(dest, [&](std::ostream& o) { emit_csv(records, o); });
}

void emit_plot_data_file(std::span<const SweepRecord> records,
                         const std::filesystem::path& dest) {
  emit_to_file(dest, [&](std::ostream& o) { emit_plot_data(records, o); });
}

}  // namespace rngscale
