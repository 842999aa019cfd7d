#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "rngscale/backend.hpp"
#include "rngscale/scaler.hpp"

namespace rngscale {

// Ratio between the CPU cycle counter and the process-time clock, measured
// over repeated paired windows. cycles_per_clock_mean is in cycles per second
// of process time; the calibration is considered clean when the standard
// deviation of the log of the per-window ratios stays below 5%.
struct TimerCalibration {
  bool has_cycles = false;
  double cycles_per_clock_mean = 0;
  double log_stddev = 0;

  double cycles_per_ns() const { return cycles_per_clock_mean / 1e9; }
  bool valid() const { return has_cycles && log_stddev < 0.05; }
};

bool cycle_counter_available();
uint64_t read_cycle_counter();

TimerCalibration calibrate(unsigned windows = 16, double window_seconds = 0.05);

struct SweepRecord {
  uint64_t n = 0;
  double cycles_per_call = 0;  // NaN when no cycle counter is available
  double ns_per_call = 0;
  uint64_t calls = 0;
};

// The modulus sweep: every n from 2 to 32, then n += floor(n/32) while
// n < 2^32. Deterministic and platform independent.
std::vector<uint64_t> sweep_moduli();

struct BenchOptions {
  uint64_t calls = 1ull << 20;
  uint64_t warmup = 1024;
  bool use_sink = true;  // xor results into a bucket that callers print
};

struct BenchResult {
  std::vector<SweepRecord> records;
  uint64_t sink = 0;
};

// Time scaler.draw(n) for every modulus in the sweep. The scaler state is
// carried across moduli like the original measurement loop did.
BenchResult bench_scaler(Scaler& scaler, std::span<const uint64_t> moduli,
                         const TimerCalibration& cal, const BenchOptions& opt);

// The integer-arithmetic kernels timed against operand n.
enum class ArithKind {
  div32, div32_24, div48, div64,
  mod32, mod32_24, mod48, mod64,
  prod32, prod32_24, prod48, prod64,
};

ArithKind parse_arith_kind(std::string_view name);
std::string to_string(ArithKind k);
std::vector<ArithKind> all_arith_kinds();

BenchResult bench_arith(ArithKind kind, Backend& backend,
                        std::span<const uint64_t> moduli,
                        const TimerCalibration& cal, const BenchOptions& opt);

// CSV: header n,cycles_per_call,ns_per_call,calls; floats at 6 significant
// digits; empty cycles cell when no counter was available.
void emit_csv(std::span<const SweepRecord> records, std::ostream& out);
void emit_csv_file(std::span<const SweepRecord> records,
                   const std::filesystem::path& dest);

// plot data: "n ns_per_call" rows, ascending n, for log-x plotting
void emit_plot_data(std::span<const SweepRecord> records, std::ostream& out);
void emit_plot_data_file(std::span<const SweepRecord> records,
                         const std::filesystem::path& dest);

}  // namespace rngscale
