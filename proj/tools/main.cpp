// rngscale command line: generate / efficiency / verify / bench / arith /
// sweep-list / selftest. Machine-readable output goes to stdout, run headers
// and diagnostics to stderr. Exit codes: 0 ok, 1 check failure, 2 usage.

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rngscale/bench.hpp"
#include "rngscale/bit_source.hpp"
#include "rngscale/metrics.hpp"
#include "rngscale/oracle.hpp"
#include "rngscale/scaler.hpp"
#include "rngscale/splitting.hpp"

using namespace rngscale;

namespace {

struct CommonFlags {
  std::string variant = "bbr";
  std::string backend = "xorshift";
  uint64_t seed = 0;
  bool refill32 = false;
};

void print_header(const CommonFlags& f, const std::string& extra = "") {
  std::cerr << "# variant=" << f.variant << " backend=" << f.backend
            << " seed=" << f.seed;
  if (!extra.empty()) std::cerr << ' ' << extra;
  std::cerr << '\n';
}

Scaler::Config scaler_config(const CommonFlags& f) {
  Scaler::Config cfg;
  cfg.variant = parse_variant(f.variant);
  cfg.backend = parse_backend(f.backend);
  cfg.seed = f.seed;
  cfg.refill32 = f.refill32;
  return cfg;
}

std::vector<uint64_t> read_moduli_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open moduli file: " + path);
  std::vector<uint64_t> out;
  uint64_t n;
  while (in >> n) out.push_back(n);
  if (out.empty()) throw std::invalid_argument("empty moduli file: " + path);
  return out;
}

int cmd_generate(const CommonFlags& f, uint64_t n, uint64_t count,
                 const std::string& n_list) {
  Scaler s(scaler_config(f));
  std::vector<uint64_t> moduli;
  if (!n_list.empty()) {
    moduli = read_moduli_file(n_list);
  } else {
    moduli.assign(count, n);
  }
  for (uint64_t m : moduli)
    if (m < 1 || m > s.max_modulus())
      throw std::invalid_argument("modulus " + std::to_string(m) +
                                  " outside the variant's supported range");
  print_header(f, "count=" + std::to_string(moduli.size()));
  for (uint64_t m : moduli) std::cout << s.draw(m) << '\n';
  return 0;
}

void print_ledger(const EfficiencyCounters& c, double state_entropy) {
  std::printf("bits_consumed=%" PRIu64 "\n", c.bits_consumed);
  std::printf("entropy_emitted=%.6f\n", c.entropy_emitted());
  std::printf("state_entropy=%.6f\n", state_entropy);
  std::printf("draws=%" PRIu64 "\n", c.draws);
  std::printf("failures=%" PRIu64 "\n", c.failures);
  std::printf("efficiency=%.9f\n", efficiency(c, state_entropy));
  std::printf("ledger_slack_bits=%.6f\n",
              double(c.bits_consumed) - c.entropy_emitted() - state_entropy);
}

int cmd_efficiency(const CommonFlags& f, uint64_t draws,
                   std::optional<uint64_t> fixed_n) {
  print_header(f, "draws=" + std::to_string(draws));
  if (f.variant == "example1" || f.variant == "example2") {
    Backend b(parse_backend(f.backend), f.seed);
    BitBuffer bits(b, f.refill32);
    EfficiencyCounters c = f.variant == "example1"
                               ? example1_naive(draws, bits)
                               : example2_radix(draws, bits);
    print_ledger(c, 0.0);
    return 0;
  }
  Scaler s(scaler_config(f));
  const uint64_t cycle[] = {2, 3, 52, 1000000, (1ull << 31) + 1};
  for (uint64_t i = 0; i < draws; ++i) {
    uint64_t m = fixed_n ? *fixed_n : cycle[i % 5];
    if (m > s.max_modulus())
      throw std::invalid_argument("modulus outside the variant's range");
    (void)s.draw(m);
  }
  print_ledger(s.counters(), s.state_entropy());
  return 0;
}

int cmd_verify_uniformity(const CommonFlags& f, uint64_t n, uint64_t samples) {
  Scaler s(scaler_config(f));
  if (n < 2 || n > s.max_modulus())
    throw std::invalid_argument("modulus outside the variant's range");
  print_header(f, "n=" + std::to_string(n) + " samples=" + std::to_string(samples));
  std::vector<uint64_t> values(samples);
  for (auto& v : values) v = s.draw(n);
  auto uni = uniformity_report(values, n);
  auto ser = serial_report(values, n);
  std::printf("uniformity chi2=%.4f dof=%" PRIu64 " p=%.6g %s\n", uni.statistic,
              uni.dof, uni.p_value, uni.in_band() ? "ok" : "FAIL");
  std::printf("serial     chi2=%.4f dof=%" PRIu64 " p=%.6g %s\n", ser.statistic,
              ser.dof, ser.p_value, ser.in_band() ? "ok" : "FAIL");
  return uni.in_band() && ser.in_band() ? 0 : 1;
}

int cmd_verify_splitting(uint64_t seed, uint64_t samples) {
  bool all_ok = true;
  auto report = [&](const std::string& name, bool ok, double value) {
    std::printf("%-44s %10.3g  %s\n", name.c_str(), value, ok ? "ok" : "FAIL");
    all_ok = all_ok && ok;
  };

  for (auto members : {std::vector<uint32_t>{0}, {1}, {2}, {0, 1}, {0, 2}, {1, 2}}) {
    EventSet s(3, members);
    double dev = verify_factorization_exact(3, s, 6, 0, 0);
    std::string name = "exact-factorization |E|=3 S={";
    for (auto m : members) name += std::to_string(m);
    name += "}";
    report(name, dev < 1e-12, dev);
  }
  {
    EventSet s(4, {1, 2});
    double dev = verify_factorization_exact(4, s, 6, 1, 0);
    report("exact-factorization |E|=4 K=1", dev < 1e-12, dev);
  }
  {
    XorshiftEngine rng(seed ? seed : 1);
    bool ok = true;
    for (int trial = 0; trial < 10000 && ok; ++trial) {
      uint32_t alpha = 2 + rng.next32() % 5;
      std::vector<uint32_t> members;
      for (uint32_t x = 0; x < alpha; ++x)
        if (rng.next32() & 1) members.push_back(x);
      if (members.empty() || members.size() == alpha) continue;
      EventSet s(alpha, members);
      std::vector<uint32_t> stream(rng.next32() % 64);
      for (auto& x : stream) x = rng.next32() % alpha;
      ok = unsplit(split(stream, s)) == stream;
    }
    report("unsplit-of-split identity (1e4 streams)", ok, ok ? 0.0 : 1.0);
  }
  {
    Backend b(BackendKind::xorshift128, seed ? seed : 1);
    EventSet s(4, {0, 1});
    auto rep = statistical_split_test(b, s, samples);
    report("statistical split, xorshift", rep.pass(), rep.y_serial.p_value);
  }
  {
    Backend b(BackendKind::counter, 0);
    EventSet s(4, {0, 1});
    auto rep = statistical_split_test(b, s, samples);
    report("negative control fails, counter", !rep.pass(), rep.y_serial.p_value);
  }
  return all_ok ? 0 : 1;
}

std::filesystem::path resolve_out_dir(std::string out) {
  if (const char* env = std::getenv("RNGSCALE_OUT"); env && *env) out = env;
  if (out.empty())
    throw std::invalid_argument("need --out DIR (or RNGSCALE_OUT) for file output");
  std::filesystem::create_directories(out);
  return out;
}

int cmd_bench(const CommonFlags& f, uint64_t calls, const std::string& out,
              bool no_sink) {
  std::vector<std::string> variants;
  if (f.variant == "all") {
    for (auto v : {ScalerVariant::simple32, ScalerVariant::simple40,
                   ScalerVariant::simple48, ScalerVariant::simple64,
                   ScalerVariant::bbr, ScalerVariant::bbr_faster,
                   ScalerVariant::bbr_cheating, ScalerVariant::simple_recycler,
                   ScalerVariant::bbr_32})
      variants.push_back(to_string(v));
  } else {
    variants.push_back(f.variant);
  }

  print_header(f, "calls=" + std::to_string(calls));
  auto cal = calibrate();
  std::cerr << "# cycles_per_second=" << cal.cycles_per_clock_mean
            << " log_stddev=" << cal.log_stddev
            << (cal.valid() ? "" : " (noisy; prefer a pinned, idle core)") << '\n';

  auto sweep = sweep_moduli();
  BenchOptions opt;
  opt.calls = calls;
  opt.use_sink = !no_sink;

  const bool to_files = !out.empty() || std::getenv("RNGSCALE_OUT");
  if (!to_files && variants.size() > 1)
    throw std::invalid_argument("bench over all variants needs --out DIR");
  std::filesystem::path dir = to_files ? resolve_out_dir(out) : "";

  for (const auto& vname : variants) {
    CommonFlags vf = f;
    vf.variant = vname;
    Scaler s(scaler_config(vf));
    std::vector<uint64_t> moduli;
    for (uint64_t n : sweep)
      if (n <= s.max_modulus()) moduli.push_back(n);
    auto res = bench_scaler(s, moduli, cal, opt);
    std::cerr << "# " << vname << ": " << res.records.size()
              << " moduli, sink=" << res.sink << '\n';
    if (to_files) {
      auto base = vname + "_" + f.backend;
      emit_csv_file(res.records, dir / (base + ".csv"));
      emit_plot_data_file(res.records, dir / (base + ".dat"));
    } else {
      emit_csv(res.records, std::cout);
    }
  }
  return 0;
}

int cmd_arith(const CommonFlags& f, const std::string& kind_name, uint64_t calls,
              const std::string& out) {
  std::vector<ArithKind> kinds;
  if (kind_name == "all")
    kinds = all_arith_kinds();
  else
    kinds.push_back(parse_arith_kind(kind_name));

  std::cerr << "# backend=" << f.backend << " seed=" << f.seed
            << " calls=" << calls << '\n';
  auto cal = calibrate();
  auto sweep = sweep_moduli();
  BenchOptions opt;
  opt.calls = calls;

  const bool to_files = !out.empty() || std::getenv("RNGSCALE_OUT");
  if (!to_files && kinds.size() > 1)
    throw std::invalid_argument("arith over all kinds needs --out DIR");
  std::filesystem::path dir = to_files ? resolve_out_dir(out) : "";

  for (ArithKind kind : kinds) {
    Backend b(parse_backend(f.backend), f.seed);
    auto res = bench_arith(kind, b, sweep, cal, opt);
    std::cerr << "# arith " << to_string(kind) << ": sink=" << res.sink << '\n';
    if (to_files) {
      auto base = "arith_" + to_string(kind) + "_" + f.backend;
      emit_csv_file(res.records, dir / (base + ".csv"));
      emit_plot_data_file(res.records, dir / (base + ".dat"));
    } else {
      emit_csv(res.records, std::cout);
    }
  }
  return 0;
}

int cmd_sweep_list() {
  for (uint64_t n : sweep_moduli()) std::cout << n << '\n';
  return 0;
}

int cmd_selftest() {
  bool all_ok = true;
  auto report = [&](const std::string& name, bool ok) {
    std::printf("%-52s %s\n", name.c_str(), ok ? "ok" : "FAIL");
    all_ok = all_ok && ok;
  };

  {
    bool ok = true;
    for (uint64_t m = 1; m <= 16 && ok; ++m) {
      for (uint64_t n = 1; n <= 16 && ok; ++n) {
        std::vector<int> seen(m * n, 0);
        for (uint64_t r = 0; r < m * n; ++r) {
          auto [q, d] = split_quotient_remainder(r, m, n);
          ++seen[q * n + d];
        }
        for (int c : seen) ok = ok && c == 1;
      }
    }
    report("quotient/remainder bijection, M,N <= 16", ok);
  }

  for (ScalerVariant v : {ScalerVariant::bbr, ScalerVariant::bbr_faster}) {
    bool ok = true;
    for (uint64_t cap : {8ull, 16ull}) {
      for (uint64_t n : {2ull, 3ull, 5ull, 6ull}) {
        std::vector<uint64_t> single{n};
        auto d = exact_output_distribution(v, cap, single, 40);
        ok = ok && d.residual_mass() < std::ldexp(1.0, -20);
        for (uint64_t val = 0; val < n; ++val)
          ok = ok && std::abs(d.probability({val}) - 1.0 / double(n)) <=
                         d.residual_mass();
        std::vector<uint64_t> pair{n, n};
        auto d2 = exact_output_distribution(v, cap, pair, 40);
        for (uint64_t a = 0; a < n; ++a) {
          double pa = 0;
          for (uint64_t b2 = 0; b2 < n; ++b2) pa += d2.probability({a, b2});
          for (uint64_t b2 = 0; b2 < n; ++b2) {
            double pb = 0;
            for (uint64_t a2 = 0; a2 < n; ++a2) pb += d2.probability({a2, b2});
            ok = ok && std::abs(d2.probability({a, b2}) - pa * pb) <=
                           2 * d2.residual_mass();
          }
        }
      }
    }
    report("exact uniformity + independence oracle, " + to_string(v), ok);
  }

  {
    bool ok = true;
    for (auto members : {std::vector<uint32_t>{0}, {1}, {2}, {0, 1}, {0, 2}, {1, 2}}) {
      EventSet s(3, members);
      ok = ok && verify_factorization_exact(3, s, 6, 0, 0) < 1e-12;
    }
    report("splitting factorization, |E|=3 exact", ok);
  }

  {
    XorshiftEngine rng(1);
    bool ok = true;
    for (int trial = 0; trial < 1000 && ok; ++trial) {
      std::vector<uint32_t> stream(rng.next32() % 48);
      for (auto& x : stream) x = rng.next32() % 3;
      EventSet s(3, {0});
      ok = unsplit(split(stream, s)) == stream;
    }
    report("unsplit-of-split identity", ok);
  }

  {
    Scaler s(ScalerVariant::bbr, BackendKind::xorshift128, 1);
    const uint64_t cycle[] = {2, 3, 52, 1000000, (1ull << 31) + 1};
    for (uint64_t i = 0; i < 1000000; ++i) (void)s.draw(cycle[i % 5]);
    double slack = double(s.counters().bits_consumed) -
                   s.counters().entropy_emitted() - s.state_entropy();
    report("recycling ledger slack in [0, 1) over 1e6 draws",
           slack >= 0.0 && slack < 1.0);
  }

  return all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"uniform random scaling toolkit: rejection and bit-recycling "
               "scalers with entropy ledgers, exact verifiers and benchmarks"};
  app.require_subcommand(1);
  std::function<int()> run;

  CommonFlags flags;

  auto add_common = [&](CLI::App* sub, bool with_variant = true) {
    if (with_variant)
      sub->add_option("--variant", flags.variant,
                      "simple32|simple40|simple48|simple64|bbr|bbr_faster|"
                      "bbr_cheating|simple_recycler|bbr_32");
    sub->add_option("--backend", flags.backend, "xorshift|counter|bbs");
    sub->add_option("--seed", flags.seed, "64-bit seed (default 0)");
    sub->add_flag("--refill32", flags.refill32,
                  "refill the bit buffer from 32-bit words");
  };

  // generate
  {
    auto* sub = app.add_subcommand("generate", "emit uniform values, one per line");
    static uint64_t n = 0, count = 1;
    static std::string n_list;
    add_common(sub);
    auto* n_opt = sub->add_option("--n", n, "modulus: values are uniform in 0..n-1");
    sub->add_option("--count", count, "number of draws (default 1)");
    auto* list_opt =
        sub->add_option("--n-list", n_list, "file with one modulus per draw");
    list_opt->excludes(n_opt);
    sub->callback([&, n_opt, list_opt] {
      if (n_opt->count() == 0 && list_opt->count() == 0)
        throw CLI::ValidationError("generate", "need --n or --n-list");
      run = [&] { return cmd_generate(flags, n, count, n_list); };
    });
  }

  // efficiency
  {
    auto* sub = app.add_subcommand(
        "efficiency", "run draws and print the entropy/failure ledger");
    static uint64_t draws = 1000000;
    static uint64_t n = 0;
    add_common(sub);
    sub->get_option("--variant")
        ->description("scaler variant, or example1|example2 demo simulators");
    sub->add_option("--draws", draws, "accepted draws (default 1e6)");
    auto* n_opt = sub->add_option(
        "--n", n, "fixed modulus (default: cycle 2,3,52,1e6,2^31+1)");
    sub->callback([&, n_opt] {
      run = [&, n_opt] {
        std::optional<uint64_t> fixed;
        if (n_opt->count()) fixed = n;
        return cmd_efficiency(flags, draws, fixed);
      };
    });
  }

  // verify
  {
    auto* sub = app.add_subcommand("verify", "exact and statistical checkers");
    sub->require_subcommand(1);
    auto* uni = sub->add_subcommand("uniformity",
                                    "chi-square + serial-pair test of a variant");
    static uint64_t n = 52, samples = 1000000;
    add_common(uni);
    uni->add_option("--n", n, "modulus under test");
    uni->add_option("--samples", samples, "draws (default 1e6)");
    uni->callback([&] { run = [&] { return cmd_verify_uniformity(flags, n, samples); }; });

    auto* spl = sub->add_subcommand("splitting",
                                    "splitting theorem: exact + statistical table");
    static uint64_t s_samples = 1000000;
    spl->add_option("--seed", flags.seed, "seed for the statistical runs");
    spl->add_option("--samples", s_samples, "statistical sample count");
    spl->callback([&] {
      run = [&] { return cmd_verify_splitting(flags.seed, s_samples); };
    });
  }

  // bench
  {
    auto* sub = app.add_subcommand("bench", "modulus sweep timing of a scaler");
    static uint64_t calls = 1ull << 20;
    static std::string out;
    static bool no_sink = false;
    add_common(sub);
    sub->get_option("--variant")->description("a scaler variant, or 'all'");
    sub->add_option("--calls", calls,
                    "timed calls per modulus (default 2^20; original runs used 2^24)");
    sub->add_option("--out", out, "output directory (also RNGSCALE_OUT)");
    sub->add_flag("--no-sink", no_sink, "do not xor results into the sink");
    sub->callback([&] {
      run = [&] { return cmd_bench(flags, calls, out, no_sink); };
    });
  }

  // arith
  {
    auto* sub = app.add_subcommand("arith", "integer arithmetic kernel timings");
    static std::string kind = "all";
    static uint64_t calls = 1ull << 20;
    static std::string out;
    add_common(sub, /*with_variant=*/false);
    sub->add_option("--kind", kind,
                    "div32|div32_24|div48|div64|mod32|mod32_24|mod48|mod64|"
                    "prod32|prod32_24|prod48|prod64|all");
    sub->add_option("--calls", calls, "timed calls per operand");
    sub->add_option("--out", out, "output directory (also RNGSCALE_OUT)");
    sub->callback([&] {
      run = [&] { return cmd_arith(flags, kind, calls, out); };
    });
  }

  // sweep-list
  {
    auto* sub = app.add_subcommand("sweep-list", "print the benchmark modulus sweep");
    sub->callback([&] { run = [] { return cmd_sweep_list(); }; });
  }

  // selftest
  {
    auto* sub = app.add_subcommand("selftest",
                                   "run the exact oracles and the ledger bound");
    sub->callback([&] { run = [] { return cmd_selftest(); }; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    return run();
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
