#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "aoi/experiments.hpp"
#include "aoi/lp_oracle.hpp"

namespace {

// Every randomized command is reproducible after the fact: without --seed
// one is drawn from system entropy and announced on stderr.
std::uint64_t resolve_seed(const CLI::Option* opt, std::uint64_t seed) {
  if (opt->count() > 0) return seed;
  std::random_device rd;
  const std::uint64_t drawn =
      (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  std::cerr << "seed " << drawn << " (from system entropy; pass --seed "
            << drawn << " to reproduce)\n";
  return drawn;
}

aoi::SlotLengths resolve_sigma(const std::string& sigma,
                               const std::string& preset) {
  if (!sigma.empty()) return aoi::parse_sigma(sigma);  // flags beat presets
  if (preset == "fig3") return aoi::fig3_slots();
  if (!preset.empty()) throw std::invalid_argument("unknown preset: " + preset);
  throw std::invalid_argument("need --sigma or --preset");
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write output file: " + path);
  out << content;
  out.flush();
  if (!out) throw std::runtime_error("cannot write output file: " + path);
}

int source_index(int one_based, int n) {
  if (one_based < 1 || one_based > n) {
    throw std::invalid_argument("source must be in 1.." + std::to_string(n));
  }
  return one_based - 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "age-of-information spectrum sharing: one-stage correlated-strategy "
      "solver and repeated-game simulator.\nAll durations (sigma, ages) "
      "share one arbitrary time unit."};
  app.require_subcommand(1);
  app.set_config("--config", "",
                 "read flag values from a key=value file "
                 "(command-line flags win)");

  std::string sigma_str, preset, ages_str, strategy = "one-stage-optimal";
  std::string deviation_str, format = "csv", output = "-";
  std::string n_grid = "2:6", alpha_list = "0.1,0.3,0.5,0.7,0.9,0.99";
  std::string age_range;
  bool verify = false;
  int slots = 0, paths = 10000, states = 20, deviator = 1, source = 1;
  double alpha = 0.0;
  std::uint64_t seed = 0;

  CLI::App* optimal = app.add_subcommand(
      "optimal", "closed-form one-stage strategy for one age vector");
  optimal->add_option("--ages", ages_str, "per-source ages, e.g. 3,5")
      ->required();
  optimal->add_option("--sigma", sigma_str,
                      "slot lengths idle,success,collision");
  optimal->add_option("--preset", preset, "slot-length preset: fig3");
  optimal->add_flag("--verify", verify,
                    "cross-check against the exact LP oracle");

  CLI::App* simulate = app.add_subcommand(
      "simulate", "sample one repeated-game path and emit the age trace");
  simulate->add_option("--strategy", strategy,
                       "access-fair | age-fair | one-stage-optimal");
  simulate->add_option("--ages", ages_str, "initial per-source ages")
      ->required();
  simulate->add_option("--sigma", sigma_str,
                       "slot lengths idle,success,collision");
  simulate->add_option("--preset", preset, "slot-length preset: fig3");
  CLI::Option* sim_slots =
      simulate->add_option("--slots", slots, "number of slots to simulate");
  sim_slots->required();
  CLI::Option* sim_seed = simulate->add_option("--seed", seed, "RNG seed");
  simulate->add_option("--deviation", deviation_str,
                       "one-shot deviation in slot 0: idle-when-transmit | "
                       "transmit-when-idle");
  simulate->add_option("--deviator", deviator,
                       "deviating source (1-based, with --deviation)");
  simulate->add_option("--format", format, "csv | json")
      ->check(CLI::IsMember({"csv", "json"}));
  simulate->add_option("--output", output, "output file, or - for stdout");

  CLI::App* payoff = app.add_subcommand(
      "payoff",
      "cooperate vs. one-shot-deviation discounted payoffs at one state");
  payoff->add_option("--strategy", strategy,
                     "access-fair | age-fair | one-stage-optimal");
  payoff->add_option("--ages", ages_str, "initial per-source ages")
      ->required();
  payoff->add_option("--sigma", sigma_str,
                     "slot lengths idle,success,collision");
  payoff->add_option("--preset", preset, "slot-length preset: fig3");
  payoff->add_option("--alpha", alpha, "discount factor in [0,1)")
      ->required();
  payoff->add_option("--paths", paths, "Monte Carlo sample paths");
  CLI::Option* pay_slots = payoff->add_option(
      "--slots", slots,
      "slots per path (default: the horizon that bounds the tail by 1e-10)");
  CLI::Option* pay_seed = payoff->add_option("--seed", seed, "RNG seed");
  payoff->add_option("--source", source, "payoff of which source (1-based)");
  payoff->add_option("--format", format, "csv | json")
      ->check(CLI::IsMember({"csv", "json"}));
  payoff->add_option("--output", output, "output file, or - for stdout");

  CLI::App* scan = app.add_subcommand(
      "spne-scan", "SPNE verdict per (n, alpha) grid cell");
  scan->add_option("--sigma", sigma_str,
                   "slot lengths idle,success,collision");
  scan->add_option("--preset", preset, "slot-length preset: fig3");
  scan->add_option("--strategy", strategy,
                   "rule to test (default one-stage-optimal)");
  scan->add_option("--n", n_grid, "source counts, range 2:6 or list 2,4,6");
  scan->add_option("--alpha", alpha_list, "discount factors, comma list");
  scan->add_option("--states", states, "sampled initial states per cell");
  scan->add_option("--paths", paths, "Monte Carlo paths per state and arm");
  CLI::Option* scan_slots =
      scan->add_option("--slots", slots, "slots per path");
  CLI::Option* scan_seed = scan->add_option("--seed", seed, "RNG seed");
  scan->add_option("--age-range", age_range,
                   "initial-age range lo:hi (default per cell: n:3n)");
  scan->add_option("--format", format, "csv | json")
      ->check(CLI::IsMember({"csv", "json"}));
  scan->add_option("--output", output, "output file, or - for stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    if (optimal->parsed()) {
      const aoi::SlotLengths sl = resolve_sigma(sigma_str, preset);
      const std::vector<double> ages = aoi::parse_double_list(ages_str);
      const aoi::OptimalSolution sol = aoi::one_stage_optimal(ages, sl);
      std::cout << "case " << aoi::to_string(sol.case_tag) << '\n';
      for (std::size_t k = 0; k < sol.vector.success.size(); ++k) {
        std::cout << "p_" << k + 1 << ' '
                  << aoi::fmt_g17(sol.vector.success[k]) << '\n';
      }
      std::cout << "p_idle " << aoi::fmt_g17(sol.vector.idle) << '\n';
      std::cout << "p_collision " << aoi::fmt_g17(sol.vector.collision)
                << '\n';
      std::cout << "objective " << aoi::fmt_g17(sol.objective) << '\n';
      if (verify) {
        const aoi::LpSolution lp = aoi::solve_exact({ages, sl});
        std::cout << "oracle_objective " << aoi::fmt_g17(lp.objective)
                  << '\n';
        std::cout << "oracle_gap "
                  << aoi::fmt_g17(std::abs(lp.objective - sol.objective))
                  << '\n';
        std::cout << "oracle_collision_mass "
                  << aoi::fmt_g17(lp.vector.collision) << '\n';
      }
      return 0;
    }

    if (simulate->parsed()) {
      const aoi::SlotLengths sl = resolve_sigma(sigma_str, preset);
      const std::vector<double> ages = aoi::parse_double_list(ages_str);
      const aoi::GameConfig cfg{static_cast<int>(ages.size()), sl, 0.0};
      std::optional<aoi::DeviationSpec> dev;
      if (!deviation_str.empty()) {
        dev = aoi::DeviationSpec{
            source_index(deviator, cfg.n),
            aoi::deviation_from_string(deviation_str)};
      }
      const std::uint64_t run_seed = resolve_seed(sim_seed, seed);
      const aoi::PathTrace trace =
          aoi::simulate_path(aoi::strategy_from_string(strategy), ages, cfg,
                             slots, run_seed, dev);
      const aoi::TraceReport rep = aoi::trace_report(trace);
      write_output(output, format == "json" ? aoi::trace_to_json(rep)
                                            : aoi::trace_to_csv(rep));
      return 0;
    }

    if (payoff->parsed()) {
      const aoi::SlotLengths sl = resolve_sigma(sigma_str, preset);
      const std::vector<double> ages = aoi::parse_double_list(ages_str);
      const aoi::GameConfig cfg{static_cast<int>(ages.size()), sl, alpha};
      if (pay_slots->count() == 0) {
        const double worst = *std::max_element(ages.begin(), ages.end());
        slots = aoi::truncation_horizon(alpha, worst, sl);
      }
      const std::uint64_t run_seed = resolve_seed(pay_seed, seed);
      const auto t0 = std::chrono::steady_clock::now();
      const aoi::PayoffReport rep = aoi::payoff_report(
          aoi::strategy_from_string(strategy), source_index(source, cfg.n),
          ages, cfg, paths, slots, run_seed);
      const std::chrono::duration<double> dt =
          std::chrono::steady_clock::now() - t0;
      write_output(output, format == "json" ? aoi::payoff_to_json(rep)
                                            : aoi::payoff_to_csv(rep));
      std::cerr << "payoff: " << paths << " paths x " << slots << " slots, "
                << dt.count() << " s\n";
      return 0;
    }

    if (scan->parsed()) {
      aoi::ScanConfig sc;
      sc.sl = resolve_sigma(sigma_str, preset);
      sc.rule = aoi::strategy_from_string(strategy);
      sc.ns = aoi::parse_int_grid(n_grid);
      sc.alphas = aoi::parse_double_list(alpha_list);
      sc.num_states = states;
      sc.paths = paths;
      if (scan_slots->count() > 0) sc.slots = slots;
      if (!age_range.empty()) {
        const auto [lo, hi] = aoi::parse_range(age_range);
        sc.age_lo = lo;
        sc.age_hi = hi;
      }
      sc.seed = resolve_seed(scan_seed, seed);
      const auto t0 = std::chrono::steady_clock::now();
      const aoi::RegionScanResult result = aoi::run_region_scan(sc, &std::cerr);
      const std::chrono::duration<double> dt =
          std::chrono::steady_clock::now() - t0;
      write_output(output, format == "json" ? aoi::scan_to_json(result)
                                            : aoi::scan_to_csv(result));
      std::cerr << "scan: " << result.rows.size() << " cells, " << dt.count()
                << " s\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
