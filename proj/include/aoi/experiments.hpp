#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "aoi/repeated_game.hpp"

namespace aoi {

// sigma = (beta, 1 + beta, 0.1 * (1 + beta)) with beta = 0.01; the
// idle/success ratio matches 802.11ac-style access, and success is ten
// times the collision slot (RTS/CTS-style early abort).
SlotLengths fig3_slots();

struct ScanConfig {
  std::vector<int> ns;          // grid of source counts
  std::vector<double> alphas;   // grid of discount factors
  SlotLengths sl;
  StrategyRule rule = StrategyRule::OneStageOptimal;
  int num_states = 20;
  int paths = 2000;
  int slots = 2000;
  double age_lo = 0.0;  // both zero: per-cell default range [n, 3n]
  double age_hi = 0.0;
  std::uint64_t seed = 0;
  void validate() const;
};

struct RegionScanRow {
  int n = 0;
  double alpha = 0.0;
  SpneVerdict verdict = SpneVerdict::Spne;
  double min_gap = 0.0;        // worst cooperate-minus-best-deviation gap
  double max_std_error = 0.0;  // largest combined std error over states
  // Measured per cell and reported on the progress stream only; never
  // serialized, so equal-seed runs stay byte-identical.
  double wall_seconds = 0.0;

  bool operator==(const RegionScanRow&) const = default;
};

struct RegionScanResult {
  std::vector<RegionScanRow> rows;
  bool operator==(const RegionScanResult&) const = default;
};

// One spne_verdict_mc call per (n, alpha) cell in grid order (n outer,
// alpha inner), each cell on its own seed substream so the grid shape does
// not shift cell results. Cells settled analytically report zero gap and
// zero std error. `progress`, when given, receives one line per cell.
RegionScanResult run_region_scan(const ScanConfig& cfg,
                                 std::ostream* progress = nullptr);

// Cooperate vs. both one-shot deviations for one source, common random
// numbers across the three arms; `analytic` holds the closed-form value
// under the access-fair rule and is absent otherwise.
struct PayoffArm {
  std::string arm;  // cooperate | idle-when-transmit | transmit-when-idle
  double mean = 0.0;
  double std_error = 0.0;
  double gap = 0.0;  // cooperate mean minus this arm's mean
  std::optional<double> analytic;

  bool operator==(const PayoffArm&) const = default;
};

struct PayoffReport {
  std::vector<PayoffArm> arms;
  bool operator==(const PayoffReport&) const = default;
};

PayoffReport payoff_report(StrategyRule rule, int source,
                           std::span<const double> ages0,
                           const GameConfig& cfg, int paths, int slots,
                           std::uint64_t seed);

struct TraceRow {
  int t = 0;
  SlotEvent event;
  std::vector<double> ages;

  bool operator==(const TraceRow&) const = default;
};

struct TraceReport {
  std::vector<TraceRow> rows;
  bool operator==(const TraceReport&) const = default;
};

TraceReport trace_report(const PathTrace& trace);

// ---- serialization ----
// CSV carries a header row; JSON is an array of row objects. All numbers
// are written with 17 significant digits, so parsing a written file
// reproduces the values bit for bit.

std::string fmt_g17(double v);

// "idle", "collision", or "success(k)" with a 1-based winner
std::string event_label(const SlotEvent& ev);
SlotEvent event_from_label(const std::string& label);

std::string scan_to_csv(const RegionScanResult& result);
std::string scan_to_json(const RegionScanResult& result);
RegionScanResult scan_from_csv(const std::string& text);
RegionScanResult scan_from_json(const std::string& text);

std::string payoff_to_csv(const PayoffReport& report);
std::string payoff_to_json(const PayoffReport& report);
PayoffReport payoff_from_csv(const std::string& text);
PayoffReport payoff_from_json(const std::string& text);

std::string trace_to_csv(const TraceReport& report);
std::string trace_to_json(const TraceReport& report);
TraceReport trace_from_csv(const std::string& text);
TraceReport trace_from_json(const std::string& text);

// ---- flag-value parsing ----

std::vector<double> parse_double_list(const std::string& text);  // "0.1,0.5"
std::vector<int> parse_int_grid(const std::string& text);  // "2:6" or "2,4,6"
SlotLengths parse_sigma(const std::string& text);          // "0.01,1.01,0.101"
std::pair<double, double> parse_range(const std::string& text);  // "lo:hi"

}  // namespace aoi
