#pragma once

#include <span>
#include <vector>

namespace aoi {

// Tolerance for payoff comparisons; all payoffs are O(n * sigma) sums of a
// few terms, so this leaves plenty of headroom above double rounding.
inline constexpr double kPayoffTolerance = 1e-9;

// Durations of the three slot types.
struct SlotLengths {
  double idle = 0.0;       // sigma_I
  double success = 0.0;    // sigma_S
  double collision = 0.0;  // sigma_C

  // throws std::invalid_argument unless all positive and idle is strictly
  // the shortest of the three
  void validate() const;
};

// ShortSuccess: sigma_S <= sigma_C (e.g. 802.11 basic access).
// LongSuccess:  sigma_S >  sigma_C (e.g. RTS/CTS).
enum class AccessRegime { ShortSuccess, LongSuccess };

AccessRegime access_regime(const SlotLengths& sl);

// true = transmit, false = idle
using ActionProfile = std::vector<bool>;

struct SlotEvent {
  enum class Kind { Idle, Collision, Success };
  Kind kind = Kind::Idle;
  int winner = -1;  // source index, only meaningful for Success

  static SlotEvent idle() { return {Kind::Idle, -1}; }
  static SlotEvent collision() { return {Kind::Collision, -1}; }
  static SlotEvent success(int source) { return {Kind::Success, source}; }
  bool operator==(const SlotEvent&) const = default;
};

// Validates an age vector: n >= 2 and every entry >= sigma_S (ages are only
// ever reset to sigma_S, never below it). Throws std::invalid_argument.
void check_ages(std::span<const double> ages, const SlotLengths& sl);

SlotEvent classify_event(const ActionProfile& profile);

// Age of `source` at the end of a slot with event `ev`:
//   idle slot        -> age + sigma_I
//   collision slot   -> age + sigma_C
//   other's success  -> age + sigma_S
//   own success      -> sigma_S
double step_age(double age, int source, const SlotEvent& ev,
                const SlotLengths& sl);

// Payoff of source k is minus its age at the end of the slot.
std::vector<double> stage_payoffs(std::span<const double> ages,
                                  const ActionProfile& profile,
                                  const SlotLengths& sl);

// Worst payoff the other sources can force on a best-responding source with
// age `age`. Closed form: -(age + sigma_S) for n = 2 with sigma_S <= sigma_C,
// -(age + sigma_C) otherwise.
double minmax_payoff(double age, int n, const SlotLengths& sl);

// Reference path for the minmax: enumerate all 2^(n-1) opponent profiles,
// best-respond to each, take the minimum.
double minmax_payoff_exhaustive(double age, int n, const SlotLengths& sl);

// true iff payoffs[k] >= minmax(ages[k]) - kPayoffTolerance for every k
bool is_individually_rational(std::span<const double> payoffs,
                              std::span<const double> ages,
                              const SlotLengths& sl);

}  // namespace aoi
