#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aoi/correlated.hpp"
#include "aoi/rng.hpp"
#include "aoi/stage_game.hpp"

namespace aoi {

struct GameConfig {
  int n = 2;
  SlotLengths sl;
  double alpha = 0.0;  // discount factor, 0 <= alpha < 1
  void validate() const;
};

// State-to-recommendation rules for the repeated game. AccessFair and
// AgeFair ignore the discount factor; OneStageOptimal re-solves the stage
// problem at the current ages every slot.
enum class StrategyRule { AccessFair, AgeFair, OneStageOptimal };

const char* to_string(StrategyRule rule);
StrategyRule strategy_from_string(const std::string& name);

enum class DeviationKind { IdleWhenTransmit, TransmitWhenIdle };

const char* to_string(DeviationKind kind);
DeviationKind deviation_from_string(const std::string& name);

// A one-shot deviation: `source` flips its slot-0 action relative to the
// realized recommendation and follows the rule from slot 1 on.
struct DeviationSpec {
  int source = 0;
  DeviationKind kind = DeviationKind::IdleWhenTransmit;
};

struct AgePmf {
  struct Entry {
    double age;
    double prob;
  };
  std::vector<Entry> support;
  double total_mass() const;
  double mean() const;  // accumulated in support order
};

// Distribution of one source's age after `t` slots of access-fair play,
// starting from age delta0: mass (n-1)^(m-1)/n^m at m*sigma_s for m = 1..t
// and the never-succeeded remainder ((n-1)/n)^t at delta0 + t*sigma_s.
AgePmf access_fair_age_pmf(int t, double delta0, const GameConfig& cfg);

// Mean of the PMF above, with the same recurrence and accumulation order,
// so it equals AgePmf::mean() bit for bit.
double access_fair_expected_age(int t, double delta0, const GameConfig& cfg);

// Smallest horizon T whose discounted tail is provably below 1e-10:
// T = ceil(ln(eps*(1-alpha)/B) / ln(alpha)) with the age growth bound
// B = delta0 + T*sigma_s*(1 + 1/(1-alpha)), solved by fixpoint iteration.
int truncation_horizon(double alpha, double delta0, const SlotLengths& sl);

// -(1-alpha) * sum_{t>=1} alpha^(t-1) E[age after slot t], summed to the
// truncation horizon. Exact to ~1e-10 for alpha <= 0.99.
double discounted_payoff_access_fair(double delta0, const GameConfig& cfg);

// Discounted payoffs of one source around slot 0 of access-fair play:
// conditioning on the slot-0 recommendation, cooperate vs. each one-shot
// deviation, all via the analytic payoff above.
struct DeviationValues {
  double cooperate;
  double idle_when_transmit;
  double transmit_when_idle;
};
DeviationValues access_fair_deviation_values(double delta0,
                                             const GameConfig& cfg);

struct PathTrace {
  std::vector<SlotEvent> events;          // events[t] for slot t
  std::vector<std::vector<double>> ages;  // ages[t] = state after slot t
};

// One sample path of `slots` slots. The deviation, if any, applies in
// slot 0 only: the deviator flips its action relative to the realized
// recommendation and the event is re-classified from the resulting profile.
PathTrace simulate_path(StrategyRule rule, std::span<const double> ages0,
                        const GameConfig& cfg, int slots, std::uint64_t seed,
                        std::optional<DeviationSpec> deviation = {});

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  int paths = 0;
  int slots_per_path = 0;
  std::uint64_t seed = 0;
};

// Monte Carlo estimate of -(1-alpha) * sum_{t=1}^{slots} alpha^(t-1) *
// age_k(t). Path p draws from substream_seed(seed, p), and the reduction
// runs in path order, so the estimate is bit-identical for any `threads`.
McEstimate mc_discounted_payoff(StrategyRule rule, int source,
                                std::span<const double> ages0,
                                const GameConfig& cfg, int paths, int slots,
                                std::uint64_t seed,
                                std::optional<DeviationSpec> deviation = {},
                                int threads = 1);

enum class SpneVerdict { Spne, NotSpne };

const char* to_string(SpneVerdict verdict);
SpneVerdict verdict_from_string(const std::string& name);

// A state in which the strategy pays some source less than its minmax.
struct IrWitness {
  std::vector<double> ages;
  int source = 0;
  double payoff = 0.0;
  double minmax = 0.0;
};

struct SpneReport {
  SpneVerdict verdict = SpneVerdict::Spne;
  std::optional<IrWitness> witness;  // present iff NotSpne
};

// Equilibrium verdict for AccessFair / AgeFair from the regime alone:
// sigma_s <= sigma_c is an SPNE for every alpha; sigma_s > sigma_c is not,
// and the returned witness is re-checked against the minmax before being
// returned. Throws for OneStageOptimal (use spne_verdict_mc), and for
// AccessFair configs with n*(sigma_s - sigma_c) <= sigma_s, where no valid
// age lies below the individual-rationality threshold.
SpneReport spne_verdict_analytic(StrategyRule rule, const GameConfig& cfg);

struct McStateCheck {
  std::vector<double> ages;
  McEstimate cooperate;
  McEstimate idle_when_transmit;
  McEstimate transmit_when_idle;
  double gap = 0.0;          // cooperate mean - best deviation mean
  double combined_se = 0.0;  // se of that comparison
  bool holds = false;        // gap >= -2 * combined_se
};

struct McSpneReport {
  SpneVerdict verdict = SpneVerdict::Spne;
  std::vector<McStateCheck> checks;  // empty when settled analytically
};

// One-shot-deviation test at sampled states: `num_states` age vectors with
// entries uniform in [age_lo, age_hi], deviator fixed to source 0, both
// deviation kinds estimated with the same per-path substreams as the
// cooperate arm (common random numbers). SPNE iff the cooperate estimate
// is within two combined standard errors of the best deviation at every
// sampled state. sigma_s <= sigma_c settles analytically without sampling
// (the one-stage-optimal rule reduces to age-fair there).
McSpneReport spne_verdict_mc(StrategyRule rule, const GameConfig& cfg,
                             int num_states, double age_lo, double age_hi,
                             int paths, int slots, std::uint64_t seed);

}  // namespace aoi
