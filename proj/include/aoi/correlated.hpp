#pragma once

#include <span>
#include <vector>

#include "aoi/stage_game.hpp"

namespace aoi {

// Correlated strategy for one slot: p_k is the probability that exactly
// source k transmits, plus the idle and collision probabilities. Entries
// sum to 1.
struct ProbabilityVector {
  std::vector<double> success;  // p_1 .. p_n
  double idle = 0.0;            // p_I
  double collision = 0.0;       // p_C

  int n() const { return static_cast<int>(success.size()); }
  void validate() const;  // entries in [0,1], total mass 1 within 1e-9
};

enum class OptimalCase {
  AllIdle,              // every age below n(sigma_S - sigma_I): p_I = 1
  MaxAgeDeterministic,  // sigma_S <= sigma_C: max-age source transmits w.p. 1
  MixedCase1,           // sigma_S > sigma_C, harmonic mean above threshold
  IdleMixCase2,         // sigma_S > sigma_C, harmonic mean below threshold
};

struct OptimalSolution {
  ProbabilityVector vector;
  OptimalCase case_tag = OptimalCase::AllIdle;
  double objective = 0.0;  // sum of expected payoffs under `vector`
};

const char* to_string(OptimalCase c);

// U_k(p) = -( p_k sigma_S + sum_{j != k} p_j (D_k + sigma_S)
//             + p_I (D_k + sigma_I) + p_C (D_k + sigma_C) )
std::vector<double> expected_payoffs(const ProbabilityVector& p,
                                     std::span<const double> ages,
                                     const SlotLengths& sl);

// every source transmits with probability 1/n, no idling or collisions
ProbabilityVector access_fair_vector(int n);

// the source with the maximum age transmits with probability 1
// (ties broken toward the lowest index)
ProbabilityVector age_fair_vector(std::span<const double> ages);

int argmax_age(std::span<const double> ages);

// true iff the expected payoffs under p are individually rational
bool is_feasible(const ProbabilityVector& p, std::span<const double> ages,
                 const SlotLengths& sl);

// n / sum_k (1 / ages_k); reciprocal form avoids overflowing the product
// of ages for large n
double harmonic_mean(std::span<const double> ages);

// Closed-form solution of the one-stage problem: maximize the sum of
// expected payoffs over individually rational probability vectors.
// Dispatch order:
//   (a) every age < n(sigma_S - sigma_I)        -> all idle
//   (b) sigma_S <= sigma_C                      -> age-fair
//   (c) harmonic mean >= n(sigma_S - sigma_I)   -> p_k = (sS - sC)/age_k for
//       non-max sources, remainder to the max-age source
//   (d) otherwise                               -> p_I = (sS - sC)/(sS - sI),
//       remainder to the max-age source
// The result always has p_C = 0 and is verified feasible before returning;
// an infeasible result throws std::logic_error.
OptimalSolution one_stage_optimal(std::span<const double> ages,
                                  const SlotLengths& sl);

namespace detail {
// Unchecked dispatch used by both one_stage_optimal and the per-slot
// simulator. Writes p_1..p_n into out_success (preallocated to n) and the
// idle mass into out_idle; collision mass is always zero. Inputs must
// already satisfy the age-vector and slot-length invariants.
OptimalCase fill_one_stage_optimal(std::span<const double> ages,
                                   const SlotLengths& sl,
                                   std::span<double> out_success,
                                   double& out_idle);
}  // namespace detail

}  // namespace aoi
