#include "aoi/correlated.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace aoi {

void ProbabilityVector::validate() const {
  double total = 0.0;
  for (double p : success) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw std::invalid_argument("success probability outside [0,1]");
    }
    total += p;
  }
  if (!(idle >= 0.0 && idle <= 1.0)) {
    throw std::invalid_argument("idle probability outside [0,1]");
  }
  if (!(collision >= 0.0 && collision <= 1.0)) {
    throw std::invalid_argument("collision probability outside [0,1]");
  }
  total += idle + collision;
  if (std::abs(total - 1.0) > 1e-9) {
    throw std::invalid_argument("probabilities do not sum to 1");
  }
}

const char* to_string(OptimalCase c) {
  switch (c) {
    case OptimalCase::AllIdle:
      return "AllIdle";
    case OptimalCase::MaxAgeDeterministic:
      return "MaxAgeDeterministic";
    case OptimalCase::MixedCase1:
      return "MixedCase1";
    case OptimalCase::IdleMixCase2:
      return "IdleMixCase2";
  }
  return "?";
}

std::vector<double> expected_payoffs(const ProbabilityVector& p,
                                     std::span<const double> ages,
                                     const SlotLengths& sl) {
  if (p.success.size() != ages.size()) {
    throw std::invalid_argument(
        "probability vector length does not match age vector");
  }
  const std::size_t n = ages.size();
  std::vector<double> payoffs(n);
  for (std::size_t k = 0; k < n; ++k) {
    double expected_age = p.success[k] * sl.success;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != k) expected_age += p.success[j] * (ages[k] + sl.success);
    }
    expected_age += p.idle * (ages[k] + sl.idle);
    expected_age += p.collision * (ages[k] + sl.collision);
    payoffs[k] = -expected_age;
  }
  return payoffs;
}

ProbabilityVector access_fair_vector(int n) {
  if (n < 2) throw std::invalid_argument("need at least 2 sources");
  ProbabilityVector p;
  p.success.assign(static_cast<std::size_t>(n), 1.0 / n);
  return p;
}

int argmax_age(std::span<const double> ages) {
  if (ages.empty()) throw std::invalid_argument("empty age vector");
  int best = 0;
  for (int k = 1; k < static_cast<int>(ages.size()); ++k) {
    if (ages[k] > ages[best]) best = k;
  }
  return best;
}

ProbabilityVector age_fair_vector(std::span<const double> ages) {
  if (ages.size() < 2) throw std::invalid_argument("need at least 2 sources");
  ProbabilityVector p;
  p.success.assign(ages.size(), 0.0);
  p.success[static_cast<std::size_t>(argmax_age(ages))] = 1.0;
  return p;
}

bool is_feasible(const ProbabilityVector& p, std::span<const double> ages,
                 const SlotLengths& sl) {
  return is_individually_rational(expected_payoffs(p, ages, sl), ages, sl);
}

double harmonic_mean(std::span<const double> ages) {
  if (ages.empty()) throw std::invalid_argument("empty age vector");
  double recip_sum = 0.0;
  for (double a : ages) {
    if (!(a > 0.0)) throw std::invalid_argument("ages must be positive");
    recip_sum += 1.0 / a;
  }
  return static_cast<double>(ages.size()) / recip_sum;
}

namespace detail {

OptimalCase fill_one_stage_optimal(std::span<const double> ages,
                                   const SlotLengths& sl,
                                   std::span<double> out_success,
                                   double& out_idle) {
  const int n = static_cast<int>(ages.size());
  const double idle_threshold = n * (sl.success - sl.idle);
  out_idle = 0.0;
  for (int k = 0; k < n; ++k) out_success[k] = 0.0;

  bool all_below = true;
  for (double a : ages) {
    if (a >= idle_threshold) {
      all_below = false;
      break;
    }
  }
  if (all_below) {
    out_idle = 1.0;
    return OptimalCase::AllIdle;
  }

  const int j = argmax_age(ages);
  if (sl.success <= sl.collision) {
    out_success[j] = 1.0;
    return OptimalCase::MaxAgeDeterministic;
  }

  // sigma_S > sigma_C from here on. One reciprocal pass, staged into
  // out_success, serves both the harmonic-mean test
  // (n / recip_sum >= threshold  <=>  n >= threshold * recip_sum) and the
  // Case-1 probabilities, which only rescale the reciprocals.
  double recip_sum = 0.0;
  for (int k = 0; k < n; ++k) {
    out_success[k] = 1.0 / ages[k];
    recip_sum += out_success[k];
  }
  if (static_cast<double>(n) >= idle_threshold * recip_sum) {
    double rest = 0.0;
    const double excess = sl.success - sl.collision;
    for (int k = 0; k < n; ++k) {
      if (k == j) continue;
      out_success[k] *= excess;
      rest += out_success[k];
    }
    out_success[j] = 1.0 - rest;
    return OptimalCase::MixedCase1;
  }

  for (int k = 0; k < n; ++k) out_success[k] = 0.0;
  out_idle = (sl.success - sl.collision) / (sl.success - sl.idle);
  out_success[j] = 1.0 - out_idle;
  return OptimalCase::IdleMixCase2;
}

}  // namespace detail

OptimalSolution one_stage_optimal(std::span<const double> ages,
                                  const SlotLengths& sl) {
  check_ages(ages, sl);
  OptimalSolution sol;
  sol.vector.success.assign(ages.size(), 0.0);
  sol.case_tag = detail::fill_one_stage_optimal(ages, sl, sol.vector.success,
                                                sol.vector.idle);

  for (double p : sol.vector.success) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw std::logic_error(
          "one-stage optimal produced a probability outside [0,1]; "
          "the closed forms do not cover this instance");
    }
  }
  sol.vector.validate();
  if (!is_feasible(sol.vector, ages, sl)) {
    throw std::logic_error(
        "one-stage optimal produced an infeasible vector; "
        "the closed forms do not cover this instance");
  }

  const std::vector<double> payoffs = expected_payoffs(sol.vector, ages, sl);
  sol.objective = std::accumulate(payoffs.begin(), payoffs.end(), 0.0);
  return sol;
}

}  // namespace aoi
