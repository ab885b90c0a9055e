#include "aoi/stage_game.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace aoi {

void SlotLengths::validate() const {
  if (!(idle > 0.0) || !(success > 0.0) || !(collision > 0.0)) {
    throw std::invalid_argument("slot lengths must be strictly positive");
  }
  if (!(idle < success) || !(idle < collision)) {
    throw std::invalid_argument(
        "idle slot must be shorter than success and collision slots");
  }
}

AccessRegime access_regime(const SlotLengths& sl) {
  sl.validate();
  return sl.success <= sl.collision ? AccessRegime::ShortSuccess
                                    : AccessRegime::LongSuccess;
}

void check_ages(std::span<const double> ages, const SlotLengths& sl) {
  sl.validate();
  if (ages.size() < 2) {
    throw std::invalid_argument("need at least 2 sources");
  }
  for (std::size_t k = 0; k < ages.size(); ++k) {
    if (!(ages[k] >= sl.success)) {
      throw std::invalid_argument("age of source " + std::to_string(k + 1) +
                                  " is below sigma_s");
    }
  }
}

SlotEvent classify_event(const ActionProfile& profile) {
  int transmitters = 0;
  int last = -1;
  for (std::size_t k = 0; k < profile.size(); ++k) {
    if (profile[k]) {
      ++transmitters;
      last = static_cast<int>(k);
    }
  }
  if (transmitters == 0) return SlotEvent::idle();
  if (transmitters == 1) return SlotEvent::success(last);
  return SlotEvent::collision();
}

double step_age(double age, int source, const SlotEvent& ev,
                const SlotLengths& sl) {
  if (!(age >= sl.success)) {
    throw std::invalid_argument("age below sigma_s");
  }
  switch (ev.kind) {
    case SlotEvent::Kind::Idle:
      return age + sl.idle;
    case SlotEvent::Kind::Collision:
      return age + sl.collision;
    case SlotEvent::Kind::Success:
      return ev.winner == source ? sl.success : age + sl.success;
  }
  throw std::logic_error("unreachable");
}

std::vector<double> stage_payoffs(std::span<const double> ages,
                                  const ActionProfile& profile,
                                  const SlotLengths& sl) {
  check_ages(ages, sl);
  if (profile.size() != ages.size()) {
    throw std::invalid_argument("profile length does not match age vector");
  }
  const SlotEvent ev = classify_event(profile);
  std::vector<double> payoffs(ages.size());
  for (std::size_t k = 0; k < ages.size(); ++k) {
    payoffs[k] = -step_age(ages[k], static_cast<int>(k), ev, sl);
  }
  return payoffs;
}

double minmax_payoff(double age, int n, const SlotLengths& sl) {
  sl.validate();
  if (n < 2) throw std::invalid_argument("need at least 2 sources");
  if (!(age >= sl.success)) throw std::invalid_argument("age below sigma_s");
  if (n == 2 && sl.success <= sl.collision) return -(age + sl.success);
  return -(age + sl.collision);
}

double minmax_payoff_exhaustive(double age, int n, const SlotLengths& sl) {
  sl.validate();
  if (n < 2) throw std::invalid_argument("need at least 2 sources");
  if (!(age >= sl.success)) throw std::invalid_argument("age below sigma_s");

  // Source 0 is the target; by symmetry the result is the same for any k.
  double worst = 0.0;
  bool first = true;
  ActionProfile profile(static_cast<std::size_t>(n), false);
  for (unsigned mask = 0; mask < (1u << (n - 1)); ++mask) {
    for (int j = 1; j < n; ++j) profile[j] = (mask >> (j - 1)) & 1u;
    double best = 0.0;
    bool best_set = false;
    for (bool own : {false, true}) {
      profile[0] = own;
      const double u = -step_age(age, 0, classify_event(profile), sl);
      if (!best_set || u > best) {
        best = u;
        best_set = true;
      }
    }
    if (first || best < worst) {
      worst = best;
      first = false;
    }
  }
  return worst;
}

bool is_individually_rational(std::span<const double> payoffs,
                              std::span<const double> ages,
                              const SlotLengths& sl) {
  check_ages(ages, sl);
  if (payoffs.size() != ages.size()) {
    throw std::invalid_argument("payoff length does not match age vector");
  }
  const int n = static_cast<int>(ages.size());
  for (std::size_t k = 0; k < ages.size(); ++k) {
    if (payoffs[k] < minmax_payoff(ages[k], n, sl) - kPayoffTolerance) {
      return false;
    }
  }
  return true;
}

}  // namespace aoi
