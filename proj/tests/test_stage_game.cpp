#include <cmath>
#include <stdexcept>
#include <vector>

#include "aoi/rng.hpp"
#include "aoi/stage_game.hpp"
#include "doctest.h"

namespace {

using namespace aoi;

// Random slot lengths with the requested success/collision ordering and a
// strictly shortest idle slot.
SlotLengths random_slots(Xoshiro256& rng, bool short_success) {
  const double ss = rng.uniform(0.5, 2.0);
  const double sc = short_success ? ss * rng.uniform(1.0, 2.0)
                                  : ss * rng.uniform(0.05, 0.95);
  const double si = std::min(ss, sc) * rng.uniform(0.05, 0.5);
  return {si, ss, sc};
}

}  // namespace

TEST_CASE("slot lengths validate positivity and the idle ordering") {
  CHECK_NOTHROW((SlotLengths{0.1, 1.0, 1.5}.validate()));
  const SlotLengths zero_idle{0.0, 1.0, 1.5};
  CHECK_THROWS_WITH_AS(zero_idle.validate(),
                       "slot lengths must be strictly positive",
                       std::invalid_argument);
  const SlotLengths negative_success{0.1, -1.0, 1.5};
  CHECK_THROWS_AS(negative_success.validate(), std::invalid_argument);
  const SlotLengths idle_matches_success{1.0, 1.0, 1.5};
  CHECK_THROWS_WITH_AS(
      idle_matches_success.validate(),
      "idle slot must be shorter than success and collision slots",
      std::invalid_argument);
  const SlotLengths idle_above_collision{0.5, 1.0, 0.4};
  CHECK_THROWS_AS(idle_above_collision.validate(), std::invalid_argument);
}

TEST_CASE("the access regime splits on success vs collision length") {
  CHECK(access_regime({0.1, 1.0, 1.5}) == AccessRegime::ShortSuccess);
  CHECK(access_regime({0.1, 1.0, 1.0}) == AccessRegime::ShortSuccess);  // tie
  CHECK(access_regime({0.01, 1.01, 0.101}) == AccessRegime::LongSuccess);
}

TEST_CASE("age vectors need two sources and entries at or above sigma_s") {
  const SlotLengths sl{0.1, 1.0, 1.5};
  const std::vector<double> ok{3.0, 5.0};
  CHECK_NOTHROW(check_ages(ok, sl));
  const std::vector<double> boundary{1.0, 1.0};
  CHECK_NOTHROW(check_ages(boundary, sl));
  const std::vector<double> solo{3.0};
  CHECK_THROWS_WITH_AS(check_ages(solo, sl), "need at least 2 sources",
                       std::invalid_argument);
  const std::vector<double> low{0.5, 5.0};
  CHECK_THROWS_WITH_AS(check_ages(low, sl), "age of source 1 is below sigma_s",
                       std::invalid_argument);
}

TEST_CASE("action profiles classify into idle, success, and collision") {
  CHECK(classify_event({false, false}) == SlotEvent::idle());
  CHECK(classify_event({true, true, false}) == SlotEvent::collision());
  CHECK(classify_event({false, true, false}) == SlotEvent::success(1));
  CHECK(classify_event({true}) == SlotEvent::success(0));
}

TEST_CASE("ages grow by the realized slot length and reset on own success") {
  const SlotLengths sl{0.01, 1.01, 0.101};
  CHECK(step_age(5.0, 0, SlotEvent::collision(), sl) ==
        doctest::Approx(5.101).epsilon(1e-12));
  CHECK(step_age(5.0, 0, SlotEvent::success(0), sl) == 1.01);
  CHECK(step_age(5.0, 0, SlotEvent::success(1), sl) ==
        doctest::Approx(6.01).epsilon(1e-12));
  CHECK(step_age(5.0, 0, SlotEvent::idle(), sl) ==
        doctest::Approx(5.01).epsilon(1e-12));
  CHECK_THROWS_WITH_AS(step_age(0.5, 0, SlotEvent::idle(), sl),
                       "age below sigma_s", std::invalid_argument);
}

TEST_CASE("stepped ages never fall below sigma_s") {
  Xoshiro256 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const SlotLengths sl = random_slots(rng, trial % 2 == 0);
    const double age = rng.uniform(sl.success, 10.0 * sl.success);
    for (const SlotEvent& ev : {SlotEvent::idle(), SlotEvent::collision(),
                                SlotEvent::success(0), SlotEvent::success(1)}) {
      const double next = step_age(age, 0, ev, sl);
      CHECK(next >= sl.success);
      // the reset is the only way to touch the floor
      CHECK((next == sl.success) ==
            (ev.kind == SlotEvent::Kind::Success && ev.winner == 0));
    }
  }
}

TEST_CASE("the two-source payoff matrix") {
  const SlotLengths sl{0.1, 1.0, 1.5};
  const std::vector<double> ages{3.0, 5.0};
  const auto tt = stage_payoffs(ages, {true, true}, sl);
  CHECK(tt[0] == doctest::Approx(-4.5).epsilon(1e-12));
  CHECK(tt[1] == doctest::Approx(-6.5).epsilon(1e-12));
  const auto tf = stage_payoffs(ages, {true, false}, sl);
  CHECK(tf[0] == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(tf[1] == doctest::Approx(-6.0).epsilon(1e-12));
  const auto ff = stage_payoffs(ages, {false, false}, sl);
  CHECK(ff[0] == doctest::Approx(-3.1).epsilon(1e-12));
  CHECK(ff[1] == doctest::Approx(-5.1).epsilon(1e-12));
  CHECK_THROWS_WITH_AS(stage_payoffs(ages, {true, true, true}, sl),
                       "profile length does not match age vector",
                       std::invalid_argument);
}

TEST_CASE("two-source payoffs match the closed-form matrix symbolically") {
  Xoshiro256 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const SlotLengths sl = random_slots(rng, trial % 2 == 0);
    const std::vector<double> ages{rng.uniform(sl.success, 9.0),
                                   rng.uniform(sl.success, 9.0)};
    const auto tt = stage_payoffs(ages, {true, true}, sl);
    CHECK(tt[0] == -(ages[0] + sl.collision));
    CHECK(tt[1] == -(ages[1] + sl.collision));
    const auto tf = stage_payoffs(ages, {true, false}, sl);
    CHECK(tf[0] == -sl.success);
    CHECK(tf[1] == -(ages[1] + sl.success));
    const auto ft = stage_payoffs(ages, {false, true}, sl);
    CHECK(ft[0] == -(ages[0] + sl.success));
    CHECK(ft[1] == -sl.success);
    const auto ff = stage_payoffs(ages, {false, false}, sl);
    CHECK(ff[0] == -(ages[0] + sl.idle));
    CHECK(ff[1] == -(ages[1] + sl.idle));
  }
}

TEST_CASE("payoffs agree with per-source age stepping on every profile") {
  Xoshiro256 rng(13);
  for (int n = 2; n <= 5; ++n) {
    const SlotLengths sl = random_slots(rng, n % 2 == 0);
    std::vector<double> ages(n);
    for (double& a : ages) a = rng.uniform(sl.success, 10.0 * sl.success);
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
      ActionProfile profile(n);
      for (int k = 0; k < n; ++k) profile[k] = (mask >> k) & 1u;
      const SlotEvent ev = classify_event(profile);
      const auto payoffs = stage_payoffs(ages, profile, sl);
      for (int k = 0; k < n; ++k) {
        CHECK(payoffs[k] == -step_age(ages[k], k, ev, sl));
      }
    }
  }
}

TEST_CASE("the minmax closed form") {
  CHECK(minmax_payoff(5.0, 2, {0.1, 1.0, 1.5}) ==
        doctest::Approx(-6.0).epsilon(1e-12));
  CHECK(minmax_payoff(5.0, 2, {0.01, 1.01, 0.101}) ==
        doctest::Approx(-5.101).epsilon(1e-12));
  CHECK(minmax_payoff(5.0, 3, {0.1, 1.0, 1.5}) ==
        doctest::Approx(-6.5).epsilon(1e-12));
  CHECK_THROWS_AS(minmax_payoff(5.0, 1, SlotLengths{0.1, 1.0, 1.5}),
                  std::invalid_argument);
  CHECK_THROWS_AS(minmax_payoff(0.5, 2, SlotLengths{0.1, 1.0, 1.5}),
                  std::invalid_argument);
}

TEST_CASE("the closed form equals the exhaustive best-response sweep") {
  Xoshiro256 rng(17);
  for (int n = 2; n <= 6; ++n) {
    for (int trial = 0; trial < 200; ++trial) {
      const SlotLengths sl = random_slots(rng, trial % 2 == 0);
      const double age = rng.uniform(sl.success, 10.0 * sl.success);
      CHECK(std::abs(minmax_payoff(age, n, sl) -
                     minmax_payoff_exhaustive(age, n, sl)) <= 1e-12);
    }
  }
}

TEST_CASE("individual rationality compares against the minmax floor") {
  const SlotLengths short_sl{0.1, 1.0, 1.5};
  const std::vector<double> ages{3.0, 5.0};
  // handing the slot to the older source leaves both above their floors
  CHECK(is_individually_rational(stage_payoffs(ages, {false, true}, short_sl),
                                 ages, short_sl));
  // but waiting out a full success slot is worse than a lone collision
  // when success runs long
  const SlotLengths long_sl{0.01, 1.01, 0.101};
  const std::vector<double> waited{-(3.0 + 1.01), -(5.0 + 1.01)};
  CHECK_FALSE(is_individually_rational(waited, ages, long_sl));
  // the floor itself counts as rational
  const std::vector<double> floor{minmax_payoff(3.0, 2, short_sl),
                                  minmax_payoff(5.0, 2, short_sl)};
  CHECK(is_individually_rational(floor, ages, short_sl));
  const std::vector<double> three{-1.0, -1.0, -1.0};
  CHECK_THROWS_WITH_AS(is_individually_rational(three, ages, short_sl),
                       "payoff length does not match age vector",
                       std::invalid_argument);
}
