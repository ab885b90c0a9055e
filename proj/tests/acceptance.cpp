// Release checklist. Each criterion prints one PASS/FAIL line with its
// wall time; the process exits nonzero if any line fails. Everything runs
// from fixed seeds, so a red line here reproduces exactly.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <iostream>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "aoi/experiments.hpp"
#include "aoi/lp_oracle.hpp"
#include "aoi/rng.hpp"

namespace {

using namespace aoi;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

SlotLengths random_slots(Xoshiro256& rng, bool short_success) {
  const double ss = rng.uniform(0.5, 2.0);
  const double sc = short_success ? ss * rng.uniform(1.0, 2.0)
                                  : ss * rng.uniform(0.05, 0.95);
  const double si = std::min(ss, sc) * rng.uniform(0.05, 0.5);
  return {si, ss, sc};
}

int g_failures = 0;

void report(int id, bool pass, double seconds, const std::string& detail) {
  std::printf("criterion %d %s (%.1f s) %s\n", id, pass ? "PASS" : "FAIL",
              seconds, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

// 1. closed-form one-stage strategy vs. the exact LP on random instances
void criterion_closed_form_vs_oracle() {
  const auto t0 = Clock::now();
  Xoshiro256 rng(1001);
  int checked = 0;
  double worst_gap = 0.0;
  double worst_collision = 0.0;
  bool pass = true;
  for (int regime = 0; regime < 2; ++regime) {
    for (int i = 0; i < 1000; ++i) {
      LpInstance inst;
      inst.sl = random_slots(rng, regime == 0);
      const int n = 2 + i % 4;
      inst.ages.resize(n);
      for (double& a : inst.ages) {
        a = rng.uniform(inst.sl.success, 10.0 * inst.sl.success);
      }
      const LpSolution lp = solve_exact(inst);
      const OptimalSolution closed = one_stage_optimal(inst.ages, inst.sl);
      const double gap = std::abs(lp.objective - closed.objective);
      worst_gap = std::max(worst_gap, gap);
      worst_collision = std::max(worst_collision, lp.vector.collision);
      if (gap > 1e-6 || lp.vector.collision > 1e-9) pass = false;
      ++checked;
    }
  }
  const double dt = seconds_since(t0);
  if (dt >= 30.0) pass = false;
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "%d instances, worst objective gap %.3g, worst collision mass %.3g",
                checked, worst_gap, worst_collision);
  report(1, pass, dt, buf);
}

// 2. access-fair feasibility flips exactly at the age threshold
void criterion_feasibility_boundary() {
  const auto t0 = Clock::now();
  bool pass = true;
  int flips = 0;
  for (const SlotLengths& sl :
       {SlotLengths{0.01, 1.01, 0.101}, SlotLengths{0.1, 2.0, 0.5}}) {
    for (int n = 2; n <= 6; ++n) {
      const double threshold = n * (sl.success - sl.collision);
      std::vector<double> ages(n, threshold + 1.0);
      ages[0] = threshold + 1e-6;
      if (!is_feasible(access_fair_vector(n), ages, sl)) pass = false;
      ages[0] = threshold - 1e-6;
      if (is_feasible(access_fair_vector(n), ages, sl)) pass = false;
      ++flips;
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "%d boundary pairs at n(sigma_s - sigma_c) +/- 1e-6, n in 2..6",
                flips);
  report(2, pass, seconds_since(t0), buf);
}

// 3. closed-form minmax vs. the exhaustive best-response sweep
void criterion_minmax_equivalence() {
  const auto t0 = Clock::now();
  Xoshiro256 rng(3003);
  bool pass = true;
  double worst = 0.0;
  int states = 0;
  for (int n = 2; n <= 6; ++n) {
    for (int i = 0; i < 1000; ++i) {
      const SlotLengths sl = random_slots(rng, i % 2 == 0);
      const double age = rng.uniform(sl.success, 10.0 * sl.success);
      const double diff = std::abs(minmax_payoff(age, n, sl) -
                                   minmax_payoff_exhaustive(age, n, sl));
      worst = std::max(worst, diff);
      if (diff > 1e-12) pass = false;
      ++states;
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%d states, worst deviation %.3g", states,
                worst);
  report(3, pass, seconds_since(t0), buf);
}

// 4. age distribution: unit mass, exact closed-form mean, MC agreement
void criterion_age_distribution() {
  const auto t0 = Clock::now();
  bool pass = true;
  double worst_mass = 0.0;
  for (int n : {2, 3, 5, 10}) {
    const GameConfig cfg{n, SlotLengths{0.1, 1.0, 1.5}, 0.0};
    for (int t : {1, 10, 100, 1000, 10000}) {
      const double err =
          std::abs(access_fair_age_pmf(t, 3.0, cfg).total_mass() - 1.0);
      worst_mass = std::max(worst_mass, err);
      if (err > 1e-12) pass = false;
    }
  }
  bool means_exact = true;
  for (int n : {2, 3, 5}) {
    const GameConfig cfg{n, SlotLengths{0.1, 1.0, 1.5}, 0.0};
    for (int t = 1; t <= 300; ++t) {
      if (access_fair_expected_age(t, 3.0, cfg) !=
          access_fair_age_pmf(t, 3.0, cfg).mean()) {
        means_exact = false;
      }
    }
  }
  if (!means_exact) pass = false;
  double worst_sigmas = 0.0;
  int combo = 0;
  for (int n : {2, 3, 5}) {
    for (double alpha : {0.1, 0.5, 0.9}) {
      const GameConfig cfg{n, SlotLengths{0.1, 1.0, 1.5}, alpha};
      const std::vector<double> ages0(static_cast<std::size_t>(n), 3.0);
      const int slots = truncation_horizon(alpha, 3.0, cfg.sl);
      const McEstimate est = mc_discounted_payoff(
          StrategyRule::AccessFair, 0, ages0, cfg, 100000, slots,
          substream_seed(4004, static_cast<std::uint64_t>(combo++)));
      const double analytic = discounted_payoff_access_fair(3.0, cfg);
      const double sigmas = std::abs(est.mean - analytic) / est.std_error;
      worst_sigmas = std::max(worst_sigmas, sigmas);
      if (!(std::abs(est.mean - analytic) <= 3.0 * est.std_error)) {
        pass = false;
      }
    }
  }
  const double dt = seconds_since(t0);
  if (dt >= 120.0) pass = false;
  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "worst mass error %.3g, means bit-exact: %s, MC within %.2f "
                "std errors (9 combos x 1e5 paths)",
                worst_mass, means_exact ? "yes" : "NO", worst_sigmas);
  report(4, pass, dt, buf);
}

// 5. short success: both one-shot deviations strictly lose, both rules
void criterion_short_success_deviations() {
  const auto t0 = Clock::now();
  Xoshiro256 rng(5005);
  const std::vector<double> alphas{0.0, 0.1, 0.2, 0.3, 0.4, 0.5,
                                   0.6, 0.7, 0.8, 0.9, 0.99};
  bool pass = true;
  long comparisons = 0;
  double min_margin = 1e300;
  for (const SlotLengths& sl :
       {SlotLengths{0.1, 1.0, 1.5}, SlotLengths{0.01, 1.01, 1.5}}) {
    for (int n = 2; n <= 5; ++n) {
      for (int state = 0; state < 100; ++state) {
        std::vector<double> ages(n);
        // same state-sampling convention as the region scan: entries
        // uniform in [n, 3n]. Max-age turn-taking admits a profitable
        // slot-0 idle when the largest age is below roughly
        // sigma_s*(1+2a)/(1+a) - sigma_i (the deviator keeps its turn and
        // merely delays the whole reset schedule one slot), so the claim
        // being checked here is specific to this state range.
        for (double& a : ages) a = rng.uniform(static_cast<double>(n), 3.0 * n);
        const double max_age = *std::max_element(ages.begin(), ages.end());
        const int jmax = argmax_age(ages);
        const int other = (jmax + 1) % n;
        for (double alpha : alphas) {
          const GameConfig cfg{n, sl, alpha};
          // uniform-signal rule: closed-form deviation values
          const DeviationValues v = access_fair_deviation_values(ages[0], cfg);
          const double m1 = v.cooperate - v.idle_when_transmit;
          const double m2 = v.cooperate - v.transmit_when_idle;
          // max-age rule: deterministic paths, deviator picked where the
          // deviation actually changes the slot
          const int slots = truncation_horizon(alpha, max_age, sl);
          const McEstimate coop_max = mc_discounted_payoff(
              StrategyRule::AgeFair, jmax, ages, cfg, 1, slots, 1);
          const McEstimate hold = mc_discounted_payoff(
              StrategyRule::AgeFair, jmax, ages, cfg, 1, slots, 1,
              DeviationSpec{jmax, DeviationKind::IdleWhenTransmit});
          const McEstimate coop_other = mc_discounted_payoff(
              StrategyRule::AgeFair, other, ages, cfg, 1, slots, 1);
          const McEstimate barge = mc_discounted_payoff(
              StrategyRule::AgeFair, other, ages, cfg, 1, slots, 1,
              DeviationSpec{other, DeviationKind::TransmitWhenIdle});
          const double m3 = coop_max.mean - hold.mean;
          const double m4 = coop_other.mean - barge.mean;
          min_margin = std::min({min_margin, m1, m2, m3, m4});
          if (!(m1 > 1e-9 && m2 > 1e-9 && m3 > 1e-9 && m4 > 1e-9)) {
            pass = false;
          }
          comparisons += 4;
        }
      }
    }
  }
  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "%ld deviation comparisons, zero counterexamples: %s, "
                "smallest cooperate margin %.3g",
                comparisons, pass ? "yes" : "NO", min_margin);
  report(5, pass, seconds_since(t0), buf);
}

// 6. long success: analytic NotSPNE verdicts with machine-checked witnesses
void criterion_long_success_witnesses() {
  const auto t0 = Clock::now();
  bool pass = true;
  int verified = 0;
  for (const SlotLengths& sl : {fig3_slots(), SlotLengths{0.05, 2.0, 0.3}}) {
    for (int n = 2; n <= 6; ++n) {
      for (double alpha : {0.1, 0.9}) {
        const GameConfig cfg{n, sl, alpha};
        for (StrategyRule rule :
             {StrategyRule::AccessFair, StrategyRule::AgeFair}) {
          SpneReport rep;
          try {
            rep = spne_verdict_analytic(rule, cfg);
          } catch (const std::exception&) {
            pass = false;
            continue;
          }
          if (rep.verdict != SpneVerdict::NotSpne || !rep.witness) {
            pass = false;
            continue;
          }
          const IrWitness& w = *rep.witness;
          const ProbabilityVector p = rule == StrategyRule::AgeFair
                                          ? age_fair_vector(w.ages)
                                          : access_fair_vector(n);
          const std::vector<double> u = expected_payoffs(p, w.ages, cfg.sl);
          const std::size_t k = static_cast<std::size_t>(w.source);
          if (!(u[k] < minmax_payoff(w.ages[k], n, cfg.sl) - 1e-9)) {
            pass = false;
          }
          if (is_individually_rational(u, w.ages, cfg.sl)) pass = false;
          if (std::abs(u[k] - w.payoff) > 1e-12) pass = false;
          ++verified;
        }
      }
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "%d witnesses re-verified against the minmax floor", verified);
  report(6, pass, seconds_since(t0), buf);
}

ScanConfig desk_scan_config() {
  ScanConfig cfg;
  cfg.ns = {2, 3, 4, 5, 6};
  cfg.alphas = {0.1, 0.3, 0.5, 0.7, 0.9, 0.99};
  cfg.sl = fig3_slots();
  cfg.rule = StrategyRule::OneStageOptimal;
  cfg.num_states = 20;
  cfg.paths = 2000;
  cfg.slots = 2000;
  cfg.seed = 7;
  return cfg;
}

// 7. desk-scale region scan reproduces the qualitative equilibrium shape
void criterion_region_shape(RegionScanResult& out) {
  const auto t0 = Clock::now();
  const ScanConfig cfg = desk_scan_config();
  out = run_region_scan(cfg, &std::cerr);
  bool pass = true;
  const auto verdict_at = [&](int n, double alpha) {
    for (const RegionScanRow& row : out.rows) {
      if (row.n == n && row.alpha == alpha) return row.verdict;
    }
    pass = false;
    return SpneVerdict::NotSpne;
  };
  const SpneVerdict patient_duopoly = verdict_at(2, 0.9);
  const SpneVerdict crowded_impatient = verdict_at(6, 0.1);
  if (patient_duopoly != SpneVerdict::Spne) pass = false;
  if (crowded_impatient != SpneVerdict::NotSpne) pass = false;
  std::vector<int> counts;
  for (int n : cfg.ns) {
    int c = 0;
    for (const RegionScanRow& row : out.rows) {
      if (row.n == n && row.verdict == SpneVerdict::Spne) ++c;
    }
    counts.push_back(c);
  }
  for (std::size_t i = 1; i < counts.size(); ++i) {
    if (counts[i] > counts[i - 1]) pass = false;
  }
  const double dt = seconds_since(t0);
  if (dt >= 600.0) pass = false;
  char buf[240];
  std::snprintf(buf, sizeof(buf),
                "SPNE-positive alphas per n: 2:%d 3:%d 4:%d 5:%d 6:%d; "
                "(n=2, a=0.9) %s, (n=6, a=0.1) %s",
                counts[0], counts[1], counts[2], counts[3], counts[4],
                to_string(patient_duopoly), to_string(crowded_impatient));
  report(7, pass, dt, buf);
}

// 8. the same seed reproduces the scan byte for byte
void criterion_scan_determinism(const RegionScanResult& first) {
  const auto t0 = Clock::now();
  const RegionScanResult second = run_region_scan(desk_scan_config(), &std::cerr);
  const std::string csv_a = scan_to_csv(first);
  const std::string csv_b = scan_to_csv(second);
  const bool pass = csv_a == csv_b && scan_to_json(first) == scan_to_json(second);
  char buf[160];
  std::snprintf(buf, sizeof(buf), "rerun CSV identical: %s (%zu bytes)",
                pass ? "yes" : "NO", csv_a.size());
  report(8, pass, seconds_since(t0), buf);
}

}  // namespace

int main() {
  criterion_closed_form_vs_oracle();
  criterion_feasibility_boundary();
  criterion_minmax_equivalence();
  criterion_age_distribution();
  criterion_short_success_deviations();
  criterion_long_success_witnesses();
  RegionScanResult scan;
  criterion_region_shape(scan);
  criterion_scan_determinism(scan);
  if (g_failures > 0) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
