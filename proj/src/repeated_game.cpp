#include "aoi/repeated_game.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace aoi {

void GameConfig::validate() const {
  sl.validate();
  if (n < 2) throw std::invalid_argument("need at least 2 sources");
  if (!(alpha >= 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("alpha must be in [0, 1)");
  }
}

const char* to_string(StrategyRule rule) {
  switch (rule) {
    case StrategyRule::AccessFair:
      return "access-fair";
    case StrategyRule::AgeFair:
      return "age-fair";
    case StrategyRule::OneStageOptimal:
      return "one-stage-optimal";
  }
  return "?";
}

StrategyRule strategy_from_string(const std::string& name) {
  if (name == "access-fair") return StrategyRule::AccessFair;
  if (name == "age-fair") return StrategyRule::AgeFair;
  if (name == "one-stage-optimal") return StrategyRule::OneStageOptimal;
  throw std::invalid_argument("unknown strategy: " + name);
}

const char* to_string(DeviationKind kind) {
  switch (kind) {
    case DeviationKind::IdleWhenTransmit:
      return "idle-when-transmit";
    case DeviationKind::TransmitWhenIdle:
      return "transmit-when-idle";
  }
  return "?";
}

DeviationKind deviation_from_string(const std::string& name) {
  if (name == "idle-when-transmit") return DeviationKind::IdleWhenTransmit;
  if (name == "transmit-when-idle") return DeviationKind::TransmitWhenIdle;
  throw std::invalid_argument("unknown deviation: " + name);
}

const char* to_string(SpneVerdict verdict) {
  return verdict == SpneVerdict::Spne ? "SPNE" : "NotSPNE";
}

SpneVerdict verdict_from_string(const std::string& name) {
  if (name == "SPNE") return SpneVerdict::Spne;
  if (name == "NotSPNE") return SpneVerdict::NotSpne;
  throw std::invalid_argument("unknown verdict: " + name);
}

double AgePmf::total_mass() const {
  double acc = 0.0;
  for (const Entry& e : support) acc += e.prob;
  return acc;
}

double AgePmf::mean() const {
  double acc = 0.0;
  for (const Entry& e : support) acc += e.prob * e.age;
  return acc;
}

// The PMF and its mean share one recurrence — r carries ((n-1)/n)^m, the
// mass still waiting for a first success — so the closed-form mean below
// reproduces AgePmf::mean() bit for bit.
AgePmf access_fair_age_pmf(int t, double delta0, const GameConfig& cfg) {
  cfg.validate();
  if (t < 1) throw std::invalid_argument("slot count must be >= 1");
  if (delta0 < cfg.sl.success) throw std::invalid_argument("age below sigma_s");
  const int n = cfg.n;
  const double ss = cfg.sl.success;
  AgePmf pmf;
  pmf.support.reserve(static_cast<std::size_t>(t) + 1);
  double r = 1.0;
  for (int m = 1; m <= t; ++m) {
    const double q = r / n;
    pmf.support.push_back({m * ss, q});
    r = r * (n - 1.0) / n;
  }
  pmf.support.push_back({delta0 + t * ss, r});
  return pmf;
}

double access_fair_expected_age(int t, double delta0, const GameConfig& cfg) {
  cfg.validate();
  if (t < 1) throw std::invalid_argument("slot count must be >= 1");
  if (delta0 < cfg.sl.success) throw std::invalid_argument("age below sigma_s");
  const int n = cfg.n;
  const double ss = cfg.sl.success;
  double acc = 0.0;
  double r = 1.0;
  for (int m = 1; m <= t; ++m) {
    const double q = r / n;
    acc += q * (m * ss);
    r = r * (n - 1.0) / n;
  }
  acc += r * (delta0 + t * ss);
  return acc;
}

int truncation_horizon(double alpha, double delta0, const SlotLengths& sl) {
  if (!(alpha >= 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("alpha must be in [0, 1)");
  }
  if (alpha == 0.0) return 1;
  constexpr double kEps = 1e-10;
  const double log_alpha = std::log(alpha);
  int t = 1;
  // B grows linearly in t but t only logarithmically in B, so this settles
  // in a handful of rounds.
  for (int round = 0; round < 64; ++round) {
    const double bound =
        delta0 + t * sl.success * (1.0 + 1.0 / (1.0 - alpha));
    const double need =
        std::ceil(std::log(kEps * (1.0 - alpha) / bound) / log_alpha);
    const int next = std::max(1, static_cast<int>(need));
    if (next <= t) return t;
    t = next;
  }
  return t;
}

double discounted_payoff_access_fair(double delta0, const GameConfig& cfg) {
  cfg.validate();
  if (delta0 < cfg.sl.success) throw std::invalid_argument("age below sigma_s");
  const int horizon = truncation_horizon(cfg.alpha, delta0, cfg.sl);
  const int n = cfg.n;
  const double ss = cfg.sl.success;
  double r = 1.0;     // ((n-1)/n)^t
  double head = 0.0;  // sum over m <= t of mass_m * m * sigma_s
  double disc = 1.0;  // alpha^(t-1)
  double total = 0.0;
  for (int t = 1; t <= horizon; ++t) {
    const double q = r / n;
    head += q * (t * ss);
    r = r * (n - 1.0) / n;
    total += disc * (head + r * (delta0 + t * ss));
    disc *= cfg.alpha;
  }
  return -(1.0 - cfg.alpha) * total;
}

DeviationValues access_fair_deviation_values(double delta0,
                                             const GameConfig& cfg) {
  cfg.validate();
  if (delta0 < cfg.sl.success) throw std::invalid_argument("age below sigma_s");
  const double a = cfg.alpha;
  const double now = 1.0 - a;
  const double ss = cfg.sl.success;
  const double p_own = 1.0 / cfg.n;
  const double p_other = (cfg.n - 1.0) / cfg.n;
  // Value of landing on age d after slot 0, then playing access-fair on:
  // (1-a) * (-d) + a * U(d). U depends only on the source's own age because
  // the recommendation process never looks at the state.
  const auto after = [&](double d) {
    return now * -d + a * discounted_payoff_access_fair(d, cfg);
  };
  const double won = after(ss);
  const double waited = after(delta0 + ss);
  DeviationValues v;
  v.cooperate = p_own * won + p_other * waited;
  v.idle_when_transmit = p_own * after(delta0 + cfg.sl.idle) + p_other * waited;
  v.transmit_when_idle =
      p_own * won + p_other * after(delta0 + cfg.sl.collision);
  return v;
}

namespace {

// Allocation-free per-slot engine shared by simulate_path and the Monte
// Carlo estimators. Deterministic rules consume no randomness.
class StepSimulator {
 public:
  StepSimulator(const GameConfig& cfg, StrategyRule rule)
      : cfg_(cfg),
        rule_(rule),
        ages_(static_cast<std::size_t>(cfg.n)),
        succ_(static_cast<std::size_t>(cfg.n)) {}

  void reset(std::span<const double> ages0) {
    ages_.assign(ages0.begin(), ages0.end());
    slot_ = 0;
  }

  const std::vector<double>& ages() const { return ages_; }
  double age(int source) const {
    return ages_[static_cast<std::size_t>(source)];
  }

  SlotEvent step(Xoshiro256& rng, const DeviationSpec* dev) {
    SlotEvent ev = recommend(rng);
    if (dev != nullptr && slot_ == 0) ev = deviate(ev, *dev);
    apply(ev);
    ++slot_;
    return ev;
  }

 private:
  SlotEvent recommend(Xoshiro256& rng) {
    const int n = cfg_.n;
    switch (rule_) {
      case StrategyRule::AccessFair: {
        const double u = rng.uniform();
        double acc = 0.0;
        for (int j = 0; j < n; ++j) {
          acc += 1.0 / n;
          if (u < acc) return SlotEvent::success(j);
        }
        return SlotEvent::success(n - 1);  // rounding residue
      }
      case StrategyRule::AgeFair:
        return SlotEvent::success(argmax_age(ages_));
      case StrategyRule::OneStageOptimal: {
        double idle = 0.0;
        const OptimalCase tag =
            detail::fill_one_stage_optimal(ages_, cfg_.sl, succ_, idle);
        if (tag == OptimalCase::AllIdle) return SlotEvent::idle();
        if (tag == OptimalCase::MaxAgeDeterministic) {
          return SlotEvent::success(argmax_age(ages_));
        }
        const double u = rng.uniform();
        double acc = 0.0;
        int last_pos = -1;
        for (int j = 0; j < n; ++j) {
          const double p = succ_[static_cast<std::size_t>(j)];
          if (p > 0.0) last_pos = j;
          acc += p;
          if (u < acc) return SlotEvent::success(j);
        }
        // idle is the last positive category in both mixed cases, so the
        // rounding residue lands there whenever it is present at all
        if (idle > 0.0) return SlotEvent::idle();
        return SlotEvent::success(last_pos);
      }
    }
    return SlotEvent::idle();  // unreachable
  }

  // Flip the deviator's action relative to the realized recommendation and
  // re-classify. A collision recommendation stands for all-transmit, so
  // removing one transmitter leaves a success only when n = 2.
  SlotEvent deviate(SlotEvent ev, const DeviationSpec& dev) const {
    const int k = dev.source;
    if (dev.kind == DeviationKind::IdleWhenTransmit) {
      if (ev.kind == SlotEvent::Kind::Success && ev.winner == k) {
        return SlotEvent::idle();
      }
      if (ev.kind == SlotEvent::Kind::Collision) {
        return cfg_.n == 2 ? SlotEvent::success(1 - k)
                           : SlotEvent::collision();
      }
      return ev;
    }
    if (ev.kind == SlotEvent::Kind::Idle) return SlotEvent::success(k);
    if (ev.kind == SlotEvent::Kind::Success && ev.winner != k) {
      return SlotEvent::collision();
    }
    return ev;
  }

  void apply(const SlotEvent& ev) {
    switch (ev.kind) {
      case SlotEvent::Kind::Idle:
        for (double& a : ages_) a += cfg_.sl.idle;
        break;
      case SlotEvent::Kind::Collision:
        for (double& a : ages_) a += cfg_.sl.collision;
        break;
      case SlotEvent::Kind::Success:
        for (double& a : ages_) a += cfg_.sl.success;
        ages_[static_cast<std::size_t>(ev.winner)] = cfg_.sl.success;
        break;
    }
  }

  GameConfig cfg_;
  StrategyRule rule_;
  std::vector<double> ages_;
  std::vector<double> succ_;
  int slot_ = 0;
};

void check_run_args(const GameConfig& cfg, std::span<const double> ages0,
                    int slots, const std::optional<DeviationSpec>& deviation) {
  cfg.validate();
  check_ages(ages0, cfg.sl);
  if (static_cast<int>(ages0.size()) != cfg.n) {
    throw std::invalid_argument(
        "age vector length does not match the source count");
  }
  if (slots < 1) throw std::invalid_argument("slot count must be >= 1");
  if (deviation &&
      (deviation->source < 0 || deviation->source >= cfg.n)) {
    throw std::invalid_argument("deviating source out of range");
  }
}

}  // namespace

PathTrace simulate_path(StrategyRule rule, std::span<const double> ages0,
                        const GameConfig& cfg, int slots, std::uint64_t seed,
                        std::optional<DeviationSpec> deviation) {
  check_run_args(cfg, ages0, slots, deviation);
  const DeviationSpec* dev = deviation ? &*deviation : nullptr;
  StepSimulator sim(cfg, rule);
  sim.reset(ages0);
  Xoshiro256 rng(seed);
  PathTrace trace;
  trace.events.reserve(static_cast<std::size_t>(slots));
  trace.ages.reserve(static_cast<std::size_t>(slots));
  for (int t = 0; t < slots; ++t) {
    trace.events.push_back(sim.step(rng, dev));
    trace.ages.push_back(sim.ages());
  }
  return trace;
}

McEstimate mc_discounted_payoff(StrategyRule rule, int source,
                                std::span<const double> ages0,
                                const GameConfig& cfg, int paths, int slots,
                                std::uint64_t seed,
                                std::optional<DeviationSpec> deviation,
                                int threads) {
  check_run_args(cfg, ages0, slots, deviation);
  if (source < 0 || source >= cfg.n) {
    throw std::invalid_argument("source out of range");
  }
  if (paths < 1) throw std::invalid_argument("paths must be >= 1");
  const DeviationSpec* dev = deviation ? &*deviation : nullptr;

  std::vector<double> payoff(static_cast<std::size_t>(paths));
  auto worker = [&](int begin, int end) {
    StepSimulator sim(cfg, rule);
    for (int p = begin; p < end; ++p) {
      Xoshiro256 rng(substream_seed(seed, static_cast<std::uint64_t>(p)));
      sim.reset(ages0);
      double disc = 1.0;
      double acc = 0.0;
      for (int t = 0; t < slots; ++t) {
        sim.step(rng, dev);
        acc += disc * sim.age(source);
        disc *= cfg.alpha;
        // once alpha^t underflows to an exact zero every remaining term is
        // exactly zero, so the accumulated sum is already final
        if (disc == 0.0) break;
      }
      payoff[static_cast<std::size_t>(p)] = -(1.0 - cfg.alpha) * acc;
    }
  };

  const int workers = std::clamp(threads, 1, paths);
  if (workers == 1) {
    worker(0, paths);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    const int chunk = (paths + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const int begin = w * chunk;
      const int end = std::min(paths, begin + chunk);
      if (begin < end) pool.emplace_back(worker, begin, end);
    }
    for (std::thread& th : pool) th.join();
  }

  // fixed-order reduction: the estimate is independent of thread count
  double mean = 0.0;
  for (double x : payoff) mean += x;
  mean /= paths;
  double sq = 0.0;
  for (double x : payoff) {
    const double d = x - mean;
    sq += d * d;
  }
  McEstimate est;
  est.mean = mean;
  est.std_error =
      paths > 1 ? std::sqrt(sq / (static_cast<double>(paths) * (paths - 1)))
                : 0.0;
  est.paths = paths;
  est.slots_per_path = slots;
  est.seed = seed;
  return est;
}

SpneReport spne_verdict_analytic(StrategyRule rule, const GameConfig& cfg) {
  cfg.validate();
  if (rule == StrategyRule::OneStageOptimal) {
    throw std::invalid_argument(
        "no analytic verdict for the one-stage-optimal rule; use the Monte "
        "Carlo verdict");
  }
  SpneReport rep;
  if (cfg.sl.success <= cfg.sl.collision) {
    rep.verdict = SpneVerdict::Spne;
    return rep;
  }

  // sigma_s > sigma_c: the strategy pays some source below its minmax.
  rep.verdict = SpneVerdict::NotSpne;
  const double ss = cfg.sl.success;
  IrWitness w;
  if (rule == StrategyRule::AgeFair) {
    // Any state with a non-max source works: it ages by sigma_s while the
    // minmax only concedes sigma_c.
    w.ages.assign(static_cast<std::size_t>(cfg.n), ss);
    w.ages[0] = 2.0 * ss;
    w.source = 1;
  } else {
    // Access-fair violates individual rationality exactly below the
    // age threshold n(sigma_s - sigma_c); pick the midpoint between the
    // threshold and the smallest valid age.
    const double threshold = cfg.n * (ss - cfg.sl.collision);
    if (threshold <= ss) {
      throw std::domain_error(
          "no witness state exists: n*(sigma_s - sigma_c) <= sigma_s, so "
          "every valid age vector is individually rational under "
          "access-fair play");
    }
    w.ages.assign(static_cast<std::size_t>(cfg.n), 0.5 * (ss + threshold));
    w.source = 0;
  }
  const ProbabilityVector p = rule == StrategyRule::AgeFair
                                  ? age_fair_vector(w.ages)
                                  : access_fair_vector(cfg.n);
  const std::vector<double> payoffs = expected_payoffs(p, w.ages, cfg.sl);
  w.payoff = payoffs[static_cast<std::size_t>(w.source)];
  w.minmax = minmax_payoff(w.ages[static_cast<std::size_t>(w.source)], cfg.n,
                           cfg.sl);
  if (is_individually_rational(payoffs, w.ages, cfg.sl) ||
      !(w.payoff < w.minmax - kPayoffTolerance)) {
    throw std::logic_error("witness failed its individual-rationality check");
  }
  rep.witness = std::move(w);
  return rep;
}

McSpneReport spne_verdict_mc(StrategyRule rule, const GameConfig& cfg,
                             int num_states, double age_lo, double age_hi,
                             int paths, int slots, std::uint64_t seed) {
  cfg.validate();
  if (num_states < 1) throw std::invalid_argument("num_states must be >= 1");
  if (paths < 1) throw std::invalid_argument("paths must be >= 1");
  if (slots < 1) throw std::invalid_argument("slot count must be >= 1");
  if (age_lo < cfg.sl.success) {
    throw std::invalid_argument("age range must start at or above sigma_s");
  }
  if (age_hi < age_lo) throw std::invalid_argument("age range is empty");

  McSpneReport rep;
  if (cfg.sl.success <= cfg.sl.collision) {
    // One-stage-optimal play coincides with the age-fair rule here (modulo
    // idling while every age is small), which is an SPNE for every alpha;
    // so are the other two rules. Settled without sampling.
    rep.verdict = SpneVerdict::Spne;
    return rep;
  }

  rep.verdict = SpneVerdict::Spne;
  Xoshiro256 state_rng(substream_seed(seed, 0));
  std::vector<double> ages(static_cast<std::size_t>(cfg.n));
  for (int i = 0; i < num_states; ++i) {
    for (double& a : ages) a = state_rng.uniform(age_lo, age_hi);
    // One seed per state, shared by all three arms: common random numbers
    // for the cooperate-vs-deviation comparison.
    const std::uint64_t arm_seed =
        substream_seed(seed, 1 + static_cast<std::uint64_t>(i));
    McStateCheck chk;
    chk.ages = ages;
    chk.cooperate =
        mc_discounted_payoff(rule, 0, ages, cfg, paths, slots, arm_seed);
    chk.idle_when_transmit = mc_discounted_payoff(
        rule, 0, ages, cfg, paths, slots, arm_seed,
        DeviationSpec{0, DeviationKind::IdleWhenTransmit});
    chk.transmit_when_idle = mc_discounted_payoff(
        rule, 0, ages, cfg, paths, slots, arm_seed,
        DeviationSpec{0, DeviationKind::TransmitWhenIdle});
    const McEstimate& best =
        chk.idle_when_transmit.mean >= chk.transmit_when_idle.mean
            ? chk.idle_when_transmit
            : chk.transmit_when_idle;
    chk.gap = chk.cooperate.mean - best.mean;
    chk.combined_se = std::sqrt(chk.cooperate.std_error * chk.cooperate.std_error +
                                best.std_error * best.std_error);
    chk.holds = chk.gap >= -2.0 * chk.combined_se;
    if (!chk.holds) rep.verdict = SpneVerdict::NotSpne;
    rep.checks.push_back(std::move(chk));
  }
  return rep;
}

}  // namespace aoi
