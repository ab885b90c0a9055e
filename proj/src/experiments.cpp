#include "aoi/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "json.hpp"

namespace aoi {
namespace {

using njson = nlohmann::json;

double to_double(const std::string& s) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("not a number: '" + s + "'");
  }
  if (pos != s.size()) throw std::invalid_argument("not a number: '" + s + "'");
  return v;
}

int to_int(const std::string& s) {
  std::size_t pos = 0;
  int v = 0;
  try {
    v = std::stoi(s, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("not an integer: '" + s + "'");
  }
  if (pos != s.size()) {
    throw std::invalid_argument("not an integer: '" + s + "'");
  }
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

std::vector<std::string> data_lines(const std::string& text,
                                    const std::string& expected_header) {
  std::vector<std::string> lines = split(text, '\n');
  for (std::string& line : lines) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty()) throw std::invalid_argument("empty file");
  if (lines.front().rfind(expected_header, 0) != 0) {
    throw std::invalid_argument("unexpected CSV header: '" + lines.front() +
                                "'");
  }
  return {lines.begin() + 1, lines.end()};
}

}  // namespace

SlotLengths fig3_slots() {
  // beta, 1 + beta, 0.1 * (1 + beta) at beta = 0.01, pinned as literals
  return {0.01, 1.01, 0.101};
}

void ScanConfig::validate() const {
  sl.validate();
  if (ns.empty()) throw std::invalid_argument("empty n grid");
  for (int n : ns) {
    if (n < 2) throw std::invalid_argument("need at least 2 sources");
  }
  if (alphas.empty()) throw std::invalid_argument("empty alpha grid");
  for (double a : alphas) {
    if (!(a >= 0.0)) throw std::invalid_argument("alpha must be >= 0");
    if (!(a < 1.0)) throw std::invalid_argument("alpha must be < 1");
  }
  if (num_states < 1) throw std::invalid_argument("num_states must be >= 1");
  if (paths < 1) throw std::invalid_argument("paths must be >= 1");
  if (slots < 1) throw std::invalid_argument("slot count must be >= 1");
  const bool lo_set = age_lo > 0.0;
  const bool hi_set = age_hi > 0.0;
  if (lo_set != hi_set) {
    throw std::invalid_argument("age range needs both ends");
  }
  if (lo_set && age_hi < age_lo) {
    throw std::invalid_argument("age range is empty");
  }
}

RegionScanResult run_region_scan(const ScanConfig& cfg,
                                 std::ostream* progress) {
  cfg.validate();
  RegionScanResult result;
  result.rows.reserve(cfg.ns.size() * cfg.alphas.size());
  std::uint64_t cell = 0;
  for (int n : cfg.ns) {
    for (double alpha : cfg.alphas) {
      const GameConfig game{n, cfg.sl, alpha};
      const double lo = cfg.age_lo > 0.0 ? cfg.age_lo : static_cast<double>(n);
      const double hi = cfg.age_hi > 0.0 ? cfg.age_hi : 3.0 * n;
      const auto t0 = std::chrono::steady_clock::now();
      const McSpneReport mc =
          spne_verdict_mc(cfg.rule, game, cfg.num_states, lo, hi, cfg.paths,
                          cfg.slots, substream_seed(cfg.seed, cell));
      const std::chrono::duration<double> dt =
          std::chrono::steady_clock::now() - t0;

      RegionScanRow row;
      row.n = n;
      row.alpha = alpha;
      row.verdict = mc.verdict;
      row.wall_seconds = dt.count();
      for (std::size_t i = 0; i < mc.checks.size(); ++i) {
        const McStateCheck& chk = mc.checks[i];
        if (i == 0 || chk.gap < row.min_gap) row.min_gap = chk.gap;
        if (chk.combined_se > row.max_std_error) {
          row.max_std_error = chk.combined_se;
        }
      }
      if (progress != nullptr) {
        (*progress) << "cell n=" << n << " alpha=" << alpha
                    << " verdict=" << to_string(row.verdict)
                    << " min_gap=" << row.min_gap
                    << " max_se=" << row.max_std_error << " ("
                    << row.wall_seconds << " s)" << std::endl;
      }
      result.rows.push_back(row);
      ++cell;
    }
  }
  return result;
}

PayoffReport payoff_report(StrategyRule rule, int source,
                           std::span<const double> ages0,
                           const GameConfig& cfg, int paths, int slots,
                           std::uint64_t seed) {
  // same seed for all three arms: common random numbers
  const McEstimate coop =
      mc_discounted_payoff(rule, source, ages0, cfg, paths, slots, seed);
  const McEstimate idle = mc_discounted_payoff(
      rule, source, ages0, cfg, paths, slots, seed,
      DeviationSpec{source, DeviationKind::IdleWhenTransmit});
  const McEstimate coll = mc_discounted_payoff(
      rule, source, ages0, cfg, paths, slots, seed,
      DeviationSpec{source, DeviationKind::TransmitWhenIdle});

  std::optional<DeviationValues> closed;
  if (rule == StrategyRule::AccessFair) {
    closed = access_fair_deviation_values(
        ages0[static_cast<std::size_t>(source)], cfg);
  }

  PayoffReport rep;
  rep.arms.push_back({"cooperate", coop.mean, coop.std_error, 0.0,
                      closed ? std::optional<double>(closed->cooperate)
                             : std::nullopt});
  rep.arms.push_back(
      {"idle-when-transmit", idle.mean, idle.std_error, coop.mean - idle.mean,
       closed ? std::optional<double>(closed->idle_when_transmit)
              : std::nullopt});
  rep.arms.push_back(
      {"transmit-when-idle", coll.mean, coll.std_error, coop.mean - coll.mean,
       closed ? std::optional<double>(closed->transmit_when_idle)
              : std::nullopt});
  return rep;
}

TraceReport trace_report(const PathTrace& trace) {
  TraceReport rep;
  rep.rows.reserve(trace.events.size());
  for (std::size_t t = 0; t < trace.events.size(); ++t) {
    rep.rows.push_back(
        {static_cast<int>(t), trace.events[t], trace.ages[t]});
  }
  return rep;
}

std::string fmt_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string event_label(const SlotEvent& ev) {
  switch (ev.kind) {
    case SlotEvent::Kind::Idle:
      return "idle";
    case SlotEvent::Kind::Collision:
      return "collision";
    case SlotEvent::Kind::Success:
      return "success(" + std::to_string(ev.winner + 1) + ")";
  }
  return "?";
}

SlotEvent event_from_label(const std::string& label) {
  if (label == "idle") return SlotEvent::idle();
  if (label == "collision") return SlotEvent::collision();
  if (label.rfind("success(", 0) == 0 && label.back() == ')') {
    const int winner = to_int(label.substr(8, label.size() - 9));
    if (winner >= 1) return SlotEvent::success(winner - 1);
  }
  throw std::invalid_argument("unknown event label: '" + label + "'");
}

// ---- region scan ----

static const char kScanHeader[] = "n,alpha,verdict,min_gap,max_std_error";

std::string scan_to_csv(const RegionScanResult& result) {
  std::string out = std::string(kScanHeader) + "\n";
  for (const RegionScanRow& row : result.rows) {
    out += std::to_string(row.n);
    out += ',';
    out += fmt_g17(row.alpha);
    out += ',';
    out += to_string(row.verdict);
    out += ',';
    out += fmt_g17(row.min_gap);
    out += ',';
    out += fmt_g17(row.max_std_error);
    out += '\n';
  }
  return out;
}

RegionScanResult scan_from_csv(const std::string& text) {
  RegionScanResult result;
  for (const std::string& line : data_lines(text, kScanHeader)) {
    const std::vector<std::string> f = split(line, ',');
    if (f.size() != 5) {
      throw std::invalid_argument("bad scan row: '" + line + "'");
    }
    RegionScanRow row;
    row.n = to_int(f[0]);
    row.alpha = to_double(f[1]);
    row.verdict = verdict_from_string(f[2]);
    row.min_gap = to_double(f[3]);
    row.max_std_error = to_double(f[4]);
    result.rows.push_back(row);
  }
  return result;
}

std::string scan_to_json(const RegionScanResult& result) {
  std::string out = "[\n";
  for (std::size_t i = 0; i < result.rows.size(); ++i) {
    const RegionScanRow& row = result.rows[i];
    out += "  {\"n\": " + std::to_string(row.n);
    out += ", \"alpha\": " + fmt_g17(row.alpha);
    out += ", \"verdict\": \"" + std::string(to_string(row.verdict)) + "\"";
    out += ", \"min_gap\": " + fmt_g17(row.min_gap);
    out += ", \"max_std_error\": " + fmt_g17(row.max_std_error) + "}";
    if (i + 1 < result.rows.size()) out += ',';
    out += '\n';
  }
  out += "]\n";
  return out;
}

RegionScanResult scan_from_json(const std::string& text) {
  const njson j = njson::parse(text);
  RegionScanResult result;
  for (const njson& item : j) {
    RegionScanRow row;
    row.n = item.at("n").get<int>();
    row.alpha = item.at("alpha").get<double>();
    row.verdict = verdict_from_string(item.at("verdict").get<std::string>());
    row.min_gap = item.at("min_gap").get<double>();
    row.max_std_error = item.at("max_std_error").get<double>();
    result.rows.push_back(row);
  }
  return result;
}

// ---- payoff report ----

static const char kPayoffHeader[] = "arm,mean,std_error,gap,analytic";

std::string payoff_to_csv(const PayoffReport& report) {
  std::string out = std::string(kPayoffHeader) + "\n";
  for (const PayoffArm& arm : report.arms) {
    out += arm.arm;
    out += ',';
    out += fmt_g17(arm.mean);
    out += ',';
    out += fmt_g17(arm.std_error);
    out += ',';
    out += fmt_g17(arm.gap);
    out += ',';
    if (arm.analytic) out += fmt_g17(*arm.analytic);
    out += '\n';
  }
  return out;
}

PayoffReport payoff_from_csv(const std::string& text) {
  PayoffReport report;
  for (const std::string& line : data_lines(text, kPayoffHeader)) {
    const std::vector<std::string> f = split(line, ',');
    if (f.size() != 5) {
      throw std::invalid_argument("bad payoff row: '" + line + "'");
    }
    PayoffArm arm;
    arm.arm = f[0];
    arm.mean = to_double(f[1]);
    arm.std_error = to_double(f[2]);
    arm.gap = to_double(f[3]);
    if (!f[4].empty()) arm.analytic = to_double(f[4]);
    report.arms.push_back(std::move(arm));
  }
  return report;
}

std::string payoff_to_json(const PayoffReport& report) {
  std::string out = "[\n";
  for (std::size_t i = 0; i < report.arms.size(); ++i) {
    const PayoffArm& arm = report.arms[i];
    out += "  {\"arm\": \"" + arm.arm + "\"";
    out += ", \"mean\": " + fmt_g17(arm.mean);
    out += ", \"std_error\": " + fmt_g17(arm.std_error);
    out += ", \"gap\": " + fmt_g17(arm.gap);
    out += ", \"analytic\": ";
    out += arm.analytic ? fmt_g17(*arm.analytic) : "null";
    out += "}";
    if (i + 1 < report.arms.size()) out += ',';
    out += '\n';
  }
  out += "]\n";
  return out;
}

PayoffReport payoff_from_json(const std::string& text) {
  const njson j = njson::parse(text);
  PayoffReport report;
  for (const njson& item : j) {
    PayoffArm arm;
    arm.arm = item.at("arm").get<std::string>();
    arm.mean = item.at("mean").get<double>();
    arm.std_error = item.at("std_error").get<double>();
    arm.gap = item.at("gap").get<double>();
    if (!item.at("analytic").is_null()) {
      arm.analytic = item.at("analytic").get<double>();
    }
    report.arms.push_back(std::move(arm));
  }
  return report;
}

// ---- age trace ----

std::string trace_to_csv(const TraceReport& report) {
  std::string out = "t,event";
  const std::size_t n = report.rows.empty() ? 0 : report.rows[0].ages.size();
  for (std::size_t k = 1; k <= n; ++k) out += ",age_" + std::to_string(k);
  out += '\n';
  for (const TraceRow& row : report.rows) {
    out += std::to_string(row.t);
    out += ',';
    out += event_label(row.event);
    for (double a : row.ages) {
      out += ',';
      out += fmt_g17(a);
    }
    out += '\n';
  }
  return out;
}

TraceReport trace_from_csv(const std::string& text) {
  TraceReport report;
  for (const std::string& line : data_lines(text, "t,event")) {
    const std::vector<std::string> f = split(line, ',');
    if (f.size() < 2) {
      throw std::invalid_argument("bad trace row: '" + line + "'");
    }
    TraceRow row;
    row.t = to_int(f[0]);
    row.event = event_from_label(f[1]);
    for (std::size_t i = 2; i < f.size(); ++i) {
      row.ages.push_back(to_double(f[i]));
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

std::string trace_to_json(const TraceReport& report) {
  std::string out = "[\n";
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    const TraceRow& row = report.rows[i];
    out += "  {\"t\": " + std::to_string(row.t);
    out += ", \"event\": \"" + event_label(row.event) + "\"";
    out += ", \"ages\": [";
    for (std::size_t k = 0; k < row.ages.size(); ++k) {
      if (k > 0) out += ", ";
      out += fmt_g17(row.ages[k]);
    }
    out += "]}";
    if (i + 1 < report.rows.size()) out += ',';
    out += '\n';
  }
  out += "]\n";
  return out;
}

TraceReport trace_from_json(const std::string& text) {
  const njson j = njson::parse(text);
  TraceReport report;
  for (const njson& item : j) {
    TraceRow row;
    row.t = item.at("t").get<int>();
    row.event = event_from_label(item.at("event").get<std::string>());
    for (const njson& a : item.at("ages")) {
      row.ages.push_back(a.get<double>());
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

// ---- flag-value parsing ----

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  for (const std::string& part : split(text, ',')) out.push_back(to_double(part));
  if (out.empty()) throw std::invalid_argument("empty list");
  return out;
}

std::vector<int> parse_int_grid(const std::string& text) {
  std::vector<int> out;
  if (text.find(':') != std::string::npos) {
    const std::vector<std::string> ends = split(text, ':');
    if (ends.size() != 2) {
      throw std::invalid_argument("bad range: '" + text + "'");
    }
    const int lo = to_int(ends[0]);
    const int hi = to_int(ends[1]);
    if (hi < lo) throw std::invalid_argument("bad range: '" + text + "'");
    for (int v = lo; v <= hi; ++v) out.push_back(v);
  } else {
    for (const std::string& part : split(text, ',')) {
      out.push_back(to_int(part));
    }
  }
  if (out.empty()) throw std::invalid_argument("empty list");
  return out;
}

SlotLengths parse_sigma(const std::string& text) {
  const std::vector<double> v = parse_double_list(text);
  if (v.size() != 3) {
    throw std::invalid_argument(
        "sigma needs exactly three values: idle,success,collision");
  }
  const SlotLengths sl{v[0], v[1], v[2]};
  sl.validate();
  return sl;
}

std::pair<double, double> parse_range(const std::string& text) {
  const std::vector<std::string> ends = split(text, ':');
  if (ends.size() != 2) {
    throw std::invalid_argument("bad range: '" + text + "'");
  }
  const double lo = to_double(ends[0]);
  const double hi = to_double(ends[1]);
  if (hi < lo) throw std::invalid_argument("bad range: '" + text + "'");
  return {lo, hi};
}

}  // namespace aoi
