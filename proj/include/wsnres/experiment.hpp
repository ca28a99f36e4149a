#pragma once

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <istream>
#include <limits>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "wsnres/adversary.hpp"
#include "wsnres/common.hpp"
#include "wsnres/metrics.hpp"
#include "wsnres/random.hpp"
#include "wsnres/simulation.hpp"
#include "wsnres/topology.hpp"

namespace wsnres {

// k value meaning "every sensor inside the sinkhole region" (scenario 2).
inline constexpr std::size_t kWholeRegion = std::numeric_limits<std::size_t>::max();

struct RunConfig {
  std::size_t node_count = 300;
  double side = 100.0;
  double radio_range = 20.0;
  double sim_time = 100.0;
  double lambda = 1.0;
  int ttl = 32;
  std::size_t trials = 100;
  double hello_period = 3.0;
  double purge_period = 7.5;
  double delta_hop = 0.001;
  int scenario = 1;
  std::vector<Protocol> protocol{std::begin(kAllProtocols), std::end(kAllProtocols)};
  std::vector<std::size_t> k_values;  // absolute counts
  double p_f = 0.0;
  std::uint64_t master_seed = 42;
  // Unset: on for scenarios 1-3, off for scenario 4.
  std::optional<bool> malicious_generate_data;

  int max_topology_attempts = 100;
  unsigned threads = 0;  // 0 = hardware concurrency

  bool generate_by_malicious() const {
    return malicious_generate_data.value_or(scenario != 4);
  }
};

inline bool scenario_supports(int scenario, Protocol p) {
  switch (scenario) {
    case 1:
    case 2: return true;
    case 3: return p == Protocol::GF || p == Protocol::RWR;
    case 4: return p == Protocol::DSR || p == Protocol::GBR;
    default: return false;
  }
}

inline Protocol parse_protocol(std::string_view s) {
  std::string up(s);
  for (char& c : up) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  for (Protocol p : kAllProtocols) {
    if (to_string(p) == up) return p;
  }
  throw ConfigError("unknown protocol '" + std::string(s) + "'");
}

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto comma = s.find(',', start);
    const auto end = comma == std::string_view::npos ? s.size() : comma;
    std::string item = trim(s.substr(start, end - start));
    if (!item.empty()) out.push_back(std::move(item));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
  std::istringstream is(text);
  T v{};
  is >> v;
  if (is.fail() || !is.eof())
    throw ConfigError("invalid value '" + text + "' for " + key);
  return v;
}

inline bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError("invalid boolean '" + text + "' for " + key);
}

}  // namespace detail

inline std::vector<Protocol> parse_protocol_list(std::string_view s) {
  std::vector<Protocol> out;
  for (const std::string& item : detail::split_list(s)) {
    if (item == "all" || item == "ALL") {
      out.insert(out.end(), std::begin(kAllProtocols), std::end(kAllProtocols));
    } else {
      out.push_back(parse_protocol(item));
    }
  }
  if (out.empty()) throw ConfigError("empty protocol list");
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

inline std::vector<std::size_t> percent_to_counts(const std::vector<double>& percents,
                                                  std::size_t node_count) {
  std::vector<std::size_t> out;
  for (double p : percents) {
    if (p < 0.0 || p >= 100.0) throw ConfigError("k percent must lie in [0, 100)");
    out.push_back(static_cast<std::size_t>(std::llround(p / 100.0 * static_cast<double>(node_count))));
  }
  return out;
}

// Flat `key = value` lines; keys are RunConfig field names, '#' starts a
// comment.
inline void apply_config(std::istream& in, RunConfig& cfg) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (detail::trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = detail::trim(std::string_view(line).substr(0, eq));
    const std::string val = detail::trim(std::string_view(line).substr(eq + 1));
    using detail::parse_number;
    if (key == "node_count") cfg.node_count = parse_number<std::size_t>(key, val);
    else if (key == "side") cfg.side = parse_number<double>(key, val);
    else if (key == "radio_range") cfg.radio_range = parse_number<double>(key, val);
    else if (key == "sim_time") cfg.sim_time = parse_number<double>(key, val);
    else if (key == "lambda") cfg.lambda = parse_number<double>(key, val);
    else if (key == "ttl") cfg.ttl = parse_number<int>(key, val);
    else if (key == "trials") cfg.trials = parse_number<std::size_t>(key, val);
    else if (key == "hello_period") cfg.hello_period = parse_number<double>(key, val);
    else if (key == "purge_period") cfg.purge_period = parse_number<double>(key, val);
    else if (key == "delta_hop") cfg.delta_hop = parse_number<double>(key, val);
    else if (key == "scenario") cfg.scenario = parse_number<int>(key, val);
    else if (key == "protocol") cfg.protocol = parse_protocol_list(val);
    else if (key == "k_values") {
      cfg.k_values.clear();
      for (const auto& item : detail::split_list(val))
        cfg.k_values.push_back(parse_number<std::size_t>(key, item));
    } else if (key == "p_f") cfg.p_f = parse_number<double>(key, val);
    else if (key == "master_seed") cfg.master_seed = parse_number<std::uint64_t>(key, val);
    else if (key == "malicious_generate_data") cfg.malicious_generate_data = detail::parse_bool(key, val);
    else throw ConfigError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
  }
}

inline std::string scenario_compatibility_message(int scenario) {
  switch (scenario) {
    case 3: return "scenario 3 (Sybil HELLO attack) applies only to GF and RWR";
    case 4: return "scenario 4 (false control packets) applies only to DSR and GBR";
    default: return "scenario must be 1, 2, 3 or 4";
  }
}

inline void validate(const RunConfig& cfg) {
  if (cfg.scenario < 1 || cfg.scenario > 4) throw ConfigError(scenario_compatibility_message(cfg.scenario));
  if (cfg.protocol.empty()) throw ConfigError("no protocol selected");
  for (Protocol p : cfg.protocol) {
    if (!scenario_supports(cfg.scenario, p))
      throw ConfigError(std::string(to_string(p)) + ": " + scenario_compatibility_message(cfg.scenario));
  }
  if (cfg.node_count < 1) throw ConfigError("node_count must be at least 1");
  if (!(cfg.side > 0) || !(cfg.radio_range > 0)) throw ConfigError("side and radio_range must be positive");
  if (!(cfg.sim_time > 0) || !(cfg.lambda > 0)) throw ConfigError("sim_time and lambda must be positive");
  if (cfg.ttl < 1) throw ConfigError("ttl must be at least 1");
  if (cfg.trials < 1) throw ConfigError("trials must be at least 1");
  if (!(cfg.hello_period > 0) || !(cfg.purge_period > 0) || !(cfg.delta_hop > 0))
    throw ConfigError("hello_period, purge_period and delta_hop must be positive");
  if (cfg.p_f < 0.0 || cfg.p_f > 1.0) throw ConfigError("p_f must lie in [0, 1]");
  if (cfg.k_values.empty()) throw ConfigError("no k values given");
  for (std::size_t k : cfg.k_values) {
    if (k == kWholeRegion) {
      if (cfg.scenario != 2) throw ConfigError("whole-region placement needs scenario 2");
      continue;
    }
    if (k >= cfg.node_count)
      throw ConfigError("k=" + std::to_string(k) + " must be below node_count");
  }
  if (cfg.max_topology_attempts < 1) throw ConfigError("max_topology_attempts must be positive");
}

inline AdversaryConfig adversary_for(const RunConfig& cfg, Protocol protocol, std::size_t k) {
  AdversaryConfig a;
  a.k = k;
  a.malicious_generate_data = cfg.generate_by_malicious();
  switch (cfg.scenario) {
    case 1: a.behavior = SelectiveForward{cfg.p_f}; break;
    case 2:
      a.placement = Placement::SinkholeRegion;
      a.behavior = SelectiveForward{cfg.p_f};
      break;
    case 3: a.behavior = SybilHello{}; break;
    case 4:
      if (protocol == Protocol::DSR) a.behavior = FalseRrep{};
      else a.behavior = FalseInterest{};
      break;
    default: throw ConfigError(scenario_compatibility_message(cfg.scenario));
  }
  return a;
}

inline SimParams sim_params_for(const RunConfig& cfg, Protocol protocol) {
  SimParams s;
  s.protocol = protocol;
  s.sim_time = cfg.sim_time;
  s.lambda = cfg.lambda;
  s.ttl = cfg.ttl;
  s.hello_period = cfg.hello_period;
  s.purge_period = cfg.purge_period;
  s.delta_hop = cfg.delta_hop;
  return s;
}

// Seed bookkeeping for one trial. The topology, traffic and HELLO phases
// depend only on (master_seed, trial); placement adds (scenario, k); the rest
// is keyed on the full cell.
struct TrialSeeds {
  std::uint64_t trial = 0;
  std::uint64_t topology = 0;
  std::uint64_t placement = 0;
  SimSeeds sim;
};

inline TrialSeeds trial_seeds(const RunConfig& cfg, Protocol protocol, std::size_t k,
                              std::size_t trial) {
  const std::uint64_t master = cfg.master_seed;
  const auto scen = static_cast<std::uint64_t>(cfg.scenario);
  const auto kk = static_cast<std::uint64_t>(k);
  const auto tt = static_cast<std::uint64_t>(trial);
  TrialSeeds s;
  s.trial = derive_seed(master, {scen, static_cast<std::uint64_t>(protocol), kk, tt});
  s.topology = derive_seed(master, {tag(Stream::Topology), tt});
  s.placement = derive_seed(master, {tag(Stream::Placement), scen, kk, tt});
  s.sim.traffic = derive_seed(master, {tag(Stream::Traffic), tt});
  s.sim.phase = derive_seed(master, {tag(Stream::Phase), tt});
  s.sim.protocol = derive_seed(s.trial, {tag(Stream::Protocol)});
  s.sim.adversary = derive_seed(s.trial, {tag(Stream::Adversary)});
  s.sim.identity = derive_seed(s.trial, {tag(Stream::Identity)});
  return s;
}

inline Topology trial_topology(const RunConfig& cfg, std::size_t trial) {
  Rng rng(derive_seed(cfg.master_seed, {tag(Stream::Topology), static_cast<std::uint64_t>(trial)}));
  return sample_until_connected(cfg.node_count, cfg.side, cfg.radio_range, rng,
                                cfg.max_topology_attempts);
}

struct TrialResult {
  std::size_t k = 0;  // resolved count (differs from the request for kWholeRegion)
  std::uint64_t seed = 0;
  RunMetrics metrics;
};

inline std::string trial_label(const RunConfig& cfg, Protocol protocol, std::size_t k,
                               std::size_t trial) {
  std::string ks = k == kWholeRegion ? std::string("region") : std::to_string(k);
  return "scenario " + std::to_string(cfg.scenario) + " " + std::string(to_string(protocol)) +
         " k=" + ks + " trial " + std::to_string(trial) + ": ";
}

inline TrialResult run_single(const RunConfig& cfg, Protocol protocol, std::size_t k,
                              std::size_t trial, std::ostream* trace = nullptr) {
  const TrialSeeds seeds = trial_seeds(cfg, protocol, k, trial);
  try {
    const Topology topo = trial_topology(cfg, trial);
    std::size_t count = k;
    if (k == kWholeRegion) count = sinkhole_region_sensors(topo).size();
    const AdversaryConfig adv = adversary_for(cfg, protocol, count);
    Rng placement_rng(seeds.placement);
    AdversarySetup setup{place(topo, adv.placement, count, placement_rng), adv.behavior,
                         adv.malicious_generate_data};
    Simulation sim(topo, sim_params_for(cfg, protocol), std::move(setup), seeds.sim);
    sim.set_trace(trace);
    return TrialResult{count, seeds.trial, sim.run()};
  } catch (const PlacementError& e) {
    throw PlacementError(trial_label(cfg, protocol, k, trial) + e.what());
  } catch (const TopologyError& e) {
    throw TopologyError(trial_label(cfg, protocol, k, trial) + e.what());
  }
}

struct RawRow {
  int scenario = 0;
  Protocol protocol{};
  std::size_t k = 0;
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  double delivery_ratio = 0.0;
  std::optional<double> avg_path_length;
  double avg_degree = 0.0;
  std::uint64_t generated = 0;
  std::uint64_t delivered = 0;
  std::uint64_t dropped_malicious = 0;
  std::uint64_t dropped_ttl = 0;
  std::uint64_t dropped_phantom = 0;
  std::uint64_t dropped_no_route = 0;
  std::uint64_t routes_accepted = 0;
  std::uint64_t routes_compromised = 0;
};

inline RawRow summarize(int scenario, Protocol protocol, std::size_t trial, const TrialResult& r) {
  const RunMetrics& m = r.metrics;
  RawRow row;
  row.scenario = scenario;
  row.protocol = protocol;
  row.k = r.k;
  row.trial = trial;
  row.seed = r.seed;
  row.delivery_ratio = delivery_ratio(m);
  row.avg_path_length = average_path_length(m);
  row.avg_degree = average_degree(m);
  row.generated = m.total_generated();
  row.delivered = m.delivered.size();
  row.dropped_malicious = m.dropped(DropReason::Malicious);
  row.dropped_ttl = m.dropped(DropReason::Ttl);
  row.dropped_phantom = m.dropped(DropReason::PhantomNextHop);
  row.dropped_no_route = m.dropped(DropReason::NoRoute);
  row.routes_accepted = m.routes_accepted;
  row.routes_compromised = m.routes_compromised;
  return row;
}

struct AggregateRow {
  int scenario = 0;
  Protocol protocol{};
  std::size_t k = 0;
  std::string metric;
  std::optional<double> mean;
  std::optional<double> ci95;
  std::size_t trials = 0;  // values that entered the aggregate
};

struct SweepResult {
  std::vector<RawRow> raw;  // sorted by (protocol, k, trial)
  std::vector<AggregateRow> aggregate;

  // Mean of one metric over the raw rows of a cell.
  std::optional<AggregateRow> find(Protocol p, std::size_t k, std::string_view metric) const {
    for (const auto& a : aggregate) {
      if (a.protocol == p && a.k == k && a.metric == metric) return a;
    }
    return std::nullopt;
  }
};

inline std::vector<AggregateRow> aggregate_cell(const std::vector<RawRow>& rows) {
  const RawRow& head = rows.front();
  std::vector<AggregateRow> out;
  auto emit = [&](const char* name, const std::vector<double>& values) {
    AggregateRow a;
    a.scenario = head.scenario;
    a.protocol = head.protocol;
    a.k = head.k;
    a.metric = name;
    a.trials = values.size();
    if (!values.empty()) {
      const Summary s = aggregate(values);
      a.mean = s.mean;
      a.ci95 = s.ci95;
    }
    out.push_back(std::move(a));
  };
  std::vector<double> dr, pl, deg;
  for (const RawRow& r : rows) {
    dr.push_back(r.delivery_ratio);
    if (r.avg_path_length) pl.push_back(*r.avg_path_length);
    deg.push_back(r.avg_degree);
  }
  emit("delivery_ratio", dr);
  emit("avg_path_length", pl);
  emit("avg_degree", deg);
  return out;
}

inline unsigned effective_threads(unsigned requested) {
  if (requested != 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

// Runs every (protocol, k, trial) of the configuration. Trials may execute on
// several threads; rows come back in a fixed order regardless.
inline SweepResult run_sweep(const RunConfig& cfg) {
  validate(cfg);
  std::vector<Protocol> protocols = cfg.protocol;
  std::sort(protocols.begin(), protocols.end());
  protocols.erase(std::unique(protocols.begin(), protocols.end()), protocols.end());
  std::vector<std::size_t> ks = cfg.k_values;
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());

  struct Job {
    Protocol protocol;
    std::size_t k;
    std::size_t trial;
  };
  std::vector<Job> jobs;
  for (Protocol p : protocols)
    for (std::size_t k : ks)
      for (std::size_t t = 0; t < cfg.trials; ++t) jobs.push_back({p, k, t});

  std::vector<RawRow> rows(jobs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      {
        std::lock_guard lock(failure_mutex);
        if (failure) return;
      }
      try {
        const Job& j = jobs[i];
        rows[i] = summarize(cfg.scenario, j.protocol, j.trial, run_single(cfg, j.protocol, j.k, j.trial));
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const unsigned n_threads =
      std::min<unsigned>(effective_threads(cfg.threads), static_cast<unsigned>(jobs.size()));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  SweepResult result;
  result.raw = std::move(rows);
  for (std::size_t start = 0; start < result.raw.size(); start += cfg.trials) {
    std::vector<RawRow> cell(result.raw.begin() + static_cast<std::ptrdiff_t>(start),
                             result.raw.begin() + static_cast<std::ptrdiff_t>(start + cfg.trials));
    for (auto& a : aggregate_cell(cell)) result.aggregate.push_back(std::move(a));
  }
  return result;
}

namespace detail {

inline std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

inline std::string fmt_optional(const std::optional<double>& v) {
  return v ? fmt_double(*v) : std::string();
}

}  // namespace detail

inline constexpr std::string_view kRawCsvHeader =
    "scenario,protocol,k,trial,seed,delivery_ratio,avg_path_length,avg_degree,generated,"
    "delivered,dropped_malicious,dropped_ttl,dropped_phantom,dropped_no_route";

inline constexpr std::string_view kAggregateCsvHeader = "scenario,protocol,k,metric,mean,ci95,trials";

inline void write_raw_csv(std::ostream& os, const std::vector<RawRow>& rows) {
  os << kRawCsvHeader << '\n';
  for (const RawRow& r : rows) {
    os << r.scenario << ',' << to_string(r.protocol) << ',' << r.k << ',' << r.trial << ','
       << r.seed << ',' << detail::fmt_double(r.delivery_ratio) << ','
       << detail::fmt_optional(r.avg_path_length) << ',' << detail::fmt_double(r.avg_degree)
       << ',' << r.generated << ',' << r.delivered << ',' << r.dropped_malicious << ','
       << r.dropped_ttl << ',' << r.dropped_phantom << ',' << r.dropped_no_route << '\n';
  }
}

inline void write_aggregate_csv(std::ostream& os, const std::vector<AggregateRow>& rows) {
  os << kAggregateCsvHeader << '\n';
  for (const AggregateRow& a : rows) {
    os << a.scenario << ',' << to_string(a.protocol) << ',' << a.k << ',' << a.metric << ','
       << detail::fmt_optional(a.mean) << ',' << detail::fmt_optional(a.ci95) << ',' << a.trials
       << '\n';
  }
}

}  // namespace wsnres
