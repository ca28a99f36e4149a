#pragma once

#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "wsnres/wsnres.hpp"

namespace wsnres::cli {

inline std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  for (const auto& item : detail::split_list(s)) out.push_back(detail::parse_number<double>("k list", item));
  return out;
}

inline std::vector<std::size_t> default_k_values(const RunConfig& cfg) {
  if (cfg.scenario == 4 && cfg.protocol.size() == 1 && cfg.protocol.front() == Protocol::DSR)
    return {1, 2, 3, 4, 5};
  if (cfg.scenario == 2) return percent_to_counts({5, 10, 15}, cfg.node_count);
  return percent_to_counts({10, 20, 30, 40, 50}, cfg.node_count);
}

// Exit codes: 0 success, 1 configuration error, 2 runtime error.
inline int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Insider-attack resiliency simulator for WSN routing protocols", "wsnsim"};
  app.require_subcommand(1);
  CLI::App* run = app.add_subcommand("run", "run a scenario sweep and write CSV results");

  std::string config_path, protocols, k_percent, k_count, out_dir = "results";
  std::string malicious_generate, dump_topology, trace_path;
  int scenario = 1;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  double pf = 0.0;
  unsigned threads = 0;

  run->add_option("--config", config_path, "flat key = value configuration file");
  auto* o_scenario = run->add_option("--scenario", scenario, "attack scenario 1-4");
  auto* o_protocols = run->add_option("--protocols", protocols, "comma list of DSR,GBR,GF,RWR or 'all'");
  auto* o_kpercent = run->add_option("--k-percent", k_percent, "compromised nodes as percent of node_count");
  auto* o_kcount = run->add_option("--k-count", k_count, "compromised nodes as absolute counts");
  o_kpercent->excludes(o_kcount);
  auto* o_trials = run->add_option("--trials", trials, "trials per cell");
  auto* o_seed = run->add_option("--seed", seed, "master seed");
  run->add_option("--out", out_dir, "output directory")->capture_default_str();
  auto* o_pf = run->add_option("--pf", pf, "forwarding probability of compromised nodes");
  auto* o_mgd = run->add_option("--malicious-generate-data", malicious_generate,
                                "whether compromised nodes originate DATA (true/false)");
  run->add_option("--dump-topology", dump_topology, "write the trial-0 topology to this file");
  run->add_option("--trace", trace_path, "write the event trace of the first run to this file");
  run->add_option("--threads", threads, "worker threads (0 = all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  RunConfig cfg;
  try {
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw ConfigError("cannot open config file " + config_path);
      apply_config(in, cfg);
    }
    if (o_scenario->count() > 0) cfg.scenario = scenario;
    if (o_protocols->count() > 0) cfg.protocol = parse_protocol_list(protocols);
    if (o_trials->count() > 0) cfg.trials = trials;
    if (o_seed->count() > 0) cfg.master_seed = seed;
    if (o_pf->count() > 0) cfg.p_f = pf;
    if (o_mgd->count() > 0) cfg.malicious_generate_data = detail::parse_bool("--malicious-generate-data", malicious_generate);
    if (o_kpercent->count() > 0) cfg.k_values = percent_to_counts(parse_double_list(k_percent), cfg.node_count);
    if (o_kcount->count() > 0) {
      cfg.k_values.clear();
      for (const auto& item : detail::split_list(k_count))
        cfg.k_values.push_back(detail::parse_number<std::size_t>("--k-count", item));
    }
    if (cfg.k_values.empty()) cfg.k_values = default_k_values(cfg);
    cfg.threads = threads;
    validate(cfg);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return 1;
  }

  try {
    const SweepResult result = run_sweep(cfg);
    std::filesystem::create_directories(out_dir);
    const auto dir = std::filesystem::path(out_dir);
    {
      std::ofstream raw(dir / "raw.csv", std::ios::binary);
      write_raw_csv(raw, result.raw);
      if (!raw) throw RuntimeError("failed writing raw.csv");
    }
    {
      std::ofstream agg(dir / "aggregate.csv", std::ios::binary);
      write_aggregate_csv(agg, result.aggregate);
      if (!agg) throw RuntimeError("failed writing aggregate.csv");
    }
    if (!dump_topology.empty()) {
      std::ofstream topo_out(dump_topology, std::ios::binary);
      write_topology(topo_out, trial_topology(cfg, 0));
    }
    if (!trace_path.empty()) {
      std::ofstream trace_out(trace_path, std::ios::binary);
      run_single(cfg, cfg.protocol.front(), cfg.k_values.front(), 0, &trace_out);
    }
    out << "wrote " << result.raw.size() << " trial rows and " << result.aggregate.size()
        << " aggregate rows to " << out_dir << '\n';
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "runtime error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace wsnres::cli
