#include <gtest/gtest.h>

#include <fstream>
#include <set>
#include <sstream>

#include "test_support.hpp"

using namespace wsnres;

namespace {

RunConfig small_config(int scenario = 1) {
  RunConfig cfg;
  cfg.scenario = scenario;
  cfg.sim_time = 10.0;
  cfg.trials = 3;
  cfg.threads = 1;
  cfg.k_values = {0, 30};
  return cfg;
}

std::string csv(const SweepResult& r, bool raw) {
  std::ostringstream os;
  if (raw) write_raw_csv(os, r.raw);
  else write_aggregate_csv(os, r.aggregate);
  return os.str();
}

}  // namespace

TEST(Config, DefaultsMatchPaperTable) {
  const RunConfig cfg;
  EXPECT_EQ(cfg.node_count, 300u);
  EXPECT_EQ(cfg.side, 100.0);
  EXPECT_EQ(cfg.radio_range, 20.0);
  EXPECT_EQ(cfg.sim_time, 100.0);
  EXPECT_EQ(cfg.lambda, 1.0);
  EXPECT_EQ(cfg.ttl, 32);
  EXPECT_EQ(cfg.trials, 100u);
  EXPECT_EQ(cfg.hello_period, 3.0);
  EXPECT_EQ(cfg.purge_period, 7.5);
  EXPECT_EQ(cfg.delta_hop, 0.001);
  EXPECT_EQ(cfg.p_f, 0.0);
}

TEST(Config, ParsesFlatKeyValue) {
  std::istringstream in(
      "# comment\n"
      "node_count = 120\n"
      "scenario=3   # trailing comment\n"
      "protocol = gf, RWR\n"
      "k_values = 5, 10\n"
      "\n"
      "malicious_generate_data = false\n"
      "master_seed = 7\n");
  RunConfig cfg;
  apply_config(in, cfg);
  EXPECT_EQ(cfg.node_count, 120u);
  EXPECT_EQ(cfg.scenario, 3);
  EXPECT_EQ(cfg.protocol, (std::vector<Protocol>{Protocol::GF, Protocol::RWR}));
  EXPECT_EQ(cfg.k_values, (std::vector<std::size_t>{5, 10}));
  EXPECT_EQ(cfg.malicious_generate_data, std::optional<bool>(false));
  EXPECT_EQ(cfg.master_seed, 7u);
}

TEST(Config, RejectsUnknownKeyAndBadValue) {
  RunConfig cfg;
  std::istringstream unknown("nodes = 3\n");
  EXPECT_THROW(apply_config(unknown, cfg), ConfigError);
  std::istringstream bad("ttl = many\n");
  EXPECT_THROW(apply_config(bad, cfg), ConfigError);
  std::istringstream noeq("ttl 3\n");
  EXPECT_THROW(apply_config(noeq, cfg), ConfigError);
}

TEST(Config, ScenarioCompatibility) {
  RunConfig cfg = small_config(3);
  cfg.protocol = {Protocol::DSR};
  EXPECT_THROW(validate(cfg), ConfigError);
  cfg.protocol = {Protocol::GF, Protocol::RWR};
  EXPECT_NO_THROW(validate(cfg));
  cfg.scenario = 4;
  EXPECT_THROW(validate(cfg), ConfigError);
  cfg.protocol = {Protocol::DSR, Protocol::GBR};
  EXPECT_NO_THROW(validate(cfg));
  cfg.scenario = 5;
  EXPECT_THROW(validate(cfg), ConfigError);
}

TEST(Config, MaliciousDataDefaultPerScenario) {
  RunConfig cfg;
  for (int s : {1, 2, 3}) {
    cfg.scenario = s;
    EXPECT_TRUE(cfg.generate_by_malicious());
  }
  cfg.scenario = 4;
  EXPECT_FALSE(cfg.generate_by_malicious());
  cfg.malicious_generate_data = true;
  EXPECT_TRUE(cfg.generate_by_malicious());
}

TEST(Config, PercentToCounts) {
  EXPECT_EQ(percent_to_counts({10, 20, 30, 40, 50}, 300),
            (std::vector<std::size_t>{30, 60, 90, 120, 150}));
  EXPECT_THROW(percent_to_counts({100}, 300), ConfigError);
}

TEST(Config, KMustStayBelowNodeCount) {
  RunConfig cfg = small_config();
  cfg.k_values = {300};
  EXPECT_THROW(validate(cfg), ConfigError);
}

TEST(Experiment, RunSingleIsDeterministic) {
  const RunConfig cfg = small_config();
  const TrialResult a = run_single(cfg, Protocol::GF, 30, 1);
  const TrialResult b = run_single(cfg, Protocol::GF, 30, 1);
  EXPECT_EQ(a.seed, b.seed);
  EXPECT_EQ(a.metrics.delivered.size(), b.metrics.delivered.size());
  EXPECT_EQ(a.metrics.drops, b.metrics.drops);
  EXPECT_EQ(a.metrics.degree_samples, b.metrics.degree_samples);
}

TEST(Experiment, BaselineGbrDeliversEverything) {
  const TrialResult r = run_single(small_config(), Protocol::GBR, 0, 0);
  EXPECT_EQ(delivery_ratio(r.metrics), 1.0);
}

TEST(Experiment, SeedHygiene) {
  RunConfig cfg;
  // Topology depends only on (seed, trial).
  const auto a = trial_seeds(cfg, Protocol::GF, 30, 4);
  const auto b = trial_seeds(cfg, Protocol::DSR, 90, 4);
  EXPECT_EQ(a.topology, b.topology);
  EXPECT_EQ(a.sim.traffic, b.sim.traffic);
  EXPECT_EQ(a.sim.phase, b.sim.phase);
  EXPECT_NE(a.placement, b.placement);
  EXPECT_NE(a.trial, b.trial);
  const auto c = trial_seeds(cfg, Protocol::GF, 30, 5);
  EXPECT_NE(a.topology, c.topology);
  // Placement is shared across protocols, so protocols face the same attackers.
  EXPECT_EQ(trial_seeds(cfg, Protocol::GF, 30, 4).placement,
            trial_seeds(cfg, Protocol::RWR, 30, 4).placement);
  EXPECT_EQ(trial_topology(cfg, 4).positions(), trial_topology(cfg, 4).positions());
}

TEST(Experiment, ErrorsNameTheTrial) {
  RunConfig cfg = small_config(2);
  cfg.k_values = {250};
  try {
    run_single(cfg, Protocol::GF, 250, 2);
    FAIL() << "expected PlacementError";
  } catch (const PlacementError& e) {
    EXPECT_NE(std::string(e.what()).find("scenario 2 GF k=250 trial 2"), std::string::npos);
  }
}

TEST(Experiment, WholeRegionResolvesCount) {
  RunConfig cfg = small_config(2);
  const TrialResult r = run_single(cfg, Protocol::GBR, kWholeRegion, 0);
  EXPECT_EQ(r.k, sinkhole_region_sensors(trial_topology(cfg, 0)).size());
}

TEST(Sweep, RowCountsAndOrder) {
  RunConfig cfg = small_config();
  cfg.k_values = {90, 30};
  const SweepResult r = run_sweep(cfg);
  EXPECT_EQ(r.raw.size(), 4u * 2u * 3u);
  EXPECT_EQ(r.aggregate.size(), 4u * 2u * 3u);
  std::set<std::tuple<Protocol, std::size_t, std::string>> cells;
  for (const auto& a : r.aggregate) {
    EXPECT_TRUE(cells.insert({a.protocol, a.k, a.metric}).second);
    EXPECT_EQ(a.trials, 3u);
  }
  for (std::size_t i = 1; i < r.raw.size(); ++i) {
    const auto& p = r.raw[i - 1];
    const auto& q = r.raw[i];
    EXPECT_LE(std::tie(p.protocol, p.k, p.trial), std::tie(q.protocol, q.k, q.trial));
  }
}

TEST(Sweep, ByteIdenticalAcrossRunsAndThreadCounts) {
  RunConfig cfg = small_config();
  const SweepResult a = run_sweep(cfg);
  const SweepResult b = run_sweep(cfg);
  cfg.threads = 4;
  const SweepResult c = run_sweep(cfg);
  EXPECT_EQ(csv(a, true), csv(b, true));
  EXPECT_EQ(csv(a, false), csv(b, false));
  EXPECT_EQ(csv(a, true), csv(c, true));
  EXPECT_EQ(csv(a, false), csv(c, false));
}

TEST(Sweep, CsvHeaders) {
  RunConfig cfg = small_config();
  cfg.protocol = {Protocol::GBR};
  cfg.k_values = {0};
  const SweepResult r = run_sweep(cfg);
  const std::string raw = csv(r, true);
  const std::string agg = csv(r, false);
  EXPECT_EQ(raw.substr(0, raw.find('\n')),
            "scenario,protocol,k,trial,seed,delivery_ratio,avg_path_length,avg_degree,generated,"
            "delivered,dropped_malicious,dropped_ttl,dropped_phantom,dropped_no_route");
  EXPECT_EQ(agg.substr(0, agg.find('\n')), "scenario,protocol,k,metric,mean,ci95,trials");
  EXPECT_NE(agg.find("1,GBR,0,delivery_ratio,1.000000,0.000000,3\n"), std::string::npos);
}

TEST(Sweep, EmptyPathLengthLeavesBlankCell) {
  RawRow row;
  row.scenario = 1;
  row.protocol = Protocol::RWR;
  row.k = 5;
  std::vector<AggregateRow> agg = aggregate_cell({row, row});
  ASSERT_EQ(agg.size(), 3u);
  EXPECT_EQ(agg[1].metric, "avg_path_length");
  EXPECT_FALSE(agg[1].mean);
  EXPECT_EQ(agg[1].trials, 0u);
  std::ostringstream os;
  write_aggregate_csv(os, agg);
  EXPECT_NE(os.str().find("1,RWR,5,avg_path_length,,,0\n"), std::string::npos);
}

TEST(Config, ShippedReferenceConfigMatchesDefaults) {
  std::ifstream in(std::string(WSNRES_SOURCE_DIR) + "/configs/paper.cfg");
  ASSERT_TRUE(in);
  RunConfig cfg;
  cfg.node_count = 1;
  cfg.ttl = 1;
  cfg.purge_period = 1.0;
  apply_config(in, cfg);
  const RunConfig def;
  EXPECT_EQ(cfg.node_count, def.node_count);
  EXPECT_EQ(cfg.side, def.side);
  EXPECT_EQ(cfg.radio_range, def.radio_range);
  EXPECT_EQ(cfg.sim_time, def.sim_time);
  EXPECT_EQ(cfg.lambda, def.lambda);
  EXPECT_EQ(cfg.ttl, def.ttl);
  EXPECT_EQ(cfg.trials, def.trials);
  EXPECT_EQ(cfg.hello_period, def.hello_period);
  EXPECT_EQ(cfg.purge_period, def.purge_period);
  EXPECT_EQ(cfg.delta_hop, def.delta_hop);
  EXPECT_EQ(cfg.p_f, def.p_f);
  EXPECT_EQ(cfg.master_seed, def.master_seed);
}
