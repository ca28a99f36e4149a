#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <sstream>

#include "test_support.hpp"

using namespace wsnres;

TEST(Topology, SingleNodeIsSinkWithoutEdges) {
  Rng rng(1);
  const Topology t = generate_topology(1, 100.0, 20.0, rng);
  EXPECT_EQ(t.size(), 1u);
  EXPECT_EQ(t.sink(), 0u);
  EXPECT_EQ(t.edge_count(), 0u);
  EXPECT_TRUE(is_connected(t));
}

TEST(Topology, SinkSitsAtFieldCenter) {
  Rng rng(3);
  const Topology t = generate_topology(50, 100.0, 20.0, rng);
  EXPECT_EQ(t.position(t.sink()), (Position{50.0, 50.0}));
}

TEST(Topology, AdjacencyMatchesBruteForceOracle) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    const Topology t = generate_topology(10, 100.0, 40.0, rng);
    for (NodeId i = 0; i < t.size(); ++i) {
      for (NodeId j = 0; j < t.size(); ++j) {
        const bool expect = i != j && std::hypot(t.position(i).x - t.position(j).x,
                                                 t.position(i).y - t.position(j).y) <= 40.0;
        EXPECT_EQ(t.adjacent(i, j), expect) << "seed " << seed << " pair " << i << "," << j;
      }
    }
  }
}

TEST(Topology, AdjacencyIsSymmetricAndSorted) {
  const Topology t = fixture::paper_topology(7);
  for (NodeId i = 0; i < t.size(); ++i) {
    const auto& n = t.neighbors(i);
    EXPECT_TRUE(std::is_sorted(n.begin(), n.end()));
    for (NodeId j : n) {
      EXPECT_NE(i, j);
      EXPECT_TRUE(t.adjacent(j, i));
    }
  }
}

TEST(Topology, BoundaryDistanceIsALink) {
  const Topology t = Topology::from_positions({{0, 0}, {20, 0}}, 100.0, 20.0);
  EXPECT_TRUE(t.adjacent(0, 1));
}

TEST(Topology, TwoNodeConnectivity) {
  EXPECT_TRUE(is_connected(Topology::from_positions({{0, 0}, {5, 0}}, 100.0, 20.0)));
  EXPECT_FALSE(is_connected(Topology::from_positions({{0, 0}, {25, 0}}, 100.0, 20.0)));
}

TEST(Topology, AverageDegreeSmallGraphs) {
  EXPECT_DOUBLE_EQ(average_physical_degree(Topology::from_positions({{0, 0}, {5, 0}}, 100.0, 20.0)), 1.0);
  EXPECT_DOUBLE_EQ(
      average_physical_degree(Topology::from_positions({{0, 0}, {5, 0}, {2, 3}}, 100.0, 20.0)), 2.0);
}

TEST(Topology, RejectsPositionsOutsideField) {
  EXPECT_THROW(Topology::from_positions({{0, 0}, {101, 0}}, 100.0, 20.0), std::invalid_argument);
  EXPECT_THROW(Topology::from_positions({}, 100.0, 20.0), std::invalid_argument);
}

TEST(Topology, HopDistancesOnLine) {
  const Topology t = fixture::line_topology(5);
  const auto d = hop_distances(t, 0);
  EXPECT_EQ(d, (std::vector<int>{0, 1, 2, 3, 4}));
  const Topology split = Topology::from_positions({{0, 0}, {50, 0}}, 100.0, 20.0);
  EXPECT_EQ(hop_distances(split, 0)[1], -1);
}

TEST(Topology, PaperParametersMostlyConnected) {
  int connected = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Rng rng(seed);
    connected += is_connected(generate_topology(300, 100.0, 20.0, rng)) ? 1 : 0;
  }
  EXPECT_GE(connected, 190);
}

TEST(Topology, SampleUntilConnectedFailsForTinyRange) {
  Rng rng(5);
  try {
    sample_until_connected(5, 100.0, 1.0, rng, 100);
    FAIL() << "expected TopologyError";
  } catch (const TopologyError& e) {
    EXPECT_NE(std::string(e.what()).find("100 attempts"), std::string::npos);
  }
}

TEST(Topology, SampleUntilConnectedSingleNode) {
  Rng rng(5);
  EXPECT_EQ(sample_until_connected(1, 100.0, 20.0, rng, 1).size(), 1u);
}

TEST(Topology, MeanDegreeNearThirtyOne) {
  double sum = 0.0;
  for (std::uint64_t seed = 0; seed < 30; ++seed) sum += average_physical_degree(fixture::paper_topology(seed));
  EXPECT_NEAR(sum / 30.0, 31.0, 2.0);
}

TEST(Topology, SensorPositionsRoughlyUniform) {
  // Quadrant counts over many sensors stay within 3 sigma of n/4.
  std::array<int, 4> quad{};
  int n = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    Rng rng(seed);
    const Topology t = generate_topology(300, 100.0, 20.0, rng);
    for (NodeId i = 1; i < t.size(); ++i) {
      const Position p = t.position(i);
      ++quad[(p.x >= 50.0 ? 1 : 0) + (p.y >= 50.0 ? 2 : 0)];
      ++n;
    }
  }
  const double sigma = std::sqrt(n * 0.25 * 0.75);
  for (int q : quad) EXPECT_NEAR(q, n / 4.0, 3 * sigma);
}

TEST(Topology, WriteTopologyFormat) {
  const Topology t = Topology::from_positions({{50, 50}, {55, 50}}, 100.0, 20.0);
  std::ostringstream os;
  write_topology(os, t);
  const std::string s = os.str();
  EXPECT_EQ(s.rfind("node_id,x,y,is_sink\n", 0), 0u);
  EXPECT_NE(s.find("\ni,j\n0,1\n"), std::string::npos);
}
