#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdio>
#include <deque>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "wsnres/common.hpp"
#include "wsnres/random.hpp"

namespace wsnres {

class TopologyError : public RuntimeError {
 public:
  using RuntimeError::RuntimeError;
};

// Fixed-radius random graph on a square field. Node 0 is the sink for every
// generated topology. Links are symmetric and include the boundary case
// distance == radio_range.
class Topology {
 public:
  static Topology from_positions(std::vector<Position> positions, double side,
                                 double radio_range, NodeId sink = 0) {
    if (positions.empty()) throw std::invalid_argument("topology needs at least one node");
    if (!(side > 0.0) || !(radio_range > 0.0))
      throw std::invalid_argument("side and radio_range must be positive");
    if (sink >= positions.size()) throw std::invalid_argument("sink id out of range");
    for (const Position& p : positions) {
      if (p.x < 0.0 || p.x > side || p.y < 0.0 || p.y > side)
        throw std::invalid_argument("position outside the field");
    }

    Topology t;
    t.side_ = side;
    t.radio_range_ = radio_range;
    t.sink_ = sink;
    t.positions_ = std::move(positions);
    const std::size_t n = t.positions_.size();
    t.neighbors_.assign(n, {});
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (distance(t.positions_[i], t.positions_[j]) <= radio_range) {
          t.neighbors_[i].push_back(static_cast<NodeId>(j));
          t.neighbors_[j].push_back(static_cast<NodeId>(i));
        }
      }
    }
    return t;
  }

  std::size_t size() const { return positions_.size(); }
  double side() const { return side_; }
  double radio_range() const { return radio_range_; }
  NodeId sink() const { return sink_; }
  Position position(NodeId id) const { return positions_.at(id); }
  const std::vector<Position>& positions() const { return positions_; }

  // Sorted ascending.
  const std::vector<NodeId>& neighbors(NodeId id) const { return neighbors_.at(id); }
  std::size_t degree(NodeId id) const { return neighbors_.at(id).size(); }

  bool adjacent(NodeId a, NodeId b) const {
    if (a >= size() || b >= size()) return false;
    const auto& list = neighbors_[a];
    return std::binary_search(list.begin(), list.end(), b);
  }

  std::size_t edge_count() const {
    std::size_t sum = 0;
    for (const auto& list : neighbors_) sum += list.size();
    return sum / 2;
  }

 private:
  Topology() = default;

  double side_ = 0.0;
  double radio_range_ = 0.0;
  NodeId sink_ = 0;
  std::vector<Position> positions_;
  std::vector<std::vector<NodeId>> neighbors_;
};

// n-1 sensors i.i.d. uniform on [0, side]^2 plus the sink at the center.
inline Topology generate_topology(std::size_t n, double side, double radio_range,
                                  Rng& rng) {
  if (n < 1) throw std::invalid_argument("node count must be at least 1");
  std::vector<Position> positions;
  positions.reserve(n);
  positions.push_back({side / 2.0, side / 2.0});
  for (std::size_t i = 1; i < n; ++i) {
    const double x = uniform_real(rng, 0.0, side);
    const double y = uniform_real(rng, 0.0, side);
    positions.push_back({x, y});
  }
  return Topology::from_positions(std::move(positions), side, radio_range, 0);
}

// BFS hop counts from `from`; -1 marks unreachable nodes.
inline std::vector<int> hop_distances(const Topology& t, NodeId from) {
  std::vector<int> dist(t.size(), -1);
  std::deque<NodeId> frontier{from};
  dist[from] = 0;
  while (!frontier.empty()) {
    const NodeId u = frontier.front();
    frontier.pop_front();
    for (NodeId v : t.neighbors(u)) {
      if (dist[v] < 0) {
        dist[v] = dist[u] + 1;
        frontier.push_back(v);
      }
    }
  }
  return dist;
}

inline bool is_connected(const Topology& t) {
  const auto dist = hop_distances(t, t.sink());
  return std::none_of(dist.begin(), dist.end(), [](int d) { return d < 0; });
}

// Rejection sampling: regenerate until the graph is connected.
inline Topology sample_until_connected(std::size_t n, double side,
                                       double radio_range, Rng& rng,
                                       int max_attempts) {
  if (max_attempts < 1) throw std::invalid_argument("max_attempts must be at least 1");
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    Topology t = generate_topology(n, side, radio_range, rng);
    if (is_connected(t)) return t;
  }
  throw TopologyError("topology disconnected after " + std::to_string(max_attempts) +
                      " attempts");
}

inline double average_physical_degree(const Topology& t) {
  return 2.0 * static_cast<double>(t.edge_count()) / static_cast<double>(t.size());
}

// Node block `node_id,x,y,is_sink`, then a blank line and the edge block `i,j`
// (i < j).
inline void write_topology(std::ostream& os, const Topology& t) {
  os << "node_id,x,y,is_sink\n";
  char buf[96];
  for (NodeId i = 0; i < t.size(); ++i) {
    const Position p = t.position(i);
    std::snprintf(buf, sizeof buf, "%u,%.6f,%.6f,%d\n", i, p.x, p.y, i == t.sink() ? 1 : 0);
    os << buf;
  }
  os << "\ni,j\n";
  for (NodeId i = 0; i < t.size(); ++i) {
    for (NodeId j : t.neighbors(i)) {
      if (i < j) os << i << ',' << j << '\n';
    }
  }
}

}  // namespace wsnres
