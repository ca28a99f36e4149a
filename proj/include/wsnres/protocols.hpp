#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <optional>
#include <unordered_set>
#include <vector>

#include "wsnres/common.hpp"
#include "wsnres/packet.hpp"
#include "wsnres/random.hpp"

namespace wsnres {

struct NeighborEntry {
  NodeId identity = kNoNode;
  std::optional<Position> position;  // GF only
  double last_heard = 0.0;
};

// HELLO-driven neighborhood table keyed by claimed identity, kept sorted by
// identity. Entries not refreshed within the purge period are evicted.
class NeighborTable {
 public:
  void upsert(NodeId identity, std::optional<Position> position, double now) {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), identity,
                               [](const NeighborEntry& e, NodeId id) { return e.identity < id; });
    if (it == entries_.end() || it->identity != identity) {
      it = entries_.insert(it, NeighborEntry{identity, position, now});
    } else {
      it->position = position;
      it->last_heard = now;
    }
    oldest_ = std::min(oldest_, now);
  }

  void purge(double now, double lifetime) {
    if (now - oldest_ <= lifetime) return;
    std::erase_if(entries_, [&](const NeighborEntry& e) { return now - e.last_heard > lifetime; });
    oldest_ = std::numeric_limits<double>::infinity();
    for (const auto& e : entries_) oldest_ = std::min(oldest_, e.last_heard);
  }

  bool contains(NodeId identity) const {
    return std::binary_search(entries_.begin(), entries_.end(), NeighborEntry{identity, {}, 0.0},
                              [](const NeighborEntry& a, const NeighborEntry& b) {
                                return a.identity < b.identity;
                              });
  }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  // Ordered by identity.
  const std::vector<NeighborEntry>& entries() const { return entries_; }

 private:
  std::vector<NeighborEntry> entries_;
  // Lower bound on the stalest last_heard; lets purge() skip the scan.
  double oldest_ = std::numeric_limits<double>::infinity();
};

inline constexpr int kNoHeight = std::numeric_limits<int>::max();

struct GradientState {
  int height = kNoHeight;
  std::map<NodeId, int> neighbor_heights;  // best height each neighbor advertised

  bool has_height() const { return height != kNoHeight; }
};

// Records an INTEREST advertisement. Returns true when the node's own height
// improved, in which case the caller re-floods with the new height.
inline bool gbr_accept_interest(GradientState& g, NodeId from, int advertised) {
  auto [it, inserted] = g.neighbor_heights.try_emplace(from, advertised);
  if (!inserted && advertised < it->second) it->second = advertised;
  if (advertised + 1 < g.height) {
    g.height = advertised + 1;
    return true;
  }
  return false;
}

// Uniform choice among neighbors whose recorded height is exactly own - 1.
inline std::optional<NodeId> gbr_next_hop(const GradientState& g, Rng& rng) {
  if (!g.has_height() || g.height == 0) return std::nullopt;
  std::vector<NodeId> downhill;
  for (const auto& [id, h] : g.neighbor_heights) {
    if (h == g.height - 1) downhill.push_back(id);
  }
  if (downhill.empty()) return std::nullopt;
  if (downhill.size() == 1) return downhill.front();
  return downhill[uniform_index(rng, downhill.size())];
}

// Greedy geographic step: the entry closest to the sink among those strictly
// closer than self. Ties go to the smallest identity.
inline std::optional<NodeId> gf_next_hop(const NeighborTable& table, Position self,
                                         Position sink) {
  double best = distance(self, sink);
  std::optional<NodeId> choice;
  for (const NeighborEntry& entry : table.entries()) {
    if (!entry.position) continue;
    const double d = distance(*entry.position, sink);
    if (d < best) {
      best = d;
      choice = entry.identity;
    }
  }
  return choice;
}

// Uniform over the whole table; the previous hop is not excluded.
inline std::optional<NodeId> rwr_next_hop(const NeighborTable& table, Rng& rng) {
  if (table.empty()) return std::nullopt;
  return table.entries()[uniform_index(rng, table.size())].identity;
}

struct RouteCache {
  std::optional<std::vector<NodeId>> route;  // self ... sink
  std::deque<Packet> pending;                // DATA awaiting a route, FIFO
  bool discovery_outstanding = false;
  std::uint32_t outstanding_request = 0;
  std::uint32_t next_request_id = 0;
  std::unordered_set<std::uint64_t> seen_rreq;

  // Returns true if (origin, request_id) had not been seen before.
  bool mark_seen(NodeId origin, std::uint32_t request_id) {
    return seen_rreq.insert((static_cast<std::uint64_t>(origin) << 32) | request_id).second;
  }
};

// Index of `node` in a route, or -1.
inline int route_index(const std::vector<NodeId>& route, NodeId node) {
  for (std::size_t i = 0; i < route.size(); ++i) {
    if (route[i] == node) return static_cast<int>(i);
  }
  return -1;
}

}  // namespace wsnres
