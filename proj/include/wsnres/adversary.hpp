#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <variant>
#include <vector>

#include "wsnres/common.hpp"
#include "wsnres/random.hpp"
#include "wsnres/topology.hpp"

namespace wsnres {

class PlacementError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

enum class Placement : std::uint8_t { UniformWholeField, SinkholeRegion };

// Transit DATA is forwarded with probability p_f, dropped otherwise.
struct SelectiveForward {
  double p_f = 0.0;
};

// Beacons a fresh fabricated identity every HELLO period.
struct SybilHello {};

// Answers every RREQ with a reply claiming a one-hop link to the sink.
struct FalseRrep {};

// Advertises height 1 in the gradient flood.
struct FalseInterest {};

using Behavior = std::variant<SelectiveForward, SybilHello, FalseRrep, FalseInterest>;

struct AdversaryConfig {
  Placement placement = Placement::UniformWholeField;
  std::size_t k = 0;
  Behavior behavior = SelectiveForward{};
  bool malicious_generate_data = true;
};

// Attackers that pull traffic with forged control packets also black-hole it.
inline bool drops_all_transit(const Behavior& b) {
  return std::holds_alternative<FalseRrep>(b) || std::holds_alternative<FalseInterest>(b);
}

class CompromisedSet {
 public:
  CompromisedSet() = default;
  CompromisedSet(std::vector<NodeId> ids, std::size_t node_count)
      : ids_(std::move(ids)), member_(node_count, false) {
    std::sort(ids_.begin(), ids_.end());
    for (NodeId id : ids_) member_.at(id) = true;
  }

  const std::vector<NodeId>& ids() const { return ids_; }
  std::size_t size() const { return ids_.size(); }
  bool contains(NodeId id) const { return id < member_.size() && member_[id]; }

 private:
  std::vector<NodeId> ids_;  // sorted
  std::vector<bool> member_;
};

namespace detail {

// k distinct elements of `pool`, uniformly without replacement.
inline std::vector<NodeId> sample_without_replacement(std::vector<NodeId> pool, std::size_t k,
                                                      Rng& rng) {
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + uniform_index(rng, pool.size() - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  return pool;
}

}  // namespace detail

inline CompromisedSet place_uniform(const Topology& t, std::size_t k, Rng& rng) {
  if (k >= t.size())
    throw PlacementError("k=" + std::to_string(k) + " must be below node_count=" +
                         std::to_string(t.size()));
  std::vector<NodeId> sensors;
  sensors.reserve(t.size() - 1);
  for (NodeId i = 0; i < t.size(); ++i) {
    if (i != t.sink()) sensors.push_back(i);
  }
  return CompromisedSet(detail::sample_without_replacement(std::move(sensors), k, rng), t.size());
}

// The M x M square centered on the sink with M = side / 2, i.e. a quarter of
// the field area.
inline bool in_sinkhole_region(const Topology& t, Position p) {
  const Position c = t.position(t.sink());
  const double half = t.side() / 4.0;
  return std::abs(p.x - c.x) <= half && std::abs(p.y - c.y) <= half;
}

inline std::vector<NodeId> sinkhole_region_sensors(const Topology& t) {
  std::vector<NodeId> out;
  for (NodeId i = 0; i < t.size(); ++i) {
    if (i != t.sink() && in_sinkhole_region(t, t.position(i))) out.push_back(i);
  }
  return out;
}

inline CompromisedSet place_sinkhole(const Topology& t, std::size_t k, Rng& rng) {
  std::vector<NodeId> region = sinkhole_region_sensors(t);
  if (region.size() < k)
    throw PlacementError("sinkhole region holds " + std::to_string(region.size()) +
                         " sensors, fewer than k=" + std::to_string(k));
  return CompromisedSet(detail::sample_without_replacement(std::move(region), k, rng), t.size());
}

inline CompromisedSet place(const Topology& t, Placement placement, std::size_t k, Rng& rng) {
  return placement == Placement::SinkholeRegion ? place_sinkhole(t, k, rng)
                                                : place_uniform(t, k, rng);
}

enum class FilterVerdict : std::uint8_t { Forward, Drop };

// Self-originated DATA always passes; transit DATA survives with prob. p_f.
inline FilterVerdict selective_forward_filter(const SelectiveForward& b, bool transit, Rng& rng) {
  if (!transit) return FilterVerdict::Forward;
  if (b.p_f <= 0.0) return FilterVerdict::Drop;
  if (b.p_f >= 1.0) return FilterVerdict::Forward;
  return bernoulli(rng, b.p_f) ? FilterVerdict::Forward : FilterVerdict::Drop;
}

// Fresh Sybil identity drawn uniformly from [0, id_space_max], excluding the
// attacker's own id and the ids of its physical neighbors.
inline NodeId draw_sybil_identity(const Topology& t, NodeId self, NodeId id_space_max,
                                  Rng& rng) {
  const auto& nbrs = t.neighbors(self);
  if (nbrs.size() + 1 >= std::size_t{id_space_max} + 1) throw PlacementError("identity space exhausted");
  for (;;) {
    const auto id = static_cast<NodeId>(uniform_index(rng, std::size_t{id_space_max} + 1));
    if (id == self) continue;
    if (std::binary_search(nbrs.begin(), nbrs.end(), id)) continue;
    return id;
  }
}

}  // namespace wsnres
