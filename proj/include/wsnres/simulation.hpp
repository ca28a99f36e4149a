#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "wsnres/adversary.hpp"
#include "wsnres/common.hpp"
#include "wsnres/engine.hpp"
#include "wsnres/metrics.hpp"
#include "wsnres/packet.hpp"
#include "wsnres/protocols.hpp"
#include "wsnres/random.hpp"
#include "wsnres/topology.hpp"

namespace wsnres {

// How a DSR source treats replies to its discovery after the first one.
enum class DsrReplyPolicy : std::uint8_t {
  LatestWins,  // every reply overwrites the cached route
  FirstWins,   // later replies are ignored
};

struct SimParams {
  Protocol protocol = Protocol::GBR;
  DsrReplyPolicy dsr_reply_policy = DsrReplyPolicy::LatestWins;
  double sim_time = 100.0;
  // After sim_time no DATA is generated, but packets already in the network
  // keep moving for this long before the run is cut.
  double drain_time = 1.0;
  double lambda = 1.0;
  int ttl = 32;
  double hello_period = 3.0;
  double purge_period = 7.5;
  double delta_hop = 0.001;
  double degree_warmup = 7.5;
  double degree_interval = 1.0;
  // When false, DATA only originates from inject_data().
  bool poisson_traffic = true;
};

struct AdversarySetup {
  CompromisedSet compromised;
  Behavior behavior = SelectiveForward{};
  bool malicious_generate_data = true;
};

struct SimSeeds {
  std::uint64_t traffic = 0;
  std::uint64_t phase = 0;
  std::uint64_t protocol = 0;
  std::uint64_t adversary = 0;
  std::uint64_t identity = 0;

  static SimSeeds from(std::uint64_t base) {
    return {derive_seed(base, {tag(Stream::Traffic)}), derive_seed(base, {tag(Stream::Phase)}),
            derive_seed(base, {tag(Stream::Protocol)}), derive_seed(base, {tag(Stream::Adversary)}),
            derive_seed(base, {tag(Stream::Identity)})};
  }
};

struct NodeState {
  NeighborTable table;
  GradientState gradient;
  RouteCache dsr;
  // DATA waiting for the gradient (GBR) or the first HELLO round (GF, RWR).
  std::deque<Packet> held;
  std::uint32_t next_seq = 0;
  bool compromised = false;
  bool interest_seen = false;
};

// One trial: a topology, a protocol and an adversary wired to the engine.
class Simulation {
 public:
  using TransmitObserver = std::function<void(NodeId sender, const Packet&)>;

  Simulation(const Topology& topology, SimParams params, AdversarySetup adversary, SimSeeds seeds)
      : topology_(topology),
        params_(params),
        adversary_(std::move(adversary)),
        seeds_(seeds),
        engine_(topology_, params.delta_hop),
        nodes_(topology_.size()),
        protocol_rng_(seeds.protocol),
        adversary_rng_(seeds.adversary),
        identity_rng_(seeds.identity) {
    metrics_.generated.assign(topology_.size(), 0);
    for (NodeId id : adversary_.compromised.ids()) nodes_.at(id).compromised = true;
  }

  Simulation(const Simulation&) = delete;
  Simulation& operator=(const Simulation&) = delete;

  // Schedules one DATA generation at `origin`.
  void inject_data(NodeId origin, double at) { engine_.schedule(at, origin, TrafficGenerate{}); }

  // Schedules an arbitrary arrival at `to`, as if sent by `from`. For
  // exercising malformed or forged input.
  void inject_packet(NodeId to, NodeId from, Packet p, double at) {
    engine_.schedule(at, to, PacketArrival{std::make_shared<const Packet>(std::move(p)), from});
  }

  void set_trace(std::ostream* out) { engine_.set_trace(out); }
  void set_transmit_observer(TransmitObserver obs) { observer_ = std::move(obs); }

  // Advances to `t`; the first call also seeds the initial events.
  void run_until(double t) {
    if (!started_) start();
    engine_.run_until(t, [this](const Event& e) { handle(e); });
  }

  RunMetrics run() {
    run_until(params_.sim_time + params_.drain_time);
    return finish();
  }

  RunMetrics finish() {
    RunMetrics m = metrics_;
    m.in_flight = m.total_generated() - m.delivered.size() - m.total_dropped();
    for (const NodeState& n : nodes_) {
      if (!n.dsr.route) continue;
      ++m.routes_accepted;
      if (route_compromised(*n.dsr.route)) ++m.routes_compromised;
    }
    return m;
  }

  // DATA physically present in the event queue or in node buffers.
  std::uint64_t data_in_flight() const {
    std::uint64_t count = 0;
    for (const Event& e : engine_.queue().pending()) {
      if (const auto* a = std::get_if<PacketArrival>(&e.payload)) {
        if (a->packet->kind() == PacketKind::Data) ++count;
      }
    }
    for (const NodeState& n : nodes_) count += n.held.size() + n.dsr.pending.size();
    return count;
  }

  const Engine& engine() const { return engine_; }
  const NodeState& node(NodeId id) const { return nodes_.at(id); }
  const RunMetrics& metrics() const { return metrics_; }
  const Topology& topology() const { return topology_; }

 private:
  enum class HopStatus : std::uint8_t { Next, Hold, NoRoute, ProtocolError };

  struct HopChoice {
    HopStatus status;
    NodeId next = kNoNode;
  };

  // True if any hop after the origin is a compromised node.
  bool route_compromised(const std::vector<NodeId>& route) const {
    for (std::size_t i = 1; i < route.size(); ++i) {
      if (nodes_[route[i]].compromised) return true;
    }
    return false;
  }

  bool is_source(NodeId id) const {
    if (id == topology_.sink()) return false;
    return !nodes_[id].compromised || adversary_.malicious_generate_data;
  }

  void start() {
    started_ = true;
    const NodeId sink = topology_.sink();
    if (params_.poisson_traffic) {
      // Per-node streams: a node's arrival times do not depend on which other
      // nodes are sources.
      traffic_rngs_.reserve(topology_.size());
      for (NodeId id = 0; id < topology_.size(); ++id) {
        traffic_rngs_.emplace_back(derive_seed(seeds_.traffic, {id}));
        if (!is_source(id)) continue;
        schedule_generation(id, poisson_next_interarrival(traffic_rngs_[id], params_.lambda));
      }
    }
    if (uses_hello(params_.protocol)) {
      Rng phase(seeds_.phase);
      for (NodeId id = 0; id < topology_.size(); ++id) {
        engine_.schedule(uniform_real(phase, 0.0, params_.hello_period), id,
                         TimerFire{TimerKind::Hello});
      }
      discovery_open_ = true;
      engine_.schedule(params_.hello_period + params_.delta_hop, sink,
                       TimerFire{TimerKind::DiscoveryDone});
    }
    if (params_.protocol == Protocol::GBR) {
      engine_.schedule(0.0, sink, TimerFire{TimerKind::InterestFlood});
    }
    if (params_.degree_warmup <= params_.sim_time) {
      engine_.schedule(params_.degree_warmup, sink, TimerFire{TimerKind::DegreeSample});
    }
  }

  void handle(const Event& e) {
    if (const auto* a = std::get_if<PacketArrival>(&e.payload)) {
      on_packet(e.target, *a->packet, a->from);
    } else if (const auto* t = std::get_if<TimerFire>(&e.payload)) {
      on_timer(e.target, t->kind);
    } else if (const auto* g = std::get_if<TrafficGenerate>(&e.payload)) {
      if (engine_.now() > params_.sim_time) return;
      originate_data(e.target);
      if (g->poisson) {
        schedule_generation(e.target, engine_.now() + poisson_next_interarrival(
                                                          traffic_rngs_[e.target], params_.lambda));
      }
    }
  }

  void schedule_generation(NodeId id, double at) {
    if (at <= params_.sim_time) engine_.schedule(at, id, TrafficGenerate{true});
  }

  void on_timer(NodeId node, TimerKind kind) {
    switch (kind) {
      case TimerKind::Hello:
        if (nodes_[node].compromised && std::holds_alternative<SybilHello>(adversary_.behavior)) {
          sybil_hello_tick(node);
        } else {
          hello_tick(node);
        }
        engine_.schedule_in(params_.hello_period, node, TimerFire{TimerKind::Hello});
        break;
      case TimerKind::InterestFlood: {
        nodes_[node].gradient.height = 0;
        broadcast(node, control_packet(node, InterestBody{0}));
        break;
      }
      case TimerKind::DiscoveryDone:
        discovery_open_ = false;
        for (NodeId id = 0; id < topology_.size(); ++id) flush_held(id);
        break;
      case TimerKind::DegreeSample:
        sample_degrees();
        if (engine_.now() + params_.degree_interval <= params_.sim_time) {
          engine_.schedule_in(params_.degree_interval, node, TimerFire{TimerKind::DegreeSample});
        }
        break;
    }
  }

  void on_packet(NodeId node, const Packet& pkt, NodeId from) {
    switch (pkt.kind()) {
      case PacketKind::Data: on_data(node, pkt); break;
      case PacketKind::Hello: on_hello(node, pkt); break;
      case PacketKind::Rreq: dsr_on_rreq(node, pkt); break;
      case PacketKind::Rrep: dsr_on_rrep(node, pkt); break;
      case PacketKind::Interest: gbr_on_interest(node, pkt, from); break;
    }
  }

  Packet control_packet(NodeId origin, PacketBody body) {
    Packet p;
    p.origin = origin;
    p.seq = nodes_[origin].next_seq++;
    p.ttl = params_.ttl;
    p.created = engine_.now();
    p.body = std::move(body);
    return p;
  }

  void broadcast(NodeId sender, Packet pkt) {
    if (observer_) observer_(sender, pkt);
    engine_.deliver_broadcast(sender, std::move(pkt));
  }

  bool unicast(NodeId sender, NodeId dest, Packet pkt) {
    if (observer_) observer_(sender, pkt);
    return engine_.deliver_unicast(sender, dest, std::move(pkt));
  }

  // ---- DATA plane ----

  void originate_data(NodeId node) {
    ++metrics_.generated[node];
    Packet p = control_packet(node, DataBody{});
    if (params_.protocol == Protocol::DSR) {
      dsr_send_data(node, std::move(p));
    } else {
      route_data(node, std::move(p));
    }
  }

  void on_data(NodeId node, const Packet& pkt) {
    if (node == topology_.sink()) {
      metrics_.delivered.push_back({pkt.origin, pkt.hops});
      return;
    }
    if (nodes_[node].compromised) {
      const Behavior& b = adversary_.behavior;
      if (drops_all_transit(b)) {
        metrics_.count_drop(DropReason::Malicious);
        return;
      }
      if (const auto* sf = std::get_if<SelectiveForward>(&b)) {
        if (selective_forward_filter(*sf, true, adversary_rng_) == FilterVerdict::Drop) {
          metrics_.count_drop(DropReason::Malicious);
          return;
        }
      }
    }
    route_data(node, pkt);
  }

  // One forwarding step for DATA held by `node` (originated or received).
  void route_data(NodeId node, Packet p) {
    if (p.ttl <= 0) {
      metrics_.count_drop(DropReason::Ttl);
      return;
    }
    const HopChoice hop = next_hop(node, p);
    switch (hop.status) {
      case HopStatus::Hold:
        nodes_[node].held.push_back(std::move(p));
        return;
      case HopStatus::NoRoute:
        metrics_.count_drop(DropReason::NoRoute);
        return;
      case HopStatus::ProtocolError:
        metrics_.count_drop(DropReason::ProtocolError);
        return;
      case HopStatus::Next:
        break;
    }
    --p.ttl;
    ++p.hops;
    if (!unicast(node, hop.next, std::move(p))) metrics_.count_drop(DropReason::PhantomNextHop);
  }

  HopChoice next_hop(NodeId node, const Packet& p) {
    NodeState& st = nodes_[node];
    std::optional<NodeId> next;
    switch (params_.protocol) {
      case Protocol::DSR: {
        const auto& route = p.as<DataBody>().source_route;
        const auto idx = static_cast<std::size_t>(p.hops);
        if (idx + 1 >= route.size() || route[idx] != node) return {HopStatus::ProtocolError};
        return {HopStatus::Next, route[idx + 1]};
      }
      case Protocol::GBR:
        if (!st.gradient.has_height()) return {HopStatus::Hold};
        next = gbr_next_hop(st.gradient, protocol_rng_);
        break;
      case Protocol::GF:
        st.table.purge(engine_.now(), params_.purge_period);
        next = gf_next_hop(st.table, topology_.position(node), topology_.position(topology_.sink()));
        if (!next && discovery_open_) return {HopStatus::Hold};
        break;
      case Protocol::RWR:
        st.table.purge(engine_.now(), params_.purge_period);
        next = rwr_next_hop(st.table, protocol_rng_);
        if (!next && discovery_open_) return {HopStatus::Hold};
        break;
    }
    if (!next) return {HopStatus::NoRoute};
    return {HopStatus::Next, *next};
  }

  void flush_held(NodeId node) {
    std::deque<Packet> held = std::exchange(nodes_[node].held, {});
    for (Packet& p : held) route_data(node, std::move(p));
  }

  // ---- HELLO / neighbor tables (GF, RWR) ----

  void hello_tick(NodeId node) {
    HelloBody body;
    if (params_.protocol == Protocol::GF) body.position = topology_.position(node);
    broadcast(node, control_packet(node, body));
  }

  // Beacon under a fresh fabricated identity; the real one is never used.
  void sybil_hello_tick(NodeId node) {
    const auto id_space_max = static_cast<NodeId>(topology_.size());
    const NodeId fake = draw_sybil_identity(topology_, node, id_space_max, identity_rng_);
    HelloBody body;
    if (params_.protocol == Protocol::GF) body.position = topology_.position(node);
    Packet p = control_packet(node, body);
    p.origin = fake;
    broadcast(node, std::move(p));
  }

  void on_hello(NodeId node, const Packet& pkt) {
    nodes_[node].table.upsert(pkt.origin, pkt.as<HelloBody>().position, engine_.now());
  }

  void sample_degrees() {
    const bool tables = uses_hello(params_.protocol);
    for (NodeId id = 0; id < topology_.size(); ++id) {
      if (tables) {
        nodes_[id].table.purge(engine_.now(), params_.purge_period);
        metrics_.degree_samples.push_back(static_cast<std::uint32_t>(nodes_[id].table.size()));
      } else {
        metrics_.degree_samples.push_back(static_cast<std::uint32_t>(topology_.degree(id)));
      }
    }
  }

  // ---- GBR ----

  void gbr_on_interest(NodeId node, const Packet& pkt, NodeId from) {
    if (node == topology_.sink()) return;
    NodeState& st = nodes_[node];
    const int advertised = pkt.as<InterestBody>().advertised_height;
    if (st.compromised && std::holds_alternative<FalseInterest>(adversary_.behavior)) {
      false_interest(node, from, advertised);
      return;
    }
    if (gbr_accept_interest(st.gradient, from, advertised)) {
      broadcast(node, control_packet(node, InterestBody{st.gradient.height}));
      flush_held(node);
    }
  }

  // Claims to be a direct neighbor of the sink, once.
  void false_interest(NodeId node, NodeId from, int advertised) {
    NodeState& st = nodes_[node];
    auto [it, inserted] = st.gradient.neighbor_heights.try_emplace(from, advertised);
    if (!inserted && advertised < it->second) it->second = advertised;
    if (st.interest_seen) return;
    st.interest_seen = true;
    st.gradient.height = 1;
    broadcast(node, control_packet(node, InterestBody{1}));
  }

  // ---- DSR ----

  void dsr_send_data(NodeId node, Packet p) {
    RouteCache& c = nodes_[node].dsr;
    if (c.route) {
      p.as<DataBody>().source_route = *c.route;
      route_data(node, std::move(p));
      return;
    }
    c.pending.push_back(std::move(p));
    if (c.discovery_outstanding) return;
    c.discovery_outstanding = true;
    c.outstanding_request = c.next_request_id++;
    c.mark_seen(node, c.outstanding_request);
    broadcast(node, control_packet(node, RreqBody{c.outstanding_request, {node}}));
  }

  void dsr_on_rreq(NodeId node, const Packet& pkt) {
    const auto& body = pkt.as<RreqBody>();
    if (!nodes_[node].dsr.mark_seen(pkt.origin, body.request_id)) return;
    if (node == topology_.sink()) {
      std::vector<NodeId> route = body.route;
      route.push_back(node);
      send_rrep(node, std::move(route), body.request_id);
      return;
    }
    if (nodes_[node].compromised && std::holds_alternative<FalseRrep>(adversary_.behavior)) {
      false_rrep(node, pkt);
    }
    if (pkt.ttl <= 0) return;
    Packet fwd = pkt;
    --fwd.ttl;
    ++fwd.hops;
    fwd.as<RreqBody>().route.push_back(node);
    broadcast(node, std::move(fwd));
  }

  // Forged reply: the accumulated route, then self, then the sink.
  void false_rrep(NodeId node, const Packet& rreq) {
    const auto& body = rreq.as<RreqBody>();
    std::vector<NodeId> route = body.route;
    route.push_back(node);
    route.push_back(topology_.sink());
    send_rrep(node, std::move(route), body.request_id);
  }

  // Starts a reply at `node`, which sits at some position of `route`.
  void send_rrep(NodeId node, std::vector<NodeId> route, std::uint32_t request_id) {
    const int idx = route_index(route, node);
    Packet p;
    p.origin = topology_.sink();
    p.seq = nodes_[node].next_seq++;
    p.ttl = params_.ttl;
    p.created = engine_.now();
    const NodeId next = route[static_cast<std::size_t>(idx) - 1];
    p.body = RrepBody{request_id, std::move(route)};
    if (!unicast(node, next, std::move(p))) ++metrics_.control_errors;
  }

  void dsr_on_rrep(NodeId node, const Packet& pkt) {
    const auto& body = pkt.as<RrepBody>();
    const int idx = route_index(body.route, node);
    if (idx < 0 || body.route.back() != topology_.sink()) {
      ++metrics_.control_errors;
      return;
    }
    if (idx > 0) {
      Packet fwd = pkt;
      --fwd.ttl;
      ++fwd.hops;
      if (!unicast(node, body.route[static_cast<std::size_t>(idx) - 1], std::move(fwd)))
        ++metrics_.control_errors;
      return;
    }
    RouteCache& c = nodes_[node].dsr;
    if (body.request_id != c.outstanding_request) return;
    const bool first_reply = c.discovery_outstanding;
    if (!first_reply && (!c.route || params_.dsr_reply_policy == DsrReplyPolicy::FirstWins)) return;
    c.discovery_outstanding = false;
    c.route = body.route;
    std::deque<Packet> pending = std::exchange(c.pending, {});
    for (Packet& p : pending) {
      p.as<DataBody>().source_route = *c.route;
      route_data(node, std::move(p));
    }
  }

  const Topology& topology_;
  SimParams params_;
  AdversarySetup adversary_;
  SimSeeds seeds_;
  Engine engine_;
  std::vector<NodeState> nodes_;
  RunMetrics metrics_;
  Rng protocol_rng_;
  Rng adversary_rng_;
  Rng identity_rng_;
  std::vector<SplitMix64> traffic_rngs_;
  TransmitObserver observer_;
  bool started_ = false;
  bool discovery_open_ = false;
};

}  // namespace wsnres
