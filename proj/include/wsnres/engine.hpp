#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <memory>
#include <ostream>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "wsnres/common.hpp"
#include "wsnres/packet.hpp"
#include "wsnres/random.hpp"
#include "wsnres/topology.hpp"

namespace wsnres {

enum class TimerKind : std::uint8_t {
  Hello,
  InterestFlood,
  DiscoveryDone,
  DegreeSample,
};

inline std::string_view to_string(TimerKind k) {
  switch (k) {
    case TimerKind::Hello: return "hello";
    case TimerKind::InterestFlood: return "interest_flood";
    case TimerKind::DiscoveryDone: return "discovery_done";
    case TimerKind::DegreeSample: return "degree_sample";
  }
  return "?";
}

struct PacketArrival {
  std::shared_ptr<const Packet> packet;
  NodeId from = kNoNode;  // true sender
};

struct TimerFire {
  TimerKind kind{};
};

struct TrafficGenerate {
  bool poisson = false;  // schedules its successor when processed
};

// One broadcast transmission. The run loop fans it out into one PacketArrival
// per physical neighbor of `target` (the sender), in ascending id order.
struct BroadcastFanout {
  std::shared_ptr<const Packet> packet;
};

using EventPayload = std::variant<PacketArrival, TimerFire, TrafficGenerate, BroadcastFanout>;

struct Event {
  double time = 0.0;
  std::uint64_t sequence = 0;
  NodeId target = kNoNode;
  EventPayload payload;
};

// Min-heap keyed on (time, sequence). Kept as a plain vector so pending
// events can be inspected.
class EventQueue {
 public:
  std::uint64_t push(double time, NodeId target, EventPayload payload) {
    const std::uint64_t seq = next_sequence_++;
    heap_.push_back(Event{time, seq, target, std::move(payload)});
    std::push_heap(heap_.begin(), heap_.end(), Later{});
    return seq;
  }

  Event pop() {
    std::pop_heap(heap_.begin(), heap_.end(), Later{});
    Event e = std::move(heap_.back());
    heap_.pop_back();
    return e;
  }

  const Event& top() const { return heap_.front(); }
  bool empty() const { return heap_.empty(); }
  std::size_t size() const { return heap_.size(); }
  const std::vector<Event>& pending() const { return heap_; }

 private:
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      if (a.time != b.time) return a.time > b.time;
      return a.sequence > b.sequence;
    }
  };

  std::vector<Event> heap_;
  std::uint64_t next_sequence_ = 0;
};

inline double interarrival_from_uniform(double u, double lambda) {
  return -std::log(u) / lambda;
}

// Exponential inter-arrival time of a Poisson process with rate lambda.
template <class G>
double poisson_next_interarrival(G& rng, double lambda) {
  return interarrival_from_uniform(uniform_open01(rng), lambda);
}

// Discrete-event core with an ideal MAC: no loss, no collisions, fixed
// per-hop latency. Single-threaded.
class Engine {
 public:
  Engine(const Topology& topology, double delta_hop)
      : topology_(&topology), delta_hop_(delta_hop) {}

  double now() const { return clock_; }
  double delta_hop() const { return delta_hop_; }
  const Topology& topology() const { return *topology_; }

  void schedule(double time, NodeId target, EventPayload payload) {
    assert(time >= clock_ && "event scheduled in the past");
    queue_.push(time, target, std::move(payload));
  }

  void schedule_in(double delay, NodeId target, EventPayload payload) {
    schedule(clock_ + delay, target, std::move(payload));
  }

  // Every physical neighbor of sender hears the packet delta_hop later.
  void deliver_broadcast(NodeId sender, Packet packet) {
    if (topology_->degree(sender) == 0) return;
    schedule_in(delta_hop_, sender,
                BroadcastFanout{std::make_shared<const Packet>(std::move(packet))});
  }

  // Resolves a claimed identity against the sender's physical neighborhood.
  // Returns false when nobody with that identity is in range; the packet is
  // then lost and the caller accounts for it.
  bool deliver_unicast(NodeId sender, NodeId dest_identity, Packet packet) {
    if (!topology_->adjacent(sender, dest_identity)) return false;
    schedule_in(delta_hop_, dest_identity,
                PacketArrival{std::make_shared<const Packet>(std::move(packet)), sender});
    return true;
  }

  // Processes every event with time <= t_end, then sets the clock to t_end.
  // The handler receives PacketArrival, TimerFire and TrafficGenerate events.
  template <class Handler>
  void run_until(double t_end, Handler&& handle) {
    assert(t_end >= clock_);
    while (!queue_.empty() && queue_.top().time <= t_end) {
      Event e = queue_.pop();
      assert(e.time >= clock_);
      clock_ = e.time;
      if (auto* fan = std::get_if<BroadcastFanout>(&e.payload)) {
        const NodeId sender = e.target;
        Event arrival{e.time, e.sequence, kNoNode, PacketArrival{std::move(fan->packet), sender}};
        for (NodeId v : topology_->neighbors(sender)) {
          arrival.target = v;
          record(arrival);
          handle(static_cast<const Event&>(arrival));
        }
      } else {
        record(e);
        handle(static_cast<const Event&>(e));
      }
    }
    clock_ = t_end;
  }

  std::size_t processed_events() const { return processed_; }
  std::uint64_t trace_digest() const { return digest_; }
  const EventQueue& queue() const { return queue_; }

  // Optional `time,target,event_kind,detail` log of processed events.
  void set_trace(std::ostream* out) { trace_ = out; }

 private:
  void record(const Event& e) {
    ++processed_;
    std::uint64_t bits;
    std::memcpy(&bits, &e.time, sizeof bits);
    hash(bits);
    hash(e.target);
    hash(e.payload.index());
    if (const auto* a = std::get_if<PacketArrival>(&e.payload)) {
      hash(static_cast<std::uint64_t>(a->packet->kind()));
      hash(a->packet->origin);
      hash(a->packet->seq);
      hash(a->from);
    } else if (const auto* t = std::get_if<TimerFire>(&e.payload)) {
      hash(static_cast<std::uint64_t>(t->kind));
    }
    if (trace_ != nullptr) write_trace(e);
  }

  void hash(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      digest_ ^= (v >> (8 * i)) & 0xff;
      digest_ *= 0x100000001b3ULL;
    }
  }

  void write_trace(const Event& e) {
    char buf[160];
    if (const auto* a = std::get_if<PacketArrival>(&e.payload)) {
      const Packet& p = *a->packet;
      std::snprintf(buf, sizeof buf, "%.6f,%u,arrival,%.*s origin=%u seq=%u from=%u hops=%d\n",
                    e.time, e.target, static_cast<int>(to_string(p.kind()).size()),
                    to_string(p.kind()).data(), p.origin, p.seq, a->from, p.hops);
    } else if (const auto* t = std::get_if<TimerFire>(&e.payload)) {
      std::snprintf(buf, sizeof buf, "%.6f,%u,timer,%.*s\n", e.time, e.target,
                    static_cast<int>(to_string(t->kind).size()), to_string(t->kind).data());
    } else {
      std::snprintf(buf, sizeof buf, "%.6f,%u,traffic,generate\n", e.time, e.target);
    }
    *trace_ << buf;
  }

  const Topology* topology_;
  double delta_hop_;
  double clock_ = 0.0;
  EventQueue queue_;
  std::size_t processed_ = 0;
  std::uint64_t digest_ = 0xcbf29ce484222325ULL;
  std::ostream* trace_ = nullptr;
};

}  // namespace wsnres
