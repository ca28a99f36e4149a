#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "wsnres/common.hpp"

namespace wsnres {

enum class PacketKind : std::uint8_t { Data, Hello, Rreq, Rrep, Interest };

inline std::string_view to_string(PacketKind k) {
  switch (k) {
    case PacketKind::Data: return "DATA";
    case PacketKind::Hello: return "HELLO";
    case PacketKind::Rreq: return "RREQ";
    case PacketKind::Rrep: return "RREP";
    case PacketKind::Interest: return "INTEREST";
  }
  return "?";
}

struct DataBody {
  // Full source -> sink path; only DSR fills it.
  std::vector<NodeId> source_route;
};

struct HelloBody {
  std::optional<Position> position;  // GF beacons only
};

struct RreqBody {
  std::uint32_t request_id = 0;
  std::vector<NodeId> route;  // accumulated record, origin first
};

struct RrepBody {
  std::uint32_t request_id = 0;
  std::vector<NodeId> route;  // origin ... sink; the reply walks it backwards
};

struct InterestBody {
  int advertised_height = 0;
};

// Variant order must match PacketKind.
using PacketBody = std::variant<DataBody, HelloBody, RreqBody, RrepBody, InterestBody>;

struct Packet {
  NodeId origin = kNoNode;  // claimed identity of the originator
  std::uint32_t seq = 0;    // per-origin counter
  int ttl = 0;
  int hops = 0;
  double created = 0.0;
  PacketBody body;

  PacketKind kind() const { return static_cast<PacketKind>(body.index()); }

  template <class T>
  T& as() { return std::get<T>(body); }
  template <class T>
  const T& as() const { return std::get<T>(body); }
};

}  // namespace wsnres
