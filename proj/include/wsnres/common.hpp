#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

namespace wsnres {

using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();

struct Position {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Position&, const Position&) = default;
};

inline double distance(Position a, Position b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

enum class Protocol : std::uint8_t { DSR, GBR, GF, RWR };

inline constexpr Protocol kAllProtocols[] = {Protocol::DSR, Protocol::GBR,
                                             Protocol::GF, Protocol::RWR};

inline std::string_view to_string(Protocol p) {
  switch (p) {
    case Protocol::DSR: return "DSR";
    case Protocol::GBR: return "GBR";
    case Protocol::GF: return "GF";
    case Protocol::RWR: return "RWR";
  }
  return "?";
}

// Protocols that learn their neighborhood from periodic HELLO beacons.
inline bool uses_hello(Protocol p) {
  return p == Protocol::GF || p == Protocol::RWR;
}

// Invalid user-supplied parameters. Maps to CLI exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Failure while executing an otherwise valid configuration. Exit code 2.
class RuntimeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace wsnres
