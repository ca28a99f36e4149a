#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "wsnres/common.hpp"

namespace wsnres {

enum class DropReason : std::uint8_t { Malicious, Ttl, PhantomNextHop, NoRoute, ProtocolError };

inline constexpr std::size_t kDropReasonCount = 5;

inline std::string_view to_string(DropReason r) {
  switch (r) {
    case DropReason::Malicious: return "malicious";
    case DropReason::Ttl: return "ttl";
    case DropReason::PhantomNextHop: return "phantom_next_hop";
    case DropReason::NoRoute: return "no_route";
    case DropReason::ProtocolError: return "protocol_error";
  }
  return "?";
}

struct DeliveredRecord {
  NodeId origin = kNoNode;
  int hops = 0;
};

struct RunMetrics {
  std::vector<std::uint64_t> generated;  // indexed by origin
  std::vector<DeliveredRecord> delivered;
  std::array<std::uint64_t, kDropReasonCount> drops{};
  std::vector<std::uint32_t> degree_samples;

  // DATA still queued or buffered when the run stopped.
  std::uint64_t in_flight = 0;
  // Malformed RREPs discarded.
  std::uint64_t control_errors = 0;

  // DSR only, at the end of the run: sources holding a route, and how many of
  // those routes pass through a compromised node.
  std::uint64_t routes_accepted = 0;
  std::uint64_t routes_compromised = 0;

  std::uint64_t total_generated() const {
    return std::accumulate(generated.begin(), generated.end(), std::uint64_t{0});
  }
  std::uint64_t dropped(DropReason r) const { return drops[static_cast<std::size_t>(r)]; }
  std::uint64_t total_dropped() const {
    return std::accumulate(drops.begin(), drops.end(), std::uint64_t{0});
  }
  void count_drop(DropReason r) { ++drops[static_cast<std::size_t>(r)]; }
};

inline double delivery_ratio(const RunMetrics& m) {
  const std::uint64_t sent = m.total_generated();
  if (sent == 0) throw ConfigError("delivery ratio undefined: no DATA generated");
  return static_cast<double>(m.delivered.size()) / static_cast<double>(sent);
}

// Mean hops over delivered packets; empty when nothing reached the sink.
inline std::optional<double> average_path_length(const RunMetrics& m) {
  if (m.delivered.empty()) return std::nullopt;
  double sum = 0.0;
  for (const auto& d : m.delivered) sum += d.hops;
  return sum / static_cast<double>(m.delivered.size());
}

// Mean over all (node, sample time) table sizes; 0 without samples.
inline double average_degree(const RunMetrics& m) {
  if (m.degree_samples.empty()) return 0.0;
  const double sum = std::accumulate(m.degree_samples.begin(), m.degree_samples.end(), 0.0);
  return sum / static_cast<double>(m.degree_samples.size());
}

inline double student_t_quantile(double p, double dof) {
  return boost::math::quantile(boost::math::students_t(dof), p);
}

struct Summary {
  double mean = 0.0;
  std::optional<double> ci95;  // Student-t half-width; needs >= 2 values
  std::size_t count = 0;
};

inline Summary aggregate(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("aggregate of an empty sample");
  Summary s;
  s.count = values.size();
  const double n = static_cast<double>(values.size());
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() < 2) return s;
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  s.ci95 = student_t_quantile(0.975, n - 1.0) * sd / std::sqrt(n);
  return s;
}

// Probability that none of l forwarders is compromised, each independently
// with probability p_c.
inline double safe_route_probability(double p_c, int l) {
  return std::pow(1.0 - p_c, l);
}

}  // namespace wsnres
