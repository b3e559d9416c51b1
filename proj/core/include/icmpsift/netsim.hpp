#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "icmpsift/ipv4.hpp"
#include "icmpsift/time.hpp"

namespace icmpsift {

// Deterministic router-graph simulator driven by a virtual clock. No wall
// time is ever consulted, so pacing invariants measured in hundreds of
// milliseconds run in microseconds of real time.

struct TokenBucketSpec {
  double capacity = 0;
  double refill_per_second = 0;
};

// Continuous-refill token bucket; starts full.
class TokenBucket {
 public:
  explicit TokenBucket(TokenBucketSpec spec) : spec_(spec), tokens_(spec.capacity) {}

  bool try_take(Timestamp now);

 private:
  TokenBucketSpec spec_;
  double tokens_;
  std::optional<Timestamp> last_;
};

enum class EcmpMode : uint8_t { PerFlow, PerPacket };

struct RouteEntry {
  Ipv4Prefix prefix;
  std::vector<std::string> next_hops;  // >1 entries form an ECMP group
};

struct SimRouter {
  std::string id;
  Ipv4Addr address;
  bool responds_icmp = true;
  std::optional<TokenBucketSpec> rate_limit;
  std::vector<RouteEntry> routes;
  std::optional<std::string> default_route;
  std::vector<std::string> default_next_hops;  // ECMP default group
};

struct MplsSegment {
  std::vector<std::string> routers;  // head first
  bool ttl_copy = true;
};

struct SimTopology {
  std::string entry;
  Duration hop_latency{1000};  // 1 ms virtual per link
  EcmpMode ecmp_mode = EcmpMode::PerFlow;
  std::map<std::string, SimRouter> routers;
  std::map<Ipv4Addr, std::string> hosts;  // address -> attached router id
  std::vector<MplsSegment> mpls_segments;
  // Forwarding cycles reachable from the entry point, canonicalized
  // (rotated to the smallest router id), derived by routing-table walk.
  std::vector<std::vector<std::string>> ground_truth_loops;
};

// Parses and validates the topology and computes ground_truth_loops.
// Throws SchemaError (with field diagnostics) and DanglingNextHop.
SimTopology load_topology(const std::filesystem::path& path);
SimTopology topology_from_json(const nlohmann::json& doc);

struct GroundTruth {
  std::optional<std::vector<std::string>> loop;
  bool reachable = false;
};

// Derived purely from routing tables, independent of any probing.
GroundTruth ground_truth(const SimTopology& topo, Ipv4Addr target);

// Recomputes the topology's loop set from routing state.
std::vector<std::vector<std::string>> derive_ground_truth_loops(const SimTopology& topo);

// Scripted topology edits applied when the virtual clock passes `at`.
struct ScenarioEdit {
  Timestamp at{};
  std::string router;
  // exactly one action
  std::optional<std::string> set_default;  // empty string clears the default
  std::optional<std::pair<Ipv4Prefix, std::string>> set_route;
  std::optional<Ipv4Prefix> remove_route;
};

struct Scenario {
  SimTopology topology;
  std::vector<ScenarioEdit> edits;
};

// Accepts either a plain topology file or {"topology": ..., "edits": [...]}.
Scenario load_scenario(const std::filesystem::path& path);
Scenario scenario_from_json(const nlohmann::json& doc);

enum class ProbeOutcome : uint8_t { Responder, Timeout, TargetReached };

struct SimProbeResult {
  ProbeOutcome outcome = ProbeOutcome::Timeout;
  Ipv4Addr responder;  // set for Responder
  Duration rtt{};      // set for Responder/TargetReached
};

class Simulator {
 public:
  explicit Simulator(Scenario scenario);
  explicit Simulator(SimTopology topo) : Simulator(Scenario{std::move(topo), {}}) {}

  // Walks the packet through the topology at virtual time send_time.
  // Callers must present globally non-decreasing send times so rate
  // limiters and scripted edits see monotone time.
  SimProbeResult inject_probe(Ipv4Addr target, int ttl, uint16_t flow_id,
                              Timestamp send_time);

  const SimTopology& topology() const { return scenario_.topology; }
  Timestamp now() const { return now_; }

 private:
  void apply_edits_until(Timestamp t);
  const std::string* route_lookup(const SimRouter& router, Ipv4Addr target,
                                  uint16_t flow_id);

  Scenario scenario_;
  size_t next_edit_ = 0;
  Timestamp now_{};
  std::map<std::string, TokenBucket> buckets_;
  std::map<std::string, uint64_t> packet_counters_;  // per-router, for per-packet ECMP
};

}  // namespace icmpsift
