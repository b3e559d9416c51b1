#include "icmpsift/netsim.hpp"

#include <algorithm>
#include <fstream>

#include "icmpsift/errors.hpp"

namespace icmpsift {

bool TokenBucket::try_take(Timestamp now) {
  if (last_) {
    double dt = double((now - *last_).count()) / 1e6;
    if (dt > 0) {
      tokens_ = std::min(spec_.capacity, tokens_ + dt * spec_.refill_per_second);
    }
  }
  last_ = now;
  if (tokens_ >= 1.0) {
    tokens_ -= 1.0;
    return true;
  }
  return false;
}

namespace {

Ipv4Addr require_addr(const nlohmann::json& j, const std::string& field,
                      const std::string& ctx) {
  if (!j.contains(field) || !j[field].is_string()) {
    throw SchemaError(ctx + ": missing string field '" + field + "'");
  }
  auto addr = Ipv4Addr::parse(j[field].get<std::string>());
  if (!addr) {
    throw SchemaError(ctx + ": '" + field + "' is not an IPv4 address: " +
                      j[field].get<std::string>());
  }
  return *addr;
}

Ipv4Prefix require_prefix(const nlohmann::json& j, const std::string& field,
                          const std::string& ctx) {
  if (!j.contains(field) || !j[field].is_string()) {
    throw SchemaError(ctx + ": missing string field '" + field + "'");
  }
  auto prefix = Ipv4Prefix::parse(j[field].get<std::string>());
  if (!prefix) {
    throw SchemaError(ctx + ": '" + field + "' is not a prefix: " +
                      j[field].get<std::string>());
  }
  return *prefix;
}

// Longest-prefix route for target; empty result when nothing matches.
const std::vector<std::string>* base_next_hops(const SimRouter& router, Ipv4Addr target) {
  const RouteEntry* best = nullptr;
  for (const auto& entry : router.routes) {
    if (entry.prefix.contains(target)) {
      if (!best || entry.prefix.length > best->prefix.length) best = &entry;
    }
  }
  if (best) return &best->next_hops;
  if (!router.default_next_hops.empty()) return &router.default_next_hops;
  return nullptr;
}

uint32_t flow_hash(uint16_t flow_id, Ipv4Addr target) {
  uint32_t h = (uint32_t(flow_id) * 2654435761u) ^ target.value;
  h ^= h >> 16;
  return h;
}

// Hidden MPLS segment whose head is `router` and whose first interior hop
// is `next`; nullptr otherwise.
const MplsSegment* entering_hidden_segment(const SimTopology& topo,
                                           const std::string& router,
                                           const std::string& next) {
  for (const auto& seg : topo.mpls_segments) {
    if (!seg.ttl_copy && seg.routers.size() >= 2 && seg.routers.front() == router &&
        seg.routers[1] == next) {
      return &seg;
    }
  }
  return nullptr;
}

struct ResolvedHop {
  const std::string* router = nullptr;
  size_t extra_links = 0;  // tunneled interior links (latency only, no TTL)
};

// Follows label-switched segments: a hidden segment forwards the packet to
// its tail without arrival processing, then routing continues from there.
ResolvedHop resolve_tunnels(const SimTopology& topo, const std::string& from,
                            const std::string* next, Ipv4Addr target, uint16_t flow_id,
                            std::map<std::string, uint64_t>* packet_counters) {
  ResolvedHop hop;
  const std::string* cur_from = &from;
  size_t guard = 0;
  while (next && guard++ <= topo.mpls_segments.size()) {
    const MplsSegment* seg = entering_hidden_segment(topo, *cur_from, *next);
    if (!seg) break;
    hop.extra_links += seg->routers.size() - 1;
    const std::string& tail = seg->routers.back();
    const auto& tail_router = topo.routers.at(tail);
    const auto* group = base_next_hops(tail_router, target);
    if (!group || group->empty()) {
      hop.router = nullptr;
      return hop;
    }
    size_t idx = 0;
    if (group->size() > 1) {
      if (topo.ecmp_mode == EcmpMode::PerFlow || !packet_counters) {
        idx = flow_hash(flow_id, target) % group->size();
      } else {
        idx = (*packet_counters)[tail]++ % group->size();
      }
    }
    cur_from = &tail;
    next = &(*group)[idx];
  }
  hop.router = next;
  return hop;
}

}  // namespace

SimTopology topology_from_json(const nlohmann::json& doc) {
  SimTopology topo;
  if (!doc.contains("routers") || !doc["routers"].is_array()) {
    throw SchemaError("topology: missing 'routers' array");
  }
  if (doc.contains("hop_latency_ms")) {
    topo.hop_latency = Duration{int64_t(doc["hop_latency_ms"].get<double>() * 1000)};
  }
  if (doc.contains("ecmp_mode")) {
    std::string mode = doc["ecmp_mode"].get<std::string>();
    if (mode == "per_flow") topo.ecmp_mode = EcmpMode::PerFlow;
    else if (mode == "per_packet") topo.ecmp_mode = EcmpMode::PerPacket;
    else throw SchemaError("topology: ecmp_mode must be per_flow or per_packet");
  }

  for (const auto& rj : doc["routers"]) {
    SimRouter router;
    if (!rj.contains("id") || !rj["id"].is_string()) {
      throw SchemaError("topology: router without string 'id'");
    }
    router.id = rj["id"].get<std::string>();
    const std::string ctx = "router " + router.id;
    router.address = require_addr(rj, "address", ctx);
    router.responds_icmp = rj.value("responds_icmp", true);
    if (rj.contains("rate_limit")) {
      const auto& rl = rj["rate_limit"];
      if (!rl.contains("capacity") || !rl.contains("refill_per_second")) {
        throw SchemaError(ctx + ": rate_limit needs capacity and refill_per_second");
      }
      router.rate_limit = TokenBucketSpec{rl["capacity"].get<double>(),
                                          rl["refill_per_second"].get<double>()};
    }
    for (const auto& route : rj.value("routes", nlohmann::json::array())) {
      RouteEntry entry;
      entry.prefix = require_prefix(route, "prefix", ctx);
      if (route.contains("next_hop")) {
        entry.next_hops.push_back(route["next_hop"].get<std::string>());
      } else if (route.contains("next_hops")) {
        for (const auto& nh : route["next_hops"]) {
          entry.next_hops.push_back(nh.get<std::string>());
        }
      }
      if (entry.next_hops.empty()) {
        throw SchemaError(ctx + ": route " + entry.prefix.to_string() +
                          " needs next_hop or next_hops");
      }
      router.routes.push_back(std::move(entry));
    }
    if (rj.contains("default_route")) {
      router.default_route = rj["default_route"].get<std::string>();
      router.default_next_hops.push_back(*router.default_route);
    } else if (rj.contains("default_routes")) {
      for (const auto& nh : rj["default_routes"]) {
        router.default_next_hops.push_back(nh.get<std::string>());
      }
      if (!router.default_next_hops.empty()) {
        router.default_route = router.default_next_hops.front();
      }
    }
    if (topo.routers.contains(router.id)) {
      throw SchemaError("topology: duplicate router id " + router.id);
    }
    topo.routers.emplace(router.id, std::move(router));
  }

  if (!doc.contains("entry") || !doc["entry"].is_string()) {
    throw SchemaError("topology: missing 'entry' router id");
  }
  topo.entry = doc["entry"].get<std::string>();
  if (!topo.routers.contains(topo.entry)) {
    throw DanglingNextHop("topology: entry router '" + topo.entry + "' is not defined");
  }

  for (const auto& [id, router] : topo.routers) {
    for (const auto& entry : router.routes) {
      for (const auto& nh : entry.next_hops) {
        if (!topo.routers.contains(nh)) {
          throw DanglingNextHop("router " + id + ": next hop '" + nh + "' is not defined");
        }
      }
    }
    for (const auto& nh : router.default_next_hops) {
      if (!topo.routers.contains(nh)) {
        throw DanglingNextHop("router " + id + ": default next hop '" + nh +
                              "' is not defined");
      }
    }
  }

  for (const auto& hj : doc.value("hosts", nlohmann::json::array())) {
    Ipv4Addr addr = require_addr(hj, "address", "host");
    std::string router = hj.value("router", std::string{});
    if (!topo.routers.contains(router)) {
      throw DanglingNextHop("host " + addr.to_string() + ": router '" + router +
                            "' is not defined");
    }
    topo.hosts[addr] = router;
  }

  for (const auto& sj : doc.value("mpls_segments", nlohmann::json::array())) {
    MplsSegment seg;
    seg.ttl_copy = sj.value("ttl_copy", true);
    for (const auto& r : sj.value("routers", nlohmann::json::array())) {
      seg.routers.push_back(r.get<std::string>());
    }
    if (seg.routers.size() < 2) {
      throw SchemaError("topology: mpls segment needs at least 2 routers");
    }
    for (const auto& r : seg.routers) {
      if (!topo.routers.contains(r)) {
        throw DanglingNextHop("mpls segment: router '" + r + "' is not defined");
      }
    }
    topo.mpls_segments.push_back(std::move(seg));
  }

  topo.ground_truth_loops = derive_ground_truth_loops(topo);
  return topo;
}

SimTopology load_topology(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw FileUnreadable("cannot open topology: " + path.string());
  }
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError("topology is not valid JSON: " + std::string(e.what()));
  }
  return topology_from_json(doc);
}

namespace {

std::vector<std::string> canonical_cycle(std::vector<std::string> cycle) {
  auto min_it = std::min_element(cycle.begin(), cycle.end());
  std::rotate(cycle.begin(), min_it, cycle.end());
  return cycle;
}

struct WalkState {
  const SimTopology& topo;
  Ipv4Addr target;
  std::map<std::string, int> color;  // 0 new, 1 on stack, 2 done
  std::vector<std::string> stack;
  std::optional<std::vector<std::string>> loop;
  bool reachable = false;
};

// All ECMP branches, tunnel-resolved; flow-independent exploration.
std::vector<const std::string*> all_branches(const SimTopology& topo,
                                             const std::string& from, Ipv4Addr target) {
  std::vector<const std::string*> out;
  const auto* group = base_next_hops(topo.routers.at(from), target);
  if (!group) return out;
  for (const auto& nh : *group) {
    ResolvedHop hop = resolve_tunnels(topo, from, &nh, target, 0, nullptr);
    if (hop.router) out.push_back(hop.router);
  }
  return out;
}

void walk(WalkState& st, const std::string& id) {
  const SimRouter& router = st.topo.routers.at(id);
  if (router.address == st.target) {
    st.reachable = true;
    return;
  }
  auto host = st.topo.hosts.find(st.target);
  if (host != st.topo.hosts.end() && host->second == id) {
    st.reachable = true;
    return;
  }
  st.color[id] = 1;
  st.stack.push_back(id);
  for (const std::string* next : all_branches(st.topo, id, st.target)) {
    int c = st.color[*next];
    if (c == 1) {
      if (!st.loop) {
        auto it = std::find(st.stack.begin(), st.stack.end(), *next);
        st.loop = canonical_cycle(std::vector<std::string>(it, st.stack.end()));
      }
    } else if (c == 0) {
      walk(st, *next);
    }
  }
  st.stack.pop_back();
  st.color[id] = 2;
}

}  // namespace

GroundTruth ground_truth(const SimTopology& topo, Ipv4Addr target) {
  GroundTruth gt;
  if (!topo.routers.contains(topo.entry)) return gt;
  WalkState st{topo, target, {}, {}, {}, false};
  walk(st, topo.entry);
  gt.loop = st.loop;
  gt.reachable = st.reachable;
  return gt;
}

std::vector<std::vector<std::string>> derive_ground_truth_loops(const SimTopology& topo) {
  // Routing behavior only changes across prefix boundaries, so probing one
  // representative per routing-relevant region covers all cycles: every
  // router and host address, both ends of every route prefix, and one
  // address matched by no prefix at all (exercises default routes).
  std::vector<Ipv4Addr> reps;
  for (const auto& [id, router] : topo.routers) reps.push_back(router.address);
  for (const auto& [addr, router] : topo.hosts) reps.push_back(addr);
  std::vector<Ipv4Prefix> prefixes;
  for (const auto& [id, router] : topo.routers) {
    for (const auto& entry : router.routes) {
      prefixes.push_back(entry.prefix);
      reps.push_back(entry.prefix.base);
      uint32_t last = entry.prefix.base.value |
                      ~Ipv4Prefix::mask_for(entry.prefix.length);
      reps.push_back(Ipv4Addr{last});
    }
  }
  for (uint32_t a = 1; a <= 223; ++a) {
    Ipv4Addr candidate{(a << 24) | 0x71};
    bool covered = std::any_of(prefixes.begin(), prefixes.end(),
                               [&](const Ipv4Prefix& p) { return p.contains(candidate); });
    if (!covered && !topo.hosts.contains(candidate)) {
      bool is_router = false;
      for (const auto& [id, router] : topo.routers) {
        if (router.address == candidate) {
          is_router = true;
          break;
        }
      }
      if (!is_router) {
        reps.push_back(candidate);
        break;
      }
    }
  }

  std::vector<std::vector<std::string>> loops;
  for (const auto& rep : reps) {
    auto gt = ground_truth(topo, rep);
    if (gt.loop && std::find(loops.begin(), loops.end(), *gt.loop) == loops.end()) {
      loops.push_back(*gt.loop);
    }
  }
  std::sort(loops.begin(), loops.end());
  return loops;
}

Scenario scenario_from_json(const nlohmann::json& doc) {
  Scenario scenario;
  if (doc.contains("topology")) {
    scenario.topology = topology_from_json(doc["topology"]);
  } else {
    scenario.topology = topology_from_json(doc);
  }
  for (const auto& ej : doc.value("edits", nlohmann::json::array())) {
    ScenarioEdit edit;
    if (!ej.contains("at_ms")) throw SchemaError("scenario edit: missing at_ms");
    edit.at = timestamp_from_us(int64_t(ej["at_ms"].get<double>() * 1000));
    edit.router = ej.value("router", std::string{});
    if (!scenario.topology.routers.contains(edit.router)) {
      throw SchemaError("scenario edit: unknown router '" + edit.router + "'");
    }
    if (ej.contains("set_default")) {
      edit.set_default = ej["set_default"].get<std::string>();
      if (!edit.set_default->empty() &&
          !scenario.topology.routers.contains(*edit.set_default)) {
        throw DanglingNextHop("scenario edit: unknown next hop '" + *edit.set_default + "'");
      }
    } else if (ej.contains("set_route")) {
      auto prefix = require_prefix(ej["set_route"], "prefix", "scenario edit");
      std::string nh = ej["set_route"].value("next_hop", std::string{});
      if (!scenario.topology.routers.contains(nh)) {
        throw DanglingNextHop("scenario edit: unknown next hop '" + nh + "'");
      }
      edit.set_route = {prefix, nh};
    } else if (ej.contains("remove_route")) {
      auto prefix = Ipv4Prefix::parse(ej["remove_route"].get<std::string>());
      if (!prefix) throw SchemaError("scenario edit: bad remove_route prefix");
      edit.remove_route = *prefix;
    } else {
      throw SchemaError("scenario edit: needs set_default, set_route or remove_route");
    }
    scenario.edits.push_back(std::move(edit));
  }
  std::stable_sort(scenario.edits.begin(), scenario.edits.end(),
                   [](const ScenarioEdit& a, const ScenarioEdit& b) { return a.at < b.at; });
  return scenario;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw FileUnreadable("cannot open scenario: " + path.string());
  }
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError("scenario is not valid JSON: " + std::string(e.what()));
  }
  return scenario_from_json(doc);
}

Simulator::Simulator(Scenario scenario) : scenario_(std::move(scenario)) {
  for (const auto& [id, router] : scenario_.topology.routers) {
    if (router.rate_limit) {
      buckets_.emplace(id, TokenBucket(*router.rate_limit));
    }
  }
}

void Simulator::apply_edits_until(Timestamp t) {
  bool changed = false;
  auto& topo = scenario_.topology;
  while (next_edit_ < scenario_.edits.size() && scenario_.edits[next_edit_].at <= t) {
    const auto& edit = scenario_.edits[next_edit_++];
    auto& router = topo.routers.at(edit.router);
    if (edit.set_default) {
      router.default_next_hops.clear();
      if (edit.set_default->empty()) {
        router.default_route.reset();
      } else {
        router.default_route = *edit.set_default;
        router.default_next_hops.push_back(*edit.set_default);
      }
    } else if (edit.set_route) {
      auto it = std::find_if(router.routes.begin(), router.routes.end(),
                             [&](const RouteEntry& e) { return e.prefix == edit.set_route->first; });
      if (it != router.routes.end()) {
        it->next_hops = {edit.set_route->second};
      } else {
        router.routes.push_back({edit.set_route->first, {edit.set_route->second}});
      }
    } else if (edit.remove_route) {
      std::erase_if(router.routes,
                    [&](const RouteEntry& e) { return e.prefix == *edit.remove_route; });
    }
    changed = true;
  }
  if (changed) {
    topo.ground_truth_loops = derive_ground_truth_loops(topo);
  }
}

const std::string* Simulator::route_lookup(const SimRouter& router, Ipv4Addr target,
                                           uint16_t flow_id) {
  const auto* group = base_next_hops(router, target);
  if (!group || group->empty()) return nullptr;
  if (group->size() == 1) return &group->front();
  size_t idx;
  if (scenario_.topology.ecmp_mode == EcmpMode::PerFlow) {
    idx = flow_hash(flow_id, target) % group->size();
  } else {
    idx = packet_counters_[router.id]++ % group->size();
  }
  return &(*group)[idx];
}

SimProbeResult Simulator::inject_probe(Ipv4Addr target, int ttl, uint16_t flow_id,
                                       Timestamp send_time) {
  apply_edits_until(send_time);
  now_ = std::max(now_, send_time);

  const auto& topo = scenario_.topology;
  const SimRouter* cur = &topo.routers.at(topo.entry);
  size_t links = 0;
  int remaining = ttl;
  auto host = topo.hosts.find(target);

  while (remaining > 0) {
    ++links;  // packet arrives at cur
    if (cur->address == target) {
      return {ProbeOutcome::TargetReached, target, 2 * links * topo.hop_latency};
    }
    --remaining;
    if (remaining == 0) {
      Timestamp expiry = send_time + links * topo.hop_latency;
      bool grants = cur->responds_icmp;
      if (grants) {
        auto bucket = buckets_.find(cur->id);
        if (bucket != buckets_.end()) grants = bucket->second.try_take(expiry);
      }
      if (grants) {
        return {ProbeOutcome::Responder, cur->address, 2 * links * topo.hop_latency};
      }
      return {ProbeOutcome::Timeout, {}, {}};
    }
    if (host != topo.hosts.end() && host->second == cur->id) {
      return {ProbeOutcome::TargetReached, target, 2 * (links + 1) * topo.hop_latency};
    }
    const std::string* next = route_lookup(*cur, target, flow_id);
    if (!next) {
      return {ProbeOutcome::Timeout, {}, {}};  // no route: dropped silently
    }
    ResolvedHop hop = resolve_tunnels(topo, cur->id, next, target, flow_id,
                                      topo.ecmp_mode == EcmpMode::PerPacket
                                          ? &packet_counters_
                                          : nullptr);
    if (!hop.router) {
      return {ProbeOutcome::Timeout, {}, {}};
    }
    links += hop.extra_links;
    cur = &topo.routers.at(*hop.router);
  }
  return {ProbeOutcome::Timeout, {}, {}};
}

}  // namespace icmpsift
