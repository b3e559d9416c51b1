#include "icmpsift/anomaly.hpp"

#include <sstream>

#include <json.hpp>

#include "icmpsift/errors.hpp"

namespace icmpsift {

const char* to_string(RedirectViolation v) {
  switch (v) {
    case RedirectViolation::CrossNetworkSource: return "CrossNetworkSource";
    case RedirectViolation::NetworkRedirectType: return "NetworkRedirectType";
    case RedirectViolation::PrivateGateway: return "PrivateGateway";
    case RedirectViolation::PrivateDestination: return "PrivateDestination";
  }
  return "?";
}

RedirectVerdict validate_redirect(const IcmpMessage& msg, const QuotedPacket& quotation,
                                  std::span<const Ipv4Prefix> local_prefixes) {
  if (msg.icmp_type != 5) {
    throw NotARedirect("expected ICMP type 5, got " + std::to_string(msg.icmp_type));
  }
  RedirectVerdict verdict;
  verdict.redirected_gateway = Ipv4Addr::from_bytes(msg.rest_of_header.data());
  verdict.affected_destination = quotation.dst;

  bool local = false;
  for (const auto& p : local_prefixes) {
    if (p.contains(quotation.src)) {
      local = true;
      break;
    }
  }
  if (!local) verdict.violations.insert(RedirectViolation::CrossNetworkSource);
  if (msg.icmp_code == 0) verdict.violations.insert(RedirectViolation::NetworkRedirectType);
  if (is_reserved(verdict.redirected_gateway)) {
    verdict.violations.insert(RedirectViolation::PrivateGateway);
  }
  if (is_reserved(verdict.affected_destination)) {
    verdict.violations.insert(RedirectViolation::PrivateDestination);
  }
  return verdict;
}

SourceQuenchFinding audit_source_quench(const IcmpMessage& msg,
                                        const QuotedPacket& quotation,
                                        const AsTable* as_lookup) {
  if (classify(msg.icmp_type, msg.icmp_code).family != IcmpFamily::SourceQuench) {
    throw NotSourceQuench("expected ICMP type 4, got " + std::to_string(msg.icmp_type));
  }
  SourceQuenchFinding finding;
  finding.origin = msg.outer_src;
  finding.quoted_destination = quotation.dst;
  finding.self_generated = msg.outer_src == quotation.dst;
  if (as_lookup) {
    finding.origin_as = as_lookup->lookup(finding.origin);
    finding.destination_as = as_lookup->lookup(finding.quoted_destination);
  }
  finding.cross_operator = !finding.self_generated && finding.origin_as &&
                           finding.destination_as &&
                           *finding.origin_as != *finding.destination_as;
  return finding;
}

const char* to_string(EchoAnomalyKind kind) {
  switch (kind) {
    case EchoAnomalyKind::NonStandardRequestCode: return "NonStandardRequestCode";
    case EchoAnomalyKind::OrphanReply: return "OrphanReply";
    case EchoAnomalyKind::SpoofHint: return "SpoofHint";
  }
  return "?";
}

std::vector<EchoAnomaly> EchoAnomalyDetector::inspect(const IcmpMessage& msg) const {
  std::vector<EchoAnomaly> out;
  if (msg.icmp_type == 8) {
    if (msg.icmp_code != 0) {
      out.push_back({EchoAnomalyKind::NonStandardRequestCode, msg.outer_src,
                     msg.capture_time, "code=" + std::to_string(msg.icmp_code)});
    }
    return out;
  }
  if (msg.icmp_type != 0) return out;
  if (sent_requests_.contains(msg.outer_src)) return out;  // matched reply

  out.push_back({EchoAnomalyKind::OrphanReply, msg.outer_src, msg.capture_time,
                 "code=" + std::to_string(msg.icmp_code)});

  // Echo replies normally mirror request data; an embedded IP packet whose
  // transport payload is aimed at the measurement network suggests a reply
  // forwarded to the destination instead of the source.
  auto quoted = decode_ipv4_payload(msg.payload);
  if (quoted && quoted->src_port) {
    bool toward_us = false;
    for (const auto& p : measurement_prefixes_) {
      if (p.contains(quoted->dst)) {
        toward_us = true;
        break;
      }
    }
    if (toward_us) {
      std::ostringstream details;
      details << "quoted proto=" << int(quoted->protocol) << " src_port=" << *quoted->src_port
              << " dst=" << quoted->dst.to_string();
      out.push_back({EchoAnomalyKind::SpoofHint, msg.outer_src, msg.capture_time,
                     details.str()});
    }
  }
  return out;
}

const char* to_string(TtlCategory category) {
  switch (category) {
    case TtlCategory::Expected: return "Expected";
    case TtlCategory::MplsHint: return "MplsHint";
    case TtlCategory::MidRange: return "MidRange";
    case TtlCategory::RewriteHint: return "RewriteHint";
  }
  return "?";
}

TtlCategory ttl_category(uint8_t quoted_ttl) {
  if (quoted_ttl <= 1) return TtlCategory::Expected;
  if (quoted_ttl <= 6) return TtlCategory::MplsHint;
  if (quoted_ttl <= 199) return TtlCategory::MidRange;
  return TtlCategory::RewriteHint;
}

void TtlHistogram::add(const IcmpMessage& msg, const QuotedPacket& quotation) {
  uint64_t key = (uint64_t(msg.outer_src.value) << 8) | quotation.ttl;
  if (!seen_.insert(key).second) return;
  ++counts_[ttl_category(quotation.ttl)];
}

void TtlHistogram::merge(const TtlHistogram& other) {
  for (uint64_t key : other.seen_) {
    if (seen_.insert(key).second) {
      ++counts_[ttl_category(uint8_t(key & 0xFF))];
    }
  }
}

uint64_t TtlHistogram::count(TtlCategory category) const {
  auto it = counts_.find(category);
  return it == counts_.end() ? 0 : it->second;
}

double TtlHistogram::fraction(TtlCategory category) const {
  return seen_.empty() ? 0.0 : double(count(category)) / double(seen_.size());
}

std::string TtlHistogram::to_json() const {
  nlohmann::json categories = nlohmann::json::object();
  for (TtlCategory c : {TtlCategory::Expected, TtlCategory::MplsHint, TtlCategory::MidRange,
                        TtlCategory::RewriteHint}) {
    categories[to_string(c)] = {{"count", count(c)}, {"fraction", fraction(c)}};
  }
  nlohmann::json j{{"unique_router_ttl_pairs", unique_pairs()},
                   {"categories", categories},
                   {"note", "MplsHint and RewriteHint are hints, not proofs"},
                   {"manifest", "manifest.json"}};
  return j.dump(2) + "\n";
}

std::string TtlHistogram::to_csv() const {
  std::ostringstream out;
  out.precision(9);
  out << "category,count,fraction\n";
  for (TtlCategory c : {TtlCategory::Expected, TtlCategory::MplsHint, TtlCategory::MidRange,
                        TtlCategory::RewriteHint}) {
    out << to_string(c) << ',' << count(c) << ',' << fraction(c) << '\n';
  }
  return out.str();
}

void UnreachabilityRollup::add(const IcmpMessage& msg, const Classification& cls,
                               const std::optional<QuotedPacket>& quotation) {
  if (cls.family != IcmpFamily::DestinationUnreachable &&
      cls.family != IcmpFamily::TimeExceeded) {
    return;
  }
  ++counts_[ClassKey{cls.family, cls.code_name}];
  if (cls.family == IcmpFamily::DestinationUnreachable && cls.code_name == CodeName::Port) {
    ++port_total_;
    if (quotation && msg.outer_src == quotation->dst) ++port_endhost_;
  }
}

void UnreachabilityRollup::merge(const UnreachabilityRollup& other) {
  for (const auto& [key, count] : other.counts_) counts_[key] += count;
  port_total_ += other.port_total_;
  port_endhost_ += other.port_endhost_;
}

std::vector<UnreachabilityRollup::Row> UnreachabilityRollup::rows() const {
  std::vector<Row> out;
  for (const auto& [key, count] : counts_) {
    out.push_back({key.family, key.code_name, count});
  }
  std::stable_sort(out.begin(), out.end(), [](const Row& a, const Row& b) {
    if (a.count != b.count) return a.count > b.count;
    return ClassKey{a.family, a.code_name} < ClassKey{b.family, b.code_name};
  });
  return out;
}

double UnreachabilityRollup::endhost_fraction() const {
  return port_total_ ? double(port_endhost_) / double(port_total_) : 0.0;
}

std::string UnreachabilityRollup::to_json() const {
  nlohmann::json rows_json = nlohmann::json::array();
  for (const auto& row : rows()) {
    rows_json.push_back({{"family", to_string(row.family)},
                         {"code", to_string(row.code_name)},
                         {"count", row.count}});
  }
  nlohmann::json j{{"rows", rows_json},
                   {"port_unreachable_total", port_total_},
                   {"port_unreachable_endhost", port_endhost_},
                   {"port_unreachable_endhost_fraction", endhost_fraction()},
                   {"manifest", "manifest.json"}};
  return j.dump(2) + "\n";
}

std::string UnreachabilityRollup::to_csv() const {
  std::ostringstream out;
  out << "family,code,count\n";
  for (const auto& row : rows()) {
    out << to_string(row.family) << ',' << to_string(row.code_name) << ',' << row.count
        << '\n';
  }
  return out.str();
}

}  // namespace icmpsift
