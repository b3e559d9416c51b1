#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "icmpsift/asmap.hpp"
#include "icmpsift/campaign.hpp"
#include "icmpsift/wire.hpp"

namespace icmpsift {

// ---------------------------------------------------------------- redirect

// Observable subset of the RFC1812 redirect rules. Rules about the
// receiving interface and source-route options cannot be checked at the
// receiver and are never asserted.
enum class RedirectViolation : uint8_t {
  CrossNetworkSource,
  NetworkRedirectType,
  PrivateGateway,
  PrivateDestination,
};
const char* to_string(RedirectViolation v);

struct RedirectVerdict {
  std::set<RedirectViolation> violations;
  Ipv4Addr redirected_gateway;
  Ipv4Addr affected_destination;
};

// Throws NotARedirect when msg is not type 5. The gateway is decoded from
// the 4-byte rest-of-header.
RedirectVerdict validate_redirect(const IcmpMessage& msg, const QuotedPacket& quotation,
                                  std::span<const Ipv4Prefix> local_prefixes);

// ------------------------------------------------------------ source quench

struct SourceQuenchFinding {
  Ipv4Addr origin;
  Ipv4Addr quoted_destination;
  bool self_generated = false;
  std::optional<uint32_t> origin_as;
  std::optional<uint32_t> destination_as;
  bool cross_operator = false;
};

// Throws NotSourceQuench when msg is not type 4.
SourceQuenchFinding audit_source_quench(const IcmpMessage& msg,
                                        const QuotedPacket& quotation,
                                        const AsTable* as_lookup);

// ------------------------------------------------------------------- echo

enum class EchoAnomalyKind : uint8_t { NonStandardRequestCode, OrphanReply, SpoofHint };
const char* to_string(EchoAnomalyKind kind);

struct EchoAnomaly {
  EchoAnomalyKind kind;
  Ipv4Addr source;
  Timestamp at{};
  std::string details;
};

// Stateless per-message echo checks. sent_requests is the set of echo
// targets this deployment probed (empty when no pings are sent); replies
// from those addresses are matched and ignored.
class EchoAnomalyDetector {
 public:
  EchoAnomalyDetector(std::unordered_set<Ipv4Addr> sent_requests,
                      std::vector<Ipv4Prefix> measurement_prefixes)
      : sent_requests_(std::move(sent_requests)),
        measurement_prefixes_(std::move(measurement_prefixes)) {}

  std::vector<EchoAnomaly> inspect(const IcmpMessage& msg) const;

 private:
  std::unordered_set<Ipv4Addr> sent_requests_;
  std::vector<Ipv4Prefix> measurement_prefixes_;
};

// -------------------------------------------------------------- quoted TTL

enum class TtlCategory : uint8_t { Expected, MplsHint, MidRange, RewriteHint };
const char* to_string(TtlCategory category);

// Total over 0-255: 0-1 Expected, 2-6 MplsHint, 7-199 MidRange,
// 200-255 RewriteHint.
TtlCategory ttl_category(uint8_t quoted_ttl);

struct TtlObservation {
  Ipv4Addr router;
  uint8_t quoted_ttl = 0;
  TtlCategory category = TtlCategory::Expected;
};

// Counts unique (router, quoted TTL) pairs per category; feeding a pair
// twice changes nothing. Merge unions the dedup sets.
class TtlHistogram {
 public:
  void add(const IcmpMessage& msg, const QuotedPacket& quotation);
  void merge(const TtlHistogram& other);

  uint64_t unique_pairs() const { return seen_.size(); }
  uint64_t count(TtlCategory category) const;
  double fraction(TtlCategory category) const;

  std::string to_json() const;
  std::string to_csv() const;

 private:
  std::unordered_set<uint64_t> seen_;  // router << 8 | ttl
  std::map<TtlCategory, uint64_t> counts_;
};

// ----------------------------------------------------------- unreachability

// Rollup over the unreachability families (destination unreachable and
// time exceeded), with the end-host-origin fraction for port unreachable
// (outer source equals the quoted destination: the host itself or a NAT
// speaking for it).
class UnreachabilityRollup {
 public:
  void add(const IcmpMessage& msg, const Classification& cls,
           const std::optional<QuotedPacket>& quotation);
  void merge(const UnreachabilityRollup& other);

  struct Row {
    IcmpFamily family;
    CodeName code_name;
    uint64_t count = 0;
  };
  std::vector<Row> rows() const;
  uint64_t port_unreachable_total() const { return port_total_; }
  uint64_t port_unreachable_endhost() const { return port_endhost_; }
  // 0 when no port-unreachable messages were seen.
  double endhost_fraction() const;

  std::string to_json() const;
  std::string to_csv() const;

 private:
  std::map<ClassKey, uint64_t> counts_;
  uint64_t port_total_ = 0;
  uint64_t port_endhost_ = 0;
};

}  // namespace icmpsift
