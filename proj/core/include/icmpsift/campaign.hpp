#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "icmpsift/stats.hpp"
#include "icmpsift/time.hpp"
#include "icmpsift/wire.hpp"

namespace icmpsift {

enum class Transport : uint8_t { Tcp, Udp };

inline uint8_t protocol_number(Transport t) {
  return t == Transport::Tcp ? kProtocolTcp : kProtocolUdp;
}
const char* to_string(Transport t);

// Half-open [start, end) interval on one UTC weekday.
struct WeeklyWindow {
  int weekday = 0;  // 0 = Monday
  Duration start{};
  Duration end{};

  bool contains(Timestamp t) const {
    return weekday_utc(t) == weekday && time_of_day_utc(t) >= start &&
           time_of_day_utc(t) < end;
  }
};

struct ScanCampaign {
  std::string id;
  std::string name;
  Transport transport = Transport::Tcp;
  uint16_t target_port = 0;
  std::vector<Ipv4Prefix> source_addrs;
  std::vector<WeeklyWindow> schedule;

  bool from_source(Ipv4Addr addr) const {
    for (const auto& p : source_addrs) {
      if (p.contains(addr)) return true;
    }
    return false;
  }
  bool in_schedule(Timestamp t) const {
    for (const auto& w : schedule) {
      if (w.contains(t)) return true;
    }
    return false;
  }
};

// Registry file: {"campaigns": [{id, name, transport, port, sources,
// schedule: [{weekday, start, end}]}]}. Throws FileUnreadable/SchemaError;
// validates non-empty sources and non-overlapping windows per campaign.
std::vector<ScanCampaign> load_campaigns(const std::filesystem::path& path);

enum class AttributionBasis : uint8_t { QuotedHeader, OuterHeader, None };
const char* to_string(AttributionBasis basis);

struct AttributionResult {
  std::optional<std::string> campaign_id;
  AttributionBasis basis = AttributionBasis::None;
  // (quoted source IP, quoted byte count); absent without a quotation.
  std::optional<std::pair<Ipv4Addr, uint64_t>> dedup_key;
};

// Quoted evidence (scanner source + scanned port + transport) outranks the
// outer header; the outer-header fallback additionally requires the capture
// time to fall into a schedule window. Ambiguity yields None.
AttributionResult attribute(const IcmpMessage& msg,
                            const std::optional<QuotedPacket>& quotation,
                            std::span<const ScanCampaign> campaigns);

inline constexpr const char* kUnattributedBucket = "unattributed";

// Per-campaign type/code histogram with share-of-total; merge is
// associative for parallel aggregation.
class CampaignHistogram {
 public:
  void add(const AttributionResult& result, const Classification& cls);
  void merge(const CampaignHistogram& other);

  struct Row {
    IcmpFamily family;
    CodeName code_name;
    uint64_t count = 0;
    double share = 0.0;
  };
  // Rows sorted by count descending; top_k = 0 keeps all rows.
  std::map<std::string, std::vector<Row>> rows(size_t top_k = 0) const;

  std::string to_json() const;
  std::string to_csv(size_t top_k = 8) const;

 private:
  std::map<std::string, std::map<ClassKey, uint64_t>> counts_;
};

}  // namespace icmpsift
