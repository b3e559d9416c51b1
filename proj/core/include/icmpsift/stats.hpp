#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "icmpsift/asmap.hpp"
#include "icmpsift/wire.hpp"

namespace icmpsift {

struct ClassKey {
  IcmpFamily family;
  CodeName code_name;
  auto operator<=>(const ClassKey&) const = default;
};

struct DatasetStats {
  struct Row {
    IcmpFamily family;
    CodeName code_name;
    uint64_t count = 0;
    uint64_t uniq_ip = 0;
    uint64_t uniq_as = 0;
  };
  // Ordered by count descending, then by class key for determinism.
  std::vector<Row> rows;
  uint64_t total = 0;
  uint64_t undecodable_quotations = 0;
  uint64_t reserved_destination_quotations = 0;

  std::string to_json() const;
  std::string to_csv() const;
};

// Single-pass tally with associative merge so capture processing can fan
// out to parallel workers. Unique-IP/AS sets are the only unbounded state.
class StatsBuilder {
 public:
  void add(const IcmpMessage& msg, const Classification& cls,
           const std::optional<QuotedPacket>& quotation, const AsTable* as_lookup);
  void merge(const StatsBuilder& other);
  DatasetStats finish() const;

 private:
  struct Tally {
    uint64_t count = 0;
    std::unordered_set<uint32_t> ips;
    // Unmapped sources share one sentinel slot.
    std::unordered_set<uint64_t> ases;
  };
  std::map<ClassKey, Tally> per_class_;
  uint64_t total_ = 0;
  uint64_t undecodable_ = 0;
  uint64_t reserved_dst_ = 0;
};

}  // namespace icmpsift
