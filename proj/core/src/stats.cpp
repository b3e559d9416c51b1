#include "icmpsift/stats.hpp"

#include <algorithm>
#include <sstream>

#include <json.hpp>

namespace icmpsift {

namespace {
// AS numbers are 32-bit; anything above fits the unmapped sentinel.
constexpr uint64_t kUnmappedAs = uint64_t(1) << 40;
}  // namespace

void StatsBuilder::add(const IcmpMessage& msg, const Classification& cls,
                       const std::optional<QuotedPacket>& quotation,
                       const AsTable* as_lookup) {
  auto& tally = per_class_[ClassKey{cls.family, cls.code_name}];
  ++tally.count;
  ++total_;
  tally.ips.insert(msg.outer_src.value);
  std::optional<uint32_t> asn;
  if (as_lookup) asn = as_lookup->lookup(msg.outer_src);
  tally.ases.insert(asn ? uint64_t(*asn) : kUnmappedAs);

  if (cls.quoting_expected && !quotation) ++undecodable_;
  if (quotation && is_reserved(quotation->dst)) ++reserved_dst_;
}

void StatsBuilder::merge(const StatsBuilder& other) {
  for (const auto& [key, tally] : other.per_class_) {
    auto& mine = per_class_[key];
    mine.count += tally.count;
    mine.ips.insert(tally.ips.begin(), tally.ips.end());
    mine.ases.insert(tally.ases.begin(), tally.ases.end());
  }
  total_ += other.total_;
  undecodable_ += other.undecodable_;
  reserved_dst_ += other.reserved_dst_;
}

DatasetStats StatsBuilder::finish() const {
  DatasetStats stats;
  stats.total = total_;
  stats.undecodable_quotations = undecodable_;
  stats.reserved_destination_quotations = reserved_dst_;
  for (const auto& [key, tally] : per_class_) {
    stats.rows.push_back({key.family, key.code_name, tally.count,
                          tally.ips.size(), tally.ases.size()});
  }
  std::stable_sort(stats.rows.begin(), stats.rows.end(),
                   [](const DatasetStats::Row& a, const DatasetStats::Row& b) {
                     if (a.count != b.count) return a.count > b.count;
                     return ClassKey{a.family, a.code_name} < ClassKey{b.family, b.code_name};
                   });
  return stats;
}

std::string DatasetStats::to_json() const {
  nlohmann::json rows_json = nlohmann::json::array();
  for (const auto& row : rows) {
    rows_json.push_back({{"family", to_string(row.family)},
                         {"code", to_string(row.code_name)},
                         {"count", row.count},
                         {"uniq_ip", row.uniq_ip},
                         {"uniq_as", row.uniq_as}});
  }
  nlohmann::json j{{"total", total},
                   {"undecodable_quotations", undecodable_quotations},
                   {"reserved_destination_quotations", reserved_destination_quotations},
                   {"rows", rows_json},
                   {"manifest", "manifest.json"}};
  return j.dump(2) + "\n";
}

std::string DatasetStats::to_csv() const {
  std::ostringstream out;
  out << "family,code,count,uniq_ip,uniq_as\n";
  for (const auto& row : rows) {
    out << to_string(row.family) << ',' << to_string(row.code_name) << ','
        << row.count << ',' << row.uniq_ip << ',' << row.uniq_as << '\n';
  }
  return out.str();
}

}  // namespace icmpsift
