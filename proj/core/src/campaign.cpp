#include "icmpsift/campaign.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "icmpsift/errors.hpp"

namespace icmpsift {

const char* to_string(Transport t) {
  return t == Transport::Tcp ? "tcp" : "udp";
}

const char* to_string(AttributionBasis basis) {
  switch (basis) {
    case AttributionBasis::QuotedHeader: return "quoted_header";
    case AttributionBasis::OuterHeader: return "outer_header";
    case AttributionBasis::None: return "none";
  }
  return "none";
}

std::vector<ScanCampaign> load_campaigns(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw FileUnreadable("cannot open campaign registry: " + path.string());
  }
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError("campaign registry is not valid JSON: " + std::string(e.what()));
  }
  if (!doc.contains("campaigns") || !doc["campaigns"].is_array()) {
    throw SchemaError("campaign registry needs a 'campaigns' array");
  }

  std::vector<ScanCampaign> campaigns;
  for (const auto& entry : doc["campaigns"]) {
    ScanCampaign c;
    try {
      c.id = entry.at("id").get<std::string>();
      c.name = entry.value("name", c.id);
      std::string transport = entry.at("transport").get<std::string>();
      if (transport == "tcp" || transport == "TCP") c.transport = Transport::Tcp;
      else if (transport == "udp" || transport == "UDP") c.transport = Transport::Udp;
      else throw SchemaError("campaign " + c.id + ": transport must be tcp or udp");
      c.target_port = entry.at("port").get<uint16_t>();
      for (const auto& s : entry.at("sources")) {
        auto prefix = Ipv4Prefix::parse(s.get<std::string>());
        if (!prefix) {
          throw SchemaError("campaign " + c.id + ": bad source prefix '" +
                            s.get<std::string>() + "'");
        }
        c.source_addrs.push_back(*prefix);
      }
      for (const auto& w : entry.value("schedule", nlohmann::json::array())) {
        WeeklyWindow window;
        auto weekday = parse_weekday(w.at("weekday").get<std::string>());
        if (!weekday) {
          throw SchemaError("campaign " + c.id + ": bad weekday '" +
                            w.at("weekday").get<std::string>() + "'");
        }
        window.weekday = *weekday;
        auto start = parse_time_of_day(w.at("start").get<std::string>());
        auto end = parse_time_of_day(w.at("end").get<std::string>());
        if (!start || !end || *end <= *start) {
          throw SchemaError("campaign " + c.id + ": bad window times");
        }
        window.start = *start;
        window.end = *end;
        c.schedule.push_back(window);
      }
    } catch (const nlohmann::json::exception& e) {
      throw SchemaError("campaign registry entry malformed: " + std::string(e.what()));
    }
    if (c.source_addrs.empty()) {
      throw SchemaError("campaign " + c.id + ": sources must be non-empty");
    }
    // windows on one weekday must not overlap
    auto sorted = c.schedule;
    std::sort(sorted.begin(), sorted.end(), [](const WeeklyWindow& a, const WeeklyWindow& b) {
      return std::tie(a.weekday, a.start) < std::tie(b.weekday, b.start);
    });
    for (size_t i = 1; i < sorted.size(); ++i) {
      if (sorted[i].weekday == sorted[i - 1].weekday && sorted[i].start < sorted[i - 1].end) {
        throw SchemaError("campaign " + c.id + ": overlapping schedule windows");
      }
    }
    campaigns.push_back(std::move(c));
  }
  return campaigns;
}

AttributionResult attribute(const IcmpMessage& msg,
                            const std::optional<QuotedPacket>& quotation,
                            std::span<const ScanCampaign> campaigns) {
  AttributionResult result;
  if (quotation) {
    result.dedup_key = {quotation->src, quotation->quoted_byte_count};
  }

  if (quotation && quotation->dst_port) {
    const ScanCampaign* match = nullptr;
    bool ambiguous = false;
    for (const auto& c : campaigns) {
      if (*quotation->dst_port == c.target_port &&
          quotation->protocol == protocol_number(c.transport) &&
          c.from_source(quotation->src)) {
        if (match) ambiguous = true;
        match = &c;
      }
    }
    if (match && !ambiguous) {
      result.campaign_id = match->id;
      result.basis = AttributionBasis::QuotedHeader;
      return result;
    }
    if (ambiguous) return result;  // quoted evidence present but ambiguous
  }

  // Fallback: the ICMP is addressed back at a scanner, and the capture
  // time must fall into a schedule window of the same campaign.
  const ScanCampaign* match = nullptr;
  bool ambiguous = false;
  for (const auto& c : campaigns) {
    if (c.from_source(msg.outer_dst) && c.in_schedule(msg.capture_time)) {
      if (match) ambiguous = true;
      match = &c;
    }
  }
  if (match && !ambiguous) {
    result.campaign_id = match->id;
    result.basis = AttributionBasis::OuterHeader;
  }
  return result;
}

void CampaignHistogram::add(const AttributionResult& result, const Classification& cls) {
  const std::string& bucket =
      result.campaign_id ? *result.campaign_id : std::string(kUnattributedBucket);
  ++counts_[bucket][ClassKey{cls.family, cls.code_name}];
}

void CampaignHistogram::merge(const CampaignHistogram& other) {
  for (const auto& [campaign, classes] : other.counts_) {
    auto& mine = counts_[campaign];
    for (const auto& [key, count] : classes) {
      mine[key] += count;
    }
  }
}

std::map<std::string, std::vector<CampaignHistogram::Row>> CampaignHistogram::rows(
    size_t top_k) const {
  std::map<std::string, std::vector<Row>> out;
  for (const auto& [campaign, classes] : counts_) {
    uint64_t total = 0;
    for (const auto& [key, count] : classes) total += count;
    std::vector<Row> rows;
    for (const auto& [key, count] : classes) {
      rows.push_back({key.family, key.code_name, count,
                      total ? double(count) / double(total) : 0.0});
    }
    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
      if (a.count != b.count) return a.count > b.count;
      return ClassKey{a.family, a.code_name} < ClassKey{b.family, b.code_name};
    });
    if (top_k && rows.size() > top_k) rows.resize(top_k);
    out.emplace(campaign, std::move(rows));
  }
  return out;
}

std::string CampaignHistogram::to_json() const {
  nlohmann::json campaigns = nlohmann::json::object();
  for (const auto& [campaign, rows] : rows(0)) {
    nlohmann::json rows_json = nlohmann::json::array();
    uint64_t total = 0;
    for (const auto& row : rows) total += row.count;
    for (const auto& row : rows) {
      rows_json.push_back({{"family", to_string(row.family)},
                           {"code", to_string(row.code_name)},
                           {"count", row.count},
                           {"share", row.share}});
    }
    campaigns[campaign] = {{"total", total}, {"rows", rows_json}};
  }
  nlohmann::json j{{"campaigns", campaigns}, {"manifest", "manifest.json"}};
  return j.dump(2) + "\n";
}

std::string CampaignHistogram::to_csv(size_t top_k) const {
  std::ostringstream out;
  out << "campaign,family,code,count,share\n";
  out.precision(9);
  for (const auto& [campaign, rows] : rows(top_k)) {
    for (const auto& row : rows) {
      out << campaign << ',' << to_string(row.family) << ',' << to_string(row.code_name)
          << ',' << row.count << ',' << row.share << '\n';
    }
  }
  return out.str();
}

}  // namespace icmpsift
