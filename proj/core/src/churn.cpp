#include "icmpsift/churn.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "icmpsift/errors.hpp"

namespace icmpsift {

EpochSet load_epoch_file(const std::filesystem::path& path, std::string epoch_id) {
  std::ifstream in(path);
  if (!in) {
    throw FileUnreadable("cannot open epoch file: " + path.string());
  }
  EpochSet epoch;
  epoch.epoch_id = std::move(epoch_id);
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string_view sv(line);
    auto hash = sv.find('#');
    if (hash != std::string_view::npos) sv = sv.substr(0, hash);
    while (!sv.empty() && (sv.front() == ' ' || sv.front() == '\t')) sv.remove_prefix(1);
    while (!sv.empty() && (sv.back() == ' ' || sv.back() == '\t')) sv.remove_suffix(1);
    if (sv.empty()) continue;
    auto addr = Ipv4Addr::parse(sv);
    if (!addr) {
      throw SchemaError(path.filename().string() + ":" + std::to_string(line_no) +
                        ": not an IPv4 address: '" + std::string(sv) + "'");
    }
    epoch.unreachable.insert(*addr);
  }
  return epoch;
}

ChurnReport compare_epochs(const EpochSet& a, const EpochSet& b, const AsTable* as_lookup,
                           double share_threshold) {
  ChurnReport report;
  report.epoch_a = a.epoch_id;
  report.epoch_b = b.epoch_id;
  report.flip_as_concentration.share_threshold = share_threshold;

  std::vector<Ipv4Addr> flips;
  for (const auto& host : a.unreachable) {
    if (b.unreachable.contains(host)) {
      ++report.stayed_unreachable;
    } else {
      ++report.became_reachable;
      flips.push_back(host);
    }
  }
  for (const auto& host : b.unreachable) {
    if (!a.unreachable.contains(host)) {
      ++report.became_unreachable;
      flips.push_back(host);
    }
  }

  if (!flips.empty()) {
    // Sentinel key above 32 bits for unmapped hosts.
    std::map<uint64_t, uint64_t> per_as;
    for (const auto& host : flips) {
      std::optional<uint32_t> asn;
      if (as_lookup) asn = as_lookup->lookup(host);
      ++per_as[asn ? uint64_t(*asn) : (uint64_t(1) << 40)];
    }
    std::vector<uint64_t> sizes;
    for (const auto& [asn, count] : per_as) sizes.push_back(count);
    std::sort(sizes.begin(), sizes.end(), std::greater<>());
    uint64_t need = uint64_t(std::ceil(share_threshold * double(flips.size())));
    uint64_t covered = 0;
    for (uint64_t size : sizes) {
      covered += size;
      ++report.flip_as_concentration.as_count;
      if (covered >= need) break;
    }
    report.flip_as_concentration.covered_fraction = double(covered) / double(flips.size());
  }
  return report;
}

std::string ChurnReport::to_json() const {
  nlohmann::json j{
      {"epoch_a", epoch_a},
      {"epoch_b", epoch_b},
      {"stayed_unreachable", stayed_unreachable},
      {"became_reachable", became_reachable},
      {"became_unreachable", became_unreachable},
      {"flip_as_concentration",
       {{"share_threshold", flip_as_concentration.share_threshold},
        {"as_count", flip_as_concentration.as_count},
        {"covered_fraction", flip_as_concentration.covered_fraction}}},
      {"caveat", kChurnCaveat},
      {"manifest", "manifest.json"}};
  return j.dump(2) + "\n";
}

std::string ChurnReport::to_sankey_csv() const {
  std::ostringstream out;
  out << "source,target,count\n";
  out << epoch_a << ":unreachable," << epoch_b << ":unreachable," << stayed_unreachable
      << '\n';
  out << epoch_a << ":unreachable," << epoch_b << ":reachable," << became_reachable << '\n';
  out << epoch_a << ":reachable," << epoch_b << ":unreachable," << became_unreachable
      << '\n';
  return out.str();
}

}  // namespace icmpsift
