#include "icmpsift/asmap.hpp"

#include <charconv>
#include <fstream>

#include "icmpsift/errors.hpp"

namespace icmpsift {

bool AsTable::insert(Ipv4Prefix prefix, uint32_t asn) {
  auto& bucket = by_length_[prefix.length];
  auto [it, inserted] = bucket.emplace(prefix.base.value, asn);
  if (inserted) {
    populated_lengths_ |= uint64_t(1) << prefix.length;
    ++size_;
  }
  return inserted;
}

AsTable AsTable::load(const std::filesystem::path& path,
                      std::vector<std::string>* diagnostics) {
  std::ifstream in(path);
  if (!in) {
    throw FileUnreadable("cannot open AS table: " + path.string());
  }
  AsTable table;
  std::string line;
  size_t line_no = 0;
  auto diag = [&](const std::string& msg) {
    if (diagnostics) {
      diagnostics->push_back(path.filename().string() + ":" + std::to_string(line_no) +
                             ": " + msg);
    }
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string_view sv(line);
    auto hash = sv.find('#');
    if (hash != std::string_view::npos) sv = sv.substr(0, hash);
    while (!sv.empty() && (sv.front() == ' ' || sv.front() == '\t')) sv.remove_prefix(1);
    while (!sv.empty() && (sv.back() == ' ' || sv.back() == '\t')) sv.remove_suffix(1);
    if (sv.empty()) continue;

    auto comma = sv.find(',');
    if (comma == std::string_view::npos) {
      diag("missing comma");
      continue;
    }
    auto prefix = Ipv4Prefix::parse(sv.substr(0, comma));
    if (!prefix) {
      diag("bad prefix '" + std::string(sv.substr(0, comma)) + "'");
      continue;
    }
    auto asn_part = sv.substr(comma + 1);
    uint32_t asn = 0;
    auto [next, ec] = std::from_chars(asn_part.data(), asn_part.data() + asn_part.size(), asn);
    if (ec != std::errc{} || next != asn_part.data() + asn_part.size()) {
      diag("bad ASN '" + std::string(asn_part) + "'");
      continue;
    }
    if (!table.insert(*prefix, asn)) {
      diag("duplicate prefix " + prefix->to_string() + ", first entry kept");
    }
  }
  if (table.empty()) {
    throw EmptyTable("AS table has no entries: " + path.string());
  }
  return table;
}

AsTable AsTable::from_entries(const std::vector<std::pair<Ipv4Prefix, uint32_t>>& entries) {
  AsTable table;
  for (const auto& [prefix, asn] : entries) {
    table.insert(prefix, asn);
  }
  return table;
}

std::optional<uint32_t> AsTable::lookup(Ipv4Addr addr) const {
  for (int len = 32; len >= 0; --len) {
    if (!(populated_lengths_ >> len & 1)) continue;
    uint32_t key = addr.value & Ipv4Prefix::mask_for(uint8_t(len));
    const auto& bucket = by_length_[len];
    auto it = bucket.find(key);
    if (it != bucket.end()) return it->second;
  }
  return std::nullopt;
}

}  // namespace icmpsift
