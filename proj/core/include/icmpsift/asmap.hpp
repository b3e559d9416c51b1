#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "icmpsift/ipv4.hpp"

namespace icmpsift {

// IPv4-to-AS table with longest-prefix-match lookup. Entries are bucketed
// by prefix length so a lookup probes at most one hash map per populated
// length, longest first; immutable after load.
class AsTable {
 public:
  AsTable() = default;

  // Lines are "prefix,asn"; '#' starts a comment. Malformed lines and
  // duplicate prefixes (first kept) go into diagnostics instead of failing.
  // Throws FileUnreadable and EmptyTable.
  static AsTable load(const std::filesystem::path& path,
                      std::vector<std::string>* diagnostics = nullptr);

  static AsTable from_entries(const std::vector<std::pair<Ipv4Prefix, uint32_t>>& entries);

  std::optional<uint32_t> lookup(Ipv4Addr addr) const;

  size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }

 private:
  bool insert(Ipv4Prefix prefix, uint32_t asn);

  std::array<std::unordered_map<uint32_t, uint32_t>, 33> by_length_;
  uint64_t populated_lengths_ = 0;
  size_t size_ = 0;
};

// Label used when aggregating by AS with unmapped sources present.
inline constexpr const char* kUnmappedAsLabel = "unmapped";

}  // namespace icmpsift
