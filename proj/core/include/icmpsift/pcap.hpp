#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <vector>

#include "icmpsift/ipv4.hpp"
#include "icmpsift/wire.hpp"

namespace icmpsift {

struct CaptureFilter {
  std::vector<Ipv4Prefix> measurement_prefixes;
  bool exclude_outbound = true;

  bool covers(Ipv4Addr addr) const {
    for (const auto& p : measurement_prefixes) {
      if (p.contains(addr)) return true;
    }
    return false;
  }
};

struct CaptureCounters {
  uint64_t records = 0;
  uint64_t yielded = 0;
  uint64_t parse_failures = 0;   // undecodable frames / truncated ICMP headers
  uint64_t non_icmp = 0;
  uint64_t dst_outside = 0;
  uint64_t outbound_excluded = 0;
};

// Streaming reader for classic capture files (magic 0xA1B2C3D4 or
// byte-swapped; nanosecond variants truncated to microseconds). Handles
// Ethernet frames (one VLAN tag deep) and raw-IP link types. Yields only
// ICMP-over-IPv4 destined to the measurement prefixes; per-record parse
// failures are counted and skipped.
class CaptureReader {
 public:
  // Throws FileUnreadable and MalformedCaptureHeader (pcapng is rejected
  // with a distinct message).
  CaptureReader(const std::filesystem::path& path, CaptureFilter filter);

  std::optional<IcmpMessage> next();

  const CaptureCounters& counters() const { return counters_; }

 private:
  std::ifstream in_;
  CaptureFilter filter_;
  CaptureCounters counters_{};
  bool swap_ = false;
  bool nanosecond_ = false;
  uint32_t link_type_ = 0;
  std::vector<uint8_t> frame_;
};

// Minimal writer used to synthesize capture fixtures: classic microsecond
// format, Ethernet link type, little-endian header.
class CaptureWriter {
 public:
  explicit CaptureWriter(const std::filesystem::path& path);

  // Wraps the raw IPv4 packet into an Ethernet frame (optionally one VLAN
  // tag) and appends a record.
  void write_ipv4(Timestamp ts, std::span<const uint8_t> ip_packet,
                  std::optional<uint16_t> vlan_id = std::nullopt);
  // Appends an arbitrary already-framed record.
  void write_frame(Timestamp ts, std::span<const uint8_t> frame);

 private:
  std::ofstream out_;
};

// Builds an IPv4 packet carrying the given ICMP bytes. The IP checksum is
// filled in; icmp bytes are used as-is.
std::vector<uint8_t> build_ipv4_icmp(Ipv4Addr src, Ipv4Addr dst, uint8_t ttl,
                                     std::span<const uint8_t> icmp);

}  // namespace icmpsift
