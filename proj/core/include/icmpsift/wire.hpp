#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "icmpsift/ipv4.hpp"
#include "icmpsift/time.hpp"

namespace icmpsift {

enum class IcmpFamily : uint8_t {
  DestinationUnreachable,
  TimeExceeded,
  Redirect,
  EchoRequest,
  EchoReply,
  SourceQuench,
  TimestampRequest,
  ParameterProblem,
  AddressMaskRequest,
  Other,
};

enum class CodeName : uint8_t {
  // destination unreachable
  Net,
  Host,
  Protocol,
  Port,
  FragNeeded,
  SourceRouteFailed,
  NetUnknown,
  HostUnknown,
  SourceIsolated,
  NetProhibited,
  HostProhibited,
  NetTOS,
  HostTOS,
  CommProhibited,
  HostPrecedence,
  PrecedenceCutoff,
  // time exceeded
  TTLExceeded,
  FragReassembly,
  // redirect
  NetworkRedirect,
  HostRedirect,
  TosNetworkRedirect,
  TosHostRedirect,
  // parameter problem
  PointerIndicated,
  MissingOption,
  BadLength,
  // single-code types
  NoCode,
  // catch-alls
  NonStandard,
};

struct Classification {
  IcmpFamily family = IcmpFamily::Other;
  CodeName code_name = CodeName::NonStandard;
  bool deprecated = false;
  bool quoting_expected = false;

  auto operator<=>(const Classification&) const = default;
};

const char* to_string(IcmpFamily family);
const char* to_string(CodeName code);

// Total over all 65536 (type, code) pairs. Standardized pairs get their
// named code, unknown codes within known types get NonStandard, unknown
// types land in family Other.
Classification classify(uint8_t icmp_type, uint8_t icmp_code);

struct OuterMeta {
  Timestamp capture_time{};
  Ipv4Addr src;
  Ipv4Addr dst;
  uint8_t ttl = 0;
};

// One captured ICMP datagram. Type/code are kept exactly as on the wire.
struct IcmpMessage {
  Timestamp capture_time{};
  Ipv4Addr outer_src;
  Ipv4Addr outer_dst;
  uint8_t outer_ttl = 0;
  uint8_t icmp_type = 0;
  uint8_t icmp_code = 0;
  uint16_t checksum_field = 0;
  bool checksum_valid = false;
  std::array<uint8_t, 4> rest_of_header{};
  std::vector<uint8_t> payload;
};

// Throws TruncatedMessage when raw is shorter than the 8-byte header.
IcmpMessage parse_icmp(std::span<const uint8_t> raw, const OuterMeta& meta);

// Exact inverse of parse_icmp over the ICMP portion.
std::vector<uint8_t> serialize_icmp(const IcmpMessage& msg);

// Decoded inner IPv4 header + transport prefix quoted in an ICMP message.
struct QuotedPacket {
  Ipv4Addr src;
  Ipv4Addr dst;
  uint8_t ttl = 0;
  uint8_t protocol = 0;
  uint16_t ip_id = 0;
  bool dont_fragment = false;
  uint16_t total_length = 0;
  std::optional<uint16_t> src_port;
  std::optional<uint16_t> dst_port;
  bool full_transport_header = false;
  size_t quoted_byte_count = 0;
};

inline constexpr uint8_t kProtocolTcp = 6;
inline constexpr uint8_t kProtocolUdp = 17;

// Parses bytes as a quoted IPv4 packet; absent when the version is not 4,
// the header length is inconsistent, or fewer than 20 bytes are present.
// Ports are read past any IP options; truncated captures keep whatever
// decoded and record quoted_byte_count instead of failing.
std::optional<QuotedPacket> decode_ipv4_payload(std::span<const uint8_t> payload);

// Absent when the classification does not expect a quotation or the
// payload does not parse as IPv4.
std::optional<QuotedPacket> decode_quotation(const IcmpMessage& msg);

// Reserved address space: 0.0.0.0/8, 10/8, 127/8, 169.254/16, 172.16/12,
// 192.168/16, 224/4 (multicast) and 240/4 (class E).
bool is_reserved(Ipv4Addr addr);

}  // namespace icmpsift
