#include "icmpsift/wire.hpp"

#include <charconv>

#include "icmpsift/checksum.hpp"
#include "icmpsift/errors.hpp"

namespace icmpsift {

const char* to_string(IcmpFamily family) {
  switch (family) {
    case IcmpFamily::DestinationUnreachable: return "DestinationUnreachable";
    case IcmpFamily::TimeExceeded: return "TimeExceeded";
    case IcmpFamily::Redirect: return "Redirect";
    case IcmpFamily::EchoRequest: return "EchoRequest";
    case IcmpFamily::EchoReply: return "EchoReply";
    case IcmpFamily::SourceQuench: return "SourceQuench";
    case IcmpFamily::TimestampRequest: return "TimestampRequest";
    case IcmpFamily::ParameterProblem: return "ParameterProblem";
    case IcmpFamily::AddressMaskRequest: return "AddressMaskRequest";
    case IcmpFamily::Other: return "Other";
  }
  return "Other";
}

const char* to_string(CodeName code) {
  switch (code) {
    case CodeName::Net: return "Net";
    case CodeName::Host: return "Host";
    case CodeName::Protocol: return "Protocol";
    case CodeName::Port: return "Port";
    case CodeName::FragNeeded: return "FragNeeded";
    case CodeName::SourceRouteFailed: return "SourceRouteFailed";
    case CodeName::NetUnknown: return "NetUnknown";
    case CodeName::HostUnknown: return "HostUnknown";
    case CodeName::SourceIsolated: return "SourceIsolated";
    case CodeName::NetProhibited: return "NetProhibited";
    case CodeName::HostProhibited: return "HostProhibited";
    case CodeName::NetTOS: return "NetTOS";
    case CodeName::HostTOS: return "HostTOS";
    case CodeName::CommProhibited: return "CommProhibited";
    case CodeName::HostPrecedence: return "HostPrecedence";
    case CodeName::PrecedenceCutoff: return "PrecedenceCutoff";
    case CodeName::TTLExceeded: return "TTLExceeded";
    case CodeName::FragReassembly: return "FragReassembly";
    case CodeName::NetworkRedirect: return "NetworkRedirect";
    case CodeName::HostRedirect: return "HostRedirect";
    case CodeName::TosNetworkRedirect: return "TosNetworkRedirect";
    case CodeName::TosHostRedirect: return "TosHostRedirect";
    case CodeName::PointerIndicated: return "PointerIndicated";
    case CodeName::MissingOption: return "MissingOption";
    case CodeName::BadLength: return "BadLength";
    case CodeName::NoCode: return "NoCode";
    case CodeName::NonStandard: return "NonStandard";
  }
  return "NonStandard";
}

namespace {

CodeName unreachable_code(uint8_t code) {
  switch (code) {
    case 0: return CodeName::Net;
    case 1: return CodeName::Host;
    case 2: return CodeName::Protocol;
    case 3: return CodeName::Port;
    case 4: return CodeName::FragNeeded;
    case 5: return CodeName::SourceRouteFailed;
    case 6: return CodeName::NetUnknown;
    case 7: return CodeName::HostUnknown;
    case 8: return CodeName::SourceIsolated;
    case 9: return CodeName::NetProhibited;
    case 10: return CodeName::HostProhibited;
    case 11: return CodeName::NetTOS;
    case 12: return CodeName::HostTOS;
    case 13: return CodeName::CommProhibited;
    case 14: return CodeName::HostPrecedence;
    case 15: return CodeName::PrecedenceCutoff;
    default: return CodeName::NonStandard;
  }
}

CodeName single_code(uint8_t code) {
  return code == 0 ? CodeName::NoCode : CodeName::NonStandard;
}

}  // namespace

Classification classify(uint8_t icmp_type, uint8_t icmp_code) {
  Classification c;
  switch (icmp_type) {
    case 0:
      c.family = IcmpFamily::EchoReply;
      c.code_name = single_code(icmp_code);
      break;
    case 3:
      c.family = IcmpFamily::DestinationUnreachable;
      c.code_name = unreachable_code(icmp_code);
      c.quoting_expected = true;
      break;
    case 4:
      c.family = IcmpFamily::SourceQuench;
      c.code_name = single_code(icmp_code);
      c.deprecated = true;
      c.quoting_expected = true;
      break;
    case 5:
      c.family = IcmpFamily::Redirect;
      switch (icmp_code) {
        case 0: c.code_name = CodeName::NetworkRedirect; break;
        case 1: c.code_name = CodeName::HostRedirect; break;
        case 2: c.code_name = CodeName::TosNetworkRedirect; break;
        case 3: c.code_name = CodeName::TosHostRedirect; break;
        default: c.code_name = CodeName::NonStandard; break;
      }
      c.quoting_expected = true;
      break;
    case 8:
      c.family = IcmpFamily::EchoRequest;
      c.code_name = single_code(icmp_code);
      break;
    case 11:
      c.family = IcmpFamily::TimeExceeded;
      switch (icmp_code) {
        case 0: c.code_name = CodeName::TTLExceeded; break;
        case 1: c.code_name = CodeName::FragReassembly; break;
        default: c.code_name = CodeName::NonStandard; break;
      }
      c.quoting_expected = true;
      break;
    case 12:
      c.family = IcmpFamily::ParameterProblem;
      switch (icmp_code) {
        case 0: c.code_name = CodeName::PointerIndicated; break;
        case 1: c.code_name = CodeName::MissingOption; break;
        case 2: c.code_name = CodeName::BadLength; break;
        default: c.code_name = CodeName::NonStandard; break;
      }
      c.quoting_expected = true;
      break;
    case 13:
      c.family = IcmpFamily::TimestampRequest;
      c.code_name = single_code(icmp_code);
      break;
    case 17:
      c.family = IcmpFamily::AddressMaskRequest;
      c.code_name = single_code(icmp_code);
      break;
    default:
      c.family = IcmpFamily::Other;
      c.code_name = CodeName::NonStandard;
      break;
  }
  return c;
}

IcmpMessage parse_icmp(std::span<const uint8_t> raw, const OuterMeta& meta) {
  if (raw.size() < 8) {
    throw TruncatedMessage("ICMP portion shorter than 8-byte header: " +
                           std::to_string(raw.size()) + " bytes");
  }
  IcmpMessage msg;
  msg.capture_time = meta.capture_time;
  msg.outer_src = meta.src;
  msg.outer_dst = meta.dst;
  msg.outer_ttl = meta.ttl;
  msg.icmp_type = raw[0];
  msg.icmp_code = raw[1];
  msg.checksum_field = uint16_t((uint16_t(raw[2]) << 8) | raw[3]);
  msg.checksum_valid = checksum_ok(raw);
  std::copy(raw.begin() + 4, raw.begin() + 8, msg.rest_of_header.begin());
  msg.payload.assign(raw.begin() + 8, raw.end());
  return msg;
}

std::vector<uint8_t> serialize_icmp(const IcmpMessage& msg) {
  std::vector<uint8_t> out;
  out.reserve(8 + msg.payload.size());
  out.push_back(msg.icmp_type);
  out.push_back(msg.icmp_code);
  out.push_back(uint8_t(msg.checksum_field >> 8));
  out.push_back(uint8_t(msg.checksum_field));
  out.insert(out.end(), msg.rest_of_header.begin(), msg.rest_of_header.end());
  out.insert(out.end(), msg.payload.begin(), msg.payload.end());
  return out;
}

std::optional<QuotedPacket> decode_ipv4_payload(std::span<const uint8_t> payload) {
  if (payload.size() < 20) return std::nullopt;
  uint8_t version = payload[0] >> 4;
  if (version != 4) return std::nullopt;
  size_t header_len = size_t(payload[0] & 0x0F) * 4;
  if (header_len < 20 || payload.size() < header_len) return std::nullopt;

  QuotedPacket q;
  q.quoted_byte_count = payload.size();
  q.total_length = uint16_t((uint16_t(payload[2]) << 8) | payload[3]);
  q.ip_id = uint16_t((uint16_t(payload[4]) << 8) | payload[5]);
  q.dont_fragment = (payload[6] & 0x40) != 0;
  q.ttl = payload[8];
  q.protocol = payload[9];
  q.src = Ipv4Addr::from_bytes(payload.data() + 12);
  q.dst = Ipv4Addr::from_bytes(payload.data() + 16);

  size_t transport_bytes = payload.size() - header_len;
  if (transport_bytes >= 4) {
    const uint8_t* t = payload.data() + header_len;
    q.src_port = uint16_t((uint16_t(t[0]) << 8) | t[1]);
    q.dst_port = uint16_t((uint16_t(t[2]) << 8) | t[3]);
  }
  if (q.protocol == kProtocolTcp) {
    q.full_transport_header = transport_bytes >= 20;
  } else if (q.protocol == kProtocolUdp) {
    q.full_transport_header = transport_bytes >= 8;
  }
  return q;
}

std::optional<QuotedPacket> decode_quotation(const IcmpMessage& msg) {
  if (!classify(msg.icmp_type, msg.icmp_code).quoting_expected) return std::nullopt;
  return decode_ipv4_payload(msg.payload);
}

bool is_reserved(Ipv4Addr addr) {
  static const Ipv4Prefix kReserved[] = {
      Ipv4Prefix::of(Ipv4Addr::from_octets(0, 0, 0, 0), 8),
      Ipv4Prefix::of(Ipv4Addr::from_octets(10, 0, 0, 0), 8),
      Ipv4Prefix::of(Ipv4Addr::from_octets(127, 0, 0, 0), 8),
      Ipv4Prefix::of(Ipv4Addr::from_octets(169, 254, 0, 0), 16),
      Ipv4Prefix::of(Ipv4Addr::from_octets(172, 16, 0, 0), 12),
      Ipv4Prefix::of(Ipv4Addr::from_octets(192, 168, 0, 0), 16),
      Ipv4Prefix::of(Ipv4Addr::from_octets(224, 0, 0, 0), 4),
      Ipv4Prefix::of(Ipv4Addr::from_octets(240, 0, 0, 0), 4),
  };
  for (const auto& p : kReserved) {
    if (p.contains(addr)) return true;
  }
  return false;
}

}  // namespace icmpsift
