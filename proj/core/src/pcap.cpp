#include "icmpsift/pcap.hpp"

#include <cstring>

#include "icmpsift/checksum.hpp"
#include "icmpsift/errors.hpp"

namespace icmpsift {

namespace {

constexpr uint32_t kMagicUs = 0xA1B2C3D4;
constexpr uint32_t kMagicUsSwapped = 0xD4C3B2A1;
constexpr uint32_t kMagicNs = 0xA1B23C4D;
constexpr uint32_t kMagicNsSwapped = 0x4D3CB2A1;
constexpr uint32_t kMagicPcapng = 0x0A0D0D0A;

constexpr uint32_t kLinkEthernet = 1;
constexpr uint32_t kLinkRawIp = 101;

constexpr uint16_t kEthertypeIpv4 = 0x0800;
constexpr uint16_t kEthertypeVlan = 0x8100;
constexpr uint16_t kEthertypeQinQ = 0x88A8;

// Records longer than this are treated as stream corruption; the length
// field is the only way to find the next record, so reading stops there.
constexpr uint32_t kMaxRecordLen = 1 << 22;

uint32_t swap32(uint32_t v) {
  return __builtin_bswap32(v);
}
uint16_t be16(const uint8_t* p) {
  return uint16_t((uint16_t(p[0]) << 8) | p[1]);
}

}  // namespace

CaptureReader::CaptureReader(const std::filesystem::path& path, CaptureFilter filter)
    : in_(path, std::ios::binary), filter_(std::move(filter)) {
  if (!in_) {
    throw FileUnreadable("cannot open capture: " + path.string());
  }
  uint8_t header[24];
  if (!in_.read(reinterpret_cast<char*>(header), sizeof(header))) {
    throw MalformedCaptureHeader("capture shorter than the 24-byte global header");
  }
  uint32_t magic;
  std::memcpy(&magic, header, 4);
  switch (magic) {
    case kMagicUs: break;
    case kMagicNs: nanosecond_ = true; break;
    case kMagicUsSwapped: swap_ = true; break;
    case kMagicNsSwapped: swap_ = true; nanosecond_ = true; break;
    case kMagicPcapng:
      throw MalformedCaptureHeader("pcapng input is not supported; convert to classic format");
    default:
      throw MalformedCaptureHeader("unrecognized capture magic");
  }
  std::memcpy(&link_type_, header + 20, 4);
  if (swap_) link_type_ = swap32(link_type_);
  if (link_type_ != kLinkEthernet && link_type_ != kLinkRawIp) {
    throw MalformedCaptureHeader("unsupported link type " + std::to_string(link_type_) +
                                 " (expected Ethernet or raw IP)");
  }
}

std::optional<IcmpMessage> CaptureReader::next() {
  while (true) {
    uint8_t rec[16];
    if (!in_.read(reinterpret_cast<char*>(rec), sizeof(rec))) {
      return std::nullopt;  // EOF
    }
    uint32_t ts_sec, ts_frac, incl_len;
    std::memcpy(&ts_sec, rec, 4);
    std::memcpy(&ts_frac, rec + 4, 4);
    std::memcpy(&incl_len, rec + 8, 4);
    if (swap_) {
      ts_sec = swap32(ts_sec);
      ts_frac = swap32(ts_frac);
      incl_len = swap32(incl_len);
    }
    if (incl_len > kMaxRecordLen) {
      ++counters_.parse_failures;
      return std::nullopt;
    }
    frame_.resize(incl_len);
    if (incl_len > 0 && !in_.read(reinterpret_cast<char*>(frame_.data()), incl_len)) {
      ++counters_.parse_failures;
      return std::nullopt;
    }
    ++counters_.records;

    int64_t micros = int64_t(ts_sec) * 1'000'000 +
                     (nanosecond_ ? int64_t(ts_frac) / 1000 : int64_t(ts_frac));
    Timestamp ts = timestamp_from_us(micros);

    std::span<const uint8_t> data(frame_);
    if (link_type_ == kLinkEthernet) {
      if (data.size() < 14) {
        ++counters_.parse_failures;
        continue;
      }
      uint16_t ethertype = be16(data.data() + 12);
      size_t offset = 14;
      if (ethertype == kEthertypeVlan || ethertype == kEthertypeQinQ) {
        if (data.size() < 18) {
          ++counters_.parse_failures;
          continue;
        }
        ethertype = be16(data.data() + 16);
        offset = 18;
      }
      if (ethertype != kEthertypeIpv4) {
        ++counters_.non_icmp;
        continue;
      }
      data = data.subspan(offset);
    }

    if (data.size() < 20 || (data[0] >> 4) != 4) {
      ++counters_.parse_failures;
      continue;
    }
    size_t ip_header_len = size_t(data[0] & 0x0F) * 4;
    if (ip_header_len < 20 || data.size() < ip_header_len) {
      ++counters_.parse_failures;
      continue;
    }
    uint8_t protocol = data[9];
    if (protocol != 1) {
      ++counters_.non_icmp;
      continue;
    }
    OuterMeta meta;
    meta.capture_time = ts;
    meta.ttl = data[8];
    meta.src = Ipv4Addr::from_bytes(data.data() + 12);
    meta.dst = Ipv4Addr::from_bytes(data.data() + 16);

    if (!filter_.covers(meta.dst)) {
      ++counters_.dst_outside;
      continue;
    }
    if (filter_.exclude_outbound && filter_.covers(meta.src)) {
      ++counters_.outbound_excluded;
      continue;
    }

    // Trim Ethernet padding using the IP total length but keep whatever
    // the capture truncated to.
    uint16_t total_length = be16(data.data() + 2);
    size_t ip_bytes = data.size();
    if (total_length >= ip_header_len && total_length < ip_bytes) {
      ip_bytes = total_length;
    }
    if (ip_bytes <= ip_header_len + 7) {
      ++counters_.parse_failures;  // ICMP header truncated
      continue;
    }
    auto icmp = data.subspan(ip_header_len, ip_bytes - ip_header_len);
    ++counters_.yielded;
    return parse_icmp(icmp, meta);
  }
}

CaptureWriter::CaptureWriter(const std::filesystem::path& path)
    : out_(path, std::ios::binary) {
  if (!out_) {
    throw FileUnreadable("cannot create capture: " + path.string());
  }
  uint32_t magic = kMagicUs;
  uint16_t ver_major = 2, ver_minor = 4;
  uint32_t zero = 0, snaplen = 65535, link = kLinkEthernet;
  out_.write(reinterpret_cast<const char*>(&magic), 4);
  out_.write(reinterpret_cast<const char*>(&ver_major), 2);
  out_.write(reinterpret_cast<const char*>(&ver_minor), 2);
  out_.write(reinterpret_cast<const char*>(&zero), 4);
  out_.write(reinterpret_cast<const char*>(&zero), 4);
  out_.write(reinterpret_cast<const char*>(&snaplen), 4);
  out_.write(reinterpret_cast<const char*>(&link), 4);
}

void CaptureWriter::write_frame(Timestamp ts, std::span<const uint8_t> frame) {
  int64_t micros = timestamp_us(ts);
  uint32_t ts_sec = uint32_t(micros / 1'000'000);
  uint32_t ts_usec = uint32_t(micros % 1'000'000);
  uint32_t len = uint32_t(frame.size());
  out_.write(reinterpret_cast<const char*>(&ts_sec), 4);
  out_.write(reinterpret_cast<const char*>(&ts_usec), 4);
  out_.write(reinterpret_cast<const char*>(&len), 4);
  out_.write(reinterpret_cast<const char*>(&len), 4);
  out_.write(reinterpret_cast<const char*>(frame.data()), std::streamsize(frame.size()));
}

void CaptureWriter::write_ipv4(Timestamp ts, std::span<const uint8_t> ip_packet,
                               std::optional<uint16_t> vlan_id) {
  std::vector<uint8_t> frame;
  frame.reserve(18 + ip_packet.size());
  const uint8_t dst_mac[6] = {0x02, 0, 0, 0, 0, 0x01};
  const uint8_t src_mac[6] = {0x02, 0, 0, 0, 0, 0x02};
  frame.insert(frame.end(), dst_mac, dst_mac + 6);
  frame.insert(frame.end(), src_mac, src_mac + 6);
  if (vlan_id) {
    frame.push_back(0x81);
    frame.push_back(0x00);
    frame.push_back(uint8_t(*vlan_id >> 8));
    frame.push_back(uint8_t(*vlan_id));
  }
  frame.push_back(uint8_t(kEthertypeIpv4 >> 8));
  frame.push_back(uint8_t(kEthertypeIpv4 & 0xFF));
  frame.insert(frame.end(), ip_packet.begin(), ip_packet.end());
  write_frame(ts, frame);
}

std::vector<uint8_t> build_ipv4_icmp(Ipv4Addr src, Ipv4Addr dst, uint8_t ttl,
                                     std::span<const uint8_t> icmp) {
  std::vector<uint8_t> pkt(20 + icmp.size(), 0);
  pkt[0] = 0x45;
  uint16_t total = uint16_t(pkt.size());
  pkt[2] = uint8_t(total >> 8);
  pkt[3] = uint8_t(total);
  pkt[8] = ttl;
  pkt[9] = 1;  // ICMP
  src.to_bytes(pkt.data() + 12);
  dst.to_bytes(pkt.data() + 16);
  uint16_t csum = internet_checksum(std::span<const uint8_t>(pkt.data(), 20));
  pkt[10] = uint8_t(csum >> 8);
  pkt[11] = uint8_t(csum);
  std::copy(icmp.begin(), icmp.end(), pkt.begin() + 20);
  return pkt;
}

}  // namespace icmpsift
