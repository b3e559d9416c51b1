#include "icmpsift/ipv4.hpp"

#include <charconv>

namespace icmpsift {

std::optional<Ipv4Addr> Ipv4Addr::parse(std::string_view text) {
  uint32_t value = 0;
  int octets = 0;
  const char* p = text.data();
  const char* end = text.data() + text.size();
  while (octets < 4) {
    unsigned v = 0;
    auto [next, ec] = std::from_chars(p, end, v);
    if (ec != std::errc{} || v > 255 || next == p || next - p > 3) return std::nullopt;
    value = (value << 8) | v;
    ++octets;
    p = next;
    if (octets < 4) {
      if (p == end || *p != '.') return std::nullopt;
      ++p;
    }
  }
  if (p != end) return std::nullopt;
  return Ipv4Addr{value};
}

std::string Ipv4Addr::to_string() const {
  std::string out;
  out.reserve(15);
  for (int shift = 24; shift >= 0; shift -= 8) {
    out += std::to_string((value >> shift) & 0xFF);
    if (shift) out += '.';
  }
  return out;
}

std::optional<Ipv4Prefix> Ipv4Prefix::parse(std::string_view text) {
  auto slash = text.find('/');
  uint8_t length = 32;
  std::string_view addr_part = text;
  if (slash != std::string_view::npos) {
    addr_part = text.substr(0, slash);
    auto len_part = text.substr(slash + 1);
    unsigned v = 0;
    auto [next, ec] = std::from_chars(len_part.data(), len_part.data() + len_part.size(), v);
    if (ec != std::errc{} || v > 32 || next != len_part.data() + len_part.size()) {
      return std::nullopt;
    }
    length = uint8_t(v);
  }
  auto addr = Ipv4Addr::parse(addr_part);
  if (!addr) return std::nullopt;
  return Ipv4Prefix::of(*addr, length);
}

std::string Ipv4Prefix::to_string() const {
  return base.to_string() + "/" + std::to_string(length);
}

}  // namespace icmpsift
