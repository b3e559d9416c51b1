#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace icmpsift {

// IPv4 address held in host byte order.
struct Ipv4Addr {
  uint32_t value = 0;

  static constexpr Ipv4Addr from_octets(uint8_t a, uint8_t b, uint8_t c, uint8_t d) {
    return Ipv4Addr{(uint32_t(a) << 24) | (uint32_t(b) << 16) | (uint32_t(c) << 8) | d};
  }
  // Reads four bytes in network order.
  static Ipv4Addr from_bytes(const uint8_t* p) {
    return from_octets(p[0], p[1], p[2], p[3]);
  }
  static std::optional<Ipv4Addr> parse(std::string_view text);

  void to_bytes(uint8_t* p) const {
    p[0] = uint8_t(value >> 24);
    p[1] = uint8_t(value >> 16);
    p[2] = uint8_t(value >> 8);
    p[3] = uint8_t(value);
  }
  std::string to_string() const;

  auto operator<=>(const Ipv4Addr&) const = default;
};

// Prefix in CIDR notation; base is stored masked.
struct Ipv4Prefix {
  Ipv4Addr base;
  uint8_t length = 0;

  static constexpr uint32_t mask_for(uint8_t length) {
    return length == 0 ? 0u : ~uint32_t(0) << (32 - length);
  }
  static Ipv4Prefix of(Ipv4Addr addr, uint8_t length) {
    return Ipv4Prefix{Ipv4Addr{addr.value & mask_for(length)}, length};
  }
  static std::optional<Ipv4Prefix> parse(std::string_view text);

  bool contains(Ipv4Addr addr) const {
    return (addr.value & mask_for(length)) == base.value;
  }
  std::string to_string() const;

  auto operator<=>(const Ipv4Prefix&) const = default;
};

inline Ipv4Prefix slash24(Ipv4Addr addr) {
  return Ipv4Prefix::of(addr, 24);
}

}  // namespace icmpsift

template <>
struct std::hash<icmpsift::Ipv4Addr> {
  size_t operator()(const icmpsift::Ipv4Addr& a) const noexcept {
    return std::hash<uint32_t>{}(a.value);
  }
};
