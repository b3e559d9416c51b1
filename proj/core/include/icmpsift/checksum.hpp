#pragma once

#include <cstdint>
#include <span>

namespace icmpsift {

// RFC1071 one's-complement 16-bit word sum with end-around carry folding.
// Words are taken big-endian; an odd trailing byte is zero-padded.
inline uint16_t ones_complement_sum(std::span<const uint8_t> data) {
  uint64_t sum = 0;
  size_t i = 0;
  for (; i + 1 < data.size(); i += 2) {
    sum += (uint32_t(data[i]) << 8) | data[i + 1];
  }
  if (i < data.size()) {
    sum += uint32_t(data[i]) << 8;
  }
  while (sum >> 16) {
    sum = (sum & 0xFFFF) + (sum >> 16);
  }
  return uint16_t(sum);
}

// Value to place in a zeroed checksum field.
inline uint16_t internet_checksum(std::span<const uint8_t> data) {
  return uint16_t(~ones_complement_sum(data));
}

// Valid iff the folded sum over the full block (checksum field included)
// is all ones.
inline bool checksum_ok(std::span<const uint8_t> data) {
  return ones_complement_sum(data) == 0xFFFF;
}

}  // namespace icmpsift
