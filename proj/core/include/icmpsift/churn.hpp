#pragma once

#include <cstdint>
#include <filesystem>
#include <set>
#include <string>

#include "icmpsift/asmap.hpp"
#include "icmpsift/ipv4.hpp"

namespace icmpsift {

// Hosts observed unreachable within one scan epoch. "Reachable" elsewhere
// in this module means only that no unreachable message was observed.
struct EpochSet {
  std::string epoch_id;
  std::set<Ipv4Addr> unreachable;
};

// One dotted quad per line; '#' comments and blank lines ignored.
// Throws FileUnreadable; malformed lines throw SchemaError.
EpochSet load_epoch_file(const std::filesystem::path& path, std::string epoch_id);

// Smallest set of ASes (largest first) whose members cover at least
// share_threshold of the flipping hosts.
struct FlipAsConcentration {
  double share_threshold = 0.8;
  uint64_t as_count = 0;
  double covered_fraction = 0.0;
};

struct ChurnReport {
  std::string epoch_a;
  std::string epoch_b;
  uint64_t stayed_unreachable = 0;
  uint64_t became_reachable = 0;    // in A, not in B
  uint64_t became_unreachable = 0;  // in B, not in A
  FlipAsConcentration flip_as_concentration;

  std::string to_json() const;
  // Flow rows (source, target, count) suitable for Sankey plotting.
  std::string to_sankey_csv() const;
};

inline constexpr const char* kChurnCaveat =
    "reachable means 'no unreachable message observed for the host', "
    "not confirmed reachability";

ChurnReport compare_epochs(const EpochSet& a, const EpochSet& b, const AsTable* as_lookup,
                           double share_threshold = 0.8);

}  // namespace icmpsift
