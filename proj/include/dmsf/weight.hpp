#pragma once

#include <compare>
#include <cstdint>
#include <ostream>

namespace dmsf {

// Strict total order on edge weights. Tier separates the three kinds of
// entries so that chain-link edges sort below every real edge and the
// "no entry" state sorts above everything; ties on (tier, value) break by id.
enum class WeightTier : std::uint8_t { Phantom = 0, Real = 1, Absent = 2 };

struct TotalWeight {
  WeightTier tier = WeightTier::Absent;
  std::int64_t value = 0;
  std::uint64_t id = 0;

  friend constexpr auto operator<=>(const TotalWeight&, const TotalWeight&) = default;

  static constexpr TotalWeight phantom(std::uint64_t id) {
    return TotalWeight{WeightTier::Phantom, 0, id};
  }
  static constexpr TotalWeight real(std::int64_t value, std::uint64_t id) {
    return TotalWeight{WeightTier::Real, value, id};
  }
  static constexpr TotalWeight absent() { return TotalWeight{}; }

  constexpr bool is_absent() const { return tier == WeightTier::Absent; }
  constexpr bool is_phantom() const { return tier == WeightTier::Phantom; }
};

inline std::ostream& operator<<(std::ostream& os, const TotalWeight& w) {
  switch (w.tier) {
    case WeightTier::Phantom: return os << "ph(#" << w.id << ")";
    case WeightTier::Real: return os << w.value << "(#" << w.id << ")";
    case WeightTier::Absent: return os << "absent";
  }
  return os;
}

}  // namespace dmsf
