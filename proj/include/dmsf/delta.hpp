#pragma once

#include <algorithm>
#include <map>
#include <vector>

#include "dmsf/check.hpp"
#include "dmsf/ids.hpp"

namespace dmsf {

// Forest membership change produced by one update: edge ids that entered
// and left the minimum spanning forest, each list sorted ascending.
struct MsfDelta {
  std::vector<EdgeId> added;
  std::vector<EdgeId> removed;

  bool empty() const { return added.empty() && removed.empty(); }

  friend bool operator==(const MsfDelta& a, const MsfDelta& b) {
    return a.added == b.added && a.removed == b.removed;
  }
};

// Fold several sub-operation deltas into one net delta: an edge that both
// entered and left ends up unchanged and is dropped.
inline MsfDelta net_deltas(const std::vector<MsfDelta>& parts) {
  std::map<EdgeId, int> net;
  for (const MsfDelta& d : parts) {
    for (EdgeId id : d.added) net[id] += 1;
    for (EdgeId id : d.removed) net[id] -= 1;
  }
  MsfDelta out;
  for (auto& [id, k] : net) {
    DMSF_CHECK(k >= -1 && k <= 1, "edge membership changed by more than one");
    if (k == 1) out.added.push_back(id);
    if (k == -1) out.removed.push_back(id);
  }
  return out;  // map iteration already yields ascending ids
}

}  // namespace dmsf
