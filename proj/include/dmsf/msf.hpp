#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "dmsf/delta.hpp"
#include "dmsf/engine.hpp"
#include "dmsf/ids.hpp"
#include "dmsf/weight.hpp"

namespace dmsf {

// Internal chain-link edges live above this id bound; user edge ids stay
// strictly below it.
inline constexpr EdgeId kPhantomBase = EdgeId{1} << 40;

struct MsfConfig {
  std::uint32_t n = 0;          // user vertices (any degree)
  std::uint32_t max_edges = 0;  // max simultaneously live user edges
  EngineMode mode = EngineMode::Seq;
  std::uint32_t k_override = 0;
  bool pram_threads = false;
  bool pram_abort = false;
};

// A live user edge. is_tree reflects the forest at the time of the query.
struct EdgeRecord {
  EdgeId id = 0;
  VertexId u = 0;
  VertexId v = 0;
  std::int64_t w = 0;
  bool is_tree = false;
  VertexId host_u = 0;  // reduced-graph endpoints (degree <= 3)
  VertexId host_v = 0;
};

// User-facing dynamic minimum spanning forest on a graph of unbounded
// degree. Each vertex is represented in the bounded-degree reduced graph by
// a chain of max(1, degree) vertices joined by chain-link edges that rank
// below every real weight (so they are always forest edges); every chain
// vertex hosts at most one real edge endpoint. Chains grow and shrink at
// the tail, so one update touches O(1) chain vertices.
class DynamicMsf {
 public:
  explicit DynamicMsf(const MsfConfig& cfg);

  // Inserts edge {u, v} with the given weight; ids are assigned sequentially
  // from 0 and never reused. Throws std::invalid_argument on a self loop.
  EdgeRecord insert(VertexId u, VertexId v, std::int64_t w);
  // Inserts under a caller-chosen id (must be unused and < kPhantomBase).
  EdgeRecord insert_with_id(EdgeId id, VertexId u, VertexId v, std::int64_t w);
  // Removes a live edge; returns the net forest change (user edges only).
  MsfDelta erase(EdgeId id);

  // Answers what insert_with_id(id, u, v, w) would change in the forest
  // without changing any state (ties broken by id, like a real insert).
  Engine::Probe probe_insert(EdgeId id, VertexId u, VertexId v,
                             std::int64_t w);

  // Net forest change of the most recent insert/erase, user edges only.
  const MsfDelta& last_delta() const { return last_delta_; }

  bool has_edge(EdgeId id) const { return recs_.count(id) != 0; }
  EdgeRecord record(EdgeId id) const;
  bool is_tree(EdgeId id) const;
  bool connected(VertexId u, VertexId v);

  // Forest edge ids (ascending) and their total weight.
  std::vector<EdgeId> msf() const;
  std::int64_t msf_weight_sum() const;

  std::uint32_t n() const { return n_; }
  std::size_t num_edges() const { return recs_.size(); }

  Engine& engine() { return eng_; }
  const Engine& engine() const { return eng_; }

  // Structural self-checks: chain shape, reduced-graph degrees <= 3,
  // chain-link edges all in the forest, plus the engine's own audits.
  void audit() const;

 private:
  VertexId grow_chain(VertexId u, std::vector<MsfDelta>& parts);
  void shrink_chain(VertexId u, VertexId freed_host,
                    std::vector<MsfDelta>& parts);
  MsfDelta net_user_delta(const std::vector<MsfDelta>& parts) const;

  struct Rec {
    VertexId u = 0;
    VertexId v = 0;
    std::int64_t w = 0;
    VertexId host_u = 0;
    VertexId host_v = 0;
  };

  std::uint32_t n_ = 0;
  MsfConfig cfg_;
  Engine eng_;
  IdPool extra_pool_;                      // chain vertices beyond the base n
  std::vector<std::vector<VertexId>> chains_;
  std::vector<std::uint32_t> deg_;         // live real degree per user vertex
  std::vector<EdgeId> host_edge_;          // reduced vertex -> hosted edge
  std::vector<EdgeId> phantom_of_;         // chain vertex -> its link edge id
  std::map<EdgeId, Rec> recs_;
  EdgeId next_id_ = 0;
  MsfDelta last_delta_;
};

}  // namespace dmsf
