#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <vector>

#include "dmsf/delta.hpp"
#include "dmsf/ids.hpp"
#include "dmsf/msf.hpp"
#include "dmsf/pram.hpp"
#include "dmsf/weight.hpp"

namespace dmsf {

struct SparsifyConfig {
  std::uint32_t n = 0;          // graph vertices (any degree)
  std::uint32_t max_edges = 0;  // max simultaneously live edges
  bool parallel = false;        // embedded engines run on simulated machines
  bool pram_threads = false;
  bool pram_abort = false;
};

// Hierarchy of forest engines over a recursive halving of the vertex set.
//
// Level 0 holds one node per vertex pair with a live edge; level i covers
// vertex intervals of size 2^i, and a node for interval pair (A, B) stores
// exactly the union of its children's forest edges. The invariant makes each
// node's edge set a certificate: its forest equals the forest of all live
// edges between A and B, so the top node's forest is the graph's minimum
// spanning forest while every engine only ever sees O(|A| + |B|) edges.
//
// An update touches one node per level (the path of the edge's interval
// pair) and applies at most two engine updates there: the edge itself plus
// either the tree edge it displaced one level below (insert) or the lightest
// replacement promoted from below (delete). Nodes materialize on first use
// and are torn down when their last edge leaves.
//
// In parallel mode each node embeds a machine-mode engine with its own
// simulated processor pool. The driver executes levels serially but groups
// them into phases whose inputs are computed before any level mutates
// (read-only probes for inserts; removal, then a prefix-minimum scan of the
// promoted replacements, then reinsertion for deletes), so per-phase cost
// combines as max of depth and sum of work across levels.
class Sparsifier {
 public:
  explicit Sparsifier(const SparsifyConfig& cfg);
  ~Sparsifier();

  // Inserts edge {u, v}; ids are assigned sequentially from 0 and never
  // reused. Throws std::invalid_argument on a self loop / bad vertex.
  EdgeRecord insert(VertexId u, VertexId v, std::int64_t w);
  // Removes a live edge; returns the net change to the top-level forest.
  MsfDelta erase(EdgeId id);

  // Net top-level forest change of the most recent insert/erase.
  const MsfDelta& last_delta() const { return last_delta_; }
  // Combined machine cost of the most recent op (zeros in serial mode).
  const StepReport& last_step() const { return last_step_; }

  bool has_edge(EdgeId id) const { return edges_.count(id) != 0; }
  std::size_t num_edges() const { return edges_.size(); }
  std::uint32_t n() const { return cfg_.n; }
  // Levels in the hierarchy; level 0 is the leaves, levels() - 1 the top.
  std::uint32_t levels() const { return depth_ + 1; }

  // Top-level forest: edge ids ascending, and their weight sum.
  std::vector<EdgeId> msf() const;
  std::int64_t msf_weight_sum() const;

  struct NodeView {
    std::uint32_t level = 0;      // 0 = leaves
    std::uint32_t alpha_lo = 0;   // inclusive vertex ranges
    std::uint32_t alpha_hi = 0;
    std::uint32_t beta_lo = 0;
    std::uint32_t beta_hi = 0;
    std::size_t edge_count = 0;
    const DynamicMsf* graph = nullptr;
  };
  // All materialized nodes, top level first, then by interval start.
  std::vector<NodeView> nodes() const;
  std::vector<NodeView> level_nodes(std::uint32_t level) const;
  std::vector<const DynamicMsf*> level_engines(std::uint32_t level) const;
  std::size_t node_count() const { return nodes_.size(); }

  // Engine updates applied per level by the most recent op (index = level).
  const std::vector<std::uint32_t>& last_level_updates() const {
    return updates_this_op_;
  }
  // Highest per-level update count seen by any op so far.
  std::uint32_t max_level_updates() const { return max_level_updates_; }

  // Local copy handles of the inserted edge's endpoints, one entry per level
  // the most recent insert reached.
  struct CopyPair {
    std::uint32_t level = 0;
    VertexId u_copy = 0;
    VertexId v_copy = 0;
  };
  const std::vector<CopyPair>& last_insert_copies() const { return vcopy_; }

  // Replacement promoted out of each level by the most recent erase
  // (present = that level's forest pulled a new edge in when the deleted
  // edge left it).
  struct Promoted {
    bool present = false;
    Edge edge{};
  };
  const std::vector<Promoted>& last_promotions() const { return redges_; }

  // Peak simulated processors of any op, and machine exclusivity violations
  // accumulated across all embedded engines (including torn-down nodes).
  std::uint32_t peak_processors() const { return peak_procs_; }
  std::uint64_t violations() const;
  // Highest surgery-primitive count of a single occurrence-list join or
  // delete across all embedded engines, torn-down nodes included.
  std::uint32_t max_surgery() const;

  // One line per materialized node:
  //   node level=<i> alpha=<lo..hi> beta=<lo..hi> edges=<k> msf=<ids>
  void dump(std::ostream& os) const;

  // Structural self-checks (throw std::logic_error on failure): every
  // node's edge set equals the union of its children's forests (leaves: the
  // live edges of their vertex pair), no empty node or unused vertex copy
  // persists, the copy/degree bookkeeping and embedded engines agree with
  // the mirror, and leaf edge counts sum to the live edge count. deep also
  // runs every embedded engine's own audits.
  void audit(bool deep = false) const;

 private:
  struct Copy {
    VertexId local = 0;
    std::uint32_t deg = 0;
  };
  struct Node {
    std::uint32_t level = 0;
    std::uint32_t a = 0;  // interval indices at this level, a <= b
    std::uint32_t b = 0;
    std::uint32_t cap = 0;        // graph vertices this node can host
    std::uint32_t max_edges = 0;  // current engine capacity
    std::unique_ptr<DynamicMsf> graph;
    std::unique_ptr<IdPool> locals;
    std::map<VertexId, Copy> copies;   // graph vertex -> local copy
    std::vector<VertexId> owner;       // local id -> graph vertex
    std::map<EdgeId, Edge> edges;      // live local edges (global ids)
  };
  // Cost of one engine's share of a phase, plus its processor pool.
  struct Unit {
    StepReport rep{};
    std::uint32_t pool = 1;
  };

  static std::uint64_t pack(std::uint32_t level, std::uint32_t a,
                            std::uint32_t b);
  std::uint64_t path_key(std::uint32_t level, VertexId u, VertexId v) const;
  Node* find(std::uint64_t key) const;
  Node& materialize(std::uint32_t level, VertexId u, VertexId v);
  void interval(std::uint32_t level, std::uint32_t idx, std::uint32_t* lo,
                std::uint32_t* hi) const;

  VertexId ensure_copy(Node& nd, VertexId gv);
  void grow(Node& nd, StepReport* cost);
  MsfDelta node_insert(Node& nd, const Edge& e, StepReport* cost);
  MsfDelta node_erase(Node& nd, EdgeId id, StepReport* cost);
  StepReport snap(const Node& nd) const;
  std::uint32_t pool_of(const Node& nd) const;

  void begin_op();
  void serial_charge(std::uint64_t steps);
  void fold_phase(const std::vector<Unit>& units);
  void end_op(const std::vector<std::uint64_t>& touched,
              const std::vector<MsfDelta>& top_parts);

  SparsifyConfig cfg_;
  std::uint32_t depth_ = 0;  // levels() - 1
  std::map<std::uint64_t, std::unique_ptr<Node>> nodes_;
  std::map<EdgeId, Edge> edges_;  // live edge registry
  EdgeId next_id_ = 0;

  MsfDelta last_delta_;
  StepReport last_step_{};
  std::vector<std::uint32_t> updates_this_op_;
  std::uint32_t max_level_updates_ = 0;
  std::vector<CopyPair> vcopy_;
  std::vector<Promoted> redges_;
  std::uint32_t peak_procs_ = 0;
  std::uint64_t retired_violations_ = 0;
  std::uint32_t retired_max_surgery_ = 0;
};

}  // namespace dmsf
