#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <vector>

#include "dmsf/bitset.hpp"
#include "dmsf/check.hpp"
#include "dmsf/delta.hpp"
#include "dmsf/ids.hpp"
#include "dmsf/link_cut.hpp"
#include "dmsf/pram.hpp"
#include "dmsf/two_three.hpp"
#include "dmsf/weight.hpp"

namespace dmsf {

enum class EngineMode { Seq, Par };

struct EngineConfig {
  std::uint32_t n = 0;          // number of vertices (degree <= 3 each)
  std::uint32_t max_edges = 0;  // max simultaneously live edges
  EngineMode mode = EngineMode::Seq;
  std::uint32_t k_override = 0;  // 0 = default chunk parameter for the mode
  bool pram_threads = false;     // par: execute phases on real threads
  bool pram_abort = false;       // par: throw on first access violation
};

// Counts list-surgery primitives. A rotation is implemented as an internal
// split+join but counts as a single primitive.
struct SurgeryCounter {
  std::uint64_t splits = 0;
  std::uint64_t joins = 0;
  std::uint64_t rotates = 0;
  std::uint64_t total() const { return splits + joins + rotates; }
};

// Dynamic minimum spanning forest over a bounded-degree multigraph.
// Maintains one occurrence list (an Euler tour, arbitrary rotation) per tree,
// partitioned into chunks of ~K mass, a chunk-adjacency matrix over the long
// lists, and per-list aggregate search structures, so a deleted tree edge's
// best replacement is found without scanning whole trees.
class Engine {
 public:
  explicit Engine(const EngineConfig& cfg);

  // Inserts a live edge. w.id must equal id. Returns the net change to the
  // spanning forest (0, 1, or 2 edge ids).
  MsfDelta insert(EdgeId id, VertexId u, VertexId v, TotalWeight w);
  // Removes a live edge, returning the net forest change.
  MsfDelta erase(EdgeId id);

  // Outcome of a hypothetical insert: would the edge enter the forest, and
  // which tree edge would it displace (kNoId64 when none).
  struct Probe {
    bool enters = false;
    EdgeId displaced = kNoId64;
    std::uint64_t lc_steps = 0;
  };
  // Read-only forest query (splays internally, mutates no chunk state):
  // answers what insert(id, u, v, w) would do to the forest.
  Probe probe_insert(VertexId u, VertexId v, TotalWeight w);

  bool has_edge(EdgeId id) const { return edges_.count(id) != 0; }
  bool is_tree(EdgeId id) const { return edges_.at(id).tree; }
  bool connected(VertexId u, VertexId v) { return lct_.connected(u, v); }
  std::vector<EdgeId> msf_edges() const;
  std::size_t num_edges() const { return edges_.size(); }

  std::uint32_t K() const { return K_; }
  std::uint32_t J() const { return J_; }
  EngineMode mode() const { return cfg_.mode; }
  // Upper bound on one chunk's edge slots / occurrences, transients included;
  // also the widest slot-pipeline phase.
  std::uint32_t par_slot_span() const;

  // Chunks currently holding an adjacency id, ascending.
  std::vector<ChunkId> live_chunk_ids() const;
  std::uint32_t chunk_edge_count(ChunkId cid) const;
  // k'th edge incident to the chunk in canonical order (occurrence order,
  // then slot order), found by descending the occurrence tree's counters.
  EdgeId get_edge(ChunkId cid, std::uint32_t k) const;

  const SurgeryCounter& surgery() const { return surgery_; }
  // Highest number of surgery primitives used by a single occurrence-list
  // join or delete so far.
  std::uint32_t max_surgery_per_euler_op() const { return max_euler_ops_; }

  // Parallel-mode machine stats. Null in sequential mode.
  Pram* pram() { return pram_.get(); }
  // Machine cost of the most recent insert()/erase() (par mode).
  const StepReport& last_step() const { return last_step_; }

  // Structural self-checks (throw logic_error on failure).
  void audit() const;
  // Number of chunks violating the mass bounds (0 expected).
  std::uint32_t audit_mass_bounds() const;
  // Recomputes the adjacency matrix and every aggregate from first
  // principles and compares with the maintained state.
  void audit_adjacency() const;

  void dump_chunks(std::ostream& os) const;

 private:
  // ---- aggregate policies -------------------------------------------------
  struct MassAgg {
    std::uint32_t occs = 0;   // occurrences in subtree
    std::uint32_t edges = 0;  // edge slots held by principal occurrences
    std::uint32_t mass() const { return occs + edges; }
  };
  struct MassPolicy {
    using Agg = MassAgg;
    static void recompute(Agg& out, const Agg* const* kids, int n) {
      out.occs = 0;
      out.edges = 0;
      for (int i = 0; i < n; ++i) {
        out.occs += kids[i]->occs;
        out.edges += kids[i]->edges;
      }
    }
    static bool equal(const Agg& a, const Agg& b) {
      return a.occs == b.occs && a.edges == b.edges;
    }
  };

  // Sequential long-list aggregate: elementwise row minimum plus id set.
  struct WideAgg {
    std::vector<TotalWeight> row;
    SmallBitset memb;
  };
  struct WidePolicy {
    using Agg = WideAgg;
    static void recompute(Agg& out, const Agg* const* kids, int n) {
      const std::size_t w = kids[0]->row.size();
      out.row.assign(w, TotalWeight::absent());
      out.memb.resize(kids[0]->memb.size());
      out.memb.clear();
      for (int i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < w; ++j)
          if (kids[i]->row[j] < out.row[j]) out.row[j] = kids[i]->row[j];
        out.memb |= kids[i]->memb;
      }
    }
    static bool equal(const Agg& a, const Agg& b) {
      return a.row == b.row && a.memb == b.memb;
    }
  };

  // Parallel per-column aggregate: one forest per matrix column.
  struct ColAgg {
    TotalWeight w = TotalWeight::absent();
    bool memb = false;         // does the subtree contain the column's chunk
    std::uint32_t count = 0;   // leaves in subtree (rank descent)
  };
  struct ColPolicy {
    using Agg = ColAgg;
    static void recompute(Agg& out, const Agg* const* kids, int n) {
      out.w = TotalWeight::absent();
      out.memb = false;
      out.count = 0;
      for (int i = 0; i < n; ++i) {
        if (kids[i]->w < out.w) out.w = kids[i]->w;
        out.memb = out.memb || kids[i]->memb;
        out.count += kids[i]->count;
      }
    }
    static bool equal(const Agg& a, const Agg& b) {
      return a.w == b.w && a.memb == b.memb && a.count == b.count;
    }
  };

  using BForest = TwoThreeForest<MassPolicy>;
  using BNode = BForest::Node;
  using LForest = TwoThreeForest<WidePolicy>;
  using LNode = LForest::Node;
  using SForest = TwoThreeForest<ColPolicy>;
  using SNode = SForest::Node;

  // ---- records ------------------------------------------------------------
  struct OccRec {
    VertexId vertex = 0;
    std::uint32_t chunk = kNoId32;  // chunk record id
    BNode* leaf = nullptr;
    EdgeId next_edge = kNoId64;  // tree edge to the cyclically next occurrence
  };
  struct VertexRec {
    std::array<EdgeId, 3> slot{kNoId64, kNoId64, kNoId64};
    std::uint8_t nslot = 0;
    std::uint8_t deg_tree = 0;
    std::uint32_t principal = kNoId32;  // occurrence carrying the slots
    std::uint32_t occ_count = 0;
  };
  struct ChunkRec {
    BNode* b_root = nullptr;
    std::uint32_t prev = kNoId32;  // chunk record ids within the list
    std::uint32_t next = kNoId32;
    std::uint32_t list = kNoId32;  // owning list record id
    ChunkId cid = kNoId32;         // adjacency-matrix id (long lists only)
    LNode* lsds_leaf = nullptr;    // seq aggregate leaf (long lists only)
    std::vector<std::uint32_t> sj_leaf;  // par: node id in column forest j
    bool live = false;
  };
  struct ListRec {
    std::uint32_t head = kNoId32;  // chunk record ids
    std::uint32_t tail = kNoId32;
    bool is_long = false;
    LNode* lsds_root = nullptr;     // seq aggregate root
    std::uint32_t lsds_id = kNoId32;  // par: row index into rl_
    bool live = false;
  };
  struct EdgeRec {
    VertexId u = 0;
    VertexId v = 0;
    TotalWeight w;
    bool tree = false;
    std::uint32_t anchor[2] = {kNoId32, kNoId32};  // u-side / v-side occs
    std::uint32_t lct = kNoId32;
  };

  // ---- basic accessors ----------------------------------------------------
  OccRec& occr(std::uint32_t o) { return occs_[o]; }
  const OccRec& occr(std::uint32_t o) const { return occs_[o]; }
  ChunkRec& chunkr(std::uint32_t c) { return chunks_[c]; }
  const ChunkRec& chunkr(std::uint32_t c) const { return chunks_[c]; }
  ListRec& listr(std::uint32_t l) { return lists_[l]; }
  const ListRec& listr(std::uint32_t l) const { return lists_[l]; }
  TotalWeight& cadj(ChunkId a, ChunkId b) { return cadj_[std::size_t(a) * J_ + b]; }
  const TotalWeight& cadj(ChunkId a, ChunkId b) const {
    return cadj_[std::size_t(a) * J_ + b];
  }
  std::uint32_t pc(VertexId v) const { return verts_[v].principal; }
  std::uint32_t chunk_of_occ(std::uint32_t o) const { return occs_[o].chunk; }
  std::uint32_t list_of_vertex(VertexId v) const {
    return chunks_[occs_[pc(v)].chunk].list;
  }
  std::uint32_t mass(std::uint32_t crec) const {
    const ChunkRec& c = chunks_[crec];
    return c.b_root ? c.b_root->agg.mass() : 0;
  }
  VertexId far_end(const EdgeRec& e, VertexId from) const {
    return e.u == from ? e.v : e.u;
  }
  std::uint32_t first_occ(std::uint32_t crec) const;
  std::uint32_t last_occ(std::uint32_t crec) const;
  std::uint32_t cyc_next(std::uint32_t o) const;  // next occurrence in the tour

  // ---- occurrence / chunk / list plumbing ----------------------------------
  std::uint32_t new_occ(VertexId v);
  void free_occ(std::uint32_t o);
  std::uint32_t new_chunk();
  void free_chunk(std::uint32_t crec);
  std::uint32_t new_list();
  void free_list(std::uint32_t lrec);
  void link_chunk_after(std::uint32_t lrec, std::uint32_t after,
                        std::uint32_t crec);  // after==kNoId32: at head
  void unlink_chunk(std::uint32_t lrec, std::uint32_t crec);

  // ---- slots ----------------------------------------------------------------
  void add_slot(VertexId v, EdgeId e);
  void remove_slot(VertexId v, EdgeId e);

  // ---- adjacency matrix + aggregates (mode-dispatched) ----------------------
  // Recompute chunk c's matrix row from its slots; mirror into the column.
  void ds_rebuild_row(std::uint32_t crec);
  // Sync c's aggregate leaf from its row, then repair the entry for c's id
  // in every other chunk's aggregate (the mirrored column changed).
  void ds_update_adj(std::uint32_t crec);
  // Min-update the (ca,cb) entry pair with w and sync the two leaf entries.
  void ds_pair_update(std::uint32_t ca, std::uint32_t cb, TotalWeight w);
  // Recompute the (ca,cb) entry pair by scanning ca's slots.
  void ds_entry_rebuild(std::uint32_t ca, std::uint32_t cb);
  // Clear + return cb's adjacency id, repairing other chunks' aggregates.
  void release_cid(std::uint32_t crec);
  void ds_make_long(std::uint32_t lrec);
  void ds_make_short(std::uint32_t lrec);
  // Aggregate-leaf maintenance for chunk creation/destruction in long lists.
  void ds_leaf_insert(std::uint32_t lrec, std::uint32_t crec,
                      std::uint32_t after_crec);
  void ds_leaf_erase(std::uint32_t lrec, std::uint32_t crec);
  // Aggregate-structure counterparts of the list surgeries.
  void ds_list_split_after(std::uint32_t lrec, std::uint32_t last_crec,
                           std::uint32_t new_lrec);
  void ds_list_join(std::uint32_t la, std::uint32_t lb);
  void ds_list_rotate(std::uint32_t lrec, std::uint32_t new_head_crec);
  // Reset the owning-list pointer of every chunk from new_first to the tail.
  void ds_relabel_chunks(std::uint32_t from_crec, std::uint32_t lrec);
  // Refresh the chunk pointer of every occurrence in crec's occurrence tree.
  void ds_move_occs(std::uint32_t crec);

  // Sequential bodies.
  void seq_rebuild_row(std::uint32_t crec);
  void seq_update_adj(std::uint32_t crec);
  void seq_sync_leaf_entry(std::uint32_t crec, ChunkId j);
  void seq_sweep_entry(ChunkId j);

  // Parallel bodies (engine_par.cpp).
  void par_rebuild_row(std::uint32_t crec);
  void par_update_adj(std::uint32_t crec);
  void par_pair_update(std::uint32_t ca, std::uint32_t cb, TotalWeight w);
  void par_entry_rebuild(std::uint32_t ca, std::uint32_t cb);
  void par_clear_cid(std::uint32_t crec);
  void par_make_long_aggs(std::uint32_t lrec);
  void par_make_short_aggs(std::uint32_t lrec);
  void par_leaf_insert(std::uint32_t lrec, std::uint32_t crec,
                       std::uint32_t after_crec);
  void par_leaf_erase(std::uint32_t lrec, std::uint32_t crec);
  void par_list_split_after(std::uint32_t lrec, std::uint32_t last_crec,
                            std::uint32_t new_lrec);
  void par_list_join(std::uint32_t la, std::uint32_t lb);
  void par_list_rotate(std::uint32_t lrec, std::uint32_t new_head_crec);
  void par_relabel_chunks(std::uint32_t lrec);
  void par_move_occs(std::uint32_t crec);
  std::optional<EdgeId> par_find_mwr(std::uint32_t lx, std::uint32_t ly);
  // One phase of J column processors; fn(j, ctx, log) performs column j's
  // work on its own forest and appends touched node ids to log, which is
  // replayed as machine accesses on column j's node cells.
  void par_for_cols(
      const std::function<void(std::uint32_t, Pram::Ctx&, TouchLog&)>& fn);
  // Rewrite every column-j leaf from the (already updated) matrix column and
  // refresh ancestors level-synchronously, across all long lists at once.
  // Each node is recomputed by exactly one processor.
  void par_sweep_column(ChunkId j);
  // Enumerate chunk crec's edge slots in canonical rank order as
  // (vertex, slot index) pairs: a log-depth counter descent fans one
  // processor out per edge, the lead processor of each principal occurrence
  // delivering its up-to-three slots to neighbouring ranks.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> par_enumerate_slots(
      std::uint32_t crec);
  // Slot records delivered to their processors; far endpoints resolved to
  // chunk records in three rounds keyed by the far-side slot position, so no
  // far vertex record is read twice in one phase.
  struct SlotInfo {
    EdgeId edge = kNoId64;
    TotalWeight w;
    VertexId far = 0;
    std::uint32_t far_crec = kNoId32;
  };
  std::vector<SlotInfo> par_read_slots(
      const std::vector<std::pair<std::uint32_t, std::uint32_t>>& assign);
  // Entrant in a bank of disjoint elimination trees (four phases per level;
  // presence ties favour the left child). Returns the winning entrant index
  // of each populated tree, ascending by tree key.
  struct TourCand {
    std::uint32_t tree = 0;
    std::uint32_t pos = 0;
    TotalWeight w;
  };
  std::vector<std::uint32_t> par_tournament(const std::vector<TourCand>& cands,
                                            std::uint32_t leaf_span);
  // Lightest edge from chunk crec whose far endpoint lies in target_lrec
  // (parallel counterpart of scan_chunk_vs_list).
  std::optional<TotalWeight> par_scan_chunk(std::uint32_t crec,
                                            std::uint32_t target_lrec);

  // ---- chunk restructuring ---------------------------------------------------
  // Split chunk crec immediately before occurrence o (not its first).
  // Returns the new suffix chunk record.
  std::uint32_t chunk_split_before(std::uint32_t crec, std::uint32_t o);
  // Split chunk crec at its mass balance point (restore path).
  void chunk_split_balanced(std::uint32_t crec);
  // Merge chunk b into its left neighbour a (both in the same long list).
  void merge_chunk_left(std::uint32_t a, std::uint32_t b);
  // Re-establish the mass bounds / long-short classification around crec.
  void restore(std::uint32_t crec);

  // ---- occurrence-list surgery ------------------------------------------------
  void rotate_to_front(std::uint32_t lrec, std::uint32_t o);
  // Split the list before occurrence o (o not the list head); returns the
  // new list record holding the suffix.
  std::uint32_t split_list_before(std::uint32_t lrec, std::uint32_t o);
  // Append lb's chunks to la; lb's record is freed.
  void join_lists(std::uint32_t la, std::uint32_t lb);
  // Repair the seam at the head/tail wrap after a tree-edge removal.
  // Returns up to two chunk records whose masses changed (kNoId32 = none).
  std::pair<std::uint32_t, std::uint32_t> coalesce_wrap(std::uint32_t lrec);
  // Remove tree edge e from its occurrence list; returns the two fragment
  // lists (e.u side first, e.v side second).
  std::pair<std::uint32_t, std::uint32_t> euler_delete(EdgeId e);
  // Join the occurrence lists of e's endpoints into one tour crossing e.
  void euler_join(EdgeId e);

  // Minimum-weight edge crossing between lists lx and ly, if any. Valid only
  // immediately after euler_delete (no tree edge crosses lists).
  std::optional<EdgeId> find_mwr(std::uint32_t lx, std::uint32_t ly);
  // Scan one chunk's slots for the lightest edge whose far end lies in ly.
  std::optional<TotalWeight> scan_chunk_vs_list(std::uint32_t crec,
                                                std::uint32_t ly) const;

  // ---- surgery accounting -------------------------------------------------
  void count_split();
  void count_join();
  void count_rotate();
  void begin_euler_op();
  void end_euler_op();

  void op_begin();
  void op_end();
  // Serial charging of glue work in parallel mode (no-ops otherwise).
  TouchLog* plog() { return pram_ ? &tlog_ : nullptr; }
  void charge_tlog();
  void charge_serial(std::uint64_t k);
  void charge_lct();

  WideAgg wide_agg() const;
  bool list_is_singleton(std::uint32_t lrec) const;
  std::uint32_t list_occ_count(std::uint32_t lrec) const;

  // ---- members --------------------------------------------------------------
  EngineConfig cfg_;
  std::uint32_t n_r_ = 0;  // == cfg_.n
  std::uint32_t K_ = 0;
  std::uint32_t J_ = 0;

  std::vector<VertexRec> verts_;
  std::deque<OccRec> occs_;
  IdPool occ_pool_;
  std::deque<ChunkRec> chunks_;
  IdPool chunk_pool_;
  std::deque<ListRec> lists_;
  IdPool list_pool_;

  IdPool cid_pool_;                          // adjacency ids [0, J)
  std::vector<std::uint32_t> chunk_of_cid_;  // adjacency id -> chunk record
  std::vector<TotalWeight> cadj_;            // J x J, row-major

  BForest bf_;  // occurrence trees (all chunks)
  LForest lf_;  // seq long-list aggregates
  std::set<std::uint32_t> long_lists_;  // list record ids, ascending

  // Parallel-mode structures.
  std::unique_ptr<Pram> pram_;
  std::vector<std::unique_ptr<SForest>> sj_;  // one forest per column
  IdPool lsds_pool_;                          // rows of rl_
  std::vector<std::vector<std::uint32_t>> rl_;  // lsds_id x j -> S_j root id
  StepReport op_base_;
  StepReport last_step_;
  std::uint64_t lct_steps_seen_ = 0;

  LinkCutForest lct_;
  std::map<EdgeId, EdgeRec> edges_;

  SurgeryCounter surgery_;
  std::uint32_t cur_euler_ops_ = 0;
  std::uint32_t max_euler_ops_ = 0;
  bool in_euler_op_ = false;
  bool mwr_window_ = false;
  TouchLog tlog_;
};

}  // namespace dmsf
