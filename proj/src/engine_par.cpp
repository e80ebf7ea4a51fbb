#include "dmsf/engine.hpp"

#include <algorithm>

// Parallel bodies of the engine. Every state change below is mirrored as
// phases on the simulated machine: host mutations happen inside the phase
// that declares the corresponding cell accesses, so the exclusive-access
// audit sees the true footprint of each step.
//
// Cells are record-grained: one cell holds one fixed-size record (a matrix
// entry, one tree node, one vertex slot, one root-lookup entry). A slot cell
// delivers its edge's id, weight, far endpoint, and the edge's slot position
// at the far endpoint; the matching far-side position is what lets far-vertex
// resolution run in three conflict-free rounds.

namespace dmsf {

namespace {
constexpr std::uint32_t kSpCadj = 1;    // (row id, column id) matrix entries
constexpr std::uint32_t kSpChunk = 2;   // (chunk rec, 0); (chunk rec, 1+j) column-leaf link
constexpr std::uint32_t kSpOcc = 3;     // (occurrence, 0) records
constexpr std::uint32_t kSpVert = 4;    // (vertex, 0); (vertex, 1+i) slot i
constexpr std::uint32_t kSpSj = 5;      // (column, node id) column-forest nodes
constexpr std::uint32_t kSpRl = 6;      // (list aggregate id, column) root lookup
constexpr std::uint32_t kSpCidMap = 7;  // (column id, 0) id -> chunk record
constexpr std::uint32_t kSpBf = 8;      // (node id, 0) occurrence-tree nodes
// Scratch arenas (epoch-cleared between uses).
constexpr std::uint32_t kSpDesc = 32;    // rank-descent frontier entries
constexpr std::uint32_t kSpAssign = 33;  // per-rank slot assignments
constexpr std::uint32_t kSpTourL = 34;   // elimination trees: left slots
constexpr std::uint32_t kSpTourR = 35;   // right slots
constexpr std::uint32_t kSpTourV = 36;   // decided node values
}  // namespace

// Steady-state chunk mass stays below 3K, but restructuring briefly pushes a
// merged or slot-shifted chunk past it; the slot pipeline sizes its scratch
// space for that transient worst case.
std::uint32_t Engine::par_slot_span() const { return 4 * K_ + 16; }

// ---------------------------------------------------------------------------
// column-processor plumbing

void Engine::par_for_cols(
    const std::function<void(std::uint32_t, Pram::Ctx&, TouchLog&)>& fn) {
  pram_->run(J_, [&](Pram::Ctx& ctx, std::uint32_t j) {
    TouchLog log;
    fn(j, ctx, log);
    for (std::uint32_t id : log) ctx.touch(kSpSj, j, id);
  });
}

void Engine::par_make_long_aggs(std::uint32_t lrec) {
  ListRec& L = listr(lrec);
  const std::uint32_t crec = L.head;
  ChunkRec& c = chunkr(crec);
  L.lsds_id = lsds_pool_.acquire();
  const std::uint32_t ls = L.lsds_id;
  c.sj_leaf.assign(J_, kNoId32);
  par_for_cols([&](std::uint32_t j, Pram::Ctx& ctx, TouchLog& log) {
    ColAgg a;
    a.memb = c.cid == j;
    a.count = 1;
    SNode* leaf = sj_[j]->make_leaf(crec, a, &log);
    c.sj_leaf[j] = leaf->id;
    ctx.touch(kSpChunk, crec, 1 + j);
    rl_[ls][j] = leaf->id;
    ctx.touch(kSpRl, ls, j);
  });
}

void Engine::par_make_short_aggs(std::uint32_t lrec) {
  ListRec& L = listr(lrec);
  const std::uint32_t crec = L.head;
  ChunkRec& c = chunkr(crec);
  const std::uint32_t ls = L.lsds_id;
  DMSF_CHECK(ls != kNoId32, "demoting a list without column aggregates");
  par_for_cols([&](std::uint32_t j, Pram::Ctx& ctx, TouchLog& log) {
    SNode* leaf = sj_[j]->node_by_id(c.sj_leaf[j]);
    DMSF_CHECK(rl_[ls][j] == leaf->id && !leaf->parent,
               "demoted list has a non-singleton column tree");
    touch(&log, leaf->id);
    sj_[j]->free_node(leaf);
    ctx.touch(kSpChunk, crec, 1 + j);
    rl_[ls][j] = kNoId32;
    ctx.touch(kSpRl, ls, j);
  });
  c.sj_leaf.clear();
  lsds_pool_.release(ls);
  L.lsds_id = kNoId32;
}

void Engine::par_leaf_insert(std::uint32_t lrec, std::uint32_t crec,
                             std::uint32_t after_crec) {
  ListRec& L = listr(lrec);
  ChunkRec& c = chunkr(crec);
  const std::uint32_t ls = L.lsds_id;
  c.sj_leaf.assign(J_, kNoId32);
  par_for_cols([&](std::uint32_t j, Pram::Ctx& ctx, TouchLog& log) {
    ColAgg a;
    a.memb = c.cid == j;
    a.count = 1;
    SNode* leaf = sj_[j]->make_leaf(crec, a, &log);
    c.sj_leaf[j] = leaf->id;
    ctx.touch(kSpChunk, crec, 1 + j);
    SNode* root = sj_[j]->node_by_id(rl_[ls][j]);
    ctx.touch(kSpRl, ls, j);
    SNode* pos = nullptr;
    if (after_crec != kNoId32) {
      pos = sj_[j]->node_by_id(chunkr(after_crec).sj_leaf[j]);
      ctx.touch(kSpChunk, after_crec, 1 + j);
    }
    SNode* nr = sj_[j]->insert_after(root, pos, leaf, &log);
    rl_[ls][j] = nr->id;
    ctx.touch(kSpRl, ls, j);
  });
}

void Engine::par_leaf_erase(std::uint32_t lrec, std::uint32_t crec) {
  ListRec& L = listr(lrec);
  ChunkRec& c = chunkr(crec);
  const std::uint32_t ls = L.lsds_id;
  par_for_cols([&](std::uint32_t j, Pram::Ctx& ctx, TouchLog& log) {
    SNode* root = sj_[j]->node_by_id(rl_[ls][j]);
    ctx.touch(kSpRl, ls, j);
    SNode* leaf = sj_[j]->node_by_id(c.sj_leaf[j]);
    ctx.touch(kSpChunk, crec, 1 + j);
    SNode* nr = sj_[j]->erase(root, leaf, &log);
    sj_[j]->free_node(leaf);
    DMSF_CHECK(nr, "column tree emptied by a leaf erase");
    rl_[ls][j] = nr->id;
    ctx.touch(kSpRl, ls, j);
  });
  c.sj_leaf.clear();
}

void Engine::par_list_split_after(std::uint32_t lrec, std::uint32_t last_crec,
                                  std::uint32_t new_lrec) {
  ListRec& L = listr(lrec);
  ListRec& L2 = listr(new_lrec);
  L2.is_long = true;
  long_lists_.insert(new_lrec);
  L2.lsds_id = lsds_pool_.acquire();
  const std::uint32_t la = L.lsds_id;
  const std::uint32_t lb = L2.lsds_id;
  par_for_cols([&](std::uint32_t j, Pram::Ctx& ctx, TouchLog& log) {
    SNode* root = sj_[j]->node_by_id(rl_[la][j]);
    ctx.touch(kSpRl, la, j);
    SNode* x = sj_[j]->node_by_id(chunkr(last_crec).sj_leaf[j]);
    ctx.touch(kSpChunk, last_crec, 1 + j);
    auto [r1, r2] = sj_[j]->split_after(root, x, &log);
    DMSF_CHECK(r1 && r2, "list split produced an empty side");
    rl_[la][j] = r1->id;
    ctx.touch(kSpRl, la, j);
    rl_[lb][j] = r2->id;
    ctx.touch(kSpRl, lb, j);
  });
}

void Engine::par_list_join(std::uint32_t la, std::uint32_t lb) {
  ListRec& A = listr(la);
  ListRec& B = listr(lb);
  const std::uint32_t ia = A.lsds_id;
  const std::uint32_t ib = B.lsds_id;
  par_for_cols([&](std::uint32_t j, Pram::Ctx& ctx, TouchLog& log) {
    SNode* ra = sj_[j]->node_by_id(rl_[ia][j]);
    ctx.touch(kSpRl, ia, j);
    SNode* rb = sj_[j]->node_by_id(rl_[ib][j]);
    ctx.touch(kSpRl, ib, j);
    SNode* r = sj_[j]->join(ra, rb, &log);
    rl_[ia][j] = r->id;
    ctx.touch(kSpRl, ia, j);
    rl_[ib][j] = kNoId32;
    ctx.touch(kSpRl, ib, j);
  });
  lsds_pool_.release(ib);
  B.lsds_id = kNoId32;
}

void Engine::par_list_rotate(std::uint32_t lrec, std::uint32_t new_head_crec) {
  ListRec& L = listr(lrec);
  const std::uint32_t ls = L.lsds_id;
  par_for_cols([&](std::uint32_t j, Pram::Ctx& ctx, TouchLog& log) {
    SNode* root = sj_[j]->node_by_id(rl_[ls][j]);
    ctx.touch(kSpRl, ls, j);
    SNode* x = sj_[j]->node_by_id(chunkr(new_head_crec).sj_leaf[j]);
    ctx.touch(kSpChunk, new_head_crec, 1 + j);
    auto [r1, r2] = sj_[j]->split_before(root, x, &log);
    SNode* r = sj_[j]->join(r2, r1, &log);
    rl_[ls][j] = r->id;
    ctx.touch(kSpRl, ls, j);
  });
}

// ---------------------------------------------------------------------------
// matrix row/column maintenance

void Engine::par_sweep_column(ChunkId j) {
  SForest& f = *sj_[j];
  std::vector<SNode*> leaves;
  std::vector<std::vector<SNode*>> levels;  // internal nodes by height
  for (std::uint32_t lrec : long_lists_) {
    SNode* root = f.node_by_id(rl_[listr(lrec).lsds_id][j]);
    SForest::postorder(root, [&](SNode* n) {
      if (n->is_leaf) {
        leaves.push_back(n);
      } else {
        if (levels.size() < n->height) levels.resize(n->height);
        levels[n->height - 1].push_back(n);
      }
    });
  }
  // Every leaf of the column re-reads its (already updated) matrix entry.
  pram_->run(static_cast<std::uint32_t>(leaves.size()),
             [&](Pram::Ctx& ctx, std::uint32_t i) {
               SNode* leaf = leaves[i];
               const ChunkRec& d = chunkr(leaf->tag);
               ctx.touch(kSpChunk, leaf->tag, 0);
               ctx.touch(kSpCadj, d.cid, j);
               leaf->agg.w = cadj(d.cid, j);
               leaf->agg.memb = d.cid == j;
               leaf->agg.count = 1;
               ctx.touch(kSpSj, j, leaf->id);
             });
  // Bottom-up, level-synchronous: each node recomputed by one processor
  // reading its own children only.
  for (const std::vector<SNode*>& lvl : levels) {
    pram_->run(static_cast<std::uint32_t>(lvl.size()),
               [&](Pram::Ctx& ctx, std::uint32_t i) {
                 SNode* n = lvl[i];
                 for (int k = 0; k < n->nch; ++k)
                   ctx.touch(kSpSj, j, n->ch[k]->id);
                 f.recompute(n);
                 ctx.touch(kSpSj, j, n->id);
               });
  }
}

void Engine::par_update_adj(std::uint32_t crec) {
  ChunkRec& c = chunkr(crec);
  if (c.cid == kNoId32) return;
  // (a) c's row changed: column processor j syncs c's leaf in its own tree.
  par_for_cols([&](std::uint32_t j, Pram::Ctx& ctx, TouchLog& log) {
    SNode* leaf = sj_[j]->node_by_id(c.sj_leaf[j]);
    ctx.touch(kSpChunk, crec, 1 + j);
    ctx.touch(kSpCadj, c.cid, j);
    leaf->agg.w = cadj(c.cid, j);
    leaf->agg.memb = c.cid == j;
    leaf->agg.count = 1;
    sj_[j]->refresh_path(leaf, &log);
  });
  // (b) the mirrored column changed for every other chunk.
  par_sweep_column(c.cid);
}

void Engine::par_pair_update(std::uint32_t ca, std::uint32_t cb,
                             TotalWeight w) {
  const ChunkId acid = chunkr(ca).cid;
  const ChunkId bcid = chunkr(cb).cid;
  struct Side {
    std::uint32_t crec;
    ChunkId row;
    ChunkId col;
  };
  const Side sides[2] = {{ca, acid, bcid}, {cb, bcid, acid}};
  std::vector<Pram::Task> tasks;
  for (const Side& s : sides) {
    tasks.push_back([this, s, w](Pram::Ctx& ctx) {
      ctx.touch(kSpCadj, s.row, s.col);
      if (!(w < cadj(s.row, s.col))) return;
      cadj(s.row, s.col) = w;
      ctx.touch(kSpCadj, s.row, s.col);
      const ChunkRec& cc = chunkr(s.crec);
      SNode* leaf = sj_[s.col]->node_by_id(cc.sj_leaf[s.col]);
      ctx.touch(kSpChunk, s.crec, 1 + s.col);
      leaf->agg.w = w;
      TouchLog log;
      sj_[s.col]->refresh_path(leaf, &log);
      for (std::uint32_t id : log) ctx.touch(kSpSj, s.col, id);
    });
  }
  pram_->run_tasks(tasks);
}

void Engine::par_entry_rebuild(std::uint32_t ca, std::uint32_t cb) {
  // The stale pair entry is covered by recomputing ca's whole row (every
  // other entry of the row is already correct, so values are unchanged).
  (void)cb;
  par_rebuild_row(ca);
  par_update_adj(ca);
}

void Engine::par_clear_cid(std::uint32_t crec) {
  const ChunkId cid = chunkr(crec).cid;
  pram_->run(J_, [&](Pram::Ctx& ctx, std::uint32_t j) {
    cadj(cid, j) = TotalWeight::absent();
    ctx.touch(kSpCadj, cid, j);
    if (j != cid) {
      cadj(j, cid) = TotalWeight::absent();
      ctx.touch(kSpCadj, j, cid);
    }
  });
  par_sweep_column(cid);
}

// ---------------------------------------------------------------------------
// slot pipeline: enumerate, deliver, eliminate

std::vector<std::pair<std::uint32_t, std::uint32_t>>
Engine::par_enumerate_slots(std::uint32_t crec) {
  ChunkRec& c = chunkr(crec);
  const std::uint32_t ecount = c.b_root->agg.edges;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> out(ecount,
                                                           {kNoId32, 0});
  if (ecount == 0) return out;
  Pram::Arena& desc = pram_->arena(kSpDesc, par_slot_span());
  Pram::Arena& asn = pram_->arena(kSpAssign, par_slot_span());
  desc.clear();
  asn.clear();
  struct Ent {
    BNode* n;
    std::uint32_t base;  // rank of the subtree's first edge
  };
  std::vector<Ent> frontier{{c.b_root, 0}};
  bool first = true;
  while (true) {
    const bool at_leaves = frontier[0].n->is_leaf;
    const bool seeded = first;
    pram_->run(static_cast<std::uint32_t>(frontier.size()),
               [&](Pram::Ctx& ctx, std::uint32_t i) {
                 const Ent& e = frontier[i];
                 if (!seeded) desc.read(ctx, e.base);  // own frontier entry
                 ctx.touch(kSpBf, e.n->id);            // the node's counters
                 if (at_leaves) {
                   // The lead rank reads the occurrence and delivers the
                   // principal's slots to itself and up to two neighbours.
                   ctx.touch(kSpOcc, e.n->tag);
                   const VertexId vx = occs_[e.n->tag].vertex;
                   const std::uint32_t cnt = e.n->agg.edges;
                   for (std::uint32_t t = 0; t < cnt; ++t)
                     asn.write(ctx, e.base + t, std::uint64_t(vx) * 4 + t);
                 } else {
                   std::uint32_t b = e.base;
                   for (int k = 0; k < e.n->nch; ++k) {
                     const std::uint32_t ec = e.n->ch[k]->agg.edges;
                     if (ec) desc.write(ctx, b, e.n->ch[k]->id);
                     b += ec;
                   }
                 }
               });
    first = false;
    if (at_leaves) break;
    std::vector<Ent> next;
    for (const Ent& e : frontier) {
      std::uint32_t b = e.base;
      for (int k = 0; k < e.n->nch; ++k) {
        const std::uint32_t ec = e.n->ch[k]->agg.edges;
        if (ec) next.push_back({e.n->ch[k], b});
        b += ec;
      }
    }
    frontier = std::move(next);
  }
  pram_->run(ecount, [&](Pram::Ctx& ctx, std::uint32_t k) {
    const std::uint64_t v = asn.read(ctx, k);
    out[k] = {static_cast<std::uint32_t>(v >> 2),
              static_cast<std::uint32_t>(v & 3)};
  });
  return out;
}

std::vector<Engine::SlotInfo> Engine::par_read_slots(
    const std::vector<std::pair<std::uint32_t, std::uint32_t>>& assign) {
  const std::uint32_t ecount = static_cast<std::uint32_t>(assign.size());
  std::vector<SlotInfo> out(ecount);
  pram_->run(ecount, [&](Pram::Ctx& ctx, std::uint32_t k) {
    const std::uint32_t vx = assign[k].first;
    const std::uint32_t t = assign[k].second;
    ctx.touch(kSpVert, vx, 1 + t);
    const EdgeId id = verts_[vx].slot[t];
    const EdgeRec& e = edges_.at(id);
    out[k].edge = id;
    out[k].w = e.w;
    out[k].far = far_end(e, vx);
  });
  // Far resolution: round r serves the edges sitting at slot r of their far
  // endpoint, so each far vertex (and its principal) is read at most once
  // per phase.
  for (std::uint32_t round = 0; round < 3; ++round) {
    std::vector<std::uint32_t> ranks;
    for (std::uint32_t k = 0; k < ecount; ++k) {
      const VertexRec& fv = verts_[out[k].far];
      std::uint32_t pos = kNoId32;
      for (std::uint32_t i = 0; i < fv.nslot; ++i) {
        if (fv.slot[i] == out[k].edge) {
          pos = i;
          break;
        }
      }
      DMSF_CHECK(pos != kNoId32, "edge missing from its far endpoint");
      if (pos == round) ranks.push_back(k);
    }
    pram_->run(static_cast<std::uint32_t>(ranks.size()),
               [&](Pram::Ctx& ctx, std::uint32_t i) {
                 SlotInfo& s = out[ranks[i]];
                 ctx.touch(kSpVert, s.far, 0);
                 const std::uint32_t po = pc(s.far);
                 ctx.touch(kSpOcc, po);
                 s.far_crec = occs_[po].chunk;
               });
  }
  return out;
}

std::vector<std::uint32_t> Engine::par_tournament(
    const std::vector<TourCand>& cands, std::uint32_t leaf_span) {
  DMSF_CHECK(!cands.empty(), "elimination tournament without entrants");
  std::uint32_t p2 = 1;
  while (p2 < leaf_span) p2 <<= 1;
  std::uint32_t max_tree = 0;
  for (const TourCand& c : cands) {
    DMSF_CHECK(c.pos < p2, "entrant position out of span");
    max_tree = std::max(max_tree, c.tree);
  }
  const std::uint64_t span = 2ull * p2;
  Pram::Arena& al = pram_->arena(kSpTourL, (max_tree + 1ull) * span);
  Pram::Arena& ar = pram_->arena(kSpTourR, (max_tree + 1ull) * span);
  Pram::Arena& av = pram_->arena(kSpTourV, (max_tree + 1ull) * span);
  al.clear();
  ar.clear();
  av.clear();

  struct Act {
    std::uint32_t best;  // entrant index carried upward
    std::uint32_t tree;
    std::uint32_t pos;
  };
  std::vector<Act> act;
  act.reserve(cands.size());
  for (std::uint32_t i = 0; i < cands.size(); ++i)
    act.push_back({i, cands[i].tree, p2 + cands[i].pos});

  while (act[0].pos > 1) {
    // Phases 1-2: left children, then right children, publish themselves.
    std::vector<std::uint32_t> lefts, rights;
    for (std::uint32_t i = 0; i < act.size(); ++i)
      ((act[i].pos & 1) == 0 ? lefts : rights).push_back(i);
    pram_->run(static_cast<std::uint32_t>(lefts.size()),
               [&](Pram::Ctx& ctx, std::uint32_t t) {
                 const Act& a = act[lefts[t]];
                 al.write(ctx, a.tree * span + (a.pos >> 1), a.best);
               });
    pram_->run(static_cast<std::uint32_t>(rights.size()),
               [&](Pram::Ctx& ctx, std::uint32_t t) {
                 const Act& a = act[rights[t]];
                 ar.write(ctx, a.tree * span + (a.pos >> 1), a.best);
               });
    // Phase 3: each side probes the other; a present left child survives.
    std::vector<char> alive(act.size(), 0);
    pram_->run(static_cast<std::uint32_t>(act.size()),
               [&](Pram::Ctx& ctx, std::uint32_t t) {
                 Act& a = act[t];
                 const std::uint64_t cell = a.tree * span + (a.pos >> 1);
                 if ((a.pos & 1) == 0) {
                   alive[t] = 1;
                   if (ar.has(ctx, cell)) {
                     const std::uint32_t other =
                         static_cast<std::uint32_t>(ar.read(ctx, cell));
                     if (cands[other].w < cands[a.best].w) a.best = other;
                   }
                 } else {
                   alive[t] = al.has(ctx, cell) ? 0 : 1;
                 }
               });
    // Phase 4: survivors decide the node and climb one level.
    std::vector<Act> up;
    for (std::uint32_t i = 0; i < act.size(); ++i)
      if (alive[i]) up.push_back(act[i]);
    pram_->run(static_cast<std::uint32_t>(up.size()),
               [&](Pram::Ctx& ctx, std::uint32_t t) {
                 av.write(ctx, up[t].tree * span + (up[t].pos >> 1),
                          up[t].best);
               });
    for (Act& a : up) a.pos >>= 1;
    act = std::move(up);
  }
  std::sort(act.begin(), act.end(),
            [](const Act& a, const Act& b) { return a.tree < b.tree; });
  std::vector<std::uint32_t> winners;
  winners.reserve(act.size());
  for (const Act& a : act) winners.push_back(a.best);
  return winners;
}

void Engine::par_rebuild_row(std::uint32_t crec) {
  ChunkRec& c = chunkr(crec);
  if (c.cid == kNoId32) return;
  const ChunkId cid = c.cid;
  // Row + mirrored column reset by J processors, two private cells each.
  pram_->run(J_, [&](Pram::Ctx& ctx, std::uint32_t j) {
    cadj(cid, j) = TotalWeight::absent();
    ctx.touch(kSpCadj, cid, j);
    if (j != cid) {
      cadj(j, cid) = TotalWeight::absent();
      ctx.touch(kSpCadj, j, cid);
    }
  });
  const auto assign = par_enumerate_slots(crec);
  if (assign.empty()) return;
  const auto slots = par_read_slots(assign);
  // Per-far-chunk minima: one elimination tree per far chunk record.
  std::vector<TourCand> cands(slots.size());
  for (std::uint32_t i = 0; i < slots.size(); ++i)
    cands[i] = {slots[i].far_crec, i, slots[i].w};
  const auto winners = par_tournament(cands, par_slot_span());
  // Each winner resolves its far chunk's matrix id and writes the pair.
  pram_->run(static_cast<std::uint32_t>(winners.size()),
             [&](Pram::Ctx& ctx, std::uint32_t i) {
               const SlotInfo& s = slots[winners[i]];
               ctx.touch(kSpChunk, s.far_crec, 0);
               const ChunkId f = chunkr(s.far_crec).cid;
               if (f == kNoId32) return;  // far chunk sits in a short list
               cadj(cid, f) = s.w;
               ctx.touch(kSpCadj, cid, f);
               if (f != cid) {
                 cadj(f, cid) = s.w;
                 ctx.touch(kSpCadj, f, cid);
               }
             });
}

// ---------------------------------------------------------------------------
// occurrence / label fan-outs

void Engine::par_move_occs(std::uint32_t crec) {
  ChunkRec& c = chunkr(crec);
  Pram::Arena& desc = pram_->arena(kSpDesc, par_slot_span());
  desc.clear();
  struct Ent {
    BNode* n;
    std::uint32_t base;  // rank of the subtree's first occurrence
  };
  std::vector<Ent> frontier{{c.b_root, 0}};
  bool first = true;
  while (true) {
    const bool at_leaves = frontier[0].n->is_leaf;
    const bool seeded = first;
    pram_->run(static_cast<std::uint32_t>(frontier.size()),
               [&](Pram::Ctx& ctx, std::uint32_t i) {
                 const Ent& e = frontier[i];
                 if (!seeded) desc.read(ctx, e.base);
                 ctx.touch(kSpBf, e.n->id);
                 if (at_leaves) {
                   occs_[e.n->tag].chunk = crec;
                   ctx.touch(kSpOcc, e.n->tag);
                 } else {
                   std::uint32_t b = e.base;
                   for (int k = 0; k < e.n->nch; ++k) {
                     desc.write(ctx, b, e.n->ch[k]->id);
                     b += e.n->ch[k]->agg.occs;
                   }
                 }
               });
    first = false;
    if (at_leaves) break;
    std::vector<Ent> next;
    for (const Ent& e : frontier) {
      std::uint32_t b = e.base;
      for (int k = 0; k < e.n->nch; ++k) {
        next.push_back({e.n->ch[k], b});
        b += e.n->ch[k]->agg.occs;
      }
    }
    frontier = std::move(next);
  }
}

void Engine::par_relabel_chunks(std::uint32_t lrec) {
  ListRec& L = listr(lrec);
  const std::uint32_t ls = L.lsds_id;
  SForest& f = *sj_[0];
  Pram::Arena& desc = pram_->arena(kSpDesc, std::uint64_t(J_) + 8);
  desc.clear();
  struct Ent {
    SNode* n;
    std::uint32_t base;  // rank of the subtree's first chunk
  };
  std::vector<Ent> frontier{{f.node_by_id(rl_[ls][0]), 0}};
  bool first = true;
  while (true) {
    const bool at_leaves = frontier[0].n->is_leaf;
    const bool seeded = first;
    pram_->run(static_cast<std::uint32_t>(frontier.size()),
               [&](Pram::Ctx& ctx, std::uint32_t i) {
                 const Ent& e = frontier[i];
                 if (seeded) ctx.touch(kSpRl, ls, 0);
                 else desc.read(ctx, e.base);
                 ctx.touch(kSpSj, 0, e.n->id);
                 if (at_leaves) {
                   chunkr(e.n->tag).list = lrec;
                   ctx.touch(kSpChunk, e.n->tag, 0);
                 } else {
                   std::uint32_t b = e.base;
                   for (int k = 0; k < e.n->nch; ++k) {
                     desc.write(ctx, b, e.n->ch[k]->id);
                     b += e.n->ch[k]->agg.count;
                   }
                 }
               });
    first = false;
    if (at_leaves) break;
    std::vector<Ent> next;
    for (const Ent& e : frontier) {
      std::uint32_t b = e.base;
      for (int k = 0; k < e.n->nch; ++k) {
        next.push_back({e.n->ch[k], b});
        b += e.n->ch[k]->agg.count;
      }
    }
    frontier = std::move(next);
  }
}

// ---------------------------------------------------------------------------
// replacement search

std::optional<TotalWeight> Engine::par_scan_chunk(std::uint32_t crec,
                                                  std::uint32_t target_lrec) {
  const auto assign = par_enumerate_slots(crec);
  if (assign.empty()) return std::nullopt;
  const auto slots = par_read_slots(assign);
  std::vector<TourCand> cands(slots.size());
  for (std::uint32_t i = 0; i < slots.size(); ++i)
    cands[i] = {slots[i].far_crec, i, slots[i].w};
  const auto winners = par_tournament(cands, par_slot_span());
  // One exclusive owning-list read per far chunk decides membership.
  std::vector<char> in(winners.size(), 0);
  pram_->run(static_cast<std::uint32_t>(winners.size()),
             [&](Pram::Ctx& ctx, std::uint32_t i) {
               const SlotInfo& s = slots[winners[i]];
               ctx.touch(kSpChunk, s.far_crec, 0);
               in[i] = chunkr(s.far_crec).list == target_lrec ? 1 : 0;
             });
  std::vector<TourCand> fin;
  for (std::uint32_t i = 0; i < winners.size(); ++i)
    if (in[i]) fin.push_back({0, winners[i], slots[winners[i]].w});
  if (fin.empty()) return std::nullopt;
  const auto last = par_tournament(fin, par_slot_span());
  return fin[last[0]].w;
}

std::optional<EdgeId> Engine::par_find_mwr(std::uint32_t lx, std::uint32_t ly) {
  const ListRec& X = listr(lx);
  const ListRec& Y = listr(ly);
  std::optional<TotalWeight> best;
  if (!X.is_long) {
    best = par_scan_chunk(X.head, ly);
  } else if (!Y.is_long) {
    best = par_scan_chunk(Y.head, lx);
  } else {
    // Column processor j reads only its own two roots: X's best weight
    // toward column j, masked by Y's membership bit for j.
    std::vector<TotalWeight> gamma(J_, TotalWeight::absent());
    const std::uint32_t ix = X.lsds_id;
    const std::uint32_t iy = Y.lsds_id;
    pram_->run(J_, [&](Pram::Ctx& ctx, std::uint32_t j) {
      ctx.touch(kSpRl, ix, j);
      SNode* rx = sj_[j]->node_by_id(rl_[ix][j]);
      ctx.touch(kSpSj, j, rx->id);
      ctx.touch(kSpRl, iy, j);
      SNode* ry = sj_[j]->node_by_id(rl_[iy][j]);
      ctx.touch(kSpSj, j, ry->id);
      if (ry->agg.memb) gamma[j] = rx->agg.w;
    });
    std::vector<TourCand> cands;
    for (ChunkId j = 0; j < J_; ++j)
      if (!gamma[j].is_absent()) cands.push_back({0, j, gamma[j]});
    if (cands.empty()) return std::nullopt;
    const auto wn = par_tournament(cands, J_);
    const ChunkId cj = cands[wn[0]].pos;
    const TotalWeight g = cands[wn[0]].w;
    std::uint32_t chat = kNoId32;
    pram_->serial([&](Pram::Ctx& ctx) {
      ctx.touch(kSpCidMap, cj);
      chat = chunk_of_cid_[cj];
    });
    best = par_scan_chunk(chat, lx);
    DMSF_CHECK(best && *best == g,
               "chunk scan disagrees with the adjacency aggregate");
  }
  if (!best || best->is_absent()) return std::nullopt;
  return best->id;
}

}  // namespace dmsf
