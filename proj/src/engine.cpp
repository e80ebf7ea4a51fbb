#include "dmsf/engine.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace dmsf {

namespace {

std::uint32_t default_k(const EngineConfig& cfg) {
  if (cfg.k_override) return std::max<std::uint32_t>(8, cfg.k_override);
  const double nr = std::max<std::uint32_t>(2, cfg.n);
  const double v = cfg.mode == EngineMode::Seq ? std::sqrt(nr * std::log2(nr))
                                               : std::sqrt(nr);
  return std::max<std::uint32_t>(8, static_cast<std::uint32_t>(std::ceil(v)));
}

std::uint32_t default_j(std::uint32_t n, std::uint32_t k) {
  const std::uint32_t nr = std::max<std::uint32_t>(1, n);
  return (12ull * nr + k - 1) / k;
}

}  // namespace

Engine::Engine(const EngineConfig& cfg)
    : cfg_(cfg),
      n_r_(cfg.n),
      K_(default_k(cfg)),
      J_(default_j(cfg.n, default_k(cfg))),
      verts_(cfg.n),
      occ_pool_(3 * cfg.n + 16, "occurrences"),
      chunk_pool_(cfg.n + default_j(cfg.n, default_k(cfg)) + 64, "chunk records"),
      list_pool_(cfg.n + 8, "list records"),
      cid_pool_(default_j(cfg.n, default_k(cfg)), "chunk adjacency ids"),
      chunk_of_cid_(J_, kNoId32),
      cadj_(std::size_t(J_) * J_, TotalWeight::absent()),
      bf_(8 * cfg.n + 64, "occurrence tree nodes"),
      lf_(4 * J_ + 64, "list aggregate nodes"),
      lsds_pool_(J_, "list aggregate ids"),
      lct_(cfg.n, cfg.n) {
  DMSF_CHECK(cfg.n >= 1, "engine needs at least one vertex");
  if (cfg_.mode == EngineMode::Par) {
    pram_ = std::make_unique<Pram>(cfg_.pram_threads, cfg_.pram_abort);
    sj_.reserve(J_);
    for (std::uint32_t j = 0; j < J_; ++j)
      sj_.push_back(std::make_unique<SForest>(4 * J_ + 64, "column tree nodes"));
    rl_.assign(J_, std::vector<std::uint32_t>(J_, kNoId32));
  }
  for (VertexId v = 0; v < n_r_; ++v) {
    std::uint32_t o = new_occ(v);
    std::uint32_t crec = new_chunk();
    BNode* leaf = bf_.make_leaf(o, MassAgg{1, 0});
    occs_[o].leaf = leaf;
    occs_[o].chunk = crec;
    chunks_[crec].b_root = leaf;
    std::uint32_t lrec = new_list();
    link_chunk_after(lrec, kNoId32, crec);
    verts_[v].principal = o;
    verts_[v].occ_count = 1;
  }
}

// ---------------------------------------------------------------------------
// plumbing

std::uint32_t Engine::new_occ(VertexId v) {
  std::uint32_t o = occ_pool_.acquire();
  while (o >= occs_.size()) occs_.emplace_back();
  occs_[o] = OccRec{};
  occs_[o].vertex = v;
  return o;
}

void Engine::free_occ(std::uint32_t o) {
  occs_[o] = OccRec{};
  occ_pool_.release(o);
}

std::uint32_t Engine::new_chunk() {
  std::uint32_t c = chunk_pool_.acquire();
  while (c >= chunks_.size()) chunks_.emplace_back();
  chunks_[c] = ChunkRec{};
  chunks_[c].live = true;
  return c;
}

void Engine::free_chunk(std::uint32_t crec) {
  ChunkRec& c = chunks_[crec];
  DMSF_CHECK(c.cid == kNoId32 && !c.lsds_leaf && c.sj_leaf.empty(),
             "freeing chunk with aggregates");
  c = ChunkRec{};
  chunk_pool_.release(crec);
}

std::uint32_t Engine::new_list() {
  std::uint32_t l = list_pool_.acquire();
  while (l >= lists_.size()) lists_.emplace_back();
  lists_[l] = ListRec{};
  lists_[l].live = true;
  return l;
}

void Engine::free_list(std::uint32_t lrec) {
  ListRec& L = lists_[lrec];
  DMSF_CHECK(!L.is_long && !L.lsds_root && L.lsds_id == kNoId32,
             "freeing list with aggregates");
  L = ListRec{};
  list_pool_.release(lrec);
}

void Engine::link_chunk_after(std::uint32_t lrec, std::uint32_t after,
                              std::uint32_t crec) {
  ListRec& L = listr(lrec);
  ChunkRec& c = chunkr(crec);
  c.list = lrec;
  if (after == kNoId32) {
    c.prev = kNoId32;
    c.next = L.head;
    if (L.head != kNoId32) chunkr(L.head).prev = crec;
    L.head = crec;
    if (L.tail == kNoId32) L.tail = crec;
    return;
  }
  ChunkRec& a = chunkr(after);
  c.prev = after;
  c.next = a.next;
  if (a.next != kNoId32) chunkr(a.next).prev = crec;
  a.next = crec;
  if (L.tail == after) L.tail = crec;
}

void Engine::unlink_chunk(std::uint32_t lrec, std::uint32_t crec) {
  ListRec& L = listr(lrec);
  ChunkRec& c = chunkr(crec);
  if (c.prev != kNoId32) chunkr(c.prev).next = c.next;
  if (c.next != kNoId32) chunkr(c.next).prev = c.prev;
  if (L.head == crec) L.head = c.next;
  if (L.tail == crec) L.tail = c.prev;
  c.prev = c.next = kNoId32;
  c.list = kNoId32;
}

std::uint32_t Engine::first_occ(std::uint32_t crec) const {
  BNode* l = BForest::first_leaf(chunks_[crec].b_root);
  DMSF_CHECK(l, "empty chunk");
  return l->tag;
}

std::uint32_t Engine::last_occ(std::uint32_t crec) const {
  BNode* l = BForest::last_leaf(chunks_[crec].b_root);
  DMSF_CHECK(l, "empty chunk");
  return l->tag;
}

std::uint32_t Engine::cyc_next(std::uint32_t o) const {
  BNode* nl = BForest::next_leaf(occs_[o].leaf);
  if (nl) return nl->tag;
  const ChunkRec& c = chunks_[occs_[o].chunk];
  std::uint32_t nc = c.next;
  if (nc == kNoId32) nc = lists_[c.list].head;
  return first_occ(nc);
}

bool Engine::list_is_singleton(std::uint32_t lrec) const {
  const ListRec& L = lists_[lrec];
  return L.head == L.tail && chunks_[L.head].b_root->agg.occs == 1;
}

std::uint32_t Engine::list_occ_count(std::uint32_t lrec) const {
  std::uint32_t n = 0;
  for (std::uint32_t c = lists_[lrec].head; c != kNoId32; c = chunks_[c].next)
    n += chunks_[c].b_root->agg.occs;
  return n;
}

Engine::WideAgg Engine::wide_agg() const {
  WideAgg a;
  a.row.assign(J_, TotalWeight::absent());
  a.memb.resize(J_);
  return a;
}

// ---------------------------------------------------------------------------
// charging (parallel mode glue)

void Engine::charge_tlog() {
  if (!pram_) return;
  if (tlog_.empty()) return;
  const std::uint64_t k = tlog_.size();
  pram_->serial([k](Pram::Ctx& c) { c.charge(k); });
  tlog_.clear();
}

void Engine::charge_serial(std::uint64_t k) {
  if (!pram_ || k == 0) return;
  pram_->serial([k](Pram::Ctx& c) { c.charge(k); });
}

void Engine::charge_lct() {
  if (!pram_) return;
  const std::uint64_t now = lct_.steps();
  const std::uint64_t d = now - lct_steps_seen_;
  lct_steps_seen_ = now;
  if (!d) return;
  pram_->serial([d](Pram::Ctx& c) { c.charge_lc(d); });
}

void Engine::op_begin() {
  mwr_window_ = false;
  if (!pram_) return;
  op_base_ = pram_->totals();
  lct_steps_seen_ = lct_.steps();
}

void Engine::op_end() {
  mwr_window_ = false;
  if (!pram_) return;
  charge_tlog();
  charge_lct();
  last_step_ = pram_->totals() - op_base_;
}

// ---------------------------------------------------------------------------
// surgery accounting

void Engine::count_split() {
  ++surgery_.splits;
  if (in_euler_op_) ++cur_euler_ops_;
}

void Engine::count_join() {
  ++surgery_.joins;
  if (in_euler_op_) ++cur_euler_ops_;
}

void Engine::count_rotate() {
  ++surgery_.rotates;
  if (in_euler_op_) ++cur_euler_ops_;
}

void Engine::begin_euler_op() {
  DMSF_CHECK(!in_euler_op_, "nested occurrence-list operation");
  in_euler_op_ = true;
  cur_euler_ops_ = 0;
}

void Engine::end_euler_op() {
  in_euler_op_ = false;
  max_euler_ops_ = std::max(max_euler_ops_, cur_euler_ops_);
}

// ---------------------------------------------------------------------------
// slots

void Engine::add_slot(VertexId v, EdgeId e) {
  VertexRec& vr = verts_[v];
  DMSF_CHECK(vr.nslot < 3, "vertex already holds three edges");
  vr.slot[vr.nslot++] = e;
  BNode* leaf = occs_[vr.principal].leaf;
  leaf->agg.edges += 1;
  bf_.refresh_path(leaf, plog());
  charge_tlog();
}

void Engine::remove_slot(VertexId v, EdgeId e) {
  VertexRec& vr = verts_[v];
  int at = -1;
  for (int i = 0; i < vr.nslot; ++i)
    if (vr.slot[i] == e) {
      at = i;
      break;
    }
  DMSF_CHECK(at >= 0, "removing unknown edge slot");
  for (int i = at; i + 1 < vr.nslot; ++i) vr.slot[i] = vr.slot[i + 1];
  --vr.nslot;
  vr.slot[vr.nslot] = kNoId64;
  BNode* leaf = occs_[vr.principal].leaf;
  leaf->agg.edges -= 1;
  bf_.refresh_path(leaf, plog());
  charge_tlog();
}

// ---------------------------------------------------------------------------
// adjacency matrix + aggregates: dispatchers

void Engine::ds_rebuild_row(std::uint32_t crec) {
  if (cfg_.mode == EngineMode::Seq) seq_rebuild_row(crec);
  else par_rebuild_row(crec);
}

void Engine::ds_update_adj(std::uint32_t crec) {
  if (cfg_.mode == EngineMode::Seq) seq_update_adj(crec);
  else par_update_adj(crec);
}

void Engine::ds_pair_update(std::uint32_t ca, std::uint32_t cb, TotalWeight w) {
  if (ca == cb) return;
  ChunkRec& a = chunkr(ca);
  ChunkRec& b = chunkr(cb);
  if (a.cid == kNoId32 || b.cid == kNoId32) return;
  if (cfg_.mode == EngineMode::Par) {
    par_pair_update(ca, cb, w);
    return;
  }
  if (w < cadj(a.cid, b.cid)) {
    cadj(a.cid, b.cid) = w;
    cadj(b.cid, a.cid) = w;
    seq_sync_leaf_entry(ca, b.cid);
    seq_sync_leaf_entry(cb, a.cid);
  }
}

void Engine::ds_entry_rebuild(std::uint32_t ca, std::uint32_t cb) {
  if (cfg_.mode == EngineMode::Par) {
    par_entry_rebuild(ca, cb);
    return;
  }
  ChunkRec& a = chunkr(ca);
  ChunkRec& b = chunkr(cb);
  TotalWeight m = TotalWeight::absent();
  BForest::for_each_leaf(a.b_root, [&](BNode* leaf) {
    const OccRec& o = occs_[leaf->tag];
    const VertexRec& vr = verts_[o.vertex];
    if (vr.principal != leaf->tag) return;
    for (int i = 0; i < vr.nslot; ++i) {
      const EdgeRec& e = edges_.at(vr.slot[i]);
      VertexId far = far_end(e, o.vertex);
      if (occs_[pc(far)].chunk != cb) continue;
      if (e.w < m) m = e.w;
    }
  });
  cadj(a.cid, b.cid) = m;
  cadj(b.cid, a.cid) = m;
  seq_update_adj(ca);
}

void Engine::release_cid(std::uint32_t crec) {
  ChunkRec& c = chunkr(crec);
  DMSF_CHECK(c.cid != kNoId32, "chunk has no adjacency id");
  if (cfg_.mode == EngineMode::Par) {
    par_clear_cid(crec);
  } else {
    for (ChunkId j = 0; j < J_; ++j) {
      cadj(c.cid, j) = TotalWeight::absent();
      cadj(j, c.cid) = TotalWeight::absent();
    }
    seq_sweep_entry(c.cid);
  }
  chunk_of_cid_[c.cid] = kNoId32;
  cid_pool_.release(c.cid);
  c.cid = kNoId32;
}

void Engine::ds_make_long(std::uint32_t lrec) {
  ListRec& L = listr(lrec);
  DMSF_CHECK(!L.is_long && L.head == L.tail, "promoting a multi-chunk list");
  std::uint32_t crec = L.head;
  ChunkRec& c = chunkr(crec);
  c.cid = static_cast<ChunkId>(cid_pool_.acquire());
  chunk_of_cid_[c.cid] = crec;
  L.is_long = true;
  long_lists_.insert(lrec);
  if (cfg_.mode == EngineMode::Seq) {
    WideAgg a = wide_agg();
    a.memb.set(c.cid);
    c.lsds_leaf = lf_.make_leaf(crec, std::move(a), plog());
    L.lsds_root = c.lsds_leaf;
    charge_tlog();
  } else {
    par_make_long_aggs(lrec);
  }
  ds_rebuild_row(crec);
  ds_update_adj(crec);
}

void Engine::ds_make_short(std::uint32_t lrec) {
  ListRec& L = listr(lrec);
  DMSF_CHECK(L.is_long && L.head == L.tail, "demoting a multi-chunk list");
  std::uint32_t crec = L.head;
  ChunkRec& c = chunkr(crec);
  L.is_long = false;
  long_lists_.erase(lrec);
  if (cfg_.mode == EngineMode::Seq) {
    lf_.free_node(c.lsds_leaf);
    c.lsds_leaf = nullptr;
    L.lsds_root = nullptr;
  } else {
    par_make_short_aggs(lrec);
  }
  release_cid(crec);
}

void Engine::ds_leaf_insert(std::uint32_t lrec, std::uint32_t crec,
                            std::uint32_t after_crec) {
  ListRec& L = listr(lrec);
  ChunkRec& c = chunkr(crec);
  c.cid = static_cast<ChunkId>(cid_pool_.acquire());
  chunk_of_cid_[c.cid] = crec;
  if (cfg_.mode == EngineMode::Par) {
    par_leaf_insert(lrec, crec, after_crec);
    return;
  }
  WideAgg a = wide_agg();
  a.memb.set(c.cid);
  c.lsds_leaf = lf_.make_leaf(crec, std::move(a), plog());
  LNode* pos = after_crec == kNoId32 ? nullptr : chunkr(after_crec).lsds_leaf;
  L.lsds_root = lf_.insert_after(L.lsds_root, pos, c.lsds_leaf, plog());
  charge_tlog();
}

void Engine::ds_leaf_erase(std::uint32_t lrec, std::uint32_t crec) {
  ListRec& L = listr(lrec);
  ChunkRec& c = chunkr(crec);
  if (cfg_.mode == EngineMode::Par) {
    par_leaf_erase(lrec, crec);
    return;
  }
  L.lsds_root = lf_.erase(L.lsds_root, c.lsds_leaf, plog());
  lf_.free_node(c.lsds_leaf);
  c.lsds_leaf = nullptr;
  charge_tlog();
}

void Engine::ds_list_split_after(std::uint32_t lrec, std::uint32_t last_crec,
                                 std::uint32_t new_lrec) {
  ListRec& L = listr(lrec);
  ListRec& L2 = listr(new_lrec);
  if (!L.is_long) {
    L2.is_long = false;
    return;
  }
  if (cfg_.mode == EngineMode::Par) {
    par_list_split_after(lrec, last_crec, new_lrec);
    return;
  }
  auto [r1, r2] = lf_.split_after(L.lsds_root, chunkr(last_crec).lsds_leaf, plog());
  L.lsds_root = r1;
  L2.lsds_root = r2;
  L2.is_long = true;
  long_lists_.insert(new_lrec);
  charge_tlog();
}

void Engine::ds_list_join(std::uint32_t la, std::uint32_t lb) {
  ListRec& A = listr(la);
  ListRec& B = listr(lb);
  DMSF_CHECK(A.is_long && B.is_long, "joining unpromoted occurrence lists");
  if (cfg_.mode == EngineMode::Par) {
    par_list_join(la, lb);
  } else {
    A.lsds_root = lf_.join(A.lsds_root, B.lsds_root, plog());
    charge_tlog();
  }
  B.lsds_root = nullptr;
  B.is_long = false;
  long_lists_.erase(lb);
}

void Engine::ds_list_rotate(std::uint32_t lrec, std::uint32_t new_head_crec) {
  ListRec& L = listr(lrec);
  if (!L.is_long) return;
  if (cfg_.mode == EngineMode::Par) {
    par_list_rotate(lrec, new_head_crec);
    return;
  }
  auto [r1, r2] = lf_.split_before(L.lsds_root, chunkr(new_head_crec).lsds_leaf,
                                   plog());
  L.lsds_root = lf_.join(r2, r1, plog());
  charge_tlog();
}

void Engine::ds_relabel_chunks(std::uint32_t from_crec, std::uint32_t lrec) {
  if (cfg_.mode == EngineMode::Par && listr(lrec).is_long) {
    par_relabel_chunks(lrec);
    return;
  }
  std::uint64_t n = 0;
  for (std::uint32_t c = from_crec; c != kNoId32; c = chunkr(c).next) {
    chunkr(c).list = lrec;
    ++n;
  }
  charge_serial(n);
}

void Engine::ds_move_occs(std::uint32_t crec) {
  if (cfg_.mode == EngineMode::Par) {
    par_move_occs(crec);
    return;
  }
  BForest::for_each_leaf(chunkr(crec).b_root,
                         [&](BNode* leaf) { occs_[leaf->tag].chunk = crec; });
}

// ---------------------------------------------------------------------------
// adjacency matrix + aggregates: sequential bodies

void Engine::seq_rebuild_row(std::uint32_t crec) {
  ChunkRec& c = chunkr(crec);
  if (c.cid == kNoId32) return;
  std::vector<TotalWeight> row(J_, TotalWeight::absent());
  BForest::for_each_leaf(c.b_root, [&](BNode* leaf) {
    const OccRec& o = occs_[leaf->tag];
    const VertexRec& vr = verts_[o.vertex];
    if (vr.principal != leaf->tag) return;
    for (int i = 0; i < vr.nslot; ++i) {
      const EdgeRec& e = edges_.at(vr.slot[i]);
      VertexId far = far_end(e, o.vertex);
      ChunkId fc = chunks_[occs_[pc(far)].chunk].cid;
      if (fc == kNoId32) continue;
      if (e.w < row[fc]) row[fc] = e.w;
    }
  });
  for (ChunkId j = 0; j < J_; ++j) {
    cadj(c.cid, j) = row[j];
    if (j != c.cid) cadj(j, c.cid) = row[j];
  }
}

void Engine::seq_update_adj(std::uint32_t crec) {
  ChunkRec& c = chunkr(crec);
  if (c.cid == kNoId32) return;
  WideAgg& a = c.lsds_leaf->agg;
  for (ChunkId j = 0; j < J_; ++j) a.row[j] = cadj(c.cid, j);
  a.memb.clear();
  a.memb.set(c.cid);
  lf_.refresh_path(c.lsds_leaf);
  seq_sweep_entry(c.cid);
}

void Engine::seq_sync_leaf_entry(std::uint32_t crec, ChunkId j) {
  ChunkRec& c = chunkr(crec);
  c.lsds_leaf->agg.row[j] = cadj(c.cid, j);
  lf_.refresh_path(c.lsds_leaf);
}

void Engine::seq_sweep_entry(ChunkId j) {
  for (std::uint32_t lrec : long_lists_) {
    LForest::postorder(listr(lrec).lsds_root, [&](LNode* n) {
      if (n->is_leaf) {
        n->agg.row[j] = cadj(chunks_[n->tag].cid, j);
        return;
      }
      TotalWeight m = TotalWeight::absent();
      for (int i = 0; i < n->nch; ++i)
        if (n->ch[i]->agg.row[j] < m) m = n->ch[i]->agg.row[j];
      n->agg.row[j] = m;
    });
  }
}

// ---------------------------------------------------------------------------
// chunk restructuring

std::uint32_t Engine::chunk_split_before(std::uint32_t crec, std::uint32_t o) {
  ChunkRec& c = chunkr(crec);
  DMSF_CHECK(first_occ(crec) != o, "chunk split at its first occurrence");
  DMSF_CHECK(occs_[o].chunk == crec, "occurrence not in split chunk");
  std::uint32_t lrec = c.list;
  auto [r1, r2] = bf_.split_before(c.b_root, occs_[o].leaf, plog());
  charge_tlog();
  c.b_root = r1;
  std::uint32_t c2rec = new_chunk();
  chunkr(c2rec).b_root = r2;
  link_chunk_after(lrec, crec, c2rec);
  ds_move_occs(c2rec);
  if (listr(lrec).is_long) {
    ds_leaf_insert(lrec, c2rec, crec);
    ds_rebuild_row(crec);
    ds_rebuild_row(c2rec);
    ds_update_adj(crec);
    ds_update_adj(c2rec);
  }
  return c2rec;
}

void Engine::chunk_split_balanced(std::uint32_t crec) {
  ChunkRec& c = chunkr(crec);
  const std::uint32_t total = mass(crec);
  // Smallest occurrence prefix whose mass doubled covers the whole chunk.
  BNode* n = c.b_root;
  std::uint32_t acc = 0;
  while (!n->is_leaf) {
    for (int i = 0; i < n->nch; ++i) {
      if (2 * (acc + n->ch[i]->agg.mass()) >= total) {
        n = n->ch[i];
        break;
      }
      acc += n->ch[i]->agg.mass();
    }
  }
  BNode* next = BForest::next_leaf(n);
  DMSF_CHECK(next != nullptr, "balance point at chunk end");
  chunk_split_before(crec, next->tag);
}

void Engine::merge_chunk_left(std::uint32_t a, std::uint32_t b) {
  ChunkRec& ca = chunkr(a);
  ChunkRec& cb = chunkr(b);
  DMSF_CHECK(ca.next == b, "merging non-adjacent chunks");
  std::uint32_t lrec = ca.list;
  ca.b_root = bf_.join(ca.b_root, cb.b_root, plog());
  charge_tlog();
  cb.b_root = nullptr;
  ds_move_occs(a);
  unlink_chunk(lrec, b);
  if (listr(lrec).is_long) {
    ds_leaf_erase(lrec, b);
    release_cid(b);
    ds_rebuild_row(a);
    ds_update_adj(a);
  }
  free_chunk(b);
}

void Engine::restore(std::uint32_t crec) {
  while (true) {
    if (crec >= chunks_.size() || !chunks_[crec].live) return;
    ChunkRec& c = chunkr(crec);
    std::uint32_t lrec = c.list;
    ListRec& L = listr(lrec);
    const bool alone = L.head == L.tail;
    const std::uint32_t m = mass(crec);
    if (alone) {
      if (!L.is_long) {
        if (m >= K_) {
          ds_make_long(lrec);
          continue;  // may immediately need a split
        }
        return;
      }
      if (m > 3 * K_) {
        chunk_split_balanced(crec);
        return;
      }
      if (m < K_) ds_make_short(lrec);
      return;
    }
    if (L.is_long) {
      if (m > 3 * K_) {
        chunk_split_balanced(crec);
        return;
      }
      if (m >= K_) return;
    }
    // Under-full in a long list, or a transient multi-chunk fragment of
    // short-list surgery (total mass < K): fold into the left neighbour.
    const std::uint32_t nb = c.next != kNoId32 ? c.next : c.prev;
    const std::uint32_t left = nb == c.next ? crec : nb;
    const std::uint32_t right = nb == c.next ? nb : crec;
    merge_chunk_left(left, right);
    crec = left;  // re-examine: may now be over-full, under-full, or alone
  }
}

// ---------------------------------------------------------------------------
// occurrence-list surgery

void Engine::rotate_to_front(std::uint32_t lrec, std::uint32_t o) {
  ListRec& L = listr(lrec);
  if (first_occ(L.head) == o) return;  // already at the front
  std::uint32_t crec = occs_[o].chunk;
  if (first_occ(crec) != o) crec = chunk_split_before(crec, o);
  DMSF_CHECK(L.head != crec, "rotation boundary at list head");
  ds_list_rotate(lrec, crec);
  const std::uint32_t old_head = L.head;
  const std::uint32_t old_tail = L.tail;
  const std::uint32_t pr = chunkr(crec).prev;
  chunkr(old_tail).next = old_head;
  chunkr(old_head).prev = old_tail;
  chunkr(pr).next = kNoId32;
  L.tail = pr;
  chunkr(crec).prev = kNoId32;
  L.head = crec;
  count_rotate();
}

std::uint32_t Engine::split_list_before(std::uint32_t lrec, std::uint32_t o) {
  ListRec& L = listr(lrec);
  std::uint32_t crec = occs_[o].chunk;
  DMSF_CHECK(!(L.head == crec && first_occ(crec) == o), "splitting at list head");
  if (first_occ(crec) != o) crec = chunk_split_before(crec, o);
  const std::uint32_t b = chunkr(crec).prev;  // last chunk of the prefix
  DMSF_CHECK(b != kNoId32, "split boundary has no prefix");
  const std::uint32_t l2 = new_list();
  ds_list_split_after(lrec, b, l2);
  ListRec& L2 = listr(l2);
  chunkr(b).next = kNoId32;
  const std::uint32_t old_tail = L.tail;
  L.tail = b;
  chunkr(crec).prev = kNoId32;
  L2.head = crec;
  L2.tail = old_tail;
  ds_relabel_chunks(crec, l2);
  count_split();
  restore(b);
  restore(crec);
  return l2;
}

void Engine::join_lists(std::uint32_t la, std::uint32_t lb) {
  ListRec& A = listr(la);
  ListRec& B = listr(lb);
  const std::uint32_t b_head = B.head;
  ds_list_join(la, lb);
  chunkr(A.tail).next = b_head;
  chunkr(b_head).prev = A.tail;
  A.tail = B.tail;
  B.head = B.tail = kNoId32;
  ds_relabel_chunks(b_head, la);
  free_list(lb);
  count_join();
}

std::pair<std::uint32_t, std::uint32_t> Engine::coalesce_wrap(
    std::uint32_t lrec) {
  ListRec& L = listr(lrec);
  const std::uint32_t h = first_occ(L.head);
  const std::uint32_t t = last_occ(L.tail);
  if (h == t) {
    occs_[h].next_edge = kNoId64;
    return {occs_[h].chunk, kNoId32};
  }
  DMSF_CHECK(occs_[h].vertex == occs_[t].vertex, "wrap seam vertices differ");
  // The head occurrence duplicates the tail one: delete the head, and carry
  // its outgoing tree edge over to the survivor.
  const EdgeId g = occs_[h].next_edge;
  DMSF_CHECK(g != kNoId64, "wrap occurrence without an outgoing edge");
  EdgeRec& ge = edges_.at(g);
  if (ge.anchor[0] == h) {
    ge.anchor[0] = t;
  } else {
    DMSF_CHECK(ge.anchor[1] == h, "stale anchor at wrap seam");
    ge.anchor[1] = t;
  }
  occs_[t].next_edge = g;
  const VertexId v = occs_[h].vertex;
  VertexRec& vr = verts_[v];
  std::uint32_t hc = occs_[h].chunk;
  const std::uint32_t tc = occs_[t].chunk;
  bool principal_moved = false;
  if (vr.principal == h) {
    vr.principal = t;
    occs_[h].leaf->agg.edges = 0;
    bf_.refresh_path(occs_[h].leaf, plog());
    occs_[t].leaf->agg.edges = vr.nslot;
    bf_.refresh_path(occs_[t].leaf, plog());
    charge_tlog();
    principal_moved = hc != tc;
  }
  ChunkRec& hcr = chunkr(hc);
  hcr.b_root = bf_.erase(hcr.b_root, occs_[h].leaf, plog());
  charge_tlog();
  bf_.free_node(occs_[h].leaf);
  free_occ(h);
  --vr.occ_count;
  if (!hcr.b_root) {
    unlink_chunk(lrec, hc);
    if (L.is_long) {
      ds_leaf_erase(lrec, hc);
      release_cid(hc);
    }
    free_chunk(hc);
    hc = kNoId32;
  }
  if (L.is_long) {
    // Slots may have moved between chunks: rebuild the affected rows.
    if (principal_moved) {
      ds_rebuild_row(tc);
      ds_update_adj(tc);
      if (hc != kNoId32) {
        ds_rebuild_row(hc);
        ds_update_adj(hc);
      }
    }
  }
  return {tc, hc};
}

std::pair<std::uint32_t, std::uint32_t> Engine::euler_delete(EdgeId e) {
  begin_euler_op();
  EdgeRec& er = edges_.at(e);
  DMSF_CHECK(er.tree, "removing a non-tree edge from its tour");
  const std::uint32_t o_a = er.anchor[0];
  const std::uint32_t o_c = er.anchor[1];
  DMSF_CHECK(occs_[o_a].next_edge == e && occs_[o_c].next_edge == e,
             "edge anchors out of date");
  const std::uint32_t lrec = chunkr(occs_[o_a].chunk).list;
  const std::uint32_t n_a = cyc_next(o_a);
  rotate_to_front(lrec, n_a);
  const std::uint32_t n_c = cyc_next(o_c);
  const std::uint32_t l2 = split_list_before(lrec, n_c);
  // lrec = [n_a .. o_c] (v side), l2 = [n_c .. o_a] (u side)
  er.tree = false;
  er.anchor[0] = er.anchor[1] = kNoId32;
  --verts_[er.u].deg_tree;
  --verts_[er.v].deg_tree;
  auto [t1, h1] = coalesce_wrap(lrec);
  auto [t2, h2] = coalesce_wrap(l2);
  restore(t1);
  if (h1 != kNoId32) restore(h1);
  restore(t2);
  if (h2 != kNoId32) restore(h2);
  end_euler_op();
  mwr_window_ = true;
  return {l2, lrec};
}

void Engine::euler_join(EdgeId e) {
  begin_euler_op();
  EdgeRec& er = edges_.at(e);
  DMSF_CHECK(!er.tree, "edge already in a tour");
  const std::uint32_t lx = list_of_vertex(er.u);
  const std::uint32_t ly = list_of_vertex(er.v);
  DMSF_CHECK(lx != ly, "joining a tour to itself");
  if (!listr(lx).is_long) ds_make_long(lx);
  if (!listr(ly).is_long) ds_make_long(ly);
  rotate_to_front(lx, pc(er.u));
  rotate_to_front(ly, pc(er.v));

  auto attach = [&](std::uint32_t lr, VertexId vtx) -> std::uint32_t {
    if (list_is_singleton(lr)) {
      const std::uint32_t o1 = first_occ(listr(lr).head);
      DMSF_CHECK(occs_[o1].next_edge == kNoId64, "singleton tour with an edge");
      occs_[o1].next_edge = e;
      return o1;
    }
    const std::uint32_t o2 = new_occ(vtx);
    const std::uint32_t tcrec = listr(lr).tail;
    ChunkRec& tc = chunkr(tcrec);
    BNode* leaf = bf_.make_leaf(o2, MassAgg{1, 0}, plog());
    occs_[o2].leaf = leaf;
    occs_[o2].chunk = tcrec;
    tc.b_root = bf_.push_back(tc.b_root, leaf, plog());
    charge_tlog();
    ++verts_[vtx].occ_count;
    occs_[o2].next_edge = e;
    return o2;
  };

  er.anchor[0] = attach(lx, er.u);
  er.anchor[1] = attach(ly, er.v);

  const std::uint32_t u1 = pc(er.u);
  const std::uint32_t v1 = pc(er.v);
  const std::uint32_t ou = er.anchor[0];
  const std::uint32_t ov = er.anchor[1];

  join_lists(lx, ly);
  er.tree = true;
  ++verts_[er.u].deg_tree;
  ++verts_[er.v].deg_tree;

  restore(occs_[ou].chunk);
  restore(occs_[u1].chunk);
  restore(occs_[ov].chunk);
  restore(occs_[v1].chunk);
  end_euler_op();
  mwr_window_ = false;
}

// ---------------------------------------------------------------------------
// minimum-weight replacement search

std::optional<TotalWeight> Engine::scan_chunk_vs_list(std::uint32_t crec,
                                                      std::uint32_t ly) const {
  std::optional<TotalWeight> best;
  BForest::for_each_leaf(chunks_[crec].b_root, [&](BNode* leaf) {
    const OccRec& o = occs_[leaf->tag];
    const VertexRec& vr = verts_[o.vertex];
    if (vr.principal != leaf->tag) return;
    for (int i = 0; i < vr.nslot; ++i) {
      const EdgeRec& e = edges_.at(vr.slot[i]);
      VertexId far = far_end(e, o.vertex);
      if (chunks_[occs_[pc(far)].chunk].list != ly) continue;
      if (!best || e.w < *best) best = e.w;
    }
  });
  return best;
}

std::optional<EdgeId> Engine::find_mwr(std::uint32_t lx, std::uint32_t ly) {
  DMSF_CHECK(mwr_window_, "replacement search outside its window");
  mwr_window_ = false;
  if (cfg_.mode == EngineMode::Par) return par_find_mwr(lx, ly);
  const ListRec& X = listr(lx);
  const ListRec& Y = listr(ly);
  std::optional<TotalWeight> best;
  if (!X.is_long) {
    best = scan_chunk_vs_list(X.head, ly);
  } else if (!Y.is_long) {
    best = scan_chunk_vs_list(Y.head, lx);
  } else {
    const WideAgg& gx = X.lsds_root->agg;
    const WideAgg& gy = Y.lsds_root->agg;
    TotalWeight g = TotalWeight::absent();
    ChunkId cj = kNoId32;
    for (ChunkId j = 0; j < J_; ++j) {
      if (!gy.memb.test(j)) continue;
      if (gx.row[j] < g) {
        g = gx.row[j];
        cj = j;
      }
    }
    if (cj == kNoId32) return std::nullopt;
    const std::uint32_t chat = chunk_of_cid_[cj];
    best = scan_chunk_vs_list(chat, lx);
    DMSF_CHECK(best && *best == g,
               "chunk scan disagrees with the adjacency aggregate");
  }
  if (!best || best->is_absent()) return std::nullopt;
  return best->id;
}

// ---------------------------------------------------------------------------
// public operations

MsfDelta Engine::insert(EdgeId id, VertexId u, VertexId v, TotalWeight w) {
  DMSF_CHECK(!edges_.count(id), "duplicate edge id");
  DMSF_CHECK(u < n_r_ && v < n_r_, "endpoint out of range");
  DMSF_CHECK(u != v, "self-loops are not representable");
  DMSF_CHECK(w.id == id, "weight identity must match the edge id");
  DMSF_CHECK(!w.is_absent(), "edge weight must be phantom or real");
  DMSF_CHECK(edges_.size() < cfg_.max_edges, "live edge capacity exceeded");
  op_begin();
  EdgeRec rec;
  rec.u = u;
  rec.v = v;
  rec.w = w;
  edges_.emplace(id, rec);
  add_slot(u, id);
  add_slot(v, id);
  const std::uint32_t cu = occs_[pc(u)].chunk;
  const std::uint32_t cv = occs_[pc(v)].chunk;
  ds_pair_update(cu, cv, w);
  restore(cu);
  restore(cv);

  MsfDelta delta;
  if (!lct_.connected(u, v)) {
    euler_join(id);
    edges_.at(id).lct = lct_.link_edge(u, v, w, id);
    delta.added.push_back(id);
  } else {
    const auto pm = lct_.path_max(u, v);
    if (w < pm.w) {
      EdgeRec& old = edges_.at(pm.edge);
      lct_.cut_edge(old.lct, old.u, old.v);
      old.lct = kNoId32;
      euler_delete(pm.edge);
      mwr_window_ = false;  // the new edge is the replacement by definition
      euler_join(id);
      edges_.at(id).lct = lct_.link_edge(u, v, w, id);
      delta.added.push_back(id);
      delta.removed.push_back(pm.edge);
    }
  }
  op_end();
  return delta;
}

Engine::Probe Engine::probe_insert(VertexId u, VertexId v, TotalWeight w) {
  DMSF_CHECK(u < n_r_ && v < n_r_, "endpoint out of range");
  DMSF_CHECK(u != v, "self-loops are not representable");
  const std::uint64_t base = lct_.steps();
  Probe p;
  if (!lct_.connected(u, v)) {
    p.enters = true;
  } else {
    const auto pm = lct_.path_max(u, v);
    if (w < pm.w) {
      p.enters = true;
      p.displaced = pm.edge;
    }
  }
  p.lc_steps = lct_.steps() - base;
  return p;
}

MsfDelta Engine::erase(EdgeId id) {
  auto it = edges_.find(id);
  DMSF_CHECK(it != edges_.end(), "erasing unknown edge");
  op_begin();
  const EdgeRec er = it->second;
  remove_slot(er.u, id);
  remove_slot(er.v, id);
  const std::uint32_t cu = occs_[pc(er.u)].chunk;
  const std::uint32_t cv = occs_[pc(er.v)].chunk;
  if (cu != cv) {
    const ChunkRec& a = chunkr(cu);
    const ChunkRec& b = chunkr(cv);
    if (a.cid != kNoId32 && b.cid != kNoId32) {
      const TotalWeight& ce = cadj(a.cid, b.cid);
      if (!ce.is_absent() && ce.id == id) ds_entry_rebuild(cu, cv);
    }
  }
  restore(cu);
  restore(cv);

  MsfDelta delta;
  if (!er.tree) {
    edges_.erase(id);
    op_end();
    return delta;
  }
  delta.removed.push_back(id);
  lct_.cut_edge(er.lct, er.u, er.v);
  auto [lu, lv] = euler_delete(id);
  edges_.erase(id);
  const auto r = find_mwr(lu, lv);
  if (r) {
    EdgeRec& re = edges_.at(*r);
    DMSF_CHECK(!re.tree, "replacement already a tree edge");
    euler_join(*r);
    re.lct = lct_.link_edge(re.u, re.v, re.w, *r);
    delta.added.push_back(*r);
  }
  op_end();
  return delta;
}

std::vector<EdgeId> Engine::msf_edges() const {
  std::vector<EdgeId> out;
  for (const auto& [id, e] : edges_)
    if (e.tree) out.push_back(id);
  return out;
}

// ---------------------------------------------------------------------------
// test hooks

std::vector<ChunkId> Engine::live_chunk_ids() const {
  std::vector<ChunkId> out;
  for (ChunkId j = 0; j < J_; ++j)
    if (chunk_of_cid_[j] != kNoId32) out.push_back(j);
  return out;
}

std::uint32_t Engine::chunk_edge_count(ChunkId cid) const {
  const std::uint32_t crec = chunk_of_cid_.at(cid);
  DMSF_CHECK(crec != kNoId32, "no chunk holds this id");
  return chunks_[crec].b_root->agg.edges;
}

EdgeId Engine::get_edge(ChunkId cid, std::uint32_t k) const {
  const std::uint32_t crec = chunk_of_cid_.at(cid);
  DMSF_CHECK(crec != kNoId32, "no chunk holds this id");
  BNode* n = chunks_[crec].b_root;
  DMSF_CHECK(k < n->agg.edges, "edge rank out of range");
  while (!n->is_leaf) {
    for (int i = 0; i < n->nch; ++i) {
      if (k < n->ch[i]->agg.edges) {
        n = n->ch[i];
        break;
      }
      k -= n->ch[i]->agg.edges;
    }
  }
  const OccRec& o = occs_[n->tag];
  return verts_[o.vertex].slot[k];
}

// ---------------------------------------------------------------------------
// audits

std::uint32_t Engine::audit_mass_bounds() const {
  std::uint32_t bad = 0;
  for (std::uint32_t lrec = 0; lrec < lists_.size(); ++lrec) {
    const ListRec& L = lists_[lrec];
    if (!L.live) continue;
    const bool alone = L.head == L.tail;
    for (std::uint32_t c = L.head; c != kNoId32; c = chunks_[c].next) {
      const std::uint32_t m = mass(c);
      if (m > 3 * K_) ++bad;
      else if (!alone && m < K_) ++bad;
    }
  }
  return bad;
}

void Engine::audit_adjacency() const {
  // Reference matrix from first principles.
  std::vector<TotalWeight> ref(std::size_t(J_) * J_, TotalWeight::absent());
  for (const auto& [id, e] : edges_) {
    const ChunkId a = chunks_[occs_[pc(e.u)].chunk].cid;
    const ChunkId b = chunks_[occs_[pc(e.v)].chunk].cid;
    if (a == kNoId32 || b == kNoId32 || a == b) continue;
    TotalWeight& x = ref[std::size_t(a) * J_ + b];
    if (e.w < x) x = e.w;
    TotalWeight& y = ref[std::size_t(b) * J_ + a];
    if (e.w < y) y = e.w;
  }
  for (ChunkId i = 0; i < J_; ++i) {
    for (ChunkId j = 0; j < J_; ++j) {
      if (i == j) continue;  // diagonal entries are never consulted
      DMSF_CHECK(cadj(i, j) == ref[std::size_t(i) * J_ + j],
                 "adjacency entry differs from recompute");
    }
  }
  // Aggregate structures against the (verified) matrix.
  for (std::uint32_t lrec : long_lists_) {
    const ListRec& L = lists_[lrec];
    if (cfg_.mode == EngineMode::Seq) {
      DMSF_CHECK(L.lsds_root != nullptr, "long list without an aggregate");
      for (std::uint32_t c = L.head; c != kNoId32; c = chunks_[c].next) {
        const ChunkRec& cc = chunks_[c];
        for (ChunkId j = 0; j < J_; ++j)
          DMSF_CHECK(cc.lsds_leaf->agg.row[j] == cadj(cc.cid, j),
                     "aggregate leaf row out of sync");
        DMSF_CHECK(cc.lsds_leaf->agg.memb.count() == 1 &&
                       cc.lsds_leaf->agg.memb.test(cc.cid),
                   "aggregate membership not one-hot");
      }
      lf_.validate(L.lsds_root);
      continue;
    }
    // Parallel mode: one congruent column tree per matrix column.
    DMSF_CHECK(L.lsds_id != kNoId32, "long list without column aggregates");
    std::uint32_t h0 = 0;
    for (ChunkId j = 0; j < J_; ++j) {
      const std::uint32_t rid = rl_[L.lsds_id][j];
      DMSF_CHECK(rid != kNoId32, "long list missing a column root");
      SNode* root = sj_[j]->node_by_id(rid);
      DMSF_CHECK(!root->parent, "column root has a parent");
      sj_[j]->validate(root);
      if (j == 0) h0 = root->height;
      DMSF_CHECK(root->height == h0, "column trees not congruent");
      SNode* leaf = SForest::first_leaf(root);
      std::uint32_t count = 0;
      for (std::uint32_t c = L.head; c != kNoId32; c = chunks_[c].next) {
        const ChunkRec& cc = chunks_[c];
        DMSF_CHECK(leaf, "column tree shorter than the chunk chain");
        DMSF_CHECK(leaf->tag == c, "column leaf order differs from the chain");
        DMSF_CHECK(cc.sj_leaf.size() == J_ && cc.sj_leaf[j] == leaf->id,
                   "column leaf link stale");
        DMSF_CHECK(leaf->agg.w == cadj(cc.cid, j),
                   "column leaf weight out of sync");
        DMSF_CHECK(leaf->agg.memb == (cc.cid == j),
                   "column leaf membership wrong");
        DMSF_CHECK(leaf->agg.count == 1, "column leaf count wrong");
        leaf = SForest::next_leaf(leaf);
        ++count;
      }
      DMSF_CHECK(leaf == nullptr, "column tree longer than the chunk chain");
      (void)count;
    }
  }
}

void Engine::audit() const {
  // Vertex/slot/degree invariants.
  std::vector<std::uint32_t> deg(n_r_, 0), tdeg(n_r_, 0);
  for (const auto& [id, e] : edges_) {
    ++deg[e.u];
    ++deg[e.v];
    if (e.tree) {
      ++tdeg[e.u];
      ++tdeg[e.v];
    }
    bool fu = false, fv = false;
    for (int i = 0; i < verts_[e.u].nslot; ++i) fu |= verts_[e.u].slot[i] == id;
    for (int i = 0; i < verts_[e.v].nslot; ++i) fv |= verts_[e.v].slot[i] == id;
    DMSF_CHECK(fu && fv, "edge missing from an endpoint's slots");
    if (e.tree) {
      DMSF_CHECK(e.anchor[0] != kNoId32 && e.anchor[1] != kNoId32,
                 "tree edge without anchors");
      DMSF_CHECK(occs_[e.anchor[0]].vertex == e.u &&
                     occs_[e.anchor[1]].vertex == e.v,
                 "anchors on wrong vertices");
      DMSF_CHECK(occs_[e.anchor[0]].next_edge == id &&
                     occs_[e.anchor[1]].next_edge == id,
                 "anchors not crossing their edge");
      DMSF_CHECK(chunks_[occs_[e.anchor[0]].chunk].list ==
                     chunks_[occs_[e.anchor[1]].chunk].list,
                 "tree edge spans two lists");
    } else {
      DMSF_CHECK(e.anchor[0] == kNoId32 && e.anchor[1] == kNoId32,
                 "non-tree edge with anchors");
    }
  }
  for (VertexId v = 0; v < n_r_; ++v) {
    const VertexRec& vr = verts_[v];
    DMSF_CHECK(vr.nslot == deg[v], "slot count != live degree");
    DMSF_CHECK(vr.deg_tree == tdeg[v], "tree degree counter stale");
    DMSF_CHECK(vr.occ_count == std::max<std::uint32_t>(1, tdeg[v]),
               "occurrence count != max(1, tree degree)");
    DMSF_CHECK(occs_[vr.principal].vertex == v, "principal of wrong vertex");
  }

  // Lists, chunks, occurrences, tours.
  std::map<EdgeId, int> crossings;
  std::uint32_t live_lists = 0;
  for (std::uint32_t lrec = 0; lrec < lists_.size(); ++lrec) {
    const ListRec& L = lists_[lrec];
    if (!L.live) continue;
    ++live_lists;
    DMSF_CHECK(L.head != kNoId32 && L.tail != kNoId32, "empty live list");
    std::vector<std::uint32_t> occ_seq;
    std::uint32_t prev = kNoId32;
    std::uint32_t nchunks = 0;
    for (std::uint32_t c = L.head; c != kNoId32; c = chunks_[c].next) {
      const ChunkRec& cc = chunks_[c];
      ++nchunks;
      DMSF_CHECK(cc.live && cc.prev == prev && cc.list == lrec,
                 "chunk chain corrupt");
      DMSF_CHECK(cc.b_root && !cc.b_root->parent, "chunk tree root corrupt");
      bf_.validate(cc.b_root);
      BForest::for_each_leaf(cc.b_root, [&](BNode* leaf) {
        const OccRec& o = occs_[leaf->tag];
        DMSF_CHECK(o.leaf == leaf && o.chunk == c, "occurrence backlinks stale");
        const std::uint32_t ec =
            verts_[o.vertex].principal == leaf->tag ? verts_[o.vertex].nslot : 0u;
        DMSF_CHECK(leaf->agg.occs == 1 && leaf->agg.edges == ec,
                   "occurrence leaf aggregate stale");
        occ_seq.push_back(leaf->tag);
      });
      if (L.is_long) {
        DMSF_CHECK(cc.cid != kNoId32 && chunk_of_cid_[cc.cid] == c,
                   "long-list chunk id mapping corrupt");
        if (cfg_.mode == EngineMode::Seq)
          DMSF_CHECK(cc.lsds_leaf && cc.lsds_leaf->tag == c &&
                         LForest::root_of(cc.lsds_leaf) == L.lsds_root,
                     "aggregate leaf linkage corrupt");
      } else {
        DMSF_CHECK(cc.cid == kNoId32, "short-list chunk holds an id");
      }
      prev = c;
    }
    DMSF_CHECK(L.tail == prev, "list tail pointer stale");
    if (nchunks > 1) DMSF_CHECK(L.is_long, "multi-chunk list is short");
    if (nchunks == 1) {
      const std::uint32_t m = mass(L.head);
      DMSF_CHECK(L.is_long == (m >= K_), "long/short classification wrong");
    }
    // Tour validity: consecutive occurrences (wrapping) cross tree edges.
    const std::size_t n = occ_seq.size();
    for (std::size_t i = 0; i < n; ++i) {
      const OccRec& a = occs_[occ_seq[i]];
      const OccRec& b = occs_[occ_seq[(i + 1) % n]];
      if (n == 1) {
        DMSF_CHECK(a.next_edge == kNoId64, "singleton tour crosses an edge");
        break;
      }
      DMSF_CHECK(a.next_edge != kNoId64, "tour gap without an edge");
      const EdgeRec& e = edges_.at(a.next_edge);
      DMSF_CHECK(e.tree, "tour crosses a non-tree edge");
      DMSF_CHECK((e.u == a.vertex && e.v == b.vertex) ||
                     (e.v == a.vertex && e.u == b.vertex),
                 "tour edge endpoints mismatch");
      ++crossings[a.next_edge];
    }
  }
  std::uint32_t tree_edges = 0;
  for (const auto& [id, e] : edges_) {
    if (!e.tree) continue;
    ++tree_edges;
    auto itc = crossings.find(id);
    DMSF_CHECK(itc != crossings.end() && itc->second == 2,
               "tree edge not crossed exactly twice");
  }
  DMSF_CHECK(crossings.size() == tree_edges, "tour crosses unknown edges");
  DMSF_CHECK(live_lists + tree_edges == n_r_, "forest accounting broken");

  DMSF_CHECK(audit_mass_bounds() == 0, "chunk mass bounds violated");
  audit_adjacency();
}

void Engine::dump_chunks(std::ostream& os) const {
  for (std::uint32_t lrec = 0; lrec < lists_.size(); ++lrec) {
    const ListRec& L = lists_[lrec];
    if (!L.live) continue;
    for (std::uint32_t c = L.head; c != kNoId32; c = chunks_[c].next) {
      os << "chunk ";
      if (chunks_[c].cid != kNoId32) os << chunks_[c].cid;
      else os << '-';
      os << " mass=" << mass(c) << " occs=";
      bool first = true;
      BForest::for_each_leaf(chunks_[c].b_root, [&](BNode* leaf) {
        if (!first) os << ' ';
        first = false;
        os << occs_[leaf->tag].vertex;
      });
      os << '\n';
    }
  }
}

}  // namespace dmsf
