#include "dmsf/sparsify.hpp"

#include <algorithm>
#include <bit>
#include <ostream>
#include <set>
#include <stdexcept>

#include "dmsf/check.hpp"

namespace dmsf {

namespace {

StepReport add(StepReport x, const StepReport& y) {
  x.depth += y.depth;
  x.work += y.work;
  x.lc_depth += y.lc_depth;
  x.max_processors = std::max(x.max_processors, y.max_processors);
  x.violations += y.violations;
  return x;
}

// Strict total order on edges: weight, then id (ids are globally unique, so
// every level ranks edges identically).
bool lighter(const Edge& a, const Edge& b) {
  return a.w != b.w ? a.w < b.w : a.id < b.id;
}

}  // namespace

Sparsifier::Sparsifier(const SparsifyConfig& cfg) : cfg_(cfg) {
  DMSF_CHECK(cfg.n <= (1u << 24), "vertex count too large");
  const std::uint32_t n2 = std::bit_ceil(std::max<std::uint32_t>(cfg.n, 1));
  depth_ = static_cast<std::uint32_t>(std::bit_width(n2)) - 1;
  updates_this_op_.assign(depth_ + 1, 0);
  redges_.assign(depth_ + 1, Promoted{});
}

Sparsifier::~Sparsifier() = default;

std::uint64_t Sparsifier::pack(std::uint32_t level, std::uint32_t a,
                               std::uint32_t b) {
  return (std::uint64_t{level} << 48) | (std::uint64_t{a} << 24) |
         std::uint64_t{b};
}

std::uint64_t Sparsifier::path_key(std::uint32_t level, VertexId u,
                                   VertexId v) const {
  std::uint32_t a = u >> level;
  std::uint32_t b = v >> level;
  if (a > b) std::swap(a, b);
  return pack(level, a, b);
}

Sparsifier::Node* Sparsifier::find(std::uint64_t key) const {
  auto it = nodes_.find(key);
  return it == nodes_.end() ? nullptr : it->second.get();
}

void Sparsifier::interval(std::uint32_t level, std::uint32_t idx,
                          std::uint32_t* lo, std::uint32_t* hi) const {
  *lo = idx << level;
  const std::uint64_t end =
      std::min<std::uint64_t>((std::uint64_t{idx} + 1) << level, cfg_.n);
  DMSF_CHECK(*lo < end, "empty vertex interval");
  *hi = static_cast<std::uint32_t>(end - 1);
}

Sparsifier::Node& Sparsifier::materialize(std::uint32_t level, VertexId u,
                                          VertexId v) {
  const std::uint64_t key = path_key(level, u, v);
  if (Node* nd = find(key)) return *nd;
  auto nd = std::make_unique<Node>();
  nd->level = level;
  nd->a = std::min(u >> level, v >> level);
  nd->b = std::max(u >> level, v >> level);
  std::uint32_t lo, hi;
  interval(level, nd->a, &lo, &hi);
  nd->cap = hi - lo + 1;
  if (nd->a != nd->b) {
    interval(level, nd->b, &lo, &hi);
    nd->cap += hi - lo + 1;
  }
  // Internal nodes hold at most the union of their children's forests
  // (fewer than twice their vertex capacity, plus in-op transients); leaves
  // hold every live edge of one vertex pair and grow on demand.
  const std::uint32_t want =
      level == 0 ? 8 : 2 * nd->cap + 4;
  nd->max_edges = std::max<std::uint32_t>(
      1, std::min(want, std::max<std::uint32_t>(cfg_.max_edges, 1)));
  MsfConfig mc;
  mc.n = nd->cap;
  mc.max_edges = nd->max_edges;
  mc.mode = cfg_.parallel ? EngineMode::Par : EngineMode::Seq;
  mc.pram_threads = cfg_.pram_threads;
  mc.pram_abort = cfg_.pram_abort;
  nd->graph = std::make_unique<DynamicMsf>(mc);
  nd->locals = std::make_unique<IdPool>(nd->cap, "node vertex copies");
  nd->owner.assign(nd->cap, kNoId32);
  Node& ref = *nd;
  nodes_.emplace(key, std::move(nd));
  return ref;
}

VertexId Sparsifier::ensure_copy(Node& nd, VertexId gv) {
  auto it = nd.copies.find(gv);
  if (it != nd.copies.end()) return it->second.local;
  const VertexId local = nd.locals->acquire();
  nd.owner[local] = gv;
  nd.copies.emplace(gv, Copy{local, 0});
  return local;
}

StepReport Sparsifier::snap(const Node& nd) const {
  if (!cfg_.parallel) return StepReport{};
  return const_cast<DynamicMsf&>(*nd.graph).engine().pram()->totals();
}

std::uint32_t Sparsifier::pool_of(const Node& nd) const {
  if (!cfg_.parallel) return 1;
  const Engine& eng = nd.graph->engine();
  return std::max(eng.J(), eng.par_slot_span());
}

void Sparsifier::grow(Node& nd, StepReport* cost) {
  nd.max_edges = std::max<std::uint32_t>(8, nd.max_edges * 2);
  MsfConfig mc;
  mc.n = nd.cap;
  mc.max_edges = nd.max_edges;
  mc.mode = cfg_.parallel ? EngineMode::Par : EngineMode::Seq;
  mc.pram_threads = cfg_.pram_threads;
  mc.pram_abort = cfg_.pram_abort;
  if (cfg_.parallel && nd.graph)
    retired_violations_ += nd.graph->engine().pram()->totals().violations;
  if (nd.graph)
    retired_max_surgery_ = std::max(
        retired_max_surgery_, nd.graph->engine().max_surgery_per_euler_op());
  auto next = std::make_unique<DynamicMsf>(mc);
  // Replaying the live set ascending by id reproduces the forest exactly:
  // the forest is a pure function of the live edge set.
  for (const auto& [id, e] : nd.edges)
    next->insert_with_id(id, nd.copies.at(e.u).local, nd.copies.at(e.v).local,
                         e.w);
  nd.graph = std::move(next);
  if (cost && cfg_.parallel)
    *cost = add(*cost, nd.graph->engine().pram()->totals());
}

MsfDelta Sparsifier::node_insert(Node& nd, const Edge& e, StepReport* cost) {
  if (nd.edges.size() >= nd.max_edges) grow(nd, cost);
  StepReport base = snap(nd);
  const VertexId lu = ensure_copy(nd, e.u);
  const VertexId lv = ensure_copy(nd, e.v);
  nd.graph->insert_with_id(e.id, lu, lv, e.w);
  nd.copies.at(e.u).deg++;
  nd.copies.at(e.v).deg++;
  nd.edges.emplace(e.id, e);
  if (cost) *cost = add(*cost, snap(nd) - base);
  return nd.graph->last_delta();
}

MsfDelta Sparsifier::node_erase(Node& nd, EdgeId id, StepReport* cost) {
  StepReport base = snap(nd);
  const Edge e = nd.edges.at(id);
  MsfDelta d = nd.graph->erase(id);
  auto& cu = nd.copies.at(e.u);
  auto& cv = nd.copies.at(e.v);
  DMSF_CHECK(cu.deg > 0 && cv.deg > 0, "copy degree underflow");
  --cu.deg;
  --cv.deg;
  nd.edges.erase(id);
  if (cost) *cost = add(*cost, snap(nd) - base);
  return d;
}

void Sparsifier::begin_op() {
  last_delta_ = MsfDelta{};
  last_step_ = StepReport{};
  std::fill(updates_this_op_.begin(), updates_this_op_.end(), 0u);
  vcopy_.clear();
}

void Sparsifier::serial_charge(std::uint64_t steps) {
  if (!cfg_.parallel) return;
  last_step_.depth += steps;
  last_step_.work += steps;
  last_step_.max_processors = std::max<std::uint32_t>(
      last_step_.max_processors, 1);
}

void Sparsifier::fold_phase(const std::vector<Unit>& units) {
  if (!cfg_.parallel || units.empty()) return;
  std::uint64_t depth = 0, lc = 0, procs = 0;
  for (const Unit& un : units) {
    depth = std::max(depth, un.rep.depth);
    lc = std::max(lc, un.rep.lc_depth);
    last_step_.work += un.rep.work;
    last_step_.violations += un.rep.violations;
    procs += un.pool;
  }
  last_step_.depth += depth;
  last_step_.lc_depth += lc;
  last_step_.max_processors = std::max<std::uint32_t>(
      last_step_.max_processors, static_cast<std::uint32_t>(procs));
}

void Sparsifier::end_op(const std::vector<std::uint64_t>& touched,
                        const std::vector<MsfDelta>& top_parts) {
  // Teardown waits until here: a reinsertion can revive a node that lost
  // its last edge earlier in the same op.
  std::vector<std::uint64_t> keys = touched;
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  for (std::uint64_t key : keys) {
    auto it = nodes_.find(key);
    if (it == nodes_.end()) continue;
    Node& nd = *it->second;
    if (nd.edges.empty()) {
      DMSF_CHECK(nd.graph->num_edges() == 0, "engine/mirror teardown drift");
      if (cfg_.parallel)
        retired_violations_ +=
            nd.graph->engine().pram()->totals().violations;
      retired_max_surgery_ = std::max(
          retired_max_surgery_, nd.graph->engine().max_surgery_per_euler_op());
      nodes_.erase(it);
      continue;
    }
    for (auto ci = nd.copies.begin(); ci != nd.copies.end();) {
      if (ci->second.deg == 0) {
        nd.owner[ci->second.local] = kNoId32;
        nd.locals->release(ci->second.local);
        ci = nd.copies.erase(ci);
      } else {
        ++ci;
      }
    }
  }
  last_delta_ = net_deltas(top_parts);
  std::uint32_t worst = 0;
  for (std::uint32_t c : updates_this_op_) worst = std::max(worst, c);
  max_level_updates_ = std::max(max_level_updates_, worst);
  DMSF_CHECK(worst <= 3, "per-level engine update budget exceeded");
  peak_procs_ = std::max(peak_procs_, last_step_.max_processors);
}

EdgeRecord Sparsifier::insert(VertexId u, VertexId v, std::int64_t w) {
  if (u == v) throw std::invalid_argument("loop rejected");
  if (u >= cfg_.n || v >= cfg_.n)
    throw std::invalid_argument("vertex out of range");
  if (edges_.size() >= cfg_.max_edges)
    throw std::runtime_error("live edge capacity exceeded");
  const EdgeId id = next_id_++;
  const Edge e{id, u, v, w};
  begin_op();
  // Serial: one walk down the interval-pair path (locating nodes, pinning
  // local copies).
  serial_charge(depth_ + 1);

  // Read-only probes compute every level's exact update set before any
  // level mutates: the edge reaches level l+1 iff it would enter level l's
  // forest, and level l+1 additionally unhooks whatever level l displaced.
  struct Plan {
    Node* nd = nullptr;
    bool expect_enters = false;
    EdgeId expect_displaced = kNoId64;
    EdgeId erase_id = kNoId64;
  };
  std::vector<Plan> plan;
  std::vector<Unit> probe_units;
  bool present = true;
  EdgeId carry = kNoId64;
  for (std::uint32_t lv = 0; lv <= depth_ && present; ++lv) {
    Plan p;
    p.erase_id = carry;
    p.nd = find(path_key(lv, u, v));
    Engine::Probe pr;
    pr.enters = true;
    if (p.nd != nullptr) {
      auto iu = p.nd->copies.find(u);
      auto iv = p.nd->copies.find(v);
      if (iu != p.nd->copies.end() && iv != p.nd->copies.end()) {
        pr = p.nd->graph->probe_insert(id, iu->second.local,
                                       iv->second.local, w);
        if (cfg_.parallel) {
          Unit un;
          un.rep.depth = un.rep.work = un.rep.lc_depth = pr.lc_steps;
          probe_units.push_back(un);
        }
      }
      // A missing endpoint copy means the edge cannot close a cycle here:
      // it enters, displacing nothing.
    }
    p.expect_enters = pr.enters;
    p.expect_displaced = pr.displaced;
    plan.push_back(p);
    present = pr.enters;
    carry = pr.displaced;
  }
  fold_phase(probe_units);

  // Single mutate phase: each planned level applies its own updates, and
  // the outcome must be exactly what its probe promised (the insert runs
  // first, so it sees the same state the probe saw; the displaced edge from
  // below then leaves as a non-tree edge, changing nothing).
  std::vector<Unit> units;
  std::vector<MsfDelta> top_parts;
  std::vector<std::uint64_t> touched;
  for (std::uint32_t lv = 0; lv < plan.size(); ++lv) {
    Plan& p = plan[lv];
    Node& nd = p.nd != nullptr ? *p.nd : materialize(lv, u, v);
    touched.push_back(pack(nd.level, nd.a, nd.b));
    Unit un;
    un.pool = pool_of(nd);
    MsfDelta di = node_insert(nd, e, cfg_.parallel ? &un.rep : nullptr);
    ++updates_this_op_[lv];
    const bool entered =
        std::find(di.added.begin(), di.added.end(), id) != di.added.end();
    DMSF_CHECK(entered == p.expect_enters, "probe mispredicted entry");
    if (p.expect_displaced != kNoId64) {
      DMSF_CHECK(di.removed.size() == 1 && di.removed[0] == p.expect_displaced,
                 "probe mispredicted displacement");
    } else {
      DMSF_CHECK(di.removed.empty(), "unplanned displacement");
    }
    if (p.erase_id != kNoId64) {
      DMSF_CHECK(nd.edges.count(p.erase_id) != 0,
                 "displaced edge absent one level up");
      MsfDelta de =
          node_erase(nd, p.erase_id, cfg_.parallel ? &un.rep : nullptr);
      ++updates_this_op_[lv];
      DMSF_CHECK(de.empty(), "displaced edge still in the forest above");
    }
    if (cfg_.parallel) units.push_back(un);
    if (lv == depth_) top_parts.push_back(di);
    vcopy_.push_back(
        CopyPair{lv, nd.copies.at(u).local, nd.copies.at(v).local});
  }
  fold_phase(units);
  edges_.emplace(id, e);
  end_op(touched, top_parts);

  EdgeRecord rec;
  rec.id = id;
  rec.u = u;
  rec.v = v;
  rec.w = w;
  const Node* top = find(pack(depth_, 0, 0));
  rec.is_tree = top != nullptr && top->graph->has_edge(id) &&
                top->graph->is_tree(id);
  return rec;
}

MsfDelta Sparsifier::erase(EdgeId id) {
  auto reg = edges_.find(id);
  if (reg == edges_.end()) throw std::invalid_argument("no such edge");
  const Edge e = reg->second;
  edges_.erase(reg);
  begin_op();

  // Serial: walk the edge's copies upward — it occupies a contiguous level
  // prefix, a tree edge everywhere except possibly the highest level.
  std::vector<Node*> holding;
  std::vector<char> tree_at;
  for (std::uint32_t lv = 0; lv <= depth_; ++lv) {
    Node* nd = find(path_key(lv, e.u, e.v));
    if (nd == nullptr || nd->edges.count(id) == 0) break;
    holding.push_back(nd);
    tree_at.push_back(nd->graph->is_tree(id) ? 1 : 0);
  }
  DMSF_CHECK(!holding.empty(), "live edge without a leaf");
  for (std::size_t lv = 0; lv + 1 < tree_at.size(); ++lv)
    DMSF_CHECK(tree_at[lv] != 0, "non-tree edge present above its top level");
  serial_charge(depth_ + 1);
  const int top_tree =
      !tree_at.empty() && tree_at.back() != 0
          ? static_cast<int>(tree_at.size()) - 1
          : static_cast<int>(tree_at.size()) - 2;

  // Phase 1: every holding level unhooks the edge concurrently; a level
  // that loses a tree edge may promote a replacement from its own edges.
  redges_.assign(depth_ + 1, Promoted{});
  std::vector<Unit> units;
  std::vector<MsfDelta> top_parts;
  std::vector<std::uint64_t> touched;
  for (std::size_t lv = 0; lv < holding.size(); ++lv) {
    Node& nd = *holding[lv];
    touched.push_back(pack(nd.level, nd.a, nd.b));
    Unit un;
    un.pool = pool_of(nd);
    MsfDelta d = node_erase(nd, id, cfg_.parallel ? &un.rep : nullptr);
    ++updates_this_op_[lv];
    const bool lost =
        std::find(d.removed.begin(), d.removed.end(), id) != d.removed.end();
    DMSF_CHECK(lost == (tree_at[lv] != 0), "tree flag drifted");
    DMSF_CHECK(d.added.size() <= 1, "several replacements for one removal");
    if (!d.added.empty()) {
      DMSF_CHECK(lost, "replacement without a tree removal");
      redges_[lv] = Promoted{true, nd.edges.at(d.added[0])};
    }
    if (cfg_.parallel) units.push_back(un);
    if (nd.level == depth_) top_parts.push_back(d);
  }
  fold_phase(units);

  // Serial: prefix minima over the promotions decide each level's arrival.
  serial_charge(holding.size() + 1);

  // Phase 2: reinsertion. Level l gains exactly what entered level l-1's
  // forest, and that is always the lightest promotion from levels below l:
  // a promotion only yields to a lighter promotion climbing past it. The
  // receiving node is the deleted edge's own path node (its intervals
  // contain the promoted edge's endpoints), revived if phase 1 emptied it.
  // Affected levels and their inputs are all known before any of them
  // mutates, so they form one concurrent phase.
  std::vector<Unit> units2;
  Promoted final_prev = redges_[0];  // level 0's net gain
  Promoted run_min = redges_[0];
  const std::uint32_t hi = std::min<std::uint32_t>(
      static_cast<std::uint32_t>(std::max(top_tree + 1, 0)), depth_);
  for (std::uint32_t lv = 1; lv <= hi; ++lv) {
    Promoted mine = redges_[lv];
    if (run_min.present) {
      DMSF_CHECK(final_prev.present && final_prev.edge.id == run_min.edge.id,
                 "prefix minimum disagrees with the child forest's gain");
      const Edge m = run_min.edge;
      Node& nd = materialize(lv, e.u, e.v);
      DMSF_CHECK(path_key(lv, m.u, m.v) == pack(nd.level, nd.a, nd.b),
                 "promotion left the deleted edge's path");
      touched.push_back(pack(nd.level, nd.a, nd.b));
      Unit un;
      un.pool = pool_of(nd);
      MsfDelta d = node_insert(nd, m, cfg_.parallel ? &un.rep : nullptr);
      ++updates_this_op_[lv];
      const bool entered =
          std::find(d.added.begin(), d.added.end(), m.id) != d.added.end();
      if (entered) {
        if (mine.present) {
          // It can only displace this level's own provisional promotion,
          // which entered the forest within this op and was never seen by
          // any level above.
          DMSF_CHECK(d.removed.size() == 1 && d.removed[0] == mine.edge.id,
                     "reinsertion displaced a pre-existing tree edge");
        } else {
          DMSF_CHECK(d.removed.empty(),
                     "reinsertion displaced a pre-existing tree edge");
        }
        final_prev = Promoted{true, m};
      } else {
        DMSF_CHECK(d.removed.empty(), "non-entering insert removed an edge");
        final_prev = mine;
      }
      if (cfg_.parallel) units2.push_back(un);
      if (nd.level == depth_) top_parts.push_back(d);
    } else {
      final_prev = mine;
    }
    if (redges_[lv].present &&
        (!run_min.present || lighter(redges_[lv].edge, run_min.edge)))
      run_min = redges_[lv];
  }
  fold_phase(units2);

  // Serial: teardown sweep over the touched path.
  serial_charge(touched.size() + 1);
  end_op(touched, top_parts);
  return last_delta_;
}

std::vector<EdgeId> Sparsifier::msf() const {
  const Node* top = find(pack(depth_, 0, 0));
  return top != nullptr ? top->graph->msf() : std::vector<EdgeId>{};
}

std::int64_t Sparsifier::msf_weight_sum() const {
  const Node* top = find(pack(depth_, 0, 0));
  return top != nullptr ? top->graph->msf_weight_sum() : 0;
}

std::vector<Sparsifier::NodeView> Sparsifier::nodes() const {
  std::vector<NodeView> views;
  views.reserve(nodes_.size());
  for (const auto& [key, nd] : nodes_) {
    NodeView v;
    v.level = nd->level;
    interval(nd->level, nd->a, &v.alpha_lo, &v.alpha_hi);
    interval(nd->level, nd->b, &v.beta_lo, &v.beta_hi);
    v.edge_count = nd->edges.size();
    v.graph = nd->graph.get();
    views.push_back(v);
  }
  std::sort(views.begin(), views.end(),
            [](const NodeView& x, const NodeView& y) {
              if (x.level != y.level) return x.level > y.level;
              if (x.alpha_lo != y.alpha_lo) return x.alpha_lo < y.alpha_lo;
              return x.beta_lo < y.beta_lo;
            });
  return views;
}

std::vector<Sparsifier::NodeView> Sparsifier::level_nodes(
    std::uint32_t level) const {
  std::vector<NodeView> out;
  for (const NodeView& v : nodes())
    if (v.level == level) out.push_back(v);
  return out;
}

std::vector<const DynamicMsf*> Sparsifier::level_engines(
    std::uint32_t level) const {
  std::vector<const DynamicMsf*> out;
  for (const NodeView& v : level_nodes(level)) out.push_back(v.graph);
  return out;
}

std::uint32_t Sparsifier::max_surgery() const {
  std::uint32_t worst = retired_max_surgery_;
  for (const auto& [key, nd] : nodes_)
    worst = std::max(worst, nd->graph->engine().max_surgery_per_euler_op());
  return worst;
}

std::uint64_t Sparsifier::violations() const {
  std::uint64_t total = retired_violations_;
  if (cfg_.parallel)
    for (const auto& [key, nd] : nodes_)
      total += const_cast<DynamicMsf&>(*nd->graph)
                   .engine()
                   .pram()
                   ->totals()
                   .violations;
  return total;
}

void Sparsifier::dump(std::ostream& os) const {
  for (const NodeView& v : nodes()) {
    os << "node level=" << v.level << " alpha=" << v.alpha_lo << ".."
       << v.alpha_hi << " beta=" << v.beta_lo << ".." << v.beta_hi
       << " edges=" << v.edge_count << " msf=";
    const std::vector<EdgeId> ids = v.graph->msf();
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (i != 0) os << ',';
      os << ids[i];
    }
    os << '\n';
  }
}

void Sparsifier::audit(bool deep) const {
  std::map<std::uint64_t, std::vector<EdgeId>> by_leaf;
  for (const auto& [id, e] : edges_)
    by_leaf[path_key(0, e.u, e.v)].push_back(id);
  std::size_t leaf_edges = 0;
  for (const auto& [key, ndp] : nodes_) {
    const Node& nd = *ndp;
    DMSF_CHECK(key == pack(nd.level, nd.a, nd.b), "node key drift");
    DMSF_CHECK(nd.level <= depth_ && nd.a <= nd.b, "malformed node shape");
    DMSF_CHECK(nd.level > 0 || nd.a < nd.b, "leaf self-pair");
    DMSF_CHECK(!nd.edges.empty(), "empty node persisted");
    DMSF_CHECK(nd.graph->num_edges() == nd.edges.size(),
               "engine/mirror edge count drift");
    std::map<VertexId, std::uint32_t> deg;
    for (const auto& [id, e] : nd.edges) {
      DMSF_CHECK(nd.graph->has_edge(id), "mirror edge missing from engine");
      auto g = edges_.find(id);
      DMSF_CHECK(g != edges_.end() && g->second.u == e.u &&
                     g->second.v == e.v && g->second.w == e.w,
                 "mirror edge drifted from the registry");
      ++deg[e.u];
      ++deg[e.v];
    }
    DMSF_CHECK(deg.size() == nd.copies.size(), "copy census mismatch");
    for (const auto& [gv, c] : nd.copies) {
      auto dv = deg.find(gv);
      DMSF_CHECK(dv != deg.end() && dv->second == c.deg, "copy degree drift");
      DMSF_CHECK(c.deg > 0, "unused copy persisted");
      DMSF_CHECK(c.local < nd.cap && nd.owner[c.local] == gv,
                 "copy owner drift");
      const std::uint32_t iv = gv >> nd.level;
      DMSF_CHECK(iv == nd.a || iv == nd.b, "copy outside the node intervals");
    }
    DMSF_CHECK(nd.locals->in_use() == nd.copies.size(), "local pool drift");

    // Exact closure: this node's edge set is the union of its children's
    // forests (leaves: all live edges of the vertex pair).
    std::vector<EdgeId> expect;
    if (nd.level == 0) {
      auto bl = by_leaf.find(key);
      DMSF_CHECK(bl != by_leaf.end(), "leaf without live edges");
      expect = bl->second;
      leaf_edges += expect.size();
    } else {
      const std::uint32_t ca[2] = {2 * nd.a, 2 * nd.a + 1};
      const std::uint32_t cb[2] = {2 * nd.b, 2 * nd.b + 1};
      std::set<std::uint64_t> seen;
      for (std::uint32_t x : ca)
        for (std::uint32_t y : cb) {
          std::uint32_t a2 = std::min(x, y), b2 = std::max(x, y);
          if (!seen.insert(pack(nd.level - 1, a2, b2)).second) continue;
          if (const Node* child = find(pack(nd.level - 1, a2, b2))) {
            const std::vector<EdgeId> ids = child->graph->msf();
            expect.insert(expect.end(), ids.begin(), ids.end());
          }
        }
      std::sort(expect.begin(), expect.end());
      for (std::size_t i = 1; i < expect.size(); ++i)
        DMSF_CHECK(expect[i - 1] != expect[i],
                   "edge contributed by two children");
    }
    std::vector<EdgeId> have;
    have.reserve(nd.edges.size());
    for (const auto& [id, e] : nd.edges) have.push_back(id);
    DMSF_CHECK(have == expect, "closure violated");
    if (deep) nd.graph->audit();
  }
  DMSF_CHECK(leaf_edges == edges_.size(), "leaf census mismatch");
  for (const auto& [id, e] : edges_)
    DMSF_CHECK(find(path_key(0, e.u, e.v)) != nullptr,
               "live edge without a leaf");
  if (!edges_.empty())
    DMSF_CHECK(find(pack(depth_, 0, 0)) != nullptr, "top node missing");
}

}  // namespace dmsf
