#include "dmsf/msf.hpp"

#include <stdexcept>

namespace dmsf {

namespace {

EngineConfig engine_config(const MsfConfig& cfg) {
  EngineConfig ec;
  ec.n = cfg.n + 2 * cfg.max_edges;  // base vertices plus chain capacity
  // Live engine edges: user edges plus one chain link per extra vertex.
  ec.max_edges = 3 * cfg.max_edges + 2;
  ec.mode = cfg.mode;
  ec.k_override = cfg.k_override;
  ec.pram_threads = cfg.pram_threads;
  ec.pram_abort = cfg.pram_abort;
  return ec;
}

}  // namespace

DynamicMsf::DynamicMsf(const MsfConfig& cfg)
    : n_(cfg.n),
      cfg_(cfg),
      eng_(engine_config(cfg)),
      extra_pool_(2 * cfg.max_edges, "chain vertices"),
      chains_(cfg.n),
      deg_(cfg.n, 0),
      host_edge_(cfg.n + 2 * cfg.max_edges, kNoId64),
      phantom_of_(cfg.n + 2 * cfg.max_edges, kNoId64) {
  if (cfg.n == 0) throw std::invalid_argument("vertex capacity must be positive");
  for (VertexId u = 0; u < n_; ++u) chains_[u] = {u};
}

VertexId DynamicMsf::grow_chain(VertexId u, std::vector<MsfDelta>& parts) {
  if (deg_[u] == 0) return chains_[u][0];
  const VertexId prev = chains_[u].back();
  const VertexId x = n_ + extra_pool_.acquire();
  const EdgeId pid = kPhantomBase | x;
  phantom_of_[x] = pid;
  parts.push_back(eng_.insert(pid, prev, x, TotalWeight::phantom(pid)));
  chains_[u].push_back(x);
  return x;
}

void DynamicMsf::shrink_chain(VertexId u, VertexId freed_host,
                              std::vector<MsfDelta>& parts) {
  auto& ch = chains_[u];
  if (ch.size() <= 1) return;  // degree was <= 1: nothing to trim
  const VertexId t = ch.back();
  if (t != freed_host) {
    // The tail still hosts an edge: move it into the freed slot so the
    // chain can shrink at the tail.
    const EdgeId f = host_edge_[t];
    DMSF_CHECK(f != kNoId64, "chain tail hosts nothing");
    Rec& fr = recs_.at(f);
    parts.push_back(eng_.erase(f));
    if (fr.host_u == t) fr.host_u = freed_host;
    else {
      DMSF_CHECK(fr.host_v == t, "hosted edge does not know its host");
      fr.host_v = freed_host;
    }
    host_edge_[t] = kNoId64;
    host_edge_[freed_host] = f;
    parts.push_back(
        eng_.insert(f, fr.host_u, fr.host_v, TotalWeight::real(fr.w, f)));
  }
  parts.push_back(eng_.erase(phantom_of_[t]));
  phantom_of_[t] = kNoId64;
  extra_pool_.release(t - n_);
  ch.pop_back();
}

MsfDelta DynamicMsf::net_user_delta(const std::vector<MsfDelta>& parts) const {
  MsfDelta net = net_deltas(parts);
  MsfDelta out;
  for (EdgeId id : net.added)
    if (id < kPhantomBase) out.added.push_back(id);
  for (EdgeId id : net.removed)
    if (id < kPhantomBase) out.removed.push_back(id);
  return out;
}

EdgeRecord DynamicMsf::insert(VertexId u, VertexId v, std::int64_t w) {
  return insert_with_id(next_id_, u, v, w);
}

EdgeRecord DynamicMsf::insert_with_id(EdgeId id, VertexId u, VertexId v,
                                      std::int64_t w) {
  if (u == v) throw std::invalid_argument("loop rejected");
  if (u >= n_ || v >= n_) throw std::invalid_argument("vertex out of range");
  if (id >= kPhantomBase) throw std::invalid_argument("edge id too large");
  if (recs_.count(id)) throw std::invalid_argument("duplicate edge id");
  if (recs_.size() >= cfg_.max_edges)
    throw std::runtime_error("live edge capacity exceeded");
  if (id >= next_id_) next_id_ = id + 1;
  std::vector<MsfDelta> parts;
  const VertexId hu = grow_chain(u, parts);
  const VertexId hv = grow_chain(v, parts);
  ++deg_[u];
  ++deg_[v];
  recs_[id] = Rec{u, v, w, hu, hv};
  host_edge_[hu] = id;
  host_edge_[hv] = id;
  parts.push_back(eng_.insert(id, hu, hv, TotalWeight::real(w, id)));
  last_delta_ = net_user_delta(parts);
  return record(id);
}

MsfDelta DynamicMsf::erase(EdgeId id) {
  auto it = recs_.find(id);
  if (it == recs_.end()) throw std::invalid_argument("no such edge");
  const Rec rec = it->second;
  std::vector<MsfDelta> parts;
  parts.push_back(eng_.erase(id));
  recs_.erase(it);
  host_edge_[rec.host_u] = kNoId64;
  host_edge_[rec.host_v] = kNoId64;
  --deg_[rec.u];
  --deg_[rec.v];
  shrink_chain(rec.u, rec.host_u, parts);
  shrink_chain(rec.v, rec.host_v, parts);
  last_delta_ = net_user_delta(parts);
  return last_delta_;
}

Engine::Probe DynamicMsf::probe_insert(EdgeId id, VertexId u, VertexId v,
                                       std::int64_t w) {
  if (u == v) throw std::invalid_argument("loop rejected");
  if (u >= n_ || v >= n_) throw std::invalid_argument("vertex out of range");
  return eng_.probe_insert(chains_[u][0], chains_[v][0],
                           TotalWeight::real(w, id));
}

EdgeRecord DynamicMsf::record(EdgeId id) const {
  const Rec& r = recs_.at(id);
  EdgeRecord out;
  out.id = id;
  out.u = r.u;
  out.v = r.v;
  out.w = r.w;
  out.is_tree = eng_.is_tree(id);
  out.host_u = r.host_u;
  out.host_v = r.host_v;
  return out;
}

bool DynamicMsf::is_tree(EdgeId id) const {
  if (!recs_.count(id)) throw std::invalid_argument("no such edge");
  return eng_.is_tree(id);
}

bool DynamicMsf::connected(VertexId u, VertexId v) {
  if (u >= n_ || v >= n_) throw std::invalid_argument("vertex out of range");
  return eng_.connected(chains_[u][0], chains_[v][0]);
}

std::vector<EdgeId> DynamicMsf::msf() const {
  std::vector<EdgeId> out;
  for (EdgeId id : eng_.msf_edges())
    if (id < kPhantomBase) out.push_back(id);
  return out;
}

std::int64_t DynamicMsf::msf_weight_sum() const {
  std::int64_t s = 0;
  for (EdgeId id : msf()) s += recs_.at(id).w;
  return s;
}

void DynamicMsf::audit() const {
  eng_.audit();
  std::vector<std::uint32_t> rdeg(host_edge_.size(), 0);
  std::vector<std::uint32_t> hosted(host_edge_.size(), 0);
  for (const auto& [id, r] : recs_) {
    ++rdeg[r.host_u];
    ++rdeg[r.host_v];
    ++hosted[r.host_u];
    ++hosted[r.host_v];
    DMSF_CHECK(host_edge_[r.host_u] == id && host_edge_[r.host_v] == id,
               "host mapping out of sync");
  }
  std::uint32_t chain_links = 0;
  for (VertexId u = 0; u < n_; ++u) {
    const auto& ch = chains_[u];
    DMSF_CHECK(ch.size() == std::max<std::size_t>(1, deg_[u]),
               "chain length != max(1, degree)");
    DMSF_CHECK(ch[0] == u, "chain must start at its user vertex");
    for (std::size_t i = 0; i < ch.size(); ++i) {
      if (i > 0) {
        const EdgeId pid = phantom_of_[ch[i]];
        DMSF_CHECK(pid != kNoId64 && eng_.has_edge(pid),
                   "chain link edge missing");
        DMSF_CHECK(eng_.is_tree(pid), "chain link edge left the forest");
        rdeg[ch[i]] += 1;
        rdeg[ch[i - 1]] += 1;
        ++chain_links;
      }
      if (deg_[u] > 0) {
        DMSF_CHECK(hosted[ch[i]] == 1, "chain vertex must host exactly one edge");
      }
    }
  }
  for (std::size_t x = 0; x < rdeg.size(); ++x) {
    DMSF_CHECK(rdeg[x] <= 3, "reduced-graph degree exceeds three");
    DMSF_CHECK(hosted[x] <= 1, "vertex hosts more than one real edge");
  }
  DMSF_CHECK(eng_.num_edges() == recs_.size() + chain_links,
             "engine edge count out of sync");
}

}  // namespace dmsf
