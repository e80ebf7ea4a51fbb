#include "dmsf/oracle.hpp"

#include <algorithm>

namespace dmsf {

std::vector<EdgeId> kruskal_msf(std::size_t n, const std::vector<Edge>& edges) {
  std::vector<const Edge*> order;
  order.reserve(edges.size());
  for (const Edge& e : edges) order.push_back(&e);
  std::sort(order.begin(), order.end(), [](const Edge* a, const Edge* b) {
    return TotalWeight::real(a->w, a->id) < TotalWeight::real(b->w, b->id);
  });
  UnionFind uf(n);
  std::vector<EdgeId> result;
  for (const Edge* e : order) {
    if (e->u != e->v && uf.unite(e->u, e->v)) result.push_back(e->id);
  }
  std::sort(result.begin(), result.end());
  return result;
}

std::vector<EdgeId> OracleMsf::msf() const {
  std::vector<Edge> edges;
  edges.reserve(live_.size());
  for (const auto& [id, e] : live_) edges.push_back(e);
  return kruskal_msf(n_, edges);
}

std::int64_t OracleMsf::msf_weight_sum() const {
  std::vector<EdgeId> ids = msf();
  std::int64_t total = 0;
  for (EdgeId id : ids) total += live_.at(id).w;
  return total;
}

bool OracleMsf::connected(VertexId u, VertexId v) const {
  UnionFind uf(n_);
  for (const auto& [id, e] : live_) uf.unite(e.u, e.v);
  return uf.connected(u, v);
}

}  // namespace dmsf
