#pragma once

#include <cstdint>
#include <map>
#include <numeric>
#include <vector>

#include "dmsf/ids.hpp"
#include "dmsf/weight.hpp"

namespace dmsf {

// Union-find with path halving and union by size.
class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n), size_(n, 1) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  // Returns false if x and y were already connected.
  bool unite(std::size_t x, std::size_t y) {
    x = find(x);
    y = find(y);
    if (x == y) return false;
    if (size_[x] < size_[y]) std::swap(x, y);
    parent_[y] = x;
    size_[x] += size_[y];
    return true;
  }

  bool connected(std::size_t x, std::size_t y) { return find(x) == find(y); }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> size_;
};

// Kruskal on the given edges under the (tier, value, id) total order.
// Returns the ids of the minimum-spanning-forest edges, ascending.
std::vector<EdgeId> kruskal_msf(std::size_t n, const std::vector<Edge>& edges);

// Reference maintainer: stores the live edge set and recomputes the forest
// from scratch on demand.
class OracleMsf {
 public:
  explicit OracleMsf(std::size_t n) : n_(n) {}

  void insert(const Edge& e) { live_[e.id] = e; }
  void erase(EdgeId id) { live_.erase(id); }
  bool has(EdgeId id) const { return live_.count(id) != 0; }
  const std::map<EdgeId, Edge>& live() const { return live_; }

  std::vector<EdgeId> msf() const;
  std::int64_t msf_weight_sum() const;
  bool connected(VertexId u, VertexId v) const;

 private:
  std::size_t n_;
  std::map<EdgeId, Edge> live_;
};

}  // namespace dmsf
