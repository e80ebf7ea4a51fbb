#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "dmsf/ids.hpp"
#include "dmsf/weight.hpp"

namespace dmsf {

// Splay-based link-cut forest over the reduced vertices. Every tree edge is
// itself a node sitting between its endpoints, so a path maximum hands back
// the edge's identity directly. Vertex nodes carry no weight and never win
// the maximum. Splay rotations are tallied in steps(); the parallel engine
// books them against its serial processor under a separate counter so the
// depth accounting can show them included or excluded.
class LinkCutForest {
 public:
  explicit LinkCutForest(std::uint32_t num_vertices, std::uint32_t max_edges)
      : edge_pool_(max_edges, "link-cut edge nodes"), num_vertices_(num_vertices) {
    nodes_.resize(num_vertices);
  }

  // Handle of the node representing edge `id`; valid until cut_edge.
  std::uint32_t link_edge(VertexId u, VertexId v, TotalWeight w, EdgeId id) {
    if (u == v) throw std::invalid_argument("link_edge: loop");
    std::uint32_t e = num_vertices_ + edge_pool_.acquire();
    if (e >= nodes_.size()) nodes_.resize(e + 1);
    Node& en = nodes_[e];
    en = Node{};
    en.is_edge = true;
    en.w = w;
    en.eid = id;
    en.best = e;
    attach_root(e, u);
    attach_root(v, e);
    return e;
  }

  void cut_edge(std::uint32_t e, VertexId u, VertexId v) {
    cut_adjacent(e, u);
    cut_adjacent(e, v);
    edge_pool_.release(e - num_vertices_);
  }

  bool connected(VertexId u, VertexId v) {
    if (u == v) return true;
    return find_root(u) == find_root(v);
  }

  // Maximum-weight edge on the tree path between two distinct connected
  // vertices (ties resolve upward through the id component of the order).
  struct PathMax {
    EdgeId edge = 0;
    TotalWeight w;
    std::uint32_t node = kNoId32;
  };
  PathMax path_max(VertexId u, VertexId v) {
    if (u == v || !connected(u, v))
      throw std::invalid_argument("path_max: endpoints not joined by a path");
    evert(u);
    access(v);
    std::uint32_t b = nodes_[v].best;
    if (b == kNoId32) throw std::logic_error("path_max: path without edges");
    return PathMax{nodes_[b].eid, nodes_[b].w, b};
  }

  std::uint64_t steps() const { return steps_; }
  void reset_steps() { steps_ = 0; }

 private:
  struct Node {
    std::uint32_t par = kNoId32;
    std::uint32_t ch[2] = {kNoId32, kNoId32};
    bool flip = false;
    bool is_edge = false;
    TotalWeight w{};
    EdgeId eid = 0;
    std::uint32_t best = kNoId32;  // heaviest edge node in the splay subtree
  };

  bool is_splay_root(std::uint32_t x) const {
    std::uint32_t p = nodes_[x].par;
    return p == kNoId32 || (nodes_[p].ch[0] != x && nodes_[p].ch[1] != x);
  }

  void push_down(std::uint32_t x) {
    Node& n = nodes_[x];
    if (!n.flip) return;
    std::swap(n.ch[0], n.ch[1]);
    for (std::uint32_t c : n.ch) {
      if (c != kNoId32) nodes_[c].flip = !nodes_[c].flip;
    }
    n.flip = false;
  }

  void pull(std::uint32_t x) {
    Node& n = nodes_[x];
    std::uint32_t best = n.is_edge ? x : kNoId32;
    for (std::uint32_t c : n.ch) {
      if (c == kNoId32) continue;
      std::uint32_t cb = nodes_[c].best;
      if (cb == kNoId32) continue;
      if (best == kNoId32 || nodes_[best].w < nodes_[cb].w) best = cb;
    }
    n.best = best;
  }

  void rotate(std::uint32_t x) {
    std::uint32_t p = nodes_[x].par;
    std::uint32_t g = nodes_[p].par;
    int side = nodes_[p].ch[1] == x ? 1 : 0;
    std::uint32_t mid = nodes_[x].ch[1 - side];
    if (!is_splay_root(p)) nodes_[g].ch[nodes_[g].ch[1] == p ? 1 : 0] = x;
    nodes_[x].par = g;
    nodes_[x].ch[1 - side] = p;
    nodes_[p].par = x;
    nodes_[p].ch[side] = mid;
    if (mid != kNoId32) nodes_[mid].par = p;
    pull(p);
    pull(x);
    ++steps_;
  }

  void splay(std::uint32_t x) {
    // settle pending reversals from the splay root down to x
    scratch_.clear();
    std::uint32_t v = x;
    scratch_.push_back(v);
    while (!is_splay_root(v)) {
      v = nodes_[v].par;
      scratch_.push_back(v);
    }
    for (std::size_t i = scratch_.size(); i-- > 0;) push_down(scratch_[i]);
    while (!is_splay_root(x)) {
      std::uint32_t p = nodes_[x].par;
      if (!is_splay_root(p)) {
        std::uint32_t g = nodes_[p].par;
        bool zigzig = (nodes_[g].ch[1] == p) == (nodes_[p].ch[1] == x);
        rotate(zigzig ? p : x);
      }
      rotate(x);
    }
  }

  void access(std::uint32_t x) {
    splay(x);
    nodes_[x].ch[1] = kNoId32;
    pull(x);
    while (nodes_[x].par != kNoId32) {
      std::uint32_t y = nodes_[x].par;
      splay(y);
      nodes_[y].ch[1] = x;
      pull(y);
      splay(x);
    }
  }

  void evert(std::uint32_t x) {
    access(x);
    nodes_[x].flip = !nodes_[x].flip;
    push_down(x);
  }

  std::uint32_t find_root(std::uint32_t x) {
    access(x);
    while (nodes_[x].ch[0] != kNoId32) {
      push_down(x);
      x = nodes_[x].ch[0];
    }
    splay(x);
    return x;
  }

  // Hang x's (everted) tree below y.
  void attach_root(std::uint32_t x, std::uint32_t y) {
    evert(x);
    nodes_[x].par = y;
  }

  // Remove the tree edge between adjacent nodes e and y.
  void cut_adjacent(std::uint32_t e, std::uint32_t y) {
    evert(e);
    access(y);
    Node& yn = nodes_[y];
    if (yn.ch[0] != e || nodes_[e].ch[0] != kNoId32 || nodes_[e].ch[1] != kNoId32)
      throw std::logic_error("cut: nodes are not adjacent");
    yn.ch[0] = kNoId32;
    nodes_[e].par = kNoId32;
    pull(y);
  }

  IdPool edge_pool_;
  std::uint32_t num_vertices_;
  std::vector<Node> nodes_;
  std::vector<std::uint32_t> scratch_;
  std::uint64_t steps_ = 0;
};

}  // namespace dmsf
