#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <deque>
#include <map>
#include <random>
#include <vector>

#include "dmsf/link_cut.hpp"

using namespace dmsf;

namespace {

// Reference forest: plain adjacency lists, queries by breadth-first walk.
struct ModelForest {
  struct ModelEdge {
    VertexId u, v;
    TotalWeight w;
  };
  std::size_t n;
  std::map<EdgeId, ModelEdge> edges;

  explicit ModelForest(std::size_t n) : n(n) {}

  std::vector<std::vector<std::pair<VertexId, EdgeId>>> adj() const {
    std::vector<std::vector<std::pair<VertexId, EdgeId>>> a(n);
    for (const auto& [id, e] : edges) {
      a[e.u].push_back({e.v, id});
      a[e.v].push_back({e.u, id});
    }
    return a;
  }

  // Path from u to v as edge ids; empty when disconnected (or u == v).
  std::vector<EdgeId> path(VertexId u, VertexId v) const {
    auto a = adj();
    std::vector<int> from_edge(n, -1);
    std::vector<VertexId> from_vert(n, 0);
    std::vector<char> seen(n, 0);
    std::deque<VertexId> q{u};
    seen[u] = 1;
    while (!q.empty()) {
      VertexId x = q.front();
      q.pop_front();
      if (x == v) break;
      for (auto [y, id] : a[x]) {
        if (!seen[y]) {
          seen[y] = 1;
          from_edge[y] = static_cast<int>(id);
          from_vert[y] = x;
          q.push_back(y);
        }
      }
    }
    std::vector<EdgeId> p;
    if (!seen[v]) return p;
    for (VertexId x = v; x != u; x = from_vert[x]) p.push_back(static_cast<EdgeId>(from_edge[x]));
    std::reverse(p.begin(), p.end());
    return p;
  }

  bool connected(VertexId u, VertexId v) const { return u == v || !path(u, v).empty(); }

  EdgeId path_max(VertexId u, VertexId v) const {
    EdgeId best = 0;
    bool have = false;
    for (EdgeId id : path(u, v)) {
      if (!have || edges.at(best).w < edges.at(id).w) {
        best = id;
        have = true;
      }
    }
    REQUIRE(have);
    return best;
  }
};

}  // namespace

TEST_CASE("single edge: connectivity and path maximum") {
  LinkCutForest lc(4, 8);
  CHECK(!lc.connected(0, 1));
  std::uint32_t h = lc.link_edge(0, 1, TotalWeight::real(7, 3), 3);
  CHECK(lc.connected(0, 1));
  CHECK(lc.connected(1, 0));
  CHECK(!lc.connected(0, 2));
  auto pm = lc.path_max(0, 1);
  CHECK(pm.edge == 3);
  CHECK(pm.w == TotalWeight::real(7, 3));
  lc.cut_edge(h, 0, 1);
  CHECK(!lc.connected(0, 1));
}

TEST_CASE("path maximum breaks weight ties toward the larger id") {
  LinkCutForest lc(4, 8);
  lc.link_edge(0, 1, TotalWeight::real(5, 10), 10);
  lc.link_edge(1, 2, TotalWeight::real(5, 11), 11);
  lc.link_edge(2, 3, TotalWeight::real(5, 9), 9);
  CHECK(lc.path_max(0, 3).edge == 11);
  CHECK(lc.path_max(0, 1).edge == 10);
  CHECK(lc.path_max(2, 3).edge == 9);
  CHECK(lc.path_max(3, 0).edge == 11);
}

TEST_CASE("phantom weights lose to real weights on a path") {
  LinkCutForest lc(3, 4);
  lc.link_edge(0, 1, TotalWeight::phantom(2), 2);
  lc.link_edge(1, 2, TotalWeight::real(-1000, 1), 1);
  CHECK(lc.path_max(0, 2).edge == 1);  // real beats phantom even when negative
  CHECK(lc.path_max(0, 1).edge == 2);
}

TEST_CASE("randomized link/cut/query agrees with a breadth-first model") {
  const std::size_t n = 40;
  LinkCutForest lc(n, 64);
  ModelForest model(n);
  std::map<EdgeId, std::uint32_t> handles;
  std::mt19937_64 rng(2024);
  EdgeId next_id = 0;
  auto rv = [&] { return static_cast<VertexId>(rng() % n); };

  for (int step = 0; step < 3000; ++step) {
    CAPTURE(step);
    int action = static_cast<int>(rng() % 4);
    if (action == 0) {  // try to link
      VertexId u = rv(), v = rv();
      if (u != v && !model.connected(u, v)) {
        // narrow weight range so ties are common
        TotalWeight w = TotalWeight::real(static_cast<std::int64_t>(rng() % 5), next_id);
        handles[next_id] = lc.link_edge(u, v, w, next_id);
        model.edges[next_id] = {u, v, w};
        ++next_id;
      }
    } else if (action == 1 && !model.edges.empty()) {  // cut a random live edge
      auto it = model.edges.begin();
      std::advance(it, static_cast<std::ptrdiff_t>(rng() % model.edges.size()));
      lc.cut_edge(handles[it->first], it->second.u, it->second.v);
      handles.erase(it->first);
      model.edges.erase(it);
    } else if (action == 2) {  // connectivity probe
      VertexId u = rv(), v = rv();
      CHECK(lc.connected(u, v) == model.connected(u, v));
    } else {  // path maximum on a connected pair, if any
      VertexId u = rv(), v = rv();
      if (u != v && model.connected(u, v)) {
        CHECK(lc.path_max(u, v).edge == model.path_max(u, v));
      }
    }
  }
  CHECK(lc.steps() > 0);
}

TEST_CASE("cut in the middle splits exactly one path") {
  LinkCutForest lc(10, 16);
  std::vector<std::uint32_t> hs;
  for (VertexId i = 0; i + 1 < 10; ++i) {
    hs.push_back(lc.link_edge(i, i + 1, TotalWeight::real(i, i), i));
  }
  CHECK(lc.connected(0, 9));
  lc.cut_edge(hs[4], 4, 5);  // split 0..4 | 5..9
  CHECK(!lc.connected(0, 9));
  CHECK(lc.connected(0, 4));
  CHECK(lc.connected(5, 9));
  CHECK(lc.path_max(0, 4).edge == 3);
  CHECK(lc.path_max(5, 9).edge == 8);
  // relink differently: 0..4 joined to 9..5 at (2,7)
  lc.link_edge(2, 7, TotalWeight::real(100, 50), 50);
  CHECK(lc.connected(0, 9));
  CHECK(lc.path_max(0, 9).edge == 50);
  CHECK(lc.path_max(8, 9).edge == 8);
}
