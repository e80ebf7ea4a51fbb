#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>
#include <vector>

#include "dmsf/oracle.hpp"
#include "dmsf/sparsify.hpp"

using namespace dmsf;

namespace {

Sparsifier make(std::uint32_t n, std::uint32_t max_edges,
                bool parallel = false) {
  SparsifyConfig cfg;
  cfg.n = n;
  cfg.max_edges = max_edges;
  cfg.parallel = parallel;
  return Sparsifier(cfg);
}

MsfDelta forest_diff(const std::vector<EdgeId>& before,
                     const std::vector<EdgeId>& after) {
  MsfDelta d;
  std::set_difference(after.begin(), after.end(), before.begin(), before.end(),
                      std::back_inserter(d.added));
  std::set_difference(before.begin(), before.end(), after.begin(), after.end(),
                      std::back_inserter(d.removed));
  return d;
}

// Random insert/erase stream checked op-by-op against the from-scratch
// reference: forest equality, net-change equality, structural audits.
void differential(std::uint32_t n, std::size_t ops, std::uint64_t seed,
                  bool parallel, int insert_percent = 60,
                  std::size_t deep_every = 0) {
  Sparsifier sp = make(n, static_cast<std::uint32_t>(ops) + 4, parallel);
  OracleMsf oracle(n);
  std::mt19937_64 rng(seed);
  std::vector<EdgeId> live;
  for (std::size_t i = 0; i < ops; ++i) {
    const std::vector<EdgeId> before = oracle.msf();
    const bool do_insert =
        live.empty() ||
        static_cast<int>(rng() % 100) < insert_percent;
    if (do_insert) {
      const VertexId u = static_cast<VertexId>(rng() % n);
      VertexId v = static_cast<VertexId>(rng() % n);
      while (v == u) v = static_cast<VertexId>(rng() % n);
      const std::int64_t w = static_cast<std::int64_t>(rng() % 50);
      const EdgeRecord rec = sp.insert(u, v, w);
      oracle.insert(Edge{rec.id, u, v, w});
      live.push_back(rec.id);
    } else {
      const std::size_t at = rng() % live.size();
      const EdgeId id = live[at];
      live.erase(live.begin() + static_cast<std::ptrdiff_t>(at));
      sp.erase(id);
      oracle.erase(id);
    }
    const std::vector<EdgeId> want = oracle.msf();
    REQUIRE(sp.msf() == want);
    REQUIRE(sp.last_delta() == forest_diff(before, want));
    REQUIRE(sp.max_level_updates() <= 3);
    sp.audit(deep_every != 0 && i % deep_every == deep_every - 1);
    if (parallel) REQUIRE(sp.violations() == 0);
  }
}

}  // namespace

TEST_CASE("trivial hierarchies") {
  Sparsifier one = make(1, 4);
  CHECK(one.levels() == 1);
  CHECK(one.node_count() == 0);
  CHECK(one.msf().empty());
  CHECK_THROWS_AS(one.insert(0, 0, 5), std::invalid_argument);

  Sparsifier four = make(4, 4);
  CHECK(four.levels() == 3);
  Sparsifier five = make(5, 4);  // pads to 8
  CHECK(five.levels() == 4);
}

TEST_CASE("first edge reaches the top and every path node holds it") {
  Sparsifier sp = make(4, 8);
  const EdgeRecord rec = sp.insert(0, 2, 7);
  CHECK(rec.id == 0);
  CHECK(rec.is_tree);
  CHECK(sp.msf() == std::vector<EdgeId>{0});
  CHECK(sp.node_count() == 3);  // leaf (0,2), level 1 (0,1), level 2 top
  CHECK(sp.last_delta().added == std::vector<EdgeId>{0});
  CHECK(sp.last_delta().removed.empty());
  CHECK(sp.last_insert_copies().size() == 3);
  sp.audit(true);

  std::ostringstream os;
  sp.dump(os);
  CHECK(os.str() ==
        "node level=2 alpha=0..3 beta=0..3 edges=1 msf=0\n"
        "node level=1 alpha=0..1 beta=2..3 edges=1 msf=0\n"
        "node level=0 alpha=0..0 beta=2..2 edges=1 msf=0\n");
}

TEST_CASE("cycle edge stops at the level where it fails to enter") {
  Sparsifier sp = make(4, 8);
  sp.insert(0, 1, 1);  // id 0
  sp.insert(1, 2, 2);  // id 1
  const EdgeRecord rec = sp.insert(0, 2, 9);  // id 2: heaviest on its cycle
  CHECK_FALSE(rec.is_tree);
  CHECK(sp.msf() == std::vector<EdgeId>{0, 1});
  CHECK(sp.last_delta().empty());
  sp.audit(true);

  // The cycle only closes at the top (its three leaf pairs are disjoint),
  // so edge 2 is everywhere except above the top.
  const auto views = sp.nodes();
  for (const auto& v : views) CHECK(v.edge_count >= 1);
}

TEST_CASE("displacement unhooks the loser one level up") {
  Sparsifier sp = make(4, 8);
  sp.insert(0, 1, 1);  // id 0
  sp.insert(1, 2, 9);  // id 1: will lose
  sp.insert(0, 2, 2);  // id 2: displaces 1 at the level their cycle closes
  CHECK(sp.msf() == std::vector<EdgeId>{0, 2});
  CHECK(sp.last_delta().added == std::vector<EdgeId>{2});
  CHECK(sp.last_delta().removed == std::vector<EdgeId>{1});
  sp.audit(true);
}

TEST_CASE("parallel edges: leaf keeps all, parent sees only the lightest") {
  Sparsifier sp = make(4, 16);
  sp.insert(0, 3, 30);  // id 0
  sp.insert(0, 3, 10);  // id 1: displaces 0 at the leaf
  sp.insert(0, 3, 20);  // id 2: enters nothing above the leaf
  REQUIRE(sp.msf() == std::vector<EdgeId>{1});
  const auto leaf = sp.level_nodes(0);
  REQUIRE(leaf.size() == 1);
  CHECK(leaf[0].edge_count == 3);
  const auto top = sp.level_nodes(sp.levels() - 1);
  REQUIRE(top.size() == 1);
  CHECK(top[0].edge_count == 1);
  sp.audit(true);

  // Deleting the tree edge promotes the next-lightest parallel edge level
  // by level; the provisional promotion bounces at no level (it is the
  // lightest below everywhere).
  MsfDelta d = sp.erase(1);
  CHECK(d.added == std::vector<EdgeId>{2});
  CHECK(d.removed == std::vector<EdgeId>{1});
  CHECK(sp.msf() == std::vector<EdgeId>{2});
  const auto& prom = sp.last_promotions();
  REQUIRE(prom.size() == sp.levels());
  CHECK(prom[0].present);
  CHECK(prom[0].edge.id == 2);
  sp.audit(true);
}

TEST_CASE("deleting a non-tree edge promotes nothing anywhere") {
  Sparsifier sp = make(4, 8);
  sp.insert(0, 1, 1);
  sp.insert(1, 2, 2);
  sp.insert(0, 2, 9);  // id 2, non-tree at the top
  MsfDelta d = sp.erase(2);
  CHECK(d.empty());
  CHECK(sp.msf() == std::vector<EdgeId>{0, 1});
  for (const auto& p : sp.last_promotions()) CHECK_FALSE(p.present);
  sp.audit(true);
}

TEST_CASE("deleting the last edge tears the hierarchy down") {
  Sparsifier sp = make(8, 8);
  sp.insert(3, 6, 5);
  CHECK(sp.node_count() == 4);
  MsfDelta d = sp.erase(0);
  CHECK(d.removed == std::vector<EdgeId>{0});
  CHECK(d.added.empty());
  CHECK(sp.node_count() == 0);
  CHECK(sp.msf().empty());
  CHECK(sp.num_edges() == 0);
  sp.audit(true);
}

TEST_CASE("tree deletion pulls the replacement up through every level") {
  // Path 0-1-2-3 plus a heavy chord 0-3: deleting a path edge promotes the
  // chord into the forest at every level up to the top.
  Sparsifier sp = make(4, 8);
  sp.insert(0, 1, 1);  // id 0
  sp.insert(1, 2, 2);  // id 1
  sp.insert(2, 3, 3);  // id 2
  sp.insert(0, 3, 50);  // id 3, non-tree
  REQUIRE(sp.msf() == std::vector<EdgeId>{0, 1, 2});
  MsfDelta d = sp.erase(1);
  CHECK(d.added == std::vector<EdgeId>{3});
  CHECK(d.removed == std::vector<EdgeId>{1});
  CHECK(sp.msf() == std::vector<EdgeId>{0, 2, 3});
  sp.audit(true);
}

TEST_CASE("leaf engine grows on demand past its initial capacity") {
  Sparsifier sp = make(2, 64);
  OracleMsf oracle(2);
  for (int i = 0; i < 40; ++i) {
    const std::int64_t w = (i * 7) % 23;
    const EdgeRecord rec = sp.insert(0, 1, w);
    oracle.insert(Edge{rec.id, 0, 1, w});
    REQUIRE(sp.msf() == oracle.msf());
    sp.audit();
  }
  sp.audit(true);
  // And shrink back down, promoting lighter survivors.
  for (EdgeId id = 0; id < 40; id += 2) {
    sp.erase(id);
    oracle.erase(id);
    REQUIRE(sp.msf() == oracle.msf());
    sp.audit();
  }
}

TEST_CASE("dense random differential against the reference, serial") {
  differential(8, 300, 11, false, 60, 50);
  differential(16, 500, 12, false, 55, 100);
  differential(32, 2000, 13, false, 60, 500);
  // Delete-heavy mix drains the structure repeatedly.
  differential(16, 400, 14, false, 40, 0);
}

TEST_CASE("dense random differential against the reference, parallel") {
  differential(8, 200, 21, true, 60, 50);
  differential(32, 600, 22, true, 60, 200);
}

TEST_CASE("parallel and serial construction produce identical updates") {
  const std::uint32_t n = 16;
  Sparsifier seq = make(n, 400, false);
  Sparsifier par = make(n, 400, true);
  std::mt19937_64 rng(33);
  std::vector<EdgeId> live;
  std::uint64_t ops_with_cost = 0;
  for (int i = 0; i < 500; ++i) {
    if (live.empty() || rng() % 100 < 60) {
      const VertexId u = static_cast<VertexId>(rng() % n);
      VertexId v = static_cast<VertexId>(rng() % n);
      while (v == u) v = static_cast<VertexId>(rng() % n);
      const std::int64_t w = static_cast<std::int64_t>(rng() % 40);
      const EdgeRecord a = seq.insert(u, v, w);
      const EdgeRecord b = par.insert(u, v, w);
      REQUIRE(a.id == b.id);
      live.push_back(a.id);
    } else {
      const std::size_t at = rng() % live.size();
      const EdgeId id = live[at];
      live.erase(live.begin() + static_cast<std::ptrdiff_t>(at));
      seq.erase(id);
      par.erase(id);
    }
    REQUIRE(seq.last_delta() == par.last_delta());
    REQUIRE(seq.msf() == par.msf());
    if (par.last_step().depth > 0) ++ops_with_cost;
  }
  CHECK(par.violations() == 0);
  CHECK(par.peak_processors() > 0);
  CHECK(ops_with_cost > 0);
  seq.audit(true);
  par.audit(true);
}

TEST_CASE("parallel cost reports cover both phases of a delete") {
  Sparsifier sp = make(8, 32, true);
  sp.insert(0, 1, 1);
  sp.insert(1, 2, 2);
  sp.insert(2, 3, 3);
  sp.insert(0, 3, 9);
  const StepReport ins = sp.last_step();
  CHECK(ins.depth > 0);
  CHECK(ins.work >= ins.depth);
  sp.erase(1);  // forces promotion through several levels
  const StepReport del = sp.last_step();
  CHECK(del.depth > 0);
  CHECK(del.work >= del.depth);
  CHECK(del.max_processors >= 1);
  CHECK(sp.violations() == 0);
}

TEST_CASE("update budget stays within two engine updates per level") {
  Sparsifier sp = make(32, 600);
  std::mt19937_64 rng(44);
  std::vector<EdgeId> live;
  for (int i = 0; i < 800; ++i) {
    if (live.empty() || rng() % 100 < 55) {
      const VertexId u = static_cast<VertexId>(rng() % 32);
      VertexId v = static_cast<VertexId>(rng() % 32);
      while (v == u) v = static_cast<VertexId>(rng() % 32);
      live.push_back(sp.insert(u, v, static_cast<std::int64_t>(rng() % 30)).id);
    } else {
      const std::size_t at = rng() % live.size();
      sp.erase(live[at]);
      live.erase(live.begin() + static_cast<std::ptrdiff_t>(at));
    }
    for (std::uint32_t c : sp.last_level_updates()) REQUIRE(c <= 2);
  }
  CHECK(sp.max_level_updates() <= 2);
}

TEST_CASE("erase of an unknown edge is rejected") {
  Sparsifier sp = make(4, 4);
  CHECK_THROWS_AS(sp.erase(7), std::invalid_argument);
  sp.insert(0, 1, 3);
  sp.erase(0);
  CHECK_THROWS_AS(sp.erase(0), std::invalid_argument);
}
