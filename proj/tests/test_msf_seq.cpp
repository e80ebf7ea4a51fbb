#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>
#include <vector>

#include "dmsf/msf.hpp"
#include "dmsf/oracle.hpp"
#include "dmsf/trace.hpp"

using namespace dmsf;

namespace {

DynamicMsf make_msf(std::uint32_t n, std::uint32_t max_edges,
                    std::uint32_t k_override = 0) {
  MsfConfig cfg;
  cfg.n = n;
  cfg.max_edges = max_edges;
  cfg.mode = EngineMode::Seq;
  cfg.k_override = k_override;
  return DynamicMsf(cfg);
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

// Replay a trace through the structure and the from-scratch reference,
// comparing forests and per-op net changes at every step.
void differential_replay(const Trace& t, std::uint32_t k_override,
                         std::size_t audit_every) {
  MsfConfig cfg;
  cfg.n = t.n;
  cfg.max_edges = static_cast<std::uint32_t>(t.max_live_edges());
  cfg.mode = EngineMode::Seq;
  cfg.k_override = k_override;
  DynamicMsf m(cfg);
  OracleMsf o(t.n);
  EdgeId next_id = 0;
  auto prev_forest = o.msf();
  std::size_t step = 0;
  for (const TraceOp& op : t.ops) {
    MsfDelta got;
    if (op.kind == TraceOp::Kind::Insert) {
      const EdgeId id = next_id++;
      o.insert(Edge{id, op.u, op.v, op.w});
      EdgeRecord r = m.insert(op.u, op.v, op.w);
      REQUIRE(r.id == id);
      got = m.last_delta();
    } else if (op.kind == TraceOp::Kind::Delete) {
      o.erase(op.edge);
      got = m.erase(op.edge);
    } else {
      auto forest = o.msf();
      REQUIRE(m.msf() == forest);
      REQUIRE(m.msf_weight_sum() == o.msf_weight_sum());
      continue;
    }
    auto forest = o.msf();
    REQUIRE(got == forest_diff(prev_forest, forest));
    REQUIRE(m.msf() == forest);
    prev_forest = std::move(forest);
    ++step;
    if (audit_every && step % audit_every == 0) m.audit();
  }
  m.audit();
}

}  // namespace

TEST_CASE("first edge joins the forest") {
  DynamicMsf m = make_msf(2, 4);
  EdgeRecord r = m.insert(0, 1, 5);
  CHECK(r.id == 0);
  CHECK(r.is_tree);
  CHECK(m.last_delta().added == std::vector<EdgeId>{0});
  CHECK(m.connected(0, 1));
  m.audit();
}

TEST_CASE("cheaper parallel edge evicts the first") {
  DynamicMsf m = make_msf(2, 4);
  m.insert(0, 1, 7);
  EdgeRecord r = m.insert(0, 1, 3);
  CHECK(r.is_tree);
  CHECK(!m.is_tree(0));
  CHECK(m.last_delta().added == std::vector<EdgeId>{1});
  CHECK(m.last_delta().removed == std::vector<EdgeId>{0});
  m.audit();
}

TEST_CASE("high-degree hub grows a chain of hosts") {
  // Five edges at vertex 0: its chain must reach five hosts, each of
  // reduced degree <= 3, and all real edges stay in the forest (a star).
  DynamicMsf m = make_msf(6, 16);
  for (VertexId v = 1; v <= 5; ++v) {
    EdgeRecord r = m.insert(0, v, 10 * v);
    CHECK(r.is_tree);
    m.audit();  // includes the exhaustive reduced-degree check
  }
  CHECK(m.msf() == std::vector<EdgeId>{0, 1, 2, 3, 4});
  CHECK(m.msf_weight_sum() == 10 + 20 + 30 + 40 + 50);
  // Hosts of distinct edges at vertex 0 must be distinct chain vertices.
  std::set<VertexId> hosts;
  for (EdgeId id = 0; id < 5; ++id) hosts.insert(m.record(id).host_u);
  CHECK(hosts.size() == 5);
}

TEST_CASE("deleting mid-chain edges re-hosts the tail edge") {
  DynamicMsf m = make_msf(6, 16);
  for (VertexId v = 1; v <= 5; ++v) m.insert(0, v, 10 * v);
  // Edge 0 is hosted at the chain head; deleting it forces the tail's
  // edge into the freed slot before the chain shrinks.
  MsfDelta d = m.erase(0);
  CHECK(d.removed == std::vector<EdgeId>{0});
  CHECK(d.added.empty());
  m.audit();
  CHECK(m.msf() == std::vector<EdgeId>{1, 2, 3, 4});
  for (EdgeId id = 1; id < 5; ++id) CHECK(m.is_tree(id));
  // Degree back to zero collapses the chain to the bare vertex.
  for (EdgeId id = 1; id < 5; ++id) m.erase(id);
  m.audit();
  CHECK(m.msf().empty());
  CHECK(!m.connected(0, 1));
}

TEST_CASE("four-cycle deletion pulls the forced replacement in") {
  DynamicMsf m = make_msf(4, 8);
  m.insert(0, 1, 1);
  m.insert(1, 2, 2);
  m.insert(2, 3, 3);
  m.insert(3, 0, 4);
  CHECK(m.msf() == std::vector<EdgeId>{0, 1, 2});
  MsfDelta d = m.erase(0);
  CHECK(d.added == std::vector<EdgeId>{3});
  CHECK(d.removed == std::vector<EdgeId>{0});
  CHECK(m.msf() == std::vector<EdgeId>{1, 2, 3});
  m.audit();
}

TEST_CASE("loops and unknown ids are rejected") {
  DynamicMsf m = make_msf(3, 4);
  CHECK_THROWS_AS(m.insert(1, 1, 5), std::invalid_argument);
  CHECK_THROWS_AS(m.erase(0), std::invalid_argument);
  m.insert(0, 1, 5);
  m.erase(0);
  CHECK_THROWS_AS(m.erase(0), std::invalid_argument);  // retired id
}

TEST_CASE("random traces match the reference forest") {
  GenOptions g;
  g.n = 12;
  g.num_ops = 500;
  g.seed = 101;
  differential_replay(generate_trace(g), 0, 1);
  g.n = 40;
  g.num_ops = 900;
  g.seed = 202;
  g.insert_percent = 55;
  differential_replay(generate_trace(g), 0, 4);
  g.n = 72;
  g.num_ops = 1200;
  g.seed = 303;
  g.insert_percent = 65;
  differential_replay(generate_trace(g), 0, 8);
}

TEST_CASE("random traces under a tiny chunk parameter") {
  GenOptions g;
  g.n = 24;
  g.num_ops = 800;
  g.seed = 404;
  g.insert_percent = 55;
  differential_replay(generate_trace(g), 8, 2);
  g.n = 56;
  g.num_ops = 1000;
  g.seed = 505;
  differential_replay(generate_trace(g), 8, 4);
}

TEST_CASE("weight ties break deterministically by id") {
  DynamicMsf m = make_msf(3, 8);
  m.insert(0, 1, 5);   // id 0
  m.insert(0, 1, 5);   // id 1: equal weight, higher id -> stays out
  CHECK(m.is_tree(0));
  CHECK(!m.is_tree(1));
  m.erase(0);
  CHECK(m.is_tree(1));
  m.audit();
}
