// Acceptance suite: every release gate in one binary, one verdict line per
// criterion, exit 0 iff all pass. Run with no arguments for the full suite,
// or pass criterion numbers (e.g. "acceptance 7 8") for a subset; tallies
// that aggregate across runs (criteria 3, 4, 6) then cover only the runs the
// selection actually executed.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "dmsf/msf.hpp"
#include "dmsf/oracle.hpp"
#include "dmsf/runner.hpp"
#include "dmsf/sparsify.hpp"
#include "dmsf/trace.hpp"

using namespace dmsf;

namespace {

using Clock = std::chrono::steady_clock;

double secs_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Verdict {
  bool pass = false;
  std::string detail;
};

// Counters shared by the aggregate criteria: exclusivity violations (3),
// chunk mass-bound violations (4), and the worst occurrence-surgery count
// seen in any single tour split/join (6).
struct Tallies {
  std::uint64_t pram_violations = 0;
  std::uint64_t machine_runs = 0;
  std::uint64_t mass_violations = 0;
  std::uint64_t mass_audits = 0;
  std::uint32_t max_surgery = 0;
  std::uint64_t surgery_runs = 0;

  void surgery(std::uint32_t s) {
    max_surgery = std::max(max_surgery, s);
    ++surgery_runs;
  }
};

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(3);
  os << std::fixed << x;
  return os.str();
}

MsfConfig facade_cfg(std::uint32_t n, std::uint32_t max_edges, EngineMode mode,
                     std::uint32_t k = 0) {
  MsfConfig cfg;
  cfg.n = n;
  cfg.max_edges = max_edges;
  cfg.mode = mode;
  cfg.k_override = k;
  return cfg;
}

RunOptions run_opts(EngineKind kind, std::uint32_t k = 0) {
  RunOptions o;
  o.kind = kind;
  o.k_override = k;
  return o;
}

// Forest change implied by two reference snapshots (both ascending).
MsfDelta snapshot_diff(const std::vector<EdgeId>& before,
                       const std::vector<EdgeId>& after) {
  MsfDelta d;
  std::set_difference(after.begin(), after.end(), before.begin(), before.end(),
                      std::back_inserter(d.added));
  std::set_difference(before.begin(), before.end(), after.begin(), after.end(),
                      std::back_inserter(d.removed));
  return d;
}

// ---------------------------------------------------------------------------
// Criterion 1 (+ feeds 3/4/6): oracle equivalence of all five executors on
// 100 random traces, with per-operation chunk mass audits on the two
// chunk-engine runs.
Verdict run_block_1(Tallies& t) {
  const auto t0 = Clock::now();
  std::uint64_t comparisons = 0, mismatches = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    GenOptions g;
    g.n = 64;
    g.num_ops = 1000;
    g.seed = seed;  // default mix: 60% inserts / 40% deletes
    const Trace tr = generate_trace(g);
    const auto cap = static_cast<std::uint32_t>(tr.max_live_edges());

    DynamicMsf seq(facade_cfg(tr.n, cap, EngineMode::Seq));
    DynamicMsf par(facade_cfg(tr.n, cap, EngineMode::Par));
    OracleMsf oracle(tr.n);
    EdgeId next = 0;
    for (const TraceOp& op : tr.ops) {
      switch (op.kind) {
        case TraceOp::Kind::Insert: {
          const EdgeId id = next++;
          seq.insert(op.u, op.v, op.w);
          par.insert(op.u, op.v, op.w);
          oracle.insert(Edge{id, op.u, op.v, op.w});
          break;
        }
        case TraceOp::Kind::Delete:
          seq.erase(op.edge);
          par.erase(op.edge);
          oracle.erase(op.edge);
          break;
        case TraceOp::Kind::Check: {
          const std::vector<EdgeId> want = oracle.msf();
          comparisons += 2;
          if (seq.msf() != want) ++mismatches;
          if (par.msf() != want) ++mismatches;
          continue;
        }
      }
      t.mass_violations += seq.engine().audit_mass_bounds();
      t.mass_violations += par.engine().audit_mass_bounds();
      t.mass_audits += 2;
    }
    t.surgery(seq.engine().max_surgery_per_euler_op());
    t.surgery(par.engine().max_surgery_per_euler_op());
    t.pram_violations += par.engine().pram()->totals().violations;
    ++t.machine_runs;

    for (EngineKind kind : {EngineKind::SparsifySeq, EngineKind::SparsifyPar,
                            EngineKind::Oracle}) {
      const RunResult r = run_trace(tr, run_opts(kind));
      comparisons += r.report.checks_run;
      mismatches += r.report.checks_failed;
      if (kind != EngineKind::Oracle) t.surgery(r.report.max_surgery);
      if (kind == EngineKind::SparsifyPar) {
        t.pram_violations += r.report.violations;
        ++t.machine_runs;
      }
    }
    if (seed % 10 == 0)
      std::cerr << "[criterion 1] trace " << seed << "/100, "
                << fmt(secs_since(t0)) << " s elapsed\n";
  }
  Verdict v;
  v.pass = mismatches == 0;
  v.detail = "5 executors x 100 traces (n=64, 1000 ops, 60/40 mix): " +
             std::to_string(comparisons) + " forest comparisons, " +
             std::to_string(mismatches) + " mismatches (" +
             fmt(secs_since(t0)) + " s; stated expectation was < 60 s)";
  return v;
}

// ---------------------------------------------------------------------------
// Criterion 2: the sequential and machine-mode chunk engines emit identical
// per-operation forest deltas on 20 lockstep traces.
Verdict run_block_2(Tallies& t) {
  const auto t0 = Clock::now();
  std::uint64_t ops = 0, mismatches = 0;
  for (std::uint64_t seed = 101; seed <= 120; ++seed) {
    GenOptions g;
    g.n = 64;
    g.num_ops = 1000;
    g.seed = seed;
    const Trace tr = generate_trace(g);
    const auto cap = static_cast<std::uint32_t>(tr.max_live_edges());
    DynamicMsf seq(facade_cfg(tr.n, cap, EngineMode::Seq));
    DynamicMsf par(facade_cfg(tr.n, cap, EngineMode::Par));
    for (const TraceOp& op : tr.ops) {
      if (op.kind == TraceOp::Kind::Insert) {
        seq.insert(op.u, op.v, op.w);
        par.insert(op.u, op.v, op.w);
      } else if (op.kind == TraceOp::Kind::Delete) {
        seq.erase(op.edge);
        par.erase(op.edge);
      } else {
        continue;
      }
      ++ops;
      if (!(seq.last_delta() == par.last_delta())) ++mismatches;
    }
    if (seq.msf() != par.msf()) ++mismatches;
    t.surgery(seq.engine().max_surgery_per_euler_op());
    t.surgery(par.engine().max_surgery_per_euler_op());
    t.pram_violations += par.engine().pram()->totals().violations;
    ++t.machine_runs;
  }
  Verdict v;
  v.pass = mismatches == 0;
  v.detail = "20 lockstep traces (n=64, 1000 ops), " + std::to_string(ops) +
             " per-op delta comparisons, " + std::to_string(mismatches) +
             " mismatches (" + fmt(secs_since(t0)) + " s)";
  return v;
}

// ---------------------------------------------------------------------------
// Criterion 5: adjacency-matrix and aggregate-tree recompute audits after
// every operation on 10 traces (n = 32; 500 ops each).
Verdict run_block_5(Tallies& t) {
  const auto t0 = Clock::now();
  std::uint64_t audits = 0, failures = 0;
  std::string first_failure;
  for (std::uint64_t seed = 201; seed <= 210; ++seed) {
    GenOptions g;
    g.n = 32;
    g.num_ops = 500;
    g.seed = seed;
    const Trace tr = generate_trace(g);
    const auto cap = static_cast<std::uint32_t>(tr.max_live_edges());
    DynamicMsf seq(facade_cfg(tr.n, cap, EngineMode::Seq));
    DynamicMsf par(facade_cfg(tr.n, cap, EngineMode::Par));
    for (const TraceOp& op : tr.ops) {
      if (op.kind == TraceOp::Kind::Insert) {
        seq.insert(op.u, op.v, op.w);
        par.insert(op.u, op.v, op.w);
      } else if (op.kind == TraceOp::Kind::Delete) {
        seq.erase(op.edge);
        par.erase(op.edge);
      } else {
        continue;
      }
      for (DynamicMsf* m : {&seq, &par}) {
        ++audits;
        try {
          m->engine().audit();
          m->engine().audit_adjacency();
        } catch (const std::exception& e) {
          ++failures;
          if (first_failure.empty()) first_failure = e.what();
        }
      }
    }
    t.surgery(seq.engine().max_surgery_per_euler_op());
    t.surgery(par.engine().max_surgery_per_euler_op());
    t.pram_violations += par.engine().pram()->totals().violations;
    ++t.machine_runs;
  }
  Verdict v;
  v.pass = failures == 0;
  v.detail = std::to_string(audits) + " full-state recompute audits, " +
             std::to_string(failures) + " divergences" +
             (first_failure.empty() ? "" : " (first: " + first_failure + ")") +
             " (" + fmt(secs_since(t0)) + " s)";
  return v;
}

// ---------------------------------------------------------------------------
// Criteria 7 and 8: machine-cost scaling. A fixed-size trace on a growing
// vertex count degenerates into empty-forest dynamics, so each size first
// builds a random spanning tree (n-1 inserts) and the 500 measured ops run
// against that standing structure; medians are taken over the measured
// window only.
Trace tree_backed_trace(std::uint32_t n, std::size_t measured,
                        std::uint64_t seed, std::size_t* prefix_ops) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::int64_t> wd(0, 1'000'000);
  Trace t;
  t.n = n;
  std::vector<EdgeId> live;
  EdgeId next = 0;
  for (std::uint32_t vtx = 1; vtx < n; ++vtx) {
    std::uniform_int_distribution<std::uint32_t> up(0, vtx - 1);
    t.ops.push_back(TraceOp{TraceOp::Kind::Insert, up(rng), vtx, wd(rng), 0});
    live.push_back(next++);
  }
  *prefix_ops = t.ops.size();
  std::uniform_int_distribution<int> coin(0, 99);
  std::uniform_int_distribution<std::uint32_t> vd(0, n - 1);
  for (std::size_t i = 0; i < measured; ++i) {
    if (live.empty() || coin(rng) < 60) {
      std::uint32_t u = vd(rng), v = vd(rng);
      while (v == u) v = vd(rng);
      t.ops.push_back(TraceOp{TraceOp::Kind::Insert, u, v, wd(rng), 0});
      live.push_back(next++);
    } else {
      std::uniform_int_distribution<std::size_t> pick(0, live.size() - 1);
      const std::size_t at = pick(rng);
      TraceOp op;
      op.kind = TraceOp::Kind::Delete;
      op.edge = live[at];
      live[at] = live.back();
      live.pop_back();
      t.ops.push_back(op);
    }
    if ((i + 1) % 64 == 0) t.ops.push_back(TraceOp{});  // checkpoint
  }
  t.ops.push_back(TraceOp{});
  return t;
}

double median_of(std::vector<std::uint64_t> xs) {
  if (xs.empty()) return 0;
  std::sort(xs.begin(), xs.end());
  const std::size_t h = xs.size() / 2;
  if (xs.size() % 2 == 1) return static_cast<double>(xs[h]);
  return (static_cast<double>(xs[h - 1]) + static_cast<double>(xs[h])) / 2.0;
}

struct ScalingPoint {
  std::uint32_t n = 0;
  double med_depth = 0;     // all steps
  double med_core = 0;      // steps net of path-structure attribution
  double med_lc = 0;        // path-structure share, reported separately
  double med_work = 0;
  std::uint32_t peak_procs = 0;
};

std::pair<Verdict, Verdict> run_block_7_8(Tallies& t) {
  const auto t0 = Clock::now();
  std::vector<ScalingPoint> pts;
  for (std::uint32_t n : {64u, 256u, 1024u}) {
    std::size_t prefix = 0;
    const Trace tr = tree_backed_trace(n, 500, 9, &prefix);
    const auto k =
        static_cast<std::uint32_t>(std::ceil(std::sqrt(double(n))));
    const RunResult res = run_trace(tr, run_opts(EngineKind::Pram, k));
    std::vector<std::uint64_t> depth, core, lc, work;
    for (std::size_t i = prefix; i < res.report.per_op.size(); ++i) {
      const OpCost& c = res.report.per_op[i];
      depth.push_back(c.depth);
      core.push_back(c.depth - c.lc_depth);
      lc.push_back(c.lc_depth);
      work.push_back(c.work);
    }
    ScalingPoint p;
    p.n = n;
    p.med_depth = median_of(std::move(depth));
    p.med_core = median_of(std::move(core));
    p.med_lc = median_of(std::move(lc));
    p.med_work = median_of(std::move(work));
    p.peak_procs = res.report.peak_processors;
    pts.push_back(p);
    t.pram_violations += res.report.violations;
    ++t.machine_runs;
    t.surgery(res.report.max_surgery);
    if (res.report.checks_failed != 0) {
      Verdict bad{false, "scaling trace failed checkpoint verification"};
      return {bad, bad};
    }
    std::cerr << "[criteria 7/8] n=" << n << " done, " << fmt(secs_since(t0))
              << " s elapsed\n";
  }

  std::vector<std::pair<double, double>> d_pts, c_pts, p_pts, w_pts;
  for (const ScalingPoint& p : pts) {
    const double lg = std::log2(double(p.n));
    const double rt = std::sqrt(double(p.n));
    d_pts.emplace_back(lg, p.med_depth);
    c_pts.emplace_back(lg, p.med_core);
    p_pts.emplace_back(rt, double(p.peak_procs));
    w_pts.emplace_back(rt * lg, p.med_work);
  }
  const AffineFit fit_core = fit_affine(c_pts);
  const AffineFit fit_depth = fit_affine(d_pts);
  const AffineFit fit_procs = fit_affine(p_pts);
  const AffineFit fit_work = fit_affine(w_pts);

  std::ostringstream series;
  series.precision(4);
  for (const ScalingPoint& p : pts)
    series << " [n=" << p.n << " med_depth=" << p.med_depth
           << " med_lc=" << p.med_lc << " peak_procs=" << p.peak_procs
           << " med_work=" << p.med_work << "]";

  Verdict v7;
  v7.pass = fit_core.max_rel_residual < 0.15;
  {
    std::ostringstream os;
    os.precision(4);
    os << "median depth net of path-structure steps ~ " << fit_core.slope
       << "*log2(n) + " << fit_core.intercept
       << ", max rel residual " << fit_core.max_rel_residual
       << " (tolerance 0.15); all-steps fit residual "
       << fit_depth.max_rel_residual << ";" << series.str() << " ("
       << fmt(secs_since(t0)) << " s; stated expectation < 600 s)";
    v7.detail = os.str();
  }

  // Processor bound: peak active processors must scale affinely in sqrt(n)
  // (single fitted coefficient), and the literal per-size bound uses the
  // largest observed ratio as its constant.
  double c_procs = 0, c_work = 0;
  for (const ScalingPoint& p : pts) {
    const double lg = std::log2(double(p.n));
    const double rt = std::sqrt(double(p.n));
    c_procs = std::max(c_procs, double(p.peak_procs) / rt);
    c_work = std::max(c_work, p.med_work / (rt * lg));
  }
  Verdict v8;
  v8.pass = fit_procs.max_rel_residual < 0.15 && fit_procs.slope > 0 &&
            fit_work.max_rel_residual < 0.15 && fit_work.slope > 0;
  {
    std::ostringstream os;
    os.precision(4);
    os << "peak processors ~ " << fit_procs.slope << "*sqrt(n) + "
       << fit_procs.intercept << " (max rel residual "
       << fit_procs.max_rel_residual << "), bounding constant c=" << c_procs
       << "; median work/op ~ " << fit_work.slope << "*sqrt(n)*log2(n) + "
       << fit_work.intercept << " (max rel residual "
       << fit_work.max_rel_residual << "), bounding constant c'=" << c_work
       << "; tolerance 0.15 with positive slopes";
    v8.detail = os.str();
  }
  return {v7, v8};
}

// ---------------------------------------------------------------------------
// Criterion 9: both sparsified executors against the reference on a dense
// n=32 graph driven to full simple-graph capacity, with the per-level update
// budget and the hierarchy closure audit checked after every operation.
Verdict run_block_9(Tallies& t) {
  const auto t0 = Clock::now();
  const std::uint32_t n = 32;
  const std::uint32_t full = n * (n - 1) / 2;  // 496
  std::mt19937_64 rng(33);
  std::uniform_int_distribution<std::int64_t> wd(0, 1'000'000);

  SparsifyConfig scfg;
  scfg.n = n;
  scfg.max_edges = full;
  Sparsifier sps(scfg);  // serial
  scfg.parallel = true;
  Sparsifier spp(scfg);  // machine-mode
  OracleMsf oracle(n);

  std::vector<std::pair<VertexId, VertexId>> pairs;
  for (VertexId u = 0; u < n; ++u)
    for (VertexId v = u + 1; v < n; ++v) pairs.emplace_back(u, v);
  std::shuffle(pairs.begin(), pairs.end(), rng);

  std::map<EdgeId, std::pair<VertexId, VertexId>> live;
  std::set<std::pair<VertexId, VertexId>> live_pairs;
  EdgeId next = 0;
  std::uint64_t ops = 0, mismatches = 0, budget_breaches = 0,
                audit_failures = 0;
  std::uint32_t peak_live = 0;
  std::string first_audit;

  auto do_insert = [&](VertexId u, VertexId v) {
    const std::int64_t w = wd(rng);
    const EdgeId id = next++;
    const EdgeRecord a = sps.insert(u, v, w);
    const EdgeRecord b = spp.insert(u, v, w);
    if (a.id != id || b.id != id)
      throw std::logic_error("sparsifier id drifted from script");
    oracle.insert(Edge{id, u, v, w});
    live[id] = {u, v};
    live_pairs.insert({u, v});
  };
  auto do_erase = [&](EdgeId id) {
    sps.erase(id);
    spp.erase(id);
    oracle.erase(id);
    live_pairs.erase(live.at(id));
    live.erase(id);
  };
  auto after_op = [&] {
    ++ops;
    peak_live = std::max<std::uint32_t>(peak_live,
                                        static_cast<std::uint32_t>(live.size()));
    const std::vector<EdgeId> want = oracle.msf();
    if (sps.msf() != want) ++mismatches;
    if (spp.msf() != want) ++mismatches;
    for (const Sparsifier* sp : {&sps, &spp}) {
      for (std::uint32_t u : sp->last_level_updates())
        if (u > 3) ++budget_breaches;
      try {
        sp->audit(true);  // closure of every materialized node
      } catch (const std::exception& e) {
        ++audit_failures;
        if (first_audit.empty()) first_audit = e.what();
      }
    }
  };

  // Phase 1: drive straight to full density.
  for (const auto& [u, v] : pairs) {
    do_insert(u, v);
    after_op();
  }
  // Phase 2: 2000 mixed ops, staying within simple-graph capacity.
  std::uniform_int_distribution<int> coin(0, 1);
  for (std::size_t i = 0; i < 2000; ++i) {
    const bool can_insert = live.size() < full;
    if (live.empty() || (can_insert && coin(rng) == 0)) {
      std::uniform_int_distribution<std::size_t> pick(0, pairs.size() - 1);
      std::pair<VertexId, VertexId> pr = pairs[pick(rng)];
      while (live_pairs.count(pr)) pr = pairs[pick(rng)];
      do_insert(pr.first, pr.second);
    } else {
      std::uniform_int_distribution<std::size_t> pick(0, live.size() - 1);
      auto it = live.begin();
      std::advance(it, static_cast<std::ptrdiff_t>(pick(rng)));
      do_erase(it->first);
    }
    after_op();
    if ((i + 1) % 500 == 0)
      std::cerr << "[criterion 9] op " << (i + 1) << "/2000, "
                << fmt(secs_since(t0)) << " s elapsed\n";
  }

  t.pram_violations += spp.violations();
  ++t.machine_runs;
  t.surgery(sps.max_surgery());
  t.surgery(spp.max_surgery());

  Verdict v;
  v.pass = mismatches == 0 && budget_breaches == 0 && audit_failures == 0;
  v.detail = std::to_string(ops) + " ops (peak live edges " +
             std::to_string(peak_live) + "/" + std::to_string(full) + "): " +
             std::to_string(mismatches) + " forest mismatches, " +
             std::to_string(budget_breaches) + " per-level update breaches, " +
             std::to_string(audit_failures) + " closure audit failures" +
             (first_audit.empty() ? "" : " (first: " + first_audit + ")") +
             " (" + fmt(secs_since(t0)) + " s)";
  return v;
}

// ---------------------------------------------------------------------------
// Criterion 10: forced tree-edge deletions; the replacement the engines
// promote must equal the exhaustive minimum crossing edge recomputed from the
// reference forest by union-find.
Verdict run_block_10(Tallies& t) {
  const auto t0 = Clock::now();
  const std::uint32_t n = 48;
  std::mt19937_64 rng(48);
  std::uniform_int_distribution<std::uint32_t> vd(0, n - 1);
  std::uniform_int_distribution<std::int64_t> wd(0, 1'000'000);

  const std::uint32_t cap = 140;
  DynamicMsf seq(facade_cfg(n, cap, EngineMode::Seq));
  DynamicMsf par(facade_cfg(n, cap, EngineMode::Par));
  OracleMsf oracle(n);
  EdgeId next = 0;
  std::uint64_t mismatches = 0;

  auto do_insert = [&] {
    std::uint32_t u = vd(rng), v = vd(rng);
    while (v == u) v = vd(rng);
    const std::int64_t w = wd(rng);
    const EdgeId id = next++;
    const std::vector<EdgeId> before = oracle.msf();
    seq.insert(u, v, w);
    par.insert(u, v, w);
    oracle.insert(Edge{id, u, v, w});
    const MsfDelta want = snapshot_diff(before, oracle.msf());
    if (!(seq.last_delta() == want)) ++mismatches;
    if (!(par.last_delta() == want)) ++mismatches;
  };

  for (std::uint32_t i = 0; i < 120; ++i) do_insert();

  std::uint64_t deletions = 0, with_replacement = 0;
  for (std::uint32_t round = 0; round < 500; ++round) {
    const std::vector<EdgeId> tree = oracle.msf();
    if (tree.empty()) {
      do_insert();
      continue;
    }
    std::uniform_int_distribution<std::size_t> pick(0, tree.size() - 1);
    const EdgeId victim = tree[pick(rng)];
    const Edge ve = oracle.live().at(victim);

    // Exhaustive replacement: split the forest at the victim, then scan every
    // remaining live edge for the minimum-weight one crossing the split.
    UnionFind uf(n);
    for (EdgeId id : tree)
      if (id != victim) {
        const Edge& e = oracle.live().at(id);
        uf.unite(e.u, e.v);
      }
    std::optional<Edge> best;
    for (const auto& [id, e] : oracle.live()) {
      if (id == victim) continue;
      const std::size_t ru = uf.find(e.u), rv = uf.find(e.v);
      const std::size_t ra = uf.find(ve.u), rb = uf.find(ve.v);
      const bool crosses = (ru == ra && rv == rb) || (ru == rb && rv == ra);
      if (!crosses) continue;
      if (!best || e.w < best->w || (e.w == best->w && e.id < best->id))
        best = e;
    }

    MsfDelta want;
    want.removed.push_back(victim);
    if (best) {
      want.added.push_back(best->id);
      ++with_replacement;
    }
    seq.erase(victim);
    par.erase(victim);
    oracle.erase(victim);
    ++deletions;
    if (!(seq.last_delta() == want)) ++mismatches;
    if (!(par.last_delta() == want)) ++mismatches;
    if (seq.msf() != oracle.msf()) ++mismatches;
    if (par.msf() != oracle.msf()) ++mismatches;

    do_insert();  // keep the pool of candidate edges topped up
  }

  t.surgery(seq.engine().max_surgery_per_euler_op());
  t.surgery(par.engine().max_surgery_per_euler_op());
  t.pram_violations += par.engine().pram()->totals().violations;
  ++t.machine_runs;

  Verdict v;
  v.pass = mismatches == 0 && deletions == 500;
  v.detail = std::to_string(deletions) + " forced tree-edge deletions (n=48, " +
             std::to_string(with_replacement) +
             " had a crossing replacement), both engine modes vs exhaustive "
             "union-find recompute: " +
             std::to_string(mismatches) + " mismatches (" +
             fmt(secs_since(t0)) + " s)";
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) {
    const int c = std::atoi(argv[i]);
    if (c < 1 || c > 10) {
      std::cerr << "usage: acceptance [criterion numbers 1..10]\n";
      return 2;
    }
    wanted.insert(c);
  }
  if (wanted.empty())
    for (int c = 1; c <= 10; ++c) wanted.insert(c);
  const auto want = [&](int c) { return wanted.count(c) != 0; };

  Tallies tallies;
  std::map<int, Verdict> verdicts;

  if (want(1) || want(3) || want(4) || want(6))
    verdicts[1] = run_block_1(tallies);
  if (want(2) || want(3) || want(6)) verdicts[2] = run_block_2(tallies);
  if (want(5) || want(3) || want(6)) verdicts[5] = run_block_5(tallies);
  if (want(7) || want(8) || want(3) || want(6)) {
    auto [v7, v8] = run_block_7_8(tallies);
    verdicts[7] = v7;
    verdicts[8] = v8;
  }
  if (want(9) || want(3) || want(6)) verdicts[9] = run_block_9(tallies);
  if (want(10) || want(3) || want(6)) verdicts[10] = run_block_10(tallies);

  verdicts[3] = Verdict{
      tallies.pram_violations == 0 && tallies.machine_runs > 0,
      std::to_string(tallies.pram_violations) +
          " exclusivity violations across " +
          std::to_string(tallies.machine_runs) + " machine-mode runs"};
  verdicts[4] =
      Verdict{tallies.mass_violations == 0 && tallies.mass_audits > 0,
              std::to_string(tallies.mass_violations) +
                  " chunk mass-bound violations across " +
                  std::to_string(tallies.mass_audits) + " per-op audits"};
  verdicts[6] = Verdict{
      tallies.max_surgery <= 4 && tallies.surgery_runs > 0,
      "worst occurrence surgery per tour split/join = " +
          std::to_string(tallies.max_surgery) + " (bound 4) across " +
          std::to_string(tallies.surgery_runs) + " engine runs"};

  bool all_pass = true;
  for (int c = 1; c <= 10; ++c) {
    if (!want(c)) continue;
    const Verdict& v = verdicts.at(c);
    std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << c << ": "
              << v.detail << "\n";
    all_pass = all_pass && v.pass;
  }
  return all_pass ? 0 : 1;
}
