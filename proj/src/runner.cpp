#include "dmsf/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>
#include <ostream>
#include <stdexcept>

#include "dmsf/check.hpp"
#include "dmsf/msf.hpp"
#include "dmsf/oracle.hpp"
#include "dmsf/sparsify.hpp"

namespace dmsf {

EngineKind parse_engine_kind(const std::string& name) {
  if (name == "seq") return EngineKind::Seq;
  if (name == "pram") return EngineKind::Pram;
  if (name == "sparsify-seq") return EngineKind::SparsifySeq;
  if (name == "sparsify-par") return EngineKind::SparsifyPar;
  if (name == "oracle") return EngineKind::Oracle;
  throw std::invalid_argument(
      "unknown engine '" + name +
      "' (expected seq, pram, sparsify-seq, sparsify-par, or oracle)");
}

std::string engine_kind_name(EngineKind kind) {
  switch (kind) {
    case EngineKind::Seq: return "seq";
    case EngineKind::Pram: return "pram";
    case EngineKind::SparsifySeq: return "sparsify-seq";
    case EngineKind::SparsifyPar: return "sparsify-par";
    case EngineKind::Oracle: return "oracle";
  }
  throw std::logic_error("unreachable engine kind");
}

namespace {

// Uniform face over the five executors for the trace loop.
class Executor {
 public:
  virtual ~Executor() = default;
  virtual void insert(EdgeId id, VertexId u, VertexId v, std::int64_t w) = 0;
  virtual void erase(EdgeId id) = 0;
  virtual std::vector<EdgeId> msf() = 0;
  virtual std::int64_t msf_weight() = 0;
  // Machine cost of the op just applied; false if this kind has none.
  virtual bool last_cost(OpCost*) { return false; }
  virtual std::uint64_t violations() { return 0; }
  virtual std::vector<Pram::Violation> violation_records() { return {}; }
  virtual std::uint32_t max_surgery() { return 0; }
  virtual std::uint32_t peak_processors() { return 0; }
};

class FacadeExecutor final : public Executor {
 public:
  FacadeExecutor(const Trace& t, const RunOptions& opt)
      : par_(opt.kind == EngineKind::Pram) {
    MsfConfig cfg;
    cfg.n = t.n;
    cfg.max_edges =
        static_cast<std::uint32_t>(std::max<std::size_t>(t.max_live_edges(), 1));
    cfg.mode = par_ ? EngineMode::Par : EngineMode::Seq;
    cfg.k_override = opt.k_override;
    cfg.pram_threads = opt.pram_threads;
    cfg.pram_abort = opt.pram_abort;
    msf_ = std::make_unique<DynamicMsf>(cfg);
  }

  void insert(EdgeId id, VertexId u, VertexId v, std::int64_t w) override {
    StepReport base = snap();
    const EdgeRecord rec = msf_->insert(u, v, w);
    DMSF_CHECK(rec.id == id, "trace edge numbering out of step");
    diff_ = snap() - base;
  }
  void erase(EdgeId id) override {
    StepReport base = snap();
    msf_->erase(id);
    diff_ = snap() - base;
  }
  std::vector<EdgeId> msf() override { return msf_->msf(); }
  std::int64_t msf_weight() override { return msf_->msf_weight_sum(); }
  bool last_cost(OpCost* out) override {
    if (!par_) return false;
    out->depth = diff_.depth;
    out->work = diff_.work;
    out->lc_depth = diff_.lc_depth;
    out->max_processors = diff_.max_processors;
    return true;
  }
  std::uint64_t violations() override {
    return par_ ? msf_->engine().pram()->totals().violations : 0;
  }
  std::vector<Pram::Violation> violation_records() override {
    return par_ ? msf_->engine().pram()->violations()
                : std::vector<Pram::Violation>{};
  }
  std::uint32_t max_surgery() override {
    return msf_->engine().max_surgery_per_euler_op();
  }
  std::uint32_t peak_processors() override {
    return par_ ? msf_->engine().pram()->totals().max_processors : 0;
  }

 private:
  StepReport snap() const {
    return par_ ? msf_->engine().pram()->totals() : StepReport{};
  }

  bool par_;
  std::unique_ptr<DynamicMsf> msf_;
  StepReport diff_{};
};

class SparsifyExecutor final : public Executor {
 public:
  SparsifyExecutor(const Trace& t, const RunOptions& opt)
      : par_(opt.kind == EngineKind::SparsifyPar) {
    SparsifyConfig cfg;
    cfg.n = t.n;
    cfg.max_edges =
        static_cast<std::uint32_t>(std::max<std::size_t>(t.max_live_edges(), 1));
    cfg.parallel = par_;
    cfg.pram_threads = opt.pram_threads;
    cfg.pram_abort = opt.pram_abort;
    sp_ = std::make_unique<Sparsifier>(cfg);
  }

  void insert(EdgeId id, VertexId u, VertexId v, std::int64_t w) override {
    const EdgeRecord rec = sp_->insert(u, v, w);
    DMSF_CHECK(rec.id == id, "trace edge numbering out of step");
  }
  void erase(EdgeId id) override { sp_->erase(id); }
  std::vector<EdgeId> msf() override { return sp_->msf(); }
  std::int64_t msf_weight() override { return sp_->msf_weight_sum(); }
  bool last_cost(OpCost* out) override {
    if (!par_) return false;
    const StepReport& rep = sp_->last_step();
    out->depth = rep.depth;
    out->work = rep.work;
    out->lc_depth = rep.lc_depth;
    out->max_processors = rep.max_processors;
    return true;
  }
  std::uint64_t violations() override { return par_ ? sp_->violations() : 0; }
  std::vector<Pram::Violation> violation_records() override {
    std::vector<Pram::Violation> out;
    if (!par_) return out;
    for (std::uint32_t lv = 0; lv < sp_->levels(); ++lv)
      for (const DynamicMsf* g : sp_->level_engines(lv)) {
        const auto& vs =
            const_cast<DynamicMsf*>(g)->engine().pram()->violations();
        out.insert(out.end(), vs.begin(), vs.end());
      }
    return out;
  }
  std::uint32_t max_surgery() override { return sp_->max_surgery(); }
  std::uint32_t peak_processors() override { return sp_->peak_processors(); }

 private:
  bool par_;
  std::unique_ptr<Sparsifier> sp_;
};

class OracleExecutor final : public Executor {
 public:
  explicit OracleExecutor(const Trace& t) : oracle_(t.n) {}
  void insert(EdgeId id, VertexId u, VertexId v, std::int64_t w) override {
    oracle_.insert(Edge{id, u, v, w});
  }
  void erase(EdgeId id) override {
    if (!oracle_.has(id)) throw std::invalid_argument("no such edge");
    oracle_.erase(id);
  }
  std::vector<EdgeId> msf() override { return oracle_.msf(); }
  std::int64_t msf_weight() override { return oracle_.msf_weight_sum(); }

 private:
  OracleMsf oracle_;
};

std::unique_ptr<Executor> make_executor(const Trace& t, const RunOptions& opt) {
  switch (opt.kind) {
    case EngineKind::Seq:
    case EngineKind::Pram:
      return std::make_unique<FacadeExecutor>(t, opt);
    case EngineKind::SparsifySeq:
    case EngineKind::SparsifyPar:
      return std::make_unique<SparsifyExecutor>(t, opt);
    case EngineKind::Oracle:
      return std::make_unique<OracleExecutor>(t);
  }
  throw std::logic_error("unreachable engine kind");
}

double median(std::vector<std::uint64_t> xs) {
  if (xs.empty()) return 0;
  std::sort(xs.begin(), xs.end());
  const std::size_t h = xs.size() / 2;
  if (xs.size() % 2 == 1) return static_cast<double>(xs[h]);
  return (static_cast<double>(xs[h - 1]) + static_cast<double>(xs[h])) / 2.0;
}

}  // namespace

RunResult run_trace(const Trace& trace, const RunOptions& opt) {
  std::unique_ptr<Executor> ex = make_executor(trace, opt);
  OracleMsf oracle(trace.n);

  RunResult res;
  BenchReport& rep = res.report;
  rep.engine = engine_kind_name(opt.kind);
  rep.n = trace.n;
  rep.ops = trace.ops.size();

  const auto t0 = std::chrono::steady_clock::now();
  EdgeId next_insert = 0;
  for (const TraceOp& op : trace.ops) {
    switch (op.kind) {
      case TraceOp::Kind::Insert: {
        const EdgeId id = next_insert++;
        ex->insert(id, op.u, op.v, op.w);
        oracle.insert(Edge{id, op.u, op.v, op.w});
        break;
      }
      case TraceOp::Kind::Delete: {
        ex->erase(op.edge);
        oracle.erase(op.edge);
        break;
      }
      case TraceOp::Kind::Check: {
        ++rep.checks_run;
        if (ex->msf() != oracle.msf()) ++rep.checks_failed;
        continue;  // checkpoints carry no machine cost
      }
    }
    OpCost cost;
    if (ex->last_cost(&cost)) {
      rep.total_depth += cost.depth;
      rep.total_work += cost.work;
      rep.total_lc_depth += cost.lc_depth;
      rep.per_op.push_back(cost);
    }
  }
  const auto t1 = std::chrono::steady_clock::now();
  rep.wall_ms =
      std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(
          t1 - t0)
          .count();

  rep.violations = ex->violations();
  rep.violation_records = ex->violation_records();
  rep.max_surgery = ex->max_surgery();
  rep.peak_processors = ex->peak_processors();
  if (!rep.per_op.empty()) {
    std::vector<std::uint64_t> d, w, l;
    d.reserve(rep.per_op.size());
    w.reserve(rep.per_op.size());
    l.reserve(rep.per_op.size());
    for (const OpCost& c : rep.per_op) {
      d.push_back(c.depth);
      w.push_back(c.work);
      l.push_back(c.lc_depth);
    }
    rep.median_depth = median(std::move(d));
    rep.median_work = median(std::move(w));
    rep.median_lc_depth = median(std::move(l));
  }
  res.final_msf = ex->msf();
  res.final_weight = ex->msf_weight();
  return res;
}

AffineFit fit_affine(const std::vector<std::pair<double, double>>& pts) {
  if (pts.size() < 3)
    throw std::invalid_argument("affine fit needs at least 3 points");
  double mx = 0, my = 0;
  for (const auto& [x, y] : pts) {
    mx += x;
    my += y;
  }
  mx /= static_cast<double>(pts.size());
  my /= static_cast<double>(pts.size());
  double sxx = 0, sxy = 0, scale = 0;
  for (const auto& [x, y] : pts) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
    scale = std::max(scale, std::abs(x));
  }
  if (sxx <= 1e-12 * std::max(1.0, scale * scale))
    throw std::invalid_argument("affine fit needs a spread of x values");
  AffineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  for (const auto& [x, y] : pts) {
    const double r = fit.slope * x + fit.intercept - y;
    fit.residuals.push_back(r);
    fit.max_rel_residual =
        std::max(fit.max_rel_residual, std::abs(r) / std::max(std::abs(y), 1.0));
  }
  return fit;
}

void write_report(std::ostream& os, const BenchReport& r) {
  os << "engine=" << r.engine << " n=" << r.n << " ops=" << r.ops
     << " checks=" << r.checks_run << " failures=" << r.checks_failed
     << " violations=" << r.violations << " max_surgery=" << r.max_surgery
     << " total_depth=" << r.total_depth << " total_work=" << r.total_work
     << " total_lc_depth=" << r.total_lc_depth
     << " peak_processors=" << r.peak_processors
     << " median_depth=" << r.median_depth << " median_work=" << r.median_work
     << " median_lc_depth=" << r.median_lc_depth << " wall_ms=" << r.wall_ms
     << "\n";
}

void write_step_report(std::ostream& os, const StepReport& rep,
                       const std::vector<Pram::Violation>& records) {
  os << "step_report depth=" << rep.depth << " work=" << rep.work
     << " lc_depth=" << rep.lc_depth
     << " max_processors=" << rep.max_processors << " violations=[";
  for (std::size_t i = 0; i < records.size(); ++i) {
    const Pram::Violation& v = records[i];
    if (i != 0) os << ';';
    os << "{step=" << v.phase << ",cell=" << v.space << ':' << v.a << ':'
       << v.b << ",procs=" << v.proc1 << '/' << v.proc2 << '}';
  }
  os << "]\n";
}

}  // namespace dmsf
