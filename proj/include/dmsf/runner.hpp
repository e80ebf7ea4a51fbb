#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "dmsf/ids.hpp"
#include "dmsf/pram.hpp"
#include "dmsf/trace.hpp"

namespace dmsf {

// The five interchangeable trace executors. All maintain the same forest;
// they differ in structure and in whether a simulated machine runs them.
enum class EngineKind { Seq, Pram, SparsifySeq, SparsifyPar, Oracle };

// "seq", "pram", "sparsify-seq", "sparsify-par", "oracle".
EngineKind parse_engine_kind(const std::string& name);
std::string engine_kind_name(EngineKind kind);

struct RunOptions {
  EngineKind kind = EngineKind::Seq;
  std::uint32_t k_override = 0;  // chunk-capacity override (engine kinds)
  bool pram_threads = false;
  bool pram_abort = false;
};

// Machine cost of one update op (machine-mode kinds; zeros otherwise).
struct OpCost {
  std::uint64_t depth = 0;
  std::uint64_t work = 0;
  std::uint64_t lc_depth = 0;
  std::uint32_t max_processors = 0;
};

struct BenchReport {
  std::string engine;
  std::uint32_t n = 0;
  std::size_t ops = 0;
  std::uint64_t checks_run = 0;
  std::uint64_t checks_failed = 0;
  std::uint64_t violations = 0;
  std::uint32_t max_surgery = 0;  // worst single occurrence-list op
  std::uint64_t total_depth = 0;
  std::uint64_t total_work = 0;
  std::uint64_t total_lc_depth = 0;
  std::uint32_t peak_processors = 0;
  double median_depth = 0;
  double median_work = 0;
  double median_lc_depth = 0;
  double wall_ms = 0;  // informational only, never part of pass/fail
  std::vector<OpCost> per_op;              // machine-mode kinds only
  std::vector<Pram::Violation> violation_records;
  bool ok() const { return checks_failed == 0; }
};

struct RunResult {
  std::vector<EdgeId> final_msf;  // edge ids, ascending
  std::int64_t final_weight = 0;
  BenchReport report;
};

// Replays the trace on the chosen executor, comparing its forest with the
// from-scratch reference at every checkpoint op. Throws on traces that
// violate their own discipline (e.g. deleting a dead edge).
RunResult run_trace(const Trace& trace, const RunOptions& opt);

// Least-squares affine fit y ~ slope*x + intercept over >= 3 points.
// Throws std::invalid_argument on fewer points or a degenerate x spread.
struct AffineFit {
  double slope = 0;
  double intercept = 0;
  double max_rel_residual = 0;  // max |fit(x) - y| / max(|y|, 1)
  std::vector<double> residuals;
};
AffineFit fit_affine(const std::vector<std::pair<double, double>>& pts);

// Line-oriented key=value serialization.
void write_report(std::ostream& os, const BenchReport& r);
// step_report depth=.. work=.. lc_depth=.. max_processors=..
//             violations=[{step=..,cell=s:a:b,procs=p/q};..]
void write_step_report(std::ostream& os, const StepReport& rep,
                       const std::vector<Pram::Violation>& records);

}  // namespace dmsf
