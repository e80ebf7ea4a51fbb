#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

namespace dmsf {

// Accounting totals for the simulated machine. `depth` is the sum over
// phases of the largest per-processor instruction count; `work` the sum of
// all instructions; `lc_depth` the share of depth attributed to link-cut
// splaying (always executed by the serial processor), kept separate so
// scaling reports can include or exclude it.
struct StepReport {
  std::uint64_t depth = 0;
  std::uint64_t work = 0;
  std::uint64_t lc_depth = 0;
  std::uint32_t max_processors = 0;
  std::uint64_t violations = 0;

  StepReport operator-(const StepReport& o) const {
    return StepReport{depth - o.depth, work - o.work, lc_depth - o.lc_depth,
                      max_processors, violations - o.violations};
  }
};

// Phase-synchronous shared-memory machine with exclusive-read /
// exclusive-write auditing. State lives in the host program; processors
// declare every logical cell they touch, and any cell touched by two
// distinct processors inside one phase is recorded as a violation.
// Scratch arenas additionally carry per-cell epoch stamps so "cleared"
// memory is reusable in O(1) and a read of a stale cell is caught instead
// of silently seeing old data.
class Pram {
 public:
  struct Violation {
    std::uint64_t phase = 0;
    std::uint32_t space = 0;
    std::uint64_t a = 0;
    std::uint64_t b = 0;
    std::uint32_t proc1 = 0;
    std::uint32_t proc2 = 0;  // == proc1 for stale-read violations
    std::string kind;         // "conflict" or "stale-read"
  };

  class Ctx {
   public:
    std::uint32_t proc() const { return proc_; }

    // Declare one access to logical cell (space, a, b); costs 1 instruction.
    void touch(std::uint32_t space, std::uint64_t a, std::uint64_t b = 0) {
      cells_.push_back(pack(space, a, b));
      ++instr_;
    }

    // Local (non-memory) computation.
    void charge(std::uint64_t k) { instr_ += k; }

    // Link-cut attributed computation; counts toward instructions too.
    void charge_lc(std::uint64_t k) {
      instr_ += k;
      lc_ += k;
    }

   private:
    friend class Pram;
    static std::uint64_t pack(std::uint32_t space, std::uint64_t a, std::uint64_t b);

    std::uint32_t proc_ = 0;
    std::uint64_t instr_ = 0;
    std::uint64_t lc_ = 0;
    std::vector<std::uint64_t> cells_;
    std::vector<std::uint64_t> stale_;  // cells read before being written this epoch
  };

  using Task = std::function<void(Ctx&)>;

  explicit Pram(bool use_threads = false, bool abort_on_violation = false)
      : use_threads_(use_threads), abort_on_violation_(abort_on_violation) {}

  // Run `count` processors, processor i executing fn(ctx, i), as one phase.
  void run(std::uint32_t count, const std::function<void(Ctx&, std::uint32_t)>& fn);

  // Run a heterogeneous batch; processor ids are the task indices.
  void run_tasks(std::vector<Task>& tasks);

  // One processor executing a sequential section.
  void serial(const std::function<void(Ctx&)>& fn);

  // ---- scratch arenas ----

  class Arena {
   public:
    // Forget all contents in O(1).
    void clear() { ++epoch_; }

    void write(Ctx& ctx, std::uint64_t i, std::uint64_t v) {
      ctx.touch(space_, i);
      slot(i) = {epoch_, v};
    }

    // Reading a cell not written since the last clear() records a
    // stale-read violation and yields 0.
    std::uint64_t read(Ctx& ctx, std::uint64_t i) {
      ctx.touch(space_, i);
      Cell& c = slot(i);
      if (c.stamp != epoch_) {
        ctx.stale_.push_back(Ctx::pack(space_, i, 0));
        return 0;
      }
      return c.value;
    }

    // Test whether the cell was written this epoch; costs one access.
    bool has(Ctx& ctx, std::uint64_t i) {
      ctx.touch(space_, i);
      return slot(i).stamp == epoch_;
    }

    std::uint64_t size() const { return cells_.size(); }

   private:
    friend class Pram;
    struct Cell {
      std::uint64_t stamp = 0;
      std::uint64_t value = 0;
    };
    Cell& slot(std::uint64_t i);

    std::uint32_t space_ = 0;
    std::uint64_t epoch_ = 1;
    std::vector<Cell> cells_;
  };

  // Create (or fetch) the arena for a space. Size may grow on later calls.
  Arena& arena(std::uint32_t space, std::uint64_t size);

  const StepReport& totals() const { return totals_; }
  const std::vector<Violation>& violations() const { return violations_; }
  std::uint64_t phases_run() const { return phase_counter_; }

 private:
  void finish_phase(std::vector<Ctx>& ctxs);

  bool use_threads_;
  bool abort_on_violation_;
  bool in_phase_ = false;
  std::uint64_t phase_counter_ = 0;
  StepReport totals_;
  std::vector<Violation> violations_;
  std::unordered_map<std::uint32_t, Arena> arenas_;
  std::unordered_map<std::uint64_t, std::uint32_t> owner_;  // per-phase cell -> proc
};

}  // namespace dmsf
