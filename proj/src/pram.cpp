#include "dmsf/pram.hpp"

#include <algorithm>
#include <atomic>
#include <stdexcept>
#include <thread>

namespace dmsf {

namespace {
constexpr std::uint64_t kMask28 = (std::uint64_t{1} << 28) - 1;
constexpr std::uint32_t kReported = 0x8000'0000u;
}  // namespace

std::uint64_t Pram::Ctx::pack(std::uint32_t space, std::uint64_t a, std::uint64_t b) {
  if (space > 0xff || a > kMask28 || b > kMask28)
    throw std::logic_error("pram: cell coordinate out of range");
  return (static_cast<std::uint64_t>(space) << 56) | (a << 28) | b;
}

Pram::Arena::Cell& Pram::Arena::slot(std::uint64_t i) {
  if (i >= cells_.size()) throw std::out_of_range("pram arena: index out of range");
  return cells_[i];
}

Pram::Arena& Pram::arena(std::uint32_t space, std::uint64_t size) {
  if (in_phase_) throw std::logic_error("pram: arena setup inside a phase");
  Arena& a = arenas_[space];
  a.space_ = space;
  if (a.cells_.size() < size) a.cells_.resize(size);
  return a;
}

void Pram::run(std::uint32_t count, const std::function<void(Ctx&, std::uint32_t)>& fn) {
  if (count == 0) return;
  std::vector<Task> tasks;
  tasks.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    tasks.push_back([&fn, i](Ctx& ctx) { fn(ctx, i); });
  }
  run_tasks(tasks);
}

void Pram::serial(const std::function<void(Ctx&)>& fn) {
  std::vector<Task> tasks;
  tasks.push_back(fn);
  run_tasks(tasks);
}

void Pram::run_tasks(std::vector<Task>& tasks) {
  if (tasks.empty()) return;
  if (in_phase_) throw std::logic_error("pram: nested phase");
  in_phase_ = true;
  std::vector<Ctx> ctxs(tasks.size());
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    ctxs[i].proc_ = static_cast<std::uint32_t>(i);
  }
  if (!use_threads_ || tasks.size() == 1) {
    for (std::size_t i = 0; i < tasks.size(); ++i) tasks[i](ctxs[i]);
  } else {
    std::atomic<std::size_t> next{0};
    unsigned nthreads = std::min<std::size_t>(std::thread::hardware_concurrency(),
                                              tasks.size());
    if (nthreads < 2) nthreads = 2;
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (unsigned t = 0; t < nthreads; ++t) {
      pool.emplace_back([&] {
        for (;;) {
          std::size_t i = next.fetch_add(1);
          if (i >= tasks.size()) break;
          tasks[i](ctxs[i]);
        }
      });
    }
    for (std::thread& th : pool) th.join();
  }
  finish_phase(ctxs);
}

void Pram::finish_phase(std::vector<Ctx>& ctxs) {
  ++phase_counter_;
  owner_.clear();
  std::uint64_t max_instr = 0, sum_instr = 0, max_lc = 0;
  std::size_t before = violations_.size();
  for (Ctx& ctx : ctxs) {
    max_instr = std::max(max_instr, ctx.instr_);
    sum_instr += ctx.instr_;
    max_lc = std::max(max_lc, ctx.lc_);
    for (std::uint64_t cell : ctx.cells_) {
      auto [it, fresh] = owner_.try_emplace(cell, ctx.proc_);
      if (fresh) continue;
      if ((it->second & ~kReported) == ctx.proc_) continue;
      if (it->second & kReported) continue;  // one report per cell per phase
      Violation v;
      v.phase = phase_counter_;
      v.space = static_cast<std::uint32_t>(cell >> 56);
      v.a = (cell >> 28) & kMask28;
      v.b = cell & kMask28;
      v.proc1 = it->second & ~kReported;
      v.proc2 = ctx.proc_;
      v.kind = "conflict";
      violations_.push_back(v);
      it->second |= kReported;
    }
    for (std::uint64_t cell : ctx.stale_) {
      Violation v;
      v.phase = phase_counter_;
      v.space = static_cast<std::uint32_t>(cell >> 56);
      v.a = (cell >> 28) & kMask28;
      v.b = cell & kMask28;
      v.proc1 = ctx.proc_;
      v.proc2 = ctx.proc_;
      v.kind = "stale-read";
      violations_.push_back(v);
    }
  }
  totals_.depth += max_instr;
  totals_.work += sum_instr;
  totals_.lc_depth += max_lc;
  totals_.max_processors =
      std::max<std::uint32_t>(totals_.max_processors, static_cast<std::uint32_t>(ctxs.size()));
  totals_.violations = violations_.size();
  in_phase_ = false;
  if (abort_on_violation_ && violations_.size() > before) {
    const Violation& v = violations_[before];
    throw std::logic_error("pram: " + v.kind + " at phase " + std::to_string(v.phase) +
                           " cell (" + std::to_string(v.space) + "," + std::to_string(v.a) +
                           "," + std::to_string(v.b) + ") procs " + std::to_string(v.proc1) +
                           "," + std::to_string(v.proc2));
  }
}

}  // namespace dmsf
