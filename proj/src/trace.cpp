#include "dmsf/trace.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace dmsf {

std::size_t Trace::insert_count() const {
  return static_cast<std::size_t>(
      std::count_if(ops.begin(), ops.end(),
                    [](const TraceOp& op) { return op.kind == TraceOp::Kind::Insert; }));
}

std::size_t Trace::max_live_edges() const {
  std::size_t live = 0, peak = 0;
  for (const TraceOp& op : ops) {
    if (op.kind == TraceOp::Kind::Insert) peak = std::max(peak, ++live);
    else if (op.kind == TraceOp::Kind::Delete) --live;
  }
  return peak;
}

Trace parse_trace(std::istream& in) {
  Trace t;
  bool have_n = false;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    auto fail = [&](const std::string& why) {
      throw std::invalid_argument("trace line " + std::to_string(lineno) + ": " + why);
    };
    if (tag == "n") {
      if (have_n) fail("duplicate n line");
      if (!(ls >> t.n)) fail("malformed n line");
      have_n = true;
    } else if (tag == "seed") {
      std::uint64_t s;
      if (!(ls >> s)) fail("malformed seed line");
      t.seed = s;
    } else if (tag == "engine") {
      std::string e;
      if (!(ls >> e)) fail("malformed engine line");
      t.engine = e;
    } else if (tag == "i") {
      if (!have_n) fail("op before n line");
      TraceOp op;
      op.kind = TraceOp::Kind::Insert;
      if (!(ls >> op.u >> op.v >> op.w)) fail("malformed insert line");
      t.ops.push_back(op);
    } else if (tag == "d") {
      if (!have_n) fail("op before n line");
      TraceOp op;
      op.kind = TraceOp::Kind::Delete;
      if (!(ls >> op.edge)) fail("malformed delete line");
      t.ops.push_back(op);
    } else if (tag == "c") {
      if (!have_n) fail("op before n line");
      t.ops.push_back(TraceOp{});
    } else {
      fail("unknown tag '" + tag + "'");
    }
  }
  if (!have_n) throw std::invalid_argument("trace: missing n line");
  return t;
}

Trace parse_trace_string(const std::string& text) {
  std::istringstream in(text);
  return parse_trace(in);
}

void render_trace(const Trace& t, std::ostream& out) {
  out << "n " << t.n << "\n";
  if (t.seed) out << "seed " << *t.seed << "\n";
  if (t.engine) out << "engine " << *t.engine << "\n";
  for (const TraceOp& op : t.ops) {
    switch (op.kind) {
      case TraceOp::Kind::Insert:
        out << "i " << op.u << " " << op.v << " " << op.w << "\n";
        break;
      case TraceOp::Kind::Delete:
        out << "d " << op.edge << "\n";
        break;
      case TraceOp::Kind::Check:
        out << "c\n";
        break;
    }
  }
}

std::string render_trace_string(const Trace& t) {
  std::ostringstream out;
  render_trace(t, out);
  return out.str();
}

Trace generate_trace(const GenOptions& opt) {
  if (opt.n < 2) throw std::invalid_argument("generate_trace: need n >= 2");
  Trace t;
  t.n = opt.n;
  t.seed = opt.seed;
  std::mt19937_64 rng(opt.seed);
  std::uniform_int_distribution<std::uint32_t> vert(0, opt.n - 1);
  std::uniform_int_distribution<std::int64_t> weight(opt.w_min, opt.w_max);
  std::uniform_int_distribution<unsigned> pct(0, 99);

  std::size_t cadence = opt.check_every;
  if (cadence == 0) cadence = (opt.n <= 64) ? 1 : 64;

  std::vector<EdgeId> live;  // ascending order maintained below
  EdgeId next_id = 0;
  for (std::size_t k = 0; k < opt.num_ops; ++k) {
    bool do_insert = live.empty() || pct(rng) < opt.insert_percent;
    TraceOp op;
    if (do_insert) {
      op.kind = TraceOp::Kind::Insert;
      op.u = vert(rng);
      do {
        op.v = vert(rng);
      } while (op.v == op.u);
      op.w = weight(rng);
      live.push_back(next_id++);
    } else {
      op.kind = TraceOp::Kind::Delete;
      std::uniform_int_distribution<std::size_t> pick(0, live.size() - 1);
      std::size_t at = pick(rng);
      op.edge = live[at];
      live.erase(live.begin() + static_cast<std::ptrdiff_t>(at));
    }
    t.ops.push_back(op);
    if ((k + 1) % cadence == 0) t.ops.push_back(TraceOp{});
  }
  return t;
}

}  // namespace dmsf
