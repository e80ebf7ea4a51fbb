#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dmsf/ids.hpp"

namespace dmsf {

// One line of an update trace.
struct TraceOp {
  enum class Kind { Insert, Delete, Check };
  Kind kind = Kind::Check;
  VertexId u = 0;       // Insert
  VertexId v = 0;       // Insert
  std::int64_t w = 0;   // Insert
  EdgeId edge = 0;      // Delete
};

// Text format, one op per line:
//   n <vertices>        required first line
//   seed <uint64>       optional header
//   engine <name>       optional header
//   i <u> <v> <w>       insert; the k-th insert line gets edge id k (from 0)
//   d <edge_id>         delete a live edge
//   c                   checkpoint: the harness verifies the forest here
struct Trace {
  std::uint32_t n = 0;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> engine;
  std::vector<TraceOp> ops;

  std::size_t insert_count() const;
  // Largest number of simultaneously live edges over the trace.
  std::size_t max_live_edges() const;
};

Trace parse_trace(std::istream& in);
Trace parse_trace_string(const std::string& text);
void render_trace(const Trace& t, std::ostream& out);
std::string render_trace_string(const Trace& t);

struct GenOptions {
  std::uint32_t n = 64;
  std::size_t num_ops = 1000;        // insert + delete ops (checkpoints extra)
  std::uint64_t seed = 1;
  unsigned insert_percent = 60;      // remainder are deletes of live edges
  std::int64_t w_min = 0;
  std::int64_t w_max = 1'000'000;
  // Checkpoint cadence: after every op when n <= 64, else after every 64 ops.
  // 0 picks that default; otherwise "after every `check_every` ops".
  std::size_t check_every = 0;
};

Trace generate_trace(const GenOptions& opt);

}  // namespace dmsf
