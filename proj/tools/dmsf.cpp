// Command-line driver: generate random operation traces, replay them on any
// of the interchangeable executors with checkpoint verification against the
// rebuilt reference forest, and measure machine-cost scaling across sizes.
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dmsf/runner.hpp"
#include "dmsf/trace.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitError = 2;

bool machine_kind(dmsf::EngineKind kind) {
  return kind == dmsf::EngineKind::Pram ||
         kind == dmsf::EngineKind::SparsifyPar;
}

std::uint32_t sqrt_capacity(std::uint32_t n) {
  return static_cast<std::uint32_t>(
      std::ceil(std::sqrt(static_cast<double>(n))));
}

int run_gen(std::uint32_t n, std::size_t ops, std::uint64_t seed, double mix) {
  dmsf::GenOptions opt;
  opt.n = n;
  opt.num_ops = ops;
  opt.seed = seed;
  opt.insert_percent = static_cast<unsigned>(std::lround(mix * 100.0));
  dmsf::Trace t = dmsf::generate_trace(opt);
  dmsf::render_trace(t, std::cout);
  return kExitOk;
}

int run_verify(const std::string& path, const std::string& engine,
               bool engine_given, std::uint32_t k) {
  std::ifstream in(path);
  if (!in) {
    std::cerr << "cannot open trace file: " << path << "\n";
    return kExitError;
  }
  const dmsf::Trace t = dmsf::parse_trace(in);
  dmsf::RunOptions opt;
  // An explicit --engine wins; otherwise a trace's own engine header does.
  opt.kind = dmsf::parse_engine_kind(
      !engine_given && t.engine ? *t.engine : engine);
  opt.k_override = k;
  const dmsf::RunResult res = dmsf::run_trace(t, opt);
  dmsf::write_report(std::cout, res.report);
  if (machine_kind(opt.kind)) {
    dmsf::StepReport totals;
    totals.depth = res.report.total_depth;
    totals.work = res.report.total_work;
    totals.lc_depth = res.report.total_lc_depth;
    totals.max_processors = res.report.peak_processors;
    totals.violations = res.report.violations;
    dmsf::write_step_report(std::cout, totals, res.report.violation_records);
  }
  if (!res.report.ok()) {
    std::cout << "fail checks_failed=" << res.report.checks_failed << "\n";
    return kExitCheckFailed;
  }
  std::cout << "ok\n";
  return kExitOk;
}

void write_fit(std::ostream& os, const char* metric, const char* x_name,
               const std::vector<std::pair<double, double>>& pts) {
  os << "fit metric=" << metric << " x=" << x_name;
  try {
    const dmsf::AffineFit fit = dmsf::fit_affine(pts);
    os << " slope=" << fit.slope << " intercept=" << fit.intercept
       << " max_rel_residual=" << fit.max_rel_residual << "\n";
  } catch (const std::invalid_argument& e) {
    os << " error=\"" << e.what() << "\"\n";
  }
}

int run_bench(const std::vector<std::uint32_t>& sizes, std::size_t ops,
              std::uint64_t seed, const std::string& engine,
              const std::string& out_path) {
  std::ofstream file;
  std::ostream* os = &std::cout;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) {
      std::cerr << "cannot open output file: " << out_path << "\n";
      return kExitError;
    }
    os = &file;
  }
  const dmsf::EngineKind kind = dmsf::parse_engine_kind(engine);
  bool all_ok = true;
  std::vector<std::pair<double, double>> depth_pts, proc_pts, work_pts;
  for (std::uint32_t n : sizes) {
    dmsf::GenOptions gen;
    gen.n = n;
    gen.num_ops = ops;
    gen.seed = seed;
    const dmsf::Trace t = dmsf::generate_trace(gen);
    dmsf::RunOptions opt;
    opt.kind = kind;
    // Scaling runs pin the chunk capacity to ceil(sqrt(n)) so the depth and
    // processor series are comparable across sizes.
    opt.k_override = sqrt_capacity(n);
    const dmsf::RunResult res = dmsf::run_trace(t, opt);
    dmsf::write_report(*os, res.report);
    all_ok = all_ok && res.report.ok();
    const double lg = std::log2(static_cast<double>(n));
    const double rt = std::sqrt(static_cast<double>(n));
    depth_pts.emplace_back(lg, res.report.median_depth);
    proc_pts.emplace_back(rt, static_cast<double>(res.report.peak_processors));
    work_pts.emplace_back(rt * lg, res.report.median_work);
  }
  if (machine_kind(kind) && sizes.size() >= 3) {
    write_fit(*os, "depth", "log2_n", depth_pts);
    write_fit(*os, "processors", "sqrt_n", proc_pts);
    write_fit(*os, "work", "sqrt_n_log2_n", work_pts);
  }
  return all_ok ? kExitOk : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dynamic minimum spanning forest driver"};
  app.require_subcommand(1);
  const std::vector<std::string> engine_names{"seq", "pram", "sparsify-seq",
                                              "sparsify-par", "oracle"};

  auto* gen = app.add_subcommand("gen", "emit a random operation trace");
  std::uint32_t gen_n = 64;
  std::size_t gen_ops = 1000;
  std::uint64_t gen_seed = 1;
  double gen_mix = 0.6;
  gen->add_option("--n", gen_n, "vertex count")->check(CLI::PositiveNumber);
  gen->add_option("--ops", gen_ops, "insert/delete operation count");
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--mix", gen_mix, "insert fraction in [0,1] (rest deletes)")
      ->check(CLI::Range(0.0, 1.0));

  auto* ver = app.add_subcommand(
      "verify", "replay a trace, checking the forest at every checkpoint");
  std::string ver_trace;
  std::string ver_engine = "seq";
  std::uint32_t ver_k = 0;
  ver->add_option("--trace,trace", ver_trace, "trace file")->required();
  ver->add_option("--engine", ver_engine, "executor to drive")
      ->check(CLI::IsMember(engine_names));
  ver->add_option("--k", ver_k, "chunk capacity override (0 = default)");

  auto* bench = app.add_subcommand(
      "bench", "measure per-op machine cost across vertex counts");
  std::vector<std::uint32_t> bench_sizes{64, 256, 1024};
  std::size_t bench_ops = 500;
  std::uint64_t bench_seed = 1;
  std::string bench_engine = "pram";
  std::string bench_out;
  bench->add_option("--sizes", bench_sizes, "comma-separated vertex counts")
      ->delimiter(',');
  bench->add_option("--ops", bench_ops, "operations per size");
  bench->add_option("--seed", bench_seed, "generator seed");
  bench->add_option("--engine", bench_engine, "executor to drive")
      ->check(CLI::IsMember(engine_names));
  bench->add_option("--out", bench_out, "report file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return run_gen(gen_n, gen_ops, gen_seed, gen_mix);
    if (ver->parsed())
      return run_verify(ver_trace, ver_engine, ver->count("--engine") > 0,
                        ver_k);
    return run_bench(bench_sizes, bench_ops, bench_seed, bench_engine,
                     bench_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
}
