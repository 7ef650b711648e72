#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gridla/report.hpp"

namespace {

using gridla::RunSpec;

std::uint64_t default_seed() {
  if (const char* env = std::getenv("GRIDLA_SEED")) {
    return std::strtoull(env, nullptr, 10);
  }
  return 1;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << text;
}

struct SpecFlags {
  std::string algorithm = "lu";
  std::string layout = "scattered";
  std::string routing = "store-and-forward";
  std::string ordering = "tournament";
  std::string config_path;
  int n = 32, m = 0, s = 2, omega = 0, max_sweeps = 0;
  double c0 = 0.0, c1 = 0.0, tau_f = 1.0, hop_delay = 0.0, tol = 0.0;
  std::uint64_t seed = default_seed();
  std::string output;
};

void add_grid_flags(CLI::App* cmd, SpecFlags& fl) {
  cmd->add_option("--layout", fl.layout,
                  "column-wrapped | row-wrapped | blocked | scattered");
  cmd->add_option("--routing", fl.routing, "store-and-forward | wormhole");
  cmd->add_option("--c0", fl.c0, "message startup time");
  cmd->add_option("--c1", fl.c1, "per-word transfer time");
  cmd->add_option("--tau-f", fl.tau_f, "time per flop");
  cmd->add_option("--hop-delay", fl.hop_delay, "per-hop wormhole latency");
  cmd->add_option("--seed", fl.seed, "generator seed (default GRIDLA_SEED)");
}

RunSpec spec_from_flags(const CLI::App* cmd, const SpecFlags& fl) {
  RunSpec spec;
  if (!fl.config_path.empty()) {
    std::ifstream in(fl.config_path);
    if (!in) throw std::runtime_error("cannot open: " + fl.config_path);
    nlohmann::json j;
    in >> j;
    spec = gridla::spec_from_json(j);
  }
  auto given = [&](const std::string& name) {
    const CLI::Option* o = cmd->get_option_no_throw(name);
    return o != nullptr && o->count() > 0;
  };
  if (given("--algorithm") || fl.config_path.empty()) {
    spec.algorithm = gridla::algorithm_from_string(fl.algorithm);
  }
  if (given("--n") || fl.config_path.empty()) spec.n = fl.n;
  if (given("--m")) spec.m = fl.m;
  if (given("--layout") || fl.config_path.empty()) {
    spec.layout = gridla::layout_from_string(fl.layout);
  }
  if (given("--s") || fl.config_path.empty()) spec.grid.s = fl.s;
  if (given("--routing") || fl.config_path.empty()) {
    spec.grid.routing = gridla::routing_from_string(fl.routing);
  }
  if (given("--c0") || fl.config_path.empty()) spec.grid.c0 = fl.c0;
  if (given("--c1") || fl.config_path.empty()) spec.grid.c1 = fl.c1;
  if (given("--tau-f") || fl.config_path.empty()) spec.grid.tau_f = fl.tau_f;
  if (given("--hop-delay") || fl.config_path.empty()) {
    spec.grid.hop_delay = fl.hop_delay;
  }
  if (given("--omega")) spec.omega = fl.omega;
  if (given("--tol") || given("--max-sweeps") || given("--ordering")) {
    gridla::JacobiOptions opt = spec.jacobi.value_or(gridla::JacobiOptions{});
    if (given("--tol")) opt.tol = fl.tol;
    if (given("--max-sweeps")) opt.max_sweeps = fl.max_sweeps;
    if (given("--ordering")) {
      opt.ordering = gridla::ordering_from_string(fl.ordering);
    }
    spec.jacobi = opt;
  }
  if (given("--seed") || fl.config_path.empty()) spec.seed = fl.seed;
  if (given("--out")) spec.output = fl.output;
  return spec;
}

int cmd_gen(const std::string& kind, int rows, int cols, int band_width,
            std::uint64_t seed, const std::string& out) {
  gridla::MatrixKind mk;
  if (kind == "random") {
    mk = gridla::MatrixKind::RandomUniform;
  } else if (kind == "identity") {
    mk = gridla::MatrixKind::Identity;
  } else if (kind == "upper-triangular") {
    mk = gridla::MatrixKind::UpperTriangular;
  } else if (kind == "band") {
    mk = gridla::MatrixKind::Band;
  } else if (kind == "hilbert") {
    mk = gridla::MatrixKind::Hilbert;
  } else {
    throw std::invalid_argument("unknown matrix kind: " + kind);
  }
  const gridla::DenseMatrix a = gridla::generate(mk, rows, cols, seed, band_width);
  gridla::write_matrix_file(out, a);
  return 0;
}

int cmd_fit(const std::string& input, const std::string& out) {
  std::ifstream in(input);
  if (!in) throw std::runtime_error("cannot open: " + input);
  std::vector<gridla::FitRun> runs;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    gridla::FitRun r;
    if (row >> r.n >> r.s >> r.makespan) runs.push_back(r);
  }
  const gridla::FitResult fit = gridla::fit_params(runs);
  nlohmann::ordered_json j;
  j["runs"] = runs.size();
  j["alpha"] = fit.params.alpha;
  j["beta"] = fit.params.beta;
  j["gamma"] = fit.params.gamma;
  j["clamped"] = fit.clamped;
  j["max_rel_residual"] = fit.max_rel_residual;
  j["rms_residual"] = fit.rms_residual;
  write_text(out, j.dump(2) + "\n");
  return 0;
}

int cmd_verify(const std::string& report_path) {
  std::ifstream in(report_path);
  if (!in) throw std::runtime_error("cannot open: " + report_path);
  nlohmann::json stored;
  in >> stored;
  const RunSpec spec = gridla::spec_from_json(stored.at("spec"));
  const gridla::RunReport fresh = gridla::run_bench(spec);
  if (nlohmann::json(fresh.doc) != stored) {
    std::cerr << "verify: report does not reproduce\n";
    return 1;
  }
  if (!fresh.passed) {
    std::cerr << "verify: reproduced, but checks failed\n";
    return 1;
  }
  std::cout << "verify: ok\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gridla: dense linear algebra on a simulated processor grid"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "write a matrix file");
  std::string gen_kind = "random", gen_out;
  int gen_rows = 8, gen_cols = 8, gen_band = 1;
  std::uint64_t gen_seed = default_seed();
  gen->add_option("--kind", gen_kind,
                  "random | identity | upper-triangular | band | hilbert");
  gen->add_option("--rows", gen_rows)->check(CLI::PositiveNumber);
  gen->add_option("--cols", gen_cols)->check(CLI::PositiveNumber);
  gen->add_option("--band-width", gen_band);
  gen->add_option("--seed", gen_seed);
  gen->add_option("--out", gen_out)->required();

  // bench
  auto* bench = app.add_subcommand("bench", "run one benchmark");
  SpecFlags bf;
  bench->add_option("--algorithm", bf.algorithm,
                    "lu | solve | qr-householder | qr-givens | svd | eig");
  bench->add_option("--n", bf.n)->check(CLI::PositiveNumber);
  bench->add_option("--m", bf.m, "row count for rectangular problems");
  bench->add_option("--s", bf.s, "grid side")->check(CLI::PositiveNumber);
  add_grid_flags(bench, bf);
  bench->add_option("--omega", bf.omega, "strip width (lu)");
  bench->add_option("--tol", bf.tol, "rotation threshold (svd/eig)");
  bench->add_option("--max-sweeps", bf.max_sweeps);
  bench->add_option("--ordering", bf.ordering, "cyclic-rows | tournament");
  bench->add_option("--config", bf.config_path, "JSON RunSpec defaults");
  bench->add_option("--out", bf.output, "report path (default stdout)");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "run a grid of benchmarks and fit");
  SpecFlags sf;
  std::vector<int> sweep_n, sweep_s;
  std::string sweep_csv;
  sweep->add_option("--algorithm", sf.algorithm);
  sweep->add_option("--n", sweep_n, "problem sizes")->required();
  sweep->add_option("--s", sweep_s, "grid sides")->required();
  add_grid_flags(sweep, sf);
  sweep->add_option("--csv", sweep_csv, "per-run CSV path");
  sweep->add_option("--out", sf.output, "JSON report path (default stdout)");

  // fit
  auto* fit = app.add_subcommand("fit", "fit the cost model from a CSV");
  std::string fit_in, fit_out;
  fit->add_option("--input", fit_in, "CSV rows: n,s,makespan")->required();
  fit->add_option("--out", fit_out, "output path (default stdout)");

  // verify
  auto* verify = app.add_subcommand("verify", "re-run a report and compare");
  std::string verify_path;
  verify->add_option("report", verify_path)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed()) {
      return cmd_gen(gen_kind, gen_rows, gen_cols, gen_band, gen_seed, gen_out);
    }
    if (bench->parsed()) {
      const RunSpec spec = spec_from_flags(bench, bf);
      const gridla::RunReport rep = gridla::run_bench(spec);
      write_text(spec.output, rep.text());
      return rep.passed ? 0 : 1;
    }
    if (sweep->parsed()) {
      std::vector<RunSpec> specs;
      for (int s : sweep_s) {
        for (int n : sweep_n) {
          SpecFlags fl = sf;
          fl.n = n;
          fl.s = s;
          RunSpec spec = spec_from_flags(sweep, fl);
          spec.n = n;
          spec.grid.s = s;
          spec.output.clear();
          specs.push_back(spec);
        }
      }
      const gridla::SweepReport rep = gridla::run_sweep(specs);
      if (!sweep_csv.empty()) write_text(sweep_csv, rep.csv);
      write_text(sf.output, rep.doc.dump(2) + "\n");
      return rep.passed ? 0 : 1;
    }
    if (fit->parsed()) return cmd_fit(fit_in, fit_out);
    if (verify->parsed()) return cmd_verify(verify_path);
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const gridla::DegenerateDesignError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
