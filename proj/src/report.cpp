#include "gridla/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "gridla/lu.hpp"
#include "gridla/qr.hpp"

namespace gridla {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

struct Check {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double bound = 0.0;
};

nlohmann::ordered_json checks_to_json(const std::vector<Check>& checks) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const Check& c : checks) {
    arr.push_back({{"name", c.name},
                   {"pass", c.pass},
                   {"value", c.value},
                   {"bound", c.bound}});
  }
  return arr;
}

nlohmann::ordered_json ledger_to_json(const CostLedger& led) {
  nlohmann::ordered_json j;
  j["makespan"] = led.makespan();
  j["total_flops"] = led.total_flops();
  j["total_words"] = led.total_words();
  j["total_messages"] = led.total_messages();
  nlohmann::ordered_json per = nlohmann::ordered_json::array();
  for (int p = 0; p < led.processors(); ++p) {
    const ProcStats& st = led.at(p);
    per.push_back({{"flops", st.flops},
                   {"words_sent", st.words_sent},
                   {"words_received", st.words_received},
                   {"messages_sent", st.messages_sent},
                   {"clock", st.clock}});
  }
  j["per_processor"] = per;
  return j;
}

double max_abs_gram_deviation(const DenseMatrix& q) {
  // || Q^T Q - I ||_max without forming the product matrix
  double worst = 0.0;
  for (int i = 0; i < q.cols(); ++i) {
    for (int j = i; j < q.cols(); ++j) {
      double d = 0.0;
      for (int k = 0; k < q.rows(); ++k) d += q(k, i) * q(k, j);
      if (i == j) d -= 1.0;
      worst = std::max(worst, std::fabs(d));
    }
  }
  return worst;
}

DenseMatrix symmetrize(const DenseMatrix& a) {
  DenseMatrix b(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < a.cols(); ++j) b(i, j) = a(i, j) + a(j, i);
  }
  return b;
}

void push(std::vector<Check>& out, const std::string& name, double value,
          double bound) {
  out.push_back({name, value <= bound, value, bound});
}

}  // namespace

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::Lu: return "lu";
    case Algorithm::Solve: return "solve";
    case Algorithm::QrHouseholder: return "qr-householder";
    case Algorithm::QrGivens: return "qr-givens";
    case Algorithm::Svd: return "svd";
    case Algorithm::Eig: return "eig";
  }
  throw std::logic_error("bad algorithm");
}

std::string to_string(LayoutKind k) {
  switch (k) {
    case LayoutKind::ColumnWrapped: return "column-wrapped";
    case LayoutKind::RowWrapped: return "row-wrapped";
    case LayoutKind::Blocked: return "blocked";
    case LayoutKind::Scattered: return "scattered";
  }
  throw std::logic_error("bad layout kind");
}

std::string to_string(Routing r) {
  return r == Routing::StoreAndForward ? "store-and-forward" : "wormhole";
}

std::string to_string(SweepOrdering o) {
  return o == SweepOrdering::CyclicRows ? "cyclic-rows" : "tournament";
}

Algorithm algorithm_from_string(const std::string& s) {
  if (s == "lu") return Algorithm::Lu;
  if (s == "solve") return Algorithm::Solve;
  if (s == "qr-householder") return Algorithm::QrHouseholder;
  if (s == "qr-givens") return Algorithm::QrGivens;
  if (s == "svd") return Algorithm::Svd;
  if (s == "eig") return Algorithm::Eig;
  throw std::invalid_argument("unknown algorithm: " + s);
}

LayoutKind layout_from_string(const std::string& s) {
  if (s == "column-wrapped") return LayoutKind::ColumnWrapped;
  if (s == "row-wrapped") return LayoutKind::RowWrapped;
  if (s == "blocked") return LayoutKind::Blocked;
  if (s == "scattered") return LayoutKind::Scattered;
  throw std::invalid_argument("unknown layout: " + s);
}

Routing routing_from_string(const std::string& s) {
  if (s == "store-and-forward") return Routing::StoreAndForward;
  if (s == "wormhole") return Routing::Wormhole;
  throw std::invalid_argument("unknown routing: " + s);
}

SweepOrdering ordering_from_string(const std::string& s) {
  if (s == "cyclic-rows") return SweepOrdering::CyclicRows;
  if (s == "tournament") return SweepOrdering::Tournament;
  throw std::invalid_argument("unknown ordering: " + s);
}

void RunSpec::validate() const {
  grid.validate();
  if (n < 1) throw std::invalid_argument("n >= 1 required");
  const bool rectangular = algorithm == Algorithm::QrHouseholder ||
                           algorithm == Algorithm::QrGivens ||
                           algorithm == Algorithm::Svd;
  if (m != 0) {
    if (!rectangular) {
      throw std::invalid_argument("m is only meaningful for qr/svd");
    }
    if (m < n) throw std::invalid_argument("m >= n required for qr/svd");
  }
  if (omega) {
    if (algorithm != Algorithm::Lu) {
      throw std::invalid_argument("omega applies to lu only");
    }
    if (*omega < 1 || *omega > n) {
      throw std::invalid_argument("omega must lie in [1, n]");
    }
  }
  if (jacobi) {
    if (algorithm != Algorithm::Svd && algorithm != Algorithm::Eig) {
      throw std::invalid_argument("jacobi options apply to svd/eig only");
    }
    if (jacobi->tol <= 0.0) throw std::invalid_argument("tol must be positive");
    if (jacobi->max_sweeps < 1) {
      throw std::invalid_argument("max_sweeps >= 1 required");
    }
  }
}

nlohmann::ordered_json spec_to_json(const RunSpec& spec) {
  nlohmann::ordered_json j;
  j["algorithm"] = to_string(spec.algorithm);
  j["n"] = spec.n;
  j["m"] = spec.m;
  j["layout"] = to_string(spec.layout);
  j["s"] = spec.grid.s;
  j["routing"] = to_string(spec.grid.routing);
  j["c0"] = spec.grid.c0;
  j["c1"] = spec.grid.c1;
  j["tau_f"] = spec.grid.tau_f;
  j["hop_delay"] = spec.grid.hop_delay;
  if (spec.omega) {
    j["omega"] = *spec.omega;
  } else {
    j["omega"] = nullptr;
  }
  if (spec.jacobi) {
    j["jacobi"] = {{"tol", spec.jacobi->tol},
                   {"max_sweeps", spec.jacobi->max_sweeps},
                   {"ordering", to_string(spec.jacobi->ordering)},
                   {"extra_step_even_n", spec.jacobi->extra_step_even_n}};
  } else {
    j["jacobi"] = nullptr;
  }
  j["seed"] = spec.seed;
  return j;
}

RunSpec spec_from_json(const nlohmann::json& j) {
  RunSpec spec;
  if (j.contains("algorithm")) {
    spec.algorithm = algorithm_from_string(j.at("algorithm"));
  }
  if (j.contains("n")) spec.n = j.at("n");
  if (j.contains("m")) spec.m = j.at("m");
  if (j.contains("layout")) spec.layout = layout_from_string(j.at("layout"));
  if (j.contains("s")) spec.grid.s = j.at("s");
  if (j.contains("routing")) {
    spec.grid.routing = routing_from_string(j.at("routing"));
  }
  if (j.contains("c0")) spec.grid.c0 = j.at("c0");
  if (j.contains("c1")) spec.grid.c1 = j.at("c1");
  if (j.contains("tau_f")) spec.grid.tau_f = j.at("tau_f");
  if (j.contains("hop_delay")) spec.grid.hop_delay = j.at("hop_delay");
  if (j.contains("omega") && !j.at("omega").is_null()) {
    spec.omega = int(j.at("omega"));
  }
  if (j.contains("jacobi") && !j.at("jacobi").is_null()) {
    const auto& o = j.at("jacobi");
    JacobiOptions opt;
    if (o.contains("tol")) opt.tol = o.at("tol");
    if (o.contains("max_sweeps")) opt.max_sweeps = o.at("max_sweeps");
    if (o.contains("ordering")) {
      opt.ordering = ordering_from_string(o.at("ordering"));
    }
    if (o.contains("extra_step_even_n")) {
      opt.extra_step_even_n = o.at("extra_step_even_n");
    }
    spec.jacobi = opt;
  }
  if (j.contains("seed")) spec.seed = j.at("seed");
  return spec;
}

RunReport run_bench(const RunSpec& spec) {
  spec.validate();
  const int rows = spec.rows();
  const int n = spec.n;

  nlohmann::ordered_json metrics;
  std::vector<Check> checks;
  CostLedger ledger(spec.grid.processors());

  try {
    switch (spec.algorithm) {
      case Algorithm::Lu: {
        const DenseMatrix a = generate(MatrixKind::RandomUniform, n, n, spec.seed);
        const Layout lay(spec.layout, spec.grid.s, n, n);
        std::optional<BlockParams> block;
        if (spec.omega) block = BlockParams{*spec.omega};
        const LUFactorization f = lu_factor(a, lay, spec.grid, block);
        ledger = f.ledger;
        const double resid = f.residual(a);
        const double anorm = norm(a, NormKind::Inf);
        metrics["residual_inf"] = resid;
        metrics["matrix_norm_inf"] = anorm;
        metrics["max_multiplier"] = f.max_multiplier();
        metrics["max_step_words"] = f.max_step_words;
        push(checks, "lu_residual", resid, 64.0 * n * kEps * anorm);
        push(checks, "multiplier_bound", f.max_multiplier(), 1.0);
        break;
      }
      case Algorithm::Solve: {
        const DenseMatrix a = generate(MatrixKind::RandomUniform, n, n, spec.seed);
        const DenseMatrix b =
            generate(MatrixKind::RandomUniform, n, 1, spec.seed + 1);
        const Layout lay(spec.layout, spec.grid.s, n, n);
        const SolveResult sol = lu_solve(a, b, lay, spec.grid);
        ledger = sol.ledger;
        double resid = 0.0, xmax = 0.0;
        for (int i = 0; i < n; ++i) {
          double r = -b(i, 0);
          for (int j = 0; j < n; ++j) r += a(i, j) * sol.x(j, 0);
          resid = std::max(resid, std::fabs(r));
          xmax = std::max(xmax, std::fabs(sol.x(i, 0)));
        }
        const double scale =
            norm(a, NormKind::Inf) * xmax + norm(b, NormKind::Inf);
        metrics["residual_inf"] = resid;
        metrics["solution_norm_max"] = xmax;
        push(checks, "solve_residual", resid, 1024.0 * n * kEps * scale);
        break;
      }
      case Algorithm::QrHouseholder:
      case Algorithm::QrGivens: {
        const DenseMatrix a =
            generate(MatrixKind::RandomUniform, rows, n, spec.seed);
        const Layout lay(spec.layout, spec.grid.s, rows, n);
        const QRFactorization f = spec.algorithm == Algorithm::QrHouseholder
                                      ? qr_householder(a, lay, spec.grid)
                                      : qr_givens(a, lay, spec.grid);
        ledger = f.ledger;
        const DenseMatrix q = f.thin_q();
        const DenseMatrix qr = multiply(q, f.r);
        double recon = 0.0;
        for (int i = 0; i < rows; ++i) {
          double row_sum = 0.0;
          for (int j = 0; j < n; ++j) row_sum += std::fabs(a(i, j) - qr(i, j));
          recon = std::max(recon, row_sum);
        }
        const double orth = max_abs_gram_deviation(q);
        const double anorm = norm(a, NormKind::Inf);
        metrics["orthogonality_max"] = orth;
        metrics["reconstruction_inf"] = recon;
        if (spec.algorithm == Algorithm::QrGivens) {
          metrics["rotations"] = f.rotations.size();
        }
        push(checks, "q_orthogonality", orth, 1e-12);
        push(checks, "qr_reconstruction", recon, 1e3 * rows * kEps * anorm);
        break;
      }
      case Algorithm::Svd: {
        const DenseMatrix a =
            generate(MatrixKind::RandomUniform, rows, n, spec.seed);
        const Layout lay(spec.layout, spec.grid.s, rows, n);
        const JacobiOptions opt = spec.jacobi.value_or(JacobiOptions{});
        const SVDResult r = hestenes_svd(a, opt, lay, spec.grid);
        ledger = r.ledger;
        double sum_sq = 0.0;
        for (double sv : r.sigma) sum_sq += sv * sv;
        const double fro = norm(a, NormKind::Frobenius);
        const double fro_sq = fro * fro;
        DenseMatrix av = multiply(a, r.v);
        for (int j = 0; j < n; ++j) {
          for (int i = 0; i < rows; ++i) {
            av(i, j) -= r.u_tilde(i, j) * r.sigma[j];
          }
        }
        const double factor_err = norm(av, NormKind::Frobenius);
        metrics["sigma"] = r.sigma;
        metrics["sweeps_used"] = r.sweeps_used;
        metrics["rotations"] = r.rotations;
        metrics["max_abs_theta"] = r.max_abs_theta;
        push(checks, "frobenius_conservation", std::fabs(sum_sq - fro_sq),
             1e-10 * fro_sq);
        push(checks, "v_orthogonality", max_abs_gram_deviation(r.v), 1e-12);
        push(checks, "factorization", factor_err, 1e-10 * fro);
        push(checks, "theta_cap", r.max_abs_theta,
             std::atan(1.0) + 1e-15);  // pi/4
        break;
      }
      case Algorithm::Eig: {
        const DenseMatrix b = symmetrize(
            generate(MatrixKind::RandomUniform, n, n, spec.seed));
        const JacobiOptions opt = spec.jacobi.value_or(JacobiOptions{});
        const EigResult r = jacobi_eig(b, opt, spec.grid);
        ledger = r.ledger;
        double tr = 0.0, sum = 0.0;
        for (int i = 0; i < n; ++i) tr += b(i, i);
        for (double ev : r.eigenvalues) sum += ev;
        const double fro = norm(b, NormKind::Frobenius);
        DenseMatrix d = multiply(transpose(r.v), multiply(b, r.v));
        for (int i = 0; i < n; ++i) d(i, i) -= r.eigenvalues[i];
        const double diag_err = norm(d, NormKind::Frobenius);
        metrics["eigenvalues"] = r.eigenvalues;
        metrics["sweeps_used"] = r.sweeps_used;
        metrics["rotations"] = r.rotations;
        push(checks, "trace_preservation", std::fabs(sum - tr),
             1e-10 * std::max(std::fabs(tr), fro));
        push(checks, "v_orthogonality", max_abs_gram_deviation(r.v), 1e-12);
        push(checks, "diagonalization", diag_err, 1e-10 * std::max(fro, 1.0));
        break;
      }
    }
  } catch (const std::runtime_error& e) {
    checks.push_back({std::string("no_exception: ") + e.what(), false, 1.0, 0.0});
  }

  RunReport out;
  out.passed = true;
  for (const Check& c : checks) out.passed = out.passed && c.pass;
  out.doc["spec"] = spec_to_json(spec);
  out.doc["metrics"] = metrics;
  out.doc["ledger"] = ledger_to_json(ledger);
  out.doc["checks"] = checks_to_json(checks);
  out.doc["passed"] = out.passed;
  return out;
}

SweepReport run_sweep(const std::vector<RunSpec>& specs) {
  if (specs.size() < 3) {
    throw DegenerateDesignError("sweep needs at least three runs");
  }
  SweepReport out;
  std::vector<FitRun> fit_runs;
  std::vector<nlohmann::ordered_json> rows;
  out.passed = true;
  for (const RunSpec& spec : specs) {
    const RunReport rep = run_bench(spec);
    const double makespan = rep.doc["ledger"]["makespan"];
    fit_runs.push_back({spec.n, spec.grid.s, makespan});
    nlohmann::ordered_json row;
    row["algorithm"] = to_string(spec.algorithm);
    row["n"] = spec.n;
    row["s"] = spec.grid.s;
    row["layout"] = to_string(spec.layout);
    row["seed"] = spec.seed;
    row["makespan"] = makespan;
    row["total_flops"] = rep.doc["ledger"]["total_flops"];
    row["total_words"] = rep.doc["ledger"]["total_words"];
    row["passed"] = rep.passed;
    rows.push_back(std::move(row));
    out.passed = out.passed && rep.passed;
  }
  out.fit = fit_params(fit_runs);

  std::ostringstream csv;
  csv << "algorithm,n,s,layout,seed,makespan,total_flops,total_words,"
         "predicted,rel_error,passed\n";
  nlohmann::ordered_json jrows = nlohmann::ordered_json::array();
  for (auto& row : rows) {
    const double pred =
        predict_time(out.fit.params, double(row["n"]), double(row["s"]));
    const double rel =
        std::fabs(pred - double(row["makespan"])) / double(row["makespan"]);
    row["predicted"] = pred;
    row["rel_error"] = rel;
    csv << std::string(row["algorithm"]) << ',' << int(row["n"]) << ','
        << int(row["s"]) << ',' << std::string(row["layout"]) << ','
        << std::uint64_t(row["seed"]) << ','
        << format_double(double(row["makespan"])) << ','
        << std::int64_t(row["total_flops"]) << ','
        << std::int64_t(row["total_words"]) << ',' << format_double(pred)
        << ',' << format_double(rel) << ','
        << (bool(row["passed"]) ? "1" : "0") << '\n';
    jrows.push_back(std::move(row));
  }
  out.doc["runs"] = jrows;
  out.doc["fit"] = {{"alpha", out.fit.params.alpha},
                    {"beta", out.fit.params.beta},
                    {"gamma", out.fit.params.gamma},
                    {"clamped", out.fit.clamped},
                    {"max_rel_residual", out.fit.max_rel_residual},
                    {"rms_residual", out.fit.rms_residual}};
  out.doc["passed"] = out.passed;
  out.csv = csv.str();
  return out;
}

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

void write_matrix_file(const std::string& path, const DenseMatrix& a) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << a.rows() << ' ' << a.cols() << '\n';
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < a.cols(); ++j) {
      if (j) out << ' ';
      out << format_double(a(i, j));
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

DenseMatrix read_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  int rows = 0, cols = 0;
  if (!(in >> rows >> cols) || rows < 0 || cols < 0) {
    throw std::runtime_error("bad matrix header in " + path);
  }
  DenseMatrix a(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      if (!(in >> a(i, j))) {
        throw std::runtime_error("truncated matrix data in " + path);
      }
    }
  }
  return a;
}

}  // namespace gridla
