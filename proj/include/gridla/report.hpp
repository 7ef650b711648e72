#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gridla/fabric.hpp"
#include "gridla/jacobi.hpp"
#include "gridla/layout.hpp"
#include "gridla/matrix.hpp"
#include "gridla/perf.hpp"

namespace gridla {

enum class Algorithm { Lu, Solve, QrHouseholder, QrGivens, Svd, Eig };

std::string to_string(Algorithm a);
std::string to_string(LayoutKind k);
std::string to_string(Routing r);
std::string to_string(SweepOrdering o);
Algorithm algorithm_from_string(const std::string& s);
LayoutKind layout_from_string(const std::string& s);
Routing routing_from_string(const std::string& s);
SweepOrdering ordering_from_string(const std::string& s);

/// One benchmark run: what to factor, on what grid, and how.
struct RunSpec {
  Algorithm algorithm = Algorithm::Lu;
  int n = 32;
  int m = 0;  // row count for rectangular problems; 0 means square
  LayoutKind layout = LayoutKind::Scattered;
  GridConfig grid;
  std::optional<int> omega;           // lu only
  std::optional<JacobiOptions> jacobi;  // svd/eig only
  std::uint64_t seed = 1;
  std::string output;  // report path; empty writes to stdout, not echoed

  int rows() const { return m > 0 ? m : n; }
  void validate() const;  // throws std::invalid_argument
};

nlohmann::ordered_json spec_to_json(const RunSpec& spec);
RunSpec spec_from_json(const nlohmann::json& j);

struct RunReport {
  nlohmann::ordered_json doc;
  bool passed = false;

  std::string text() const { return doc.dump(2) + "\n"; }
};

/// Execute one run and assemble the deterministic report document.
RunReport run_bench(const RunSpec& spec);

struct SweepReport {
  nlohmann::ordered_json doc;
  std::string csv;
  bool passed = false;
  FitResult fit;
};

/// Run every spec, fit the cost model over the collected makespans, and
/// report per-run rows with fitted predictions.
SweepReport run_sweep(const std::vector<RunSpec>& specs);

/// Shortest decimal rendering that round-trips to the same double.
std::string format_double(double x);

void write_matrix_file(const std::string& path, const DenseMatrix& a);
DenseMatrix read_matrix_file(const std::string& path);

}  // namespace gridla
