#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "gridla/errors.hpp"

namespace gridla {

enum class Routing { StoreAndForward, Wormhole };

/// Parameters of the simulated s x s processor grid. Times are abstract
/// units; tau_f is the time per floating-point operation.
struct GridConfig {
  int s = 1;
  double c0 = 0.0;         // message startup time
  double c1 = 0.0;         // per-word transfer time
  double tau_f = 1.0;      // time per flop
  double hop_delay = 0.0;  // per-hop latency under wormhole routing
  Routing routing = Routing::StoreAndForward;
  int virtual_factor = 1;  // virtual processors per real processor

  int processors() const { return s * s; }
  void validate() const;
};

struct ProcStats {
  std::int64_t flops = 0;
  std::int64_t words_sent = 0;
  std::int64_t words_received = 0;
  std::int64_t messages_sent = 0;
  double clock = 0.0;
};

class CostLedger {
 public:
  CostLedger() = default;
  explicit CostLedger(int processors) : stats_(processors) {}

  int processors() const { return int(stats_.size()); }
  ProcStats& at(int p) { return stats_[p]; }
  const ProcStats& at(int p) const { return stats_[p]; }

  double makespan() const;
  std::int64_t total_flops() const;
  std::int64_t total_words() const;  // words sent over all processors
  std::int64_t total_messages() const;

  /// Collapse a virtual-grid ledger onto real_count real processors,
  /// virtual processor v landing on real processor v / ceil(p/real_count).
  /// Each real processor time-slices its virtual processors, so its clock
  /// is the sum of their clocks.
  CostLedger fold_virtual(int real_count) const;

 private:
  std::vector<ProcStats> stats_;
};

struct Coord {
  int r = 0;
  int c = 0;
  bool operator==(const Coord&) const = default;
};

/// (value, global index) pair combined when scanning for a pivot.
struct PivotCandidate {
  double value = 0.0;
  int index = 0;
};

/// Maximum-magnitude pairing operator; the first argument wins ties.
PivotCandidate pivot_theta(const PivotCandidate& a, const PivotCandidate& b);

/// Deterministic cost-charging simulation of an s x s grid. Collectives
/// update per-processor clocks and counters; the caller performs the
/// arithmetic itself and charges it with charge_flops.
class GridFabric {
 public:
  explicit GridFabric(GridConfig cfg);

  const GridConfig& config() const { return cfg_; }
  CostLedger& ledger() { return ledger_; }
  const CostLedger& ledger() const { return ledger_; }

  int proc_id(Coord p) const { return p.r * cfg_.s + p.c; }
  void check_coord(Coord p) const;

  /// Delivery time of one message over h grid hops.
  double send_cost(int hops, std::int64_t words) const;

  void charge_flops(Coord p, std::int64_t count);

  /// Point-to-point message. The sender is charged the full delivery time;
  /// the receiver cannot proceed before the message arrives.
  void send(Coord from, Coord to, std::int64_t words);

  /// Broadcast within the origin's grid row (or column). Charged as one
  /// multicast send: the origin advances by the cost of reaching the worst
  /// receiver; each receiver observes the arrival time for its distance.
  void row_broadcast(Coord origin, std::int64_t words);
  void col_broadcast(Coord origin, std::int64_t words);

  /// Broadcast from origin to every processor on the grid (row first, then
  /// down every column).
  void broadcast_all(Coord origin, std::int64_t words);

  /// Fold per-processor inputs (indexed by grid row) over one grid column
  /// with a fixed binomial tree, then broadcast the result back down, so
  /// every processor in the column holds the combined value. The fold shape
  /// is fixed for reproducible floating-point results.
  template <typename T, typename Op>
  T column_scan(int col, const std::vector<T>& inputs, Op op,
                std::int64_t words_per_item) {
    return scan_impl(/*is_column=*/true, col, inputs, op, words_per_item);
  }

  /// Same fold over one grid row (inputs indexed by grid column).
  template <typename T, typename Op>
  T row_scan(int row, const std::vector<T>& inputs, Op op,
             std::int64_t words_per_item) {
    return scan_impl(/*is_column=*/false, row, inputs, op, words_per_item);
  }

 private:
  template <typename T, typename Op>
  T scan_impl(bool is_column, int line, const std::vector<T>& inputs, Op op,
              std::int64_t words_per_item) {
    const int s = cfg_.s;
    if (int(inputs.size()) != s) {
      throw std::invalid_argument("scan: one input per processor required");
    }
    std::vector<T> acc = inputs;
    auto coord = [&](int k) {
      return is_column ? Coord{k, line} : Coord{line, k};
    };
    for (int gap = 1; gap < s; gap *= 2) {
      for (int k = 0; k + gap < s; k += 2 * gap) {
        send(coord(k + gap), coord(k), words_per_item);
        acc[k] = op(acc[k], acc[k + gap]);
      }
    }
    if (s > 1) {
      if (is_column) {
        col_broadcast(coord(0), words_per_item);
      } else {
        row_broadcast(coord(0), words_per_item);
      }
    }
    return acc[0];
  }

  void broadcast_line(std::vector<Coord> line, int origin_pos,
                      std::int64_t words);

  GridConfig cfg_;
  CostLedger ledger_;
};

// ---------------------------------------------------------------------------
// Generic SPMD execution with per-processor step functions and mailboxes.
// ---------------------------------------------------------------------------

struct SpmdMessage {
  int from = 0;
  double arrival = 0.0;
  std::vector<double> data;
};

class SpmdRunner;

/// Per-processor view handed to the step function each superstep.
class SpmdContext {
 public:
  int rank() const { return rank_; }
  Coord coord() const;
  int grid_side() const;

  void send(Coord to, std::vector<double> data);
  std::optional<std::vector<double>> try_receive();
  void compute(std::int64_t flops);
  void finish();

 private:
  friend class SpmdRunner;
  SpmdContext(SpmdRunner* runner, int rank) : runner_(runner), rank_(rank) {}
  SpmdRunner* runner_;
  int rank_;
};

using SpmdStep = std::function<void(SpmdContext&)>;

/// Round-based deterministic executor: every unfinished processor steps once
/// per round; messages become receivable in the following round. Throws
/// DeadlockError when unfinished processors exist but nothing happens.
CostLedger run_spmd(const GridConfig& cfg, const SpmdStep& step,
                    int max_rounds = 1 << 20);

}  // namespace gridla
