#include "gridla/fabric.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace gridla {

void GridConfig::validate() const {
  if (s < 1) throw std::invalid_argument("grid side must be >= 1");
  if (c0 < 0 || c1 < 0 || hop_delay < 0 || !(tau_f > 0) ||
      !std::isfinite(c0) || !std::isfinite(c1) || !std::isfinite(tau_f) ||
      !std::isfinite(hop_delay)) {
    throw std::invalid_argument("cost parameters must be finite and nonnegative (tau_f > 0)");
  }
  if (virtual_factor < 1) {
    throw std::invalid_argument("virtual_factor must be >= 1");
  }
}

double CostLedger::makespan() const {
  double best = 0.0;
  for (const auto& s : stats_) best = std::max(best, s.clock);
  return best;
}

std::int64_t CostLedger::total_flops() const {
  std::int64_t t = 0;
  for (const auto& s : stats_) t += s.flops;
  return t;
}

std::int64_t CostLedger::total_words() const {
  std::int64_t t = 0;
  for (const auto& s : stats_) t += s.words_sent;
  return t;
}

std::int64_t CostLedger::total_messages() const {
  std::int64_t t = 0;
  for (const auto& s : stats_) t += s.messages_sent;
  return t;
}

CostLedger CostLedger::fold_virtual(int real_count) const {
  const int p = processors();
  const int k = (p + real_count - 1) / real_count;
  CostLedger out(real_count);
  for (int v = 0; v < p; ++v) {
    ProcStats& r = out.at(std::min(v / k, real_count - 1));
    r.flops += stats_[v].flops;
    r.words_sent += stats_[v].words_sent;
    r.words_received += stats_[v].words_received;
    r.messages_sent += stats_[v].messages_sent;
    r.clock += stats_[v].clock;
  }
  return out;
}

PivotCandidate pivot_theta(const PivotCandidate& a, const PivotCandidate& b) {
  return (std::fabs(a.value) >= std::fabs(b.value)) ? a : b;
}

GridFabric::GridFabric(GridConfig cfg) : cfg_(cfg), ledger_(cfg.processors()) {
  cfg_.validate();
}

void GridFabric::check_coord(Coord p) const {
  if (p.r < 0 || p.r >= cfg_.s || p.c < 0 || p.c >= cfg_.s) {
    throw std::invalid_argument("coordinate off grid");
  }
}

double GridFabric::send_cost(int hops, std::int64_t words) const {
  const double body = cfg_.c0 + cfg_.c1 * double(words);
  if (cfg_.routing == Routing::StoreAndForward) {
    return double(hops) * body;
  }
  return body + double(hops) * cfg_.hop_delay;
}

void GridFabric::charge_flops(Coord p, std::int64_t count) {
  check_coord(p);
  ProcStats& st = ledger_.at(proc_id(p));
  st.flops += count;
  st.clock += double(count) * cfg_.tau_f;
}

void GridFabric::send(Coord from, Coord to, std::int64_t words) {
  check_coord(from);
  check_coord(to);
  if (words < 1) throw std::invalid_argument("send: words must be >= 1");
  if (from == to) return;
  const int hops = std::abs(from.r - to.r) + std::abs(from.c - to.c);
  ProcStats& snd = ledger_.at(proc_id(from));
  ProcStats& rcv = ledger_.at(proc_id(to));
  const double arrival = snd.clock + send_cost(hops, words);
  snd.clock = arrival;
  snd.words_sent += words;
  snd.messages_sent += 1;
  rcv.clock = std::max(rcv.clock, arrival);
  rcv.words_received += words;
}

void GridFabric::broadcast_line(std::vector<Coord> line, int origin_pos,
                                std::int64_t words) {
  if (words < 1) throw std::invalid_argument("broadcast: words must be >= 1");
  if (line.size() <= 1) return;
  ProcStats& snd = ledger_.at(proc_id(line[origin_pos]));
  const double start = snd.clock;
  double worst = start;
  for (int k = 0; k < int(line.size()); ++k) {
    if (k == origin_pos) continue;
    const int hops = std::abs(line[k].r - line[origin_pos].r) +
                     std::abs(line[k].c - line[origin_pos].c);
    const double arrival = start + send_cost(hops, words);
    worst = std::max(worst, arrival);
    ProcStats& rcv = ledger_.at(proc_id(line[k]));
    rcv.clock = std::max(rcv.clock, arrival);
    rcv.words_received += words;
    snd.words_sent += words;
  }
  snd.messages_sent += 1;
  snd.clock = worst;
}

void GridFabric::row_broadcast(Coord origin, std::int64_t words) {
  check_coord(origin);
  std::vector<Coord> line(cfg_.s);
  for (int c = 0; c < cfg_.s; ++c) line[c] = {origin.r, c};
  broadcast_line(std::move(line), origin.c, words);
}

void GridFabric::col_broadcast(Coord origin, std::int64_t words) {
  check_coord(origin);
  std::vector<Coord> line(cfg_.s);
  for (int r = 0; r < cfg_.s; ++r) line[r] = {r, origin.c};
  broadcast_line(std::move(line), origin.r, words);
}

void GridFabric::broadcast_all(Coord origin, std::int64_t words) {
  row_broadcast(origin, words);
  for (int c = 0; c < cfg_.s; ++c) col_broadcast({origin.r, c}, words);
}

// ---------------------------------------------------------------------------
// SPMD runner
// ---------------------------------------------------------------------------

class SpmdRunner {
 public:
  SpmdRunner(const GridConfig& cfg, const SpmdStep& step, int max_rounds)
      : fabric_(cfg),
        step_(step),
        max_rounds_(max_rounds),
        finished_(cfg.processors(), false),
        mailbox_(cfg.processors()) {}

  CostLedger run() {
    const int p = fabric_.config().processors();
    for (int round = 0; round < max_rounds_; ++round) {
      int done = 0;
      active_ = false;
      pending_.clear();
      for (int rank = 0; rank < p; ++rank) {
        if (finished_[rank]) {
          ++done;
          continue;
        }
        SpmdContext ctx(this, rank);
        step_(ctx);
        if (finished_[rank]) ++done;
      }
      // Messages sent this round become receivable next round.
      for (auto& [rank, msg] : pending_) {
        mailbox_[rank].push_back(std::move(msg));
      }
      bool in_flight = !pending_.empty();
      for (int rank = 0; rank < p && !in_flight; ++rank) {
        in_flight = !mailbox_[rank].empty();
      }
      if (done == p) return fabric_.ledger();
      if (!active_ && !in_flight) throw DeadlockError();
    }
    throw DeadlockError();
  }

 private:
  friend class SpmdContext;

  GridFabric fabric_;
  const SpmdStep& step_;
  int max_rounds_;
  bool active_ = false;
  std::vector<bool> finished_;
  std::vector<std::deque<SpmdMessage>> mailbox_;
  std::vector<std::pair<int, SpmdMessage>> pending_;
};

Coord SpmdContext::coord() const {
  const int s = runner_->fabric_.config().s;
  return {rank_ / s, rank_ % s};
}

int SpmdContext::grid_side() const { return runner_->fabric_.config().s; }

void SpmdContext::send(Coord to, std::vector<double> data) {
  GridFabric& f = runner_->fabric_;
  f.check_coord(to);
  const Coord from = coord();
  const std::int64_t words = std::max<std::int64_t>(1, std::int64_t(data.size()));
  const int hops = std::abs(from.r - to.r) + std::abs(from.c - to.c);
  ProcStats& snd = f.ledger().at(rank_);
  snd.clock += f.send_cost(hops, words);
  snd.words_sent += words;
  snd.messages_sent += 1;
  runner_->pending_.emplace_back(
      f.proc_id(to), SpmdMessage{rank_, snd.clock, std::move(data)});
  runner_->active_ = true;
}

std::optional<std::vector<double>> SpmdContext::try_receive() {
  auto& box = runner_->mailbox_[rank_];
  if (box.empty()) return std::nullopt;
  // Deterministic order: earliest arrival, then lowest sender rank.
  auto it = std::min_element(box.begin(), box.end(),
                             [](const SpmdMessage& a, const SpmdMessage& b) {
                               if (a.arrival != b.arrival)
                                 return a.arrival < b.arrival;
                               return a.from < b.from;
                             });
  ProcStats& st = runner_->fabric_.ledger().at(rank_);
  st.clock = std::max(st.clock, it->arrival);
  st.words_received += std::max<std::int64_t>(1, std::int64_t(it->data.size()));
  std::vector<double> data = std::move(it->data);
  box.erase(it);
  runner_->active_ = true;
  return data;
}

void SpmdContext::compute(std::int64_t flops) {
  ProcStats& st = runner_->fabric_.ledger().at(rank_);
  st.flops += flops;
  st.clock += double(flops) * runner_->fabric_.config().tau_f;
  runner_->active_ = true;
}

void SpmdContext::finish() {
  runner_->finished_[rank_] = true;
  runner_->active_ = true;
}

CostLedger run_spmd(const GridConfig& cfg, const SpmdStep& step,
                    int max_rounds) {
  GridConfig c = cfg;
  c.validate();
  SpmdRunner runner(c, step, max_rounds);
  return runner.run();
}

}  // namespace gridla
