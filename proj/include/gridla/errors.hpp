#pragma once

#include <stdexcept>
#include <string>

namespace gridla {

// Selected pivot (or diagonal) magnitude fell below the singularity floor.
struct SingularMatrixError : std::runtime_error {
  int step;
  explicit SingularMatrixError(int k)
      : std::runtime_error("matrix is numerically singular at step " +
                           std::to_string(k)),
        step(k) {}
};

struct NotSymmetricError : std::runtime_error {
  NotSymmetricError() : std::runtime_error("matrix is not symmetric") {}
};

struct NoConvergenceError : std::runtime_error {
  int sweeps;
  explicit NoConvergenceError(int s)
      : std::runtime_error("no convergence after " + std::to_string(s) +
                           " sweeps"),
        sweeps(s) {}
};

struct RankDeficientError : std::runtime_error {
  int column;
  explicit RankDeficientError(int k)
      : std::runtime_error("rank deficiency detected at column " +
                           std::to_string(k)),
        column(k) {}
};

struct DeadlockError : std::runtime_error {
  DeadlockError()
      : std::runtime_error(
            "deadlock: all processors waiting and no message in flight") {}
};

struct DegenerateDesignError : std::runtime_error {
  explicit DegenerateDesignError(const std::string& why)
      : std::runtime_error("degenerate design: " + why) {}
};

}  // namespace gridla
