#pragma once

#include <vector>

#include "gridla/errors.hpp"

namespace gridla {

struct ScalingScenario {
  double f = 0.0;  // serial fraction
  double k = 1.0;  // scaling constant, f <= k/n_size in the scaled regime
  double n_size = 1.0;
  int p = 1;
};

struct CostModelParams {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;

  double beta_bar() const { return beta / alpha; }
  double gamma_bar() const { return gamma / beta; }
};

double amdahl_speedup(double f, double p);

/// Lower bound P/(2-f) on speedup in the scaled regime (n >= k*p, f <= k/n).
double scaled_speedup(const ScalingScenario& scenario);

/// Lower bound on S_P obtained by emulating p >= P virtual processors.
double virtual_speedup_bound(double s_p, int p, int p_real);

/// T_P = alpha n^3/s^2 + beta n^2/s + gamma n.
double predict_time(const CostModelParams& params, double n, double s);

/// E_P per the asymptotic efficiency formula; equals T_1/(P*T_P) exactly.
double predict_efficiency(const CostModelParams& params, double n, double s);

struct FitRun {
  int n = 0;
  int s = 1;
  double makespan = 0.0;
};

struct FitResult {
  CostModelParams params;
  bool clamped = false;         // negative coefficients clamped to zero
  double max_rel_residual = 0.0;
  double rms_residual = 0.0;
};

/// Unweighted least squares in the basis {n^3/s^2, n^2/s, n}. Requires at
/// least three runs spanning two distinct n and two distinct s.
FitResult fit_params(const std::vector<FitRun>& runs);

}  // namespace gridla
