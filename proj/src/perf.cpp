#include "gridla/perf.hpp"

#include <array>
#include <cmath>
#include <set>
#include <stdexcept>

namespace gridla {

double amdahl_speedup(double f, double p) {
  if (f < 0.0 || f > 1.0) throw std::domain_error("serial fraction in [0,1]");
  if (p < 1.0) throw std::domain_error("p >= 1 required");
  return 1.0 / (f + (1.0 - f) / p);
}

double scaled_speedup(const ScalingScenario& sc) {
  if (sc.f < 0.0 || sc.f > 1.0) {
    throw std::domain_error("serial fraction in [0,1]");
  }
  if (sc.k <= 0.0 || sc.p < 1) throw std::domain_error("k > 0, p >= 1");
  if (sc.n_size < sc.k * sc.p) {
    throw std::domain_error("outside the scaled regime: n < k*p");
  }
  if (sc.f > sc.k / sc.n_size) {
    throw std::domain_error("outside the scaled regime: f > k/n");
  }
  return double(sc.p) / (2.0 - sc.f);
}

double virtual_speedup_bound(double s_p, int p, int p_real) {
  if (p_real < 1 || p < p_real) throw std::domain_error("p >= P >= 1");
  return s_p / double((p + p_real - 1) / p_real);
}

double predict_time(const CostModelParams& pr, double n, double s) {
  if (n < 1.0 || s < 1.0) throw std::domain_error("n, s >= 1 required");
  return pr.alpha * n * n * n / (s * s) + pr.beta * n * n / s + pr.gamma * n;
}

double predict_efficiency(const CostModelParams& pr, double n, double s) {
  if (n < 1.0 || s < 1.0) throw std::domain_error("n, s >= 1 required");
  if (pr.alpha <= 0.0) throw std::domain_error("alpha > 0 required");
  const double r = s / n;
  return 1.0 / (1.0 + (pr.beta / pr.alpha) * r + (pr.gamma / pr.alpha) * r * r);
}

FitResult fit_params(const std::vector<FitRun>& runs) {
  if (runs.size() < 3) {
    throw DegenerateDesignError("need at least three runs");
  }
  std::set<int> ns, ss;
  for (const FitRun& r : runs) {
    ns.insert(r.n);
    ss.insert(r.s);
  }
  if (ns.size() < 2 || ss.size() < 2) {
    throw DegenerateDesignError("runs must span two n and two s values");
  }

  // 3x3 normal equations for the basis {n^3/s^2, n^2/s, n}
  std::array<std::array<double, 3>, 3> m{};
  std::array<double, 3> rhs{};
  for (const FitRun& r : runs) {
    const double n = r.n, s = r.s;
    const std::array<double, 3> phi{n * n * n / (s * s), n * n / s, n};
    for (int i = 0; i < 3; ++i) {
      rhs[i] += phi[i] * r.makespan;
      for (int j = 0; j < 3; ++j) m[i][j] += phi[i] * phi[j];
    }
  }
  for (int k = 0; k < 3; ++k) {
    int piv = k;
    for (int i = k + 1; i < 3; ++i) {
      if (std::fabs(m[i][k]) > std::fabs(m[piv][k])) piv = i;
    }
    std::swap(m[k], m[piv]);
    std::swap(rhs[k], rhs[piv]);
    if (std::fabs(m[k][k]) < 1e-12 * (std::fabs(m[0][0]) + 1.0)) {
      throw DegenerateDesignError("basis columns collinear for these runs");
    }
    for (int i = k + 1; i < 3; ++i) {
      const double t = m[i][k] / m[k][k];
      for (int j = k; j < 3; ++j) m[i][j] -= t * m[k][j];
      rhs[i] -= t * rhs[k];
    }
  }
  std::array<double, 3> x{};
  for (int i = 2; i >= 0; --i) {
    double acc = rhs[i];
    for (int j = i + 1; j < 3; ++j) acc -= m[i][j] * x[j];
    x[i] = acc / m[i][i];
  }

  FitResult out;
  out.params = {x[0], x[1], x[2]};
  for (double* c : {&out.params.alpha, &out.params.beta, &out.params.gamma}) {
    if (*c < 0.0) {
      *c = 0.0;
      out.clamped = true;
    }
  }
  double ss_res = 0.0;
  for (const FitRun& r : runs) {
    const double pred = predict_time(out.params, r.n, r.s);
    const double rel = std::fabs(pred - r.makespan) /
                       std::max(std::fabs(r.makespan), 1e-300);
    out.max_rel_residual = std::max(out.max_rel_residual, rel);
    ss_res += (pred - r.makespan) * (pred - r.makespan);
  }
  out.rms_residual = std::sqrt(ss_res / double(runs.size()));
  return out;
}

}  // namespace gridla
