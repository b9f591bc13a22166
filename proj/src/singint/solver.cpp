#include "singint/solver.hpp"

#include <cmath>
#include <limits>

#include "singint/errors.hpp"

namespace singint {

namespace {

bool all_finite(std::span<const double> v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// Dense LU solve with partial pivoting; stage systems are tiny (s*d <= ~20).
void lu_solve(std::vector<double>& A, std::vector<double>& b, int n) {
  std::vector<int> piv(n);
  for (int i = 0; i < n; ++i) piv[i] = i;
  for (int col = 0; col < n; ++col) {
    int best = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(A[r * n + col]) > std::abs(A[best * n + col])) best = r;
    if (best != col) {
      for (int k = 0; k < n; ++k) std::swap(A[col * n + k], A[best * n + k]);
      std::swap(b[col], b[best]);
    }
    const double pivot = A[col * n + col];
    if (pivot == 0.0)
      throw StepError("singular stage Jacobian", std::numeric_limits<double>::quiet_NaN(), false);
    for (int r = col + 1; r < n; ++r) {
      const double m = A[r * n + col] / pivot;
      if (m == 0.0) continue;
      A[r * n + col] = 0.0;
      for (int k = col + 1; k < n; ++k) A[r * n + k] -= m * A[col * n + k];
      b[r] -= m * b[col];
    }
  }
  for (int r = n - 1; r >= 0; --r) {
    double s = b[r];
    for (int k = r + 1; k < n; ++k) s -= A[r * n + k] * b[k];
    b[r] = s / A[r * n + r];
  }
}

// residual R_i = H_i - y - dmu * sum_j a_ij f(H_j); F holds f(H_j) on exit
double stage_residual(const ButcherTableau& tab, const VectorField& f,
                      std::span<const double> y, double dmu,
                      const std::vector<double>& H, std::vector<double>& F,
                      std::vector<double>& R) {
  const int s = tab.stages;
  const int d = static_cast<int>(y.size());
  for (int j = 0; j < s; ++j)
    f(std::span<const double>(H.data() + j * d, d), std::span<double>(F.data() + j * d, d));
  for (int i = 0; i < s; ++i)
    for (int q = 0; q < d; ++q) {
      double acc = H[i * d + q] - y[q];
      for (int j = 0; j < s; ++j) acc -= dmu * tab.a(i, j) * F[j * d + q];
      R[i * d + q] = acc;
    }
  return max_abs(R);
}

}  // namespace

std::vector<double> rk_step(const ButcherTableau& tab, const VectorField& f,
                            const JacobianField* jac, std::span<const double> y,
                            double dmu, const StageSolveConfig& cfg,
                            SolveStats* stats) {
  if (!std::isfinite(dmu))
    throw StepError("non-finite driving increment", 0.0, true);
  const int s = tab.stages;
  const int d = static_cast<int>(y.size());
  std::vector<double> H(static_cast<std::size_t>(s) * d);
  std::vector<double> F(static_cast<std::size_t>(s) * d);
  std::vector<double> R(static_cast<std::size_t>(s) * d);
  const double scale = 1.0 + max_abs(y);

  if (tab.is_explicit) {
    for (int i = 0; i < s; ++i) {
      for (int q = 0; q < d; ++q) {
        double acc = y[q];
        for (int j = 0; j < i; ++j) acc += dmu * tab.a(i, j) * F[j * d + q];
        H[i * d + q] = acc;
      }
      f(std::span<const double>(H.data() + i * d, d),
        std::span<double>(F.data() + i * d, d));
    }
    if (stats) *stats = {0, 0.0};
  } else {
    // initial stage guess H_i = y
    for (int i = 0; i < s; ++i)
      for (int q = 0; q < d; ++q) H[i * d + q] = y[q];

    const int n = s * d;
    std::vector<double> J;
    std::vector<double> fjac(static_cast<std::size_t>(d) * d);
    std::vector<double> pert(d), fp(d), fm(d);
    double resid = stage_residual(tab, f, y, dmu, H, F, R);
    int iter = 0;
    const double sqrt_eps = std::sqrt(std::numeric_limits<double>::epsilon());

    while (resid > cfg.tol * scale) {
      if (!all_finite(R) || !all_finite(H))
        throw StepError("numerical blowup in stage solve", resid, true);
      if (iter >= cfg.max_iter)
        throw StepError("stage solve did not converge within " +
                            std::to_string(cfg.max_iter) + " iterations",
                        resid, false);
      ++iter;

      if (cfg.method == StageSolveConfig::Method::fixed_point) {
        // H <- y + dmu A f(H)
        for (int i = 0; i < s; ++i)
          for (int q = 0; q < d; ++q) {
            double acc = y[q];
            for (int j = 0; j < s; ++j) acc += dmu * tab.a(i, j) * F[j * d + q];
            H[i * d + q] = acc;
          }
      } else {
        J.assign(static_cast<std::size_t>(n) * n, 0.0);
        for (int i = 0; i < n; ++i) J[i * n + i] = 1.0;
        for (int j = 0; j < s; ++j) {
          std::span<const double> Hj(H.data() + j * d, d);
          if (jac && *jac && cfg.use_analytic_jacobian) {
            (*jac)(Hj, std::span<double>(fjac.data(), fjac.size()));
          } else {
            // central differences, column by column
            for (int q = 0; q < d; ++q) {
              const double eps = sqrt_eps * (1.0 + std::abs(Hj[q]));
              pert.assign(Hj.begin(), Hj.end());
              pert[q] += eps;
              f(pert, std::span<double>(fp.data(), d));
              pert[q] = Hj[q] - eps;
              f(pert, std::span<double>(fm.data(), d));
              for (int r = 0; r < d; ++r)
                fjac[r * d + q] = (fp[r] - fm[r]) / (2.0 * eps);
            }
          }
          for (int i = 0; i < s; ++i) {
            const double w = dmu * tab.a(i, j);
            if (w == 0.0) continue;
            for (int r = 0; r < d; ++r)
              for (int q = 0; q < d; ++q)
                J[(i * d + r) * n + (j * d + q)] -= w * fjac[r * d + q];
          }
        }
        std::vector<double> rhs = R;
        lu_solve(J, rhs, n);
        for (int i = 0; i < n; ++i) H[i] -= rhs[i];
      }
      resid = stage_residual(tab, f, y, dmu, H, F, R);
    }
    if (stats) *stats = {iter, resid};
  }

  std::vector<double> out(y.begin(), y.end());
  for (int i = 0; i < s; ++i)
    for (int q = 0; q < d; ++q) out[q] += dmu * tab.b[i] * F[i * d + q];
  if (!all_finite(out))
    throw StepError("numerical blowup in update", 0.0, true);
  return out;
}

Trajectory integrate_increments(const SdeProblem& problem,
                                const ButcherTableau& tab, double t0, double h,
                                std::span<const double> dmu,
                                const StageSolveConfig& cfg) {
  Trajectory traj;
  traj.times.push_back(t0);
  traj.states.push_back(problem.x0);
  const JacobianField* jac = problem.jacobian ? &problem.jacobian : nullptr;
  for (std::size_t n = 0; n < dmu.size(); ++n) {
    SolveStats stats;
    try {
      auto next = rk_step(tab, problem.f, jac, traj.states.back(), dmu[n], cfg,
                          &stats);
      traj.states.push_back(std::move(next));
    } catch (const StepError& e) {
      traj.failure = Trajectory::Failure{n, e.what()};
      return traj;
    }
    traj.times.push_back(t0 + static_cast<double>(n + 1) * h);
    traj.dmu_used.push_back(dmu[n]);
    traj.solve_stats.push_back(stats);
  }
  return traj;
}

Trajectory integrate(const SdeProblem& problem, const ButcherTableau& tab,
                     const DrivingPath& path, int level,
                     const StageSolveConfig& cfg) {
  const auto dmu = path.increments_at_level(level);
  const double h =
      path.spec().length() / static_cast<double>(std::size_t{1} << level);
  return integrate_increments(problem, tab, path.spec().t0, h, dmu, cfg);
}

WeakRun integrate_weak(const SdeProblem& problem, const ButcherTableau& tab,
                       double h, int n_steps, int weak_order, RngStream& rng,
                       const StageSolveConfig& cfg) {
  WeakRun run;
  std::vector<double> y = problem.x0;
  const JacobianField* jac = problem.jacobian ? &problem.jacobian : nullptr;
  for (int n = 0; n < n_steps; ++n) {
    const double dw = weak_wiener_increment(weak_order, h, rng);
    run.wiener_sum += dw;
    const double dmu = problem.spec.lambda * h + problem.spec.sigma * dw;
    try {
      y = rk_step(tab, problem.f, jac, y, dmu, cfg);
    } catch (const StepError& e) {
      run.reason = e.what();
      return run;
    }
  }
  run.y = std::move(y);
  run.ok = true;
  return run;
}

}  // namespace singint
