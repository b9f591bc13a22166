#ifndef SINGINT_SOLVER_HPP
#define SINGINT_SOLVER_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "singint/problems.hpp"
#include "singint/tableau.hpp"

namespace singint {

struct StageSolveConfig {
  enum class Method { newton_fd, fixed_point };
  Method method = Method::newton_fd;
  double tol = 1e-12;  // residual tolerance, scaled by 1 + |y|
  int max_iter = 50;
  bool use_analytic_jacobian = true;  // if the problem supplies one
};

/// Thrown by rk_step on stage-solve failure or NaN/Inf blowup.
class StepError : public std::runtime_error {
 public:
  StepError(const std::string& msg, double residual, bool blowup)
      : std::runtime_error(msg), residual(residual), blowup(blowup) {}
  double residual;
  bool blowup;
};

struct SolveStats {
  int iterations = 0;
  double residual = 0.0;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<std::vector<double>> states;  // states[n] is Y_n
  std::vector<double> dmu_used;
  std::vector<SolveStats> solve_stats;

  struct Failure {
    std::size_t step_index;
    std::string reason;
  };
  std::optional<Failure> failure;

  bool ok() const { return !failure.has_value(); }
};

/// One step of the stochastic Runge-Kutta map: explicit tableaus by forward
/// substitution, implicit ones by solving the stacked s*d stage system.
/// jac may be null (finite differences are used for Newton then).
std::vector<double> rk_step(const ButcherTableau& tab, const VectorField& f,
                            const JacobianField* jac, std::span<const double> y,
                            double dmu, const StageSolveConfig& cfg,
                            SolveStats* stats = nullptr);

/// Steps through an explicit increment sequence starting from (t0, x0).
/// Stops at the first failed step; the failure is recorded on the result.
Trajectory integrate_increments(const SdeProblem& problem,
                                const ButcherTableau& tab, double t0, double h,
                                std::span<const double> dmu,
                                const StageSolveConfig& cfg);

/// Integrates over the level-`level` grid of a realized driving path.
Trajectory integrate(const SdeProblem& problem, const ButcherTableau& tab,
                     const DrivingPath& path, int level,
                     const StageSolveConfig& cfg);

struct WeakRun {
  std::vector<double> y;   // terminal state (valid when ok)
  double wiener_sum = 0.0; // sum of the discrete Wiener parts
  bool ok = false;
  std::string reason;
};

/// Same stepping with independent moment-matched increments per step.
WeakRun integrate_weak(const SdeProblem& problem, const ButcherTableau& tab,
                       double h, int n_steps, int weak_order, RngStream& rng,
                       const StageSolveConfig& cfg);

}  // namespace singint

#endif
