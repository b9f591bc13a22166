#ifndef SINGINT_PROBLEMS_HPP
#define SINGINT_PROBLEMS_HPP

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "singint/driving.hpp"

namespace singint {

using VectorField = std::function<void(std::span<const double>, std::span<double>)>;
/// Row-major d x d Jacobian of the integrand.
using JacobianField = std::function<void(std::span<const double>, std::span<double>)>;
using InvariantFn = std::function<double(std::span<const double>)>;

/// A single-integrand Stratonovich SDE dX = lambda f(X) dt + sigma f(X) o dW.
struct SdeProblem {
  std::string name;
  int dim = 1;
  VectorField f;
  JacobianField jacobian;  // optional, empty if absent
  std::vector<double> x0;
  DrivingSpec spec;

  /// Optional exact solution as a map (t, W(t)) -> X(t).
  std::function<std::vector<double>(double, double)> exact;

  struct Invariant {
    std::string name;
    InvariantFn fn;
  };
  std::vector<Invariant> invariants;

  bool has_exact() const { return static_cast<bool>(exact); }
};

/// dX = sqrt(1+X^2)(dt + sigma o dW), X(0)=0; exact X(t)=sinh(t + sigma W(t)).
SdeProblem sinh_problem(double sigma);

/// Kubo oscillator with drift scale a absorbed into the measure (lambda=a);
/// exact X(t)=(cos, sin)(a t + sigma W(t)), invariant I = X1^2 + X2^2.
SdeProblem kubo_problem(double a, double sigma);

/// Stochastic rigid body, I=(2,1,2/3), X(0)=(cos 1.1, 0, sin 1.1);
/// invariants: kinetic energy H and Casimir C = |X|^2.
SdeProblem rigid_body_problem(double sigma);

/// Reduces m independent noises sigma_1..sigma_m sharing one integrand to a
/// single noise of scale sqrt(sum sigma_i^2).
SdeProblem reduce_multinoise(SdeProblem base, std::span<const double> sigmas);

/// Lookup by CLI name: sinh | kubo | rigid_body.
SdeProblem make_problem(const std::string& name, double sigma, double a);

}  // namespace singint

#endif
