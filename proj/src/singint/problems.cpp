#include "singint/problems.hpp"

#include <cmath>

#include "singint/errors.hpp"

namespace singint {

SdeProblem sinh_problem(double sigma) {
  SdeProblem p;
  p.name = "sinh";
  p.dim = 1;
  p.f = [](std::span<const double> x, std::span<double> out) {
    out[0] = std::sqrt(1.0 + x[0] * x[0]);
  };
  p.jacobian = [](std::span<const double> x, std::span<double> out) {
    out[0] = x[0] / std::sqrt(1.0 + x[0] * x[0]);
  };
  p.x0 = {0.0};
  p.spec = {1.0, sigma, 0.0, 1.0};
  p.exact = [sigma](double t, double w) {
    return std::vector<double>{std::sinh(t + sigma * w)};
  };
  return p;
}

SdeProblem kubo_problem(double a, double sigma) {
  SdeProblem p;
  p.name = "kubo";
  p.dim = 2;
  // integrand B x with B = [[0,-1],[1,0]]; the drift scale a lives in the
  // measure as lambda
  p.f = [](std::span<const double> x, std::span<double> out) {
    out[0] = -x[1];
    out[1] = x[0];
  };
  p.jacobian = [](std::span<const double>, std::span<double> out) {
    out[0] = 0.0; out[1] = -1.0;
    out[2] = 1.0; out[3] = 0.0;
  };
  p.x0 = {1.0, 0.0};
  p.spec = {a, sigma, 0.0, 1.0};
  p.exact = [a, sigma](double t, double w) {
    const double phase = a * t + sigma * w;
    return std::vector<double>{std::cos(phase), std::sin(phase)};
  };
  p.invariants.push_back(
      {"I", [](std::span<const double> x) { return x[0] * x[0] + x[1] * x[1]; }});
  return p;
}

SdeProblem rigid_body_problem(double sigma) {
  constexpr double I1 = 2.0, I2 = 1.0, I3 = 2.0 / 3.0;
  SdeProblem p;
  p.name = "rigid_body";
  p.dim = 3;
  p.f = [](std::span<const double> x, std::span<double> out) {
    out[0] = x[2] / I3 * x[1] - x[1] / I2 * x[2];
    out[1] = -x[2] / I3 * x[0] + x[0] / I1 * x[2];
    out[2] = x[1] / I2 * x[0] - x[0] / I1 * x[1];
  };
  p.jacobian = [](std::span<const double> x, std::span<double> J) {
    // rows of d/dx [A(x)x]
    J[0] = 0.0;
    J[1] = x[2] / I3 - x[2] / I2;
    J[2] = x[1] / I3 - x[1] / I2;
    J[3] = -x[2] / I3 + x[2] / I1;
    J[4] = 0.0;
    J[5] = -x[0] / I3 + x[0] / I1;
    J[6] = x[1] / I2 - x[1] / I1;
    J[7] = x[0] / I2 - x[0] / I1;
    J[8] = 0.0;
  };
  p.x0 = {std::cos(1.1), 0.0, std::sin(1.1)};
  p.spec = {1.0, sigma, 0.0, 1.0};
  p.invariants.push_back(
      {"H", [](std::span<const double> x) {
         return 0.5 * (x[0] * x[0] / I1 + x[1] * x[1] / I2 + x[2] * x[2] / I3);
       }});
  p.invariants.push_back(
      {"C", [](std::span<const double> x) {
         return x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
       }});
  return p;
}

SdeProblem reduce_multinoise(SdeProblem base, std::span<const double> sigmas) {
  if (sigmas.empty())
    throw ValidationError("reduce_multinoise: need at least one sigma");
  double ss = 0.0;
  for (double s : sigmas) ss += s * s;
  base.spec.sigma = std::sqrt(ss);
  return base;
}

SdeProblem make_problem(const std::string& name, double sigma, double a) {
  if (name == "sinh") return sinh_problem(sigma);
  if (name == "kubo") return kubo_problem(a, sigma);
  if (name == "rigid_body") return rigid_body_problem(sigma);
  throw ValidationError("unknown problem '" + name +
                        "'; available: sinh kubo rigid_body");
}

}  // namespace singint
