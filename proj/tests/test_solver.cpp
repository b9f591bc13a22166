#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "singint/problems.hpp"
#include "singint/solver.hpp"
#include "singint/tableau.hpp"

using namespace singint;

namespace {

const VectorField linear_f = [](std::span<const double> x,
                                std::span<double> out) { out[0] = x[0]; };

SdeProblem deterministic_sinh() {
  auto p = sinh_problem(0.0);  // dX = sqrt(1+X^2) dt, X(t) = sinh(t)
  return p;
}

std::vector<double> const_increments(int n, double h) {
  return std::vector<double>(static_cast<std::size_t>(n), h);
}

double terminal_error(const SdeProblem& p, const ButcherTableau& tab, int n,
                      const StageSolveConfig& cfg) {
  const double h = p.spec.length() / n;
  const auto dmu = const_increments(n, h);
  const auto traj = integrate_increments(p, tab, p.spec.t0, h, dmu, cfg);
  REQUIRE(traj.ok());
  return std::abs(traj.states.back()[0] - std::sinh(p.spec.T));
}

}  // namespace

TEST_CASE("euler step on a linear field") {
  const auto tab = builtin_tableau("euler");
  const std::vector<double> y{1.0};
  const auto out = rk_step(tab, linear_f, nullptr, y, 0.1, {});
  CHECK(out[0] == doctest::Approx(1.1).epsilon(1e-16));
}

TEST_CASE("implicit midpoint step on a linear field has the known closed form") {
  const auto tab = builtin_tableau("gauss1");
  const std::vector<double> y{2.0};
  const double h = 0.3;
  SolveStats stats;
  StageSolveConfig cfg;
  const auto out = rk_step(tab, linear_f, nullptr, y, h, cfg, &stats);
  CHECK(out[0] ==
        doctest::Approx(2.0 * (1.0 + 0.5 * h) / (1.0 - 0.5 * h)).epsilon(1e-13));
  CHECK(stats.iterations >= 1);
  CHECK(stats.residual <= cfg.tol * 3.0);
}

TEST_CASE("zero increment maps every method to the identity") {
  const std::vector<double> y{0.7, -0.3};
  const VectorField f = [](std::span<const double> x, std::span<double> out) {
    out[0] = std::sin(x[1]);
    out[1] = x[0] * x[0];
  };
  for (const auto& n : builtin_tableau_names()) {
    CAPTURE(n);
    const auto out = rk_step(builtin_tableau(n), f, nullptr, y, 0.0, {});
    CHECK(out == y);
  }
}

TEST_CASE("newton and fixed-point stage solves agree") {
  const auto p = sinh_problem(0.5);
  const std::vector<double> y{0.4};
  for (const auto& n : {"gauss1", "gauss2", "radau_iia2", "radau_iia3"}) {
    CAPTURE(n);
    const auto tab = builtin_tableau(n);
    StageSolveConfig newton;  // defaults
    StageSolveConfig fp;
    fp.method = StageSolveConfig::Method::fixed_point;
    fp.max_iter = 200;
    StageSolveConfig newton_fd;
    newton_fd.use_analytic_jacobian = false;
    const auto a = rk_step(tab, p.f, &p.jacobian, y, 0.05, newton);
    const auto b = rk_step(tab, p.f, &p.jacobian, y, 0.05, fp);
    const auto c = rk_step(tab, p.f, &p.jacobian, y, 0.05, newton_fd);
    CHECK(a[0] == doctest::Approx(b[0]).epsilon(1e-12));
    CHECK(a[0] == doctest::Approx(c[0]).epsilon(1e-12));
  }
}

TEST_CASE("erk4 reproduces e to near machine accuracy") {
  SdeProblem p;
  p.name = "exp";
  p.dim = 1;
  p.f = linear_f;
  p.x0 = {1.0};
  p.spec = {1.0, 0.0, 0.0, 1.0};
  const auto tab = builtin_tableau("erk4_classic");
  const auto traj = integrate_increments(p, tab, 0.0, 0.01,
                                         const_increments(100, 0.01), {});
  REQUIRE(traj.ok());
  CHECK(traj.states.back()[0] ==
        doctest::Approx(std::exp(1.0)).epsilon(1e-9));
  CHECK(traj.times.back() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(traj.states.size() == 101);
}

TEST_CASE("deterministic convergence rates match the tree-checker order") {
  struct Case {
    const char* name;
    int p;
    int n_lo;  // coarsest step count; three refinements follow
  };
  // step ranges chosen so the error stays well above rounding
  const Case cases[] = {{"euler", 1, 64},      {"heun", 2, 32},
                        {"erk3", 3, 16},       {"erk4_classic", 4, 8},
                        {"erk5_fehlberg", 5, 4}, {"gauss1", 2, 32},
                        {"gauss2", 4, 8},      {"gauss3", 6, 2},
                        {"radau_iia1", 1, 64}, {"radau_iia2", 3, 16},
                        {"radau_iia3", 5, 4}};
  const auto p = deterministic_sinh();
  for (const auto& c : cases) {
    CAPTURE(c.name);
    const auto tab = builtin_tableau(c.name);
    double prev = 0.0;
    std::vector<double> rates;
    for (int k = 0; k < 4; ++k) {
      const int n = c.n_lo << k;
      const double e = terminal_error(p, tab, n, {});
      if (k > 0) rates.push_back(std::log2(prev / e));
      prev = e;
    }
    const double rate = rates.back();
    CHECK(rate == doctest::Approx(c.p).epsilon(0.12));
  }
}

TEST_CASE("gauss methods preserve the kubo invariant stepwise") {
  const auto p = kubo_problem(1.0, 1.0);
  for (const auto& n : {"gauss1", "gauss2", "gauss3"}) {
    CAPTURE(n);
    const auto tab = builtin_tableau(n);
    std::vector<double> y = p.x0;
    RngStream rng(3);
    StageSolveConfig cfg;
    for (int k = 0; k < 200; ++k) {
      const double dmu = 0.1 + 0.25 * rng.next_normal();
      y = rk_step(tab, p.f, &p.jacobian, y, dmu, cfg);
      CHECK(std::abs(y[0] * y[0] + y[1] * y[1] - 1.0) < 1e-9);
    }
  }
  // an explicit method drifts off the circle, visibly
  const auto tab = builtin_tableau("euler");
  std::vector<double> y = p.x0;
  for (int k = 0; k < 200; ++k) y = rk_step(tab, p.f, &p.jacobian, y, 0.1, {});
  CHECK(std::abs(y[0] * y[0] + y[1] * y[1] - 1.0) > 1e-2);
}

TEST_CASE("stage solve failures surface as StepError") {
  const std::vector<double> y{1.0};

  SUBCASE("singular newton system") {
    // linear f: I - dmu*a00*1 vanishes at dmu = 2
    CHECK_THROWS_AS(
        rk_step(builtin_tableau("gauss1"), linear_f, nullptr, y, 2.0, {}),
        StepError);
  }
  SUBCASE("divergent fixed point") {
    StageSolveConfig cfg;
    cfg.method = StageSolveConfig::Method::fixed_point;
    CHECK_THROWS_AS(
        rk_step(builtin_tableau("gauss1"), linear_f, nullptr, y, 4.0, cfg),
        StepError);
  }
  SUBCASE("non-finite increment") {
    CHECK_THROWS_AS(rk_step(builtin_tableau("euler"), linear_f, nullptr, y,
                            std::numeric_limits<double>::quiet_NaN(), {}),
                    StepError);
  }
}

TEST_CASE("integrate_increments records the failure and stops") {
  SdeProblem p;
  p.name = "quadratic_blowup";
  p.dim = 1;
  p.f = [](std::span<const double> x, std::span<double> out) {
    out[0] = x[0] * x[0];
  };
  p.x0 = {1.0};
  p.spec = {1.0, 0.0, 0.0, 10.0};
  const auto dmu = const_increments(20, 2.0);
  const auto traj = integrate_increments(p, builtin_tableau("erk4_classic"),
                                         0.0, 2.0, dmu, {});
  CHECK_FALSE(traj.ok());
  REQUIRE(traj.failure.has_value());
  CHECK(traj.failure->step_index < 20);
  CHECK(!traj.failure->reason.empty());
  CHECK(traj.states.size() == traj.failure->step_index + 1);
}

TEST_CASE("integrate follows the driving path grid") {
  const auto p = sinh_problem(0.8);
  const auto path = DrivingPath::generate(p.spec, 8, 17);
  const auto traj = integrate(p, builtin_tableau("heun"), path, 5, {});
  REQUIRE(traj.ok());
  CHECK(traj.states.size() == 33);
  CHECK(traj.times.front() == 0.0);
  CHECK(traj.times.back() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(traj.dmu_used == path.increments_at_level(5));
  // pathwise accuracy against the exact map at the terminal point
  const double exact = std::sinh(1.0 + 0.8 * path.wiener_total());
  CHECK(std::abs(traj.states.back()[0] - exact) < 0.05);
}

TEST_CASE("integrate_weak is deterministic in its stream and sums the noise") {
  const auto p = sinh_problem(0.8);
  const auto tab = builtin_tableau("heun");
  RngStream r1 = RngStream::substream(5, 9);
  RngStream r2 = RngStream::substream(5, 9);
  const auto a = integrate_weak(p, tab, 0.125, 8, 2, r1, {});
  const auto b = integrate_weak(p, tab, 0.125, 8, 2, r2, {});
  REQUIRE(a.ok);
  REQUIRE(b.ok);
  CHECK(a.y == b.y);
  CHECK(a.wiener_sum == b.wiener_sum);
  // wiener_sum is a sum of 8 three-point variables scaled by sqrt(3h)
  const double quantum = std::sqrt(3.0 * 0.125);
  const double k = a.wiener_sum / quantum;
  CHECK(std::abs(k - std::round(k)) < 1e-12);
  CHECK(std::abs(k) <= 8.0);
}
