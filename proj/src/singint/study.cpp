#include "singint/study.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <thread>

#include "singint/btree.hpp"
#include "singint/errors.hpp"

namespace singint {

namespace {

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  RngStream s = RngStream::substream(master, index);
  return s.next_u64();
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

int worker_count(const StudyConfig& cfg) {
  if (cfg.workers > 0) return cfg.workers;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

// static partition of [0, n) across workers; each worker writes only its
// own slots, results are reduced in path-index order afterwards
template <typename Fn>
void parallel_paths(int n, int workers, Fn&& body) {
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  const int chunk = (n + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    const int lo = w * chunk;
    const int hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &body] {
      for (int i = lo; i < hi; ++i) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

double norm2_diff(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

struct CellStats {
  double rms = 0.0, mae = 0.0, stderr_v = 0.0;
  int n_ok = 0, n_failed = 0;
};

// reduce per-path errors (NaN = failed sample) in index order
CellStats reduce_errors(const std::vector<double>& err) {
  CellStats cs;
  double sum_abs = 0.0, sum_sq = 0.0;
  for (double e : err) {
    if (std::isnan(e)) {
      ++cs.n_failed;
    } else {
      ++cs.n_ok;
      sum_abs += std::abs(e);
      sum_sq += e * e;
    }
  }
  if (cs.n_ok == 0) return cs;
  const double n = cs.n_ok;
  cs.mae = sum_abs / n;
  const double mean_sq = sum_sq / n;
  cs.rms = std::sqrt(mean_sq);
  // delta method for the RMS: Var(e^2) / (4 n mean_sq)
  double var_sq = 0.0;
  for (double e : err)
    if (!std::isnan(e)) var_sq += (e * e - mean_sq) * (e * e - mean_sq);
  if (cs.n_ok > 1 && cs.rms > 0.0)
    cs.stderr_v = std::sqrt(var_sq / (n - 1) / n) / (2.0 * cs.rms);
  return cs;
}

struct Functional {
  int component;  // -1 => constant 1
  double operator()(std::span<const double> x) const {
    return component < 0 ? 1.0 : x[static_cast<std::size_t>(component)];
  }
};

// E g(X(T)) by composite Simpson quadrature of the exact map against the
// standard normal density of W(T)/sqrt(T-t0)
double quadrature_reference(const SdeProblem& problem, Functional g) {
  if (!problem.has_exact())
    throw ValidationError(
        "weak study: no reference available (problem has no exact solution "
        "and no weak_reference was given)");
  const double len = problem.spec.length();
  const double sqrt_len = std::sqrt(len);
  const int n = 4800;  // even
  const double z0 = -12.0, z1 = 12.0;
  const double dz = (z1 - z0) / n;
  auto integrand = [&](double z) {
    const double w = sqrt_len * z;
    const double phi = std::exp(-0.5 * z * z) / std::sqrt(8.0 * std::atan(1.0));
    return g(problem.exact(problem.spec.T, w)) * phi;
  };
  double s = integrand(z0) + integrand(z1);
  for (int i = 1; i < n; ++i)
    s += integrand(z0 + i * dz) * (i % 2 ? 4.0 : 2.0);
  return s * dz / 3.0;
}

// pmf of K = sum of n iid weak-increment signs; order 1: {-1,+1} w.p. 1/2,
// order 2: {-1,0,+1} w.p. {1/6,2/3,1/6}. Index k+n holds P(K = k).
std::vector<double> sign_sum_pmf(int n, int order) {
  std::vector<double> p(2 * n + 1, 0.0);
  p[n] = 1.0;
  const double side = order == 1 ? 0.5 : 1.0 / 6.0;
  const double mid = order == 1 ? 0.0 : 2.0 / 3.0;
  std::vector<double> q(p.size());
  for (int step = 0; step < n; ++step) {
    std::fill(q.begin(), q.end(), 0.0);
    for (int i = 0; i < static_cast<int>(p.size()); ++i) {
      if (p[i] == 0.0) continue;
      if (i > 0) q[i - 1] += side * p[i];
      if (i + 1 < static_cast<int>(p.size())) q[i + 1] += side * p[i];
      q[i] += mid * p[i];
    }
    std::swap(p, q);
  }
  return p;
}

}  // namespace

ButcherTableau resolve_method(const StudyConfig& cfg, const std::string& name) {
  for (const auto& doc : cfg.custom_tableaus) {
    if (doc.is_object() && doc.value("name", "") == name) return load_tableau(doc);
  }
  return builtin_tableau(name);
}

std::optional<double> fit_order(
    const std::vector<std::pair<double, double>>& h_and_error,
    double error_floor) {
  std::vector<std::pair<double, double>> usable;
  for (const auto& [h, e] : h_and_error)
    if (e > error_floor) usable.emplace_back(std::log(h), std::log(e));
  if (usable.size() < 2) return std::nullopt;
  double mx = 0.0, my = 0.0;
  for (const auto& [x, y] : usable) {
    mx += x;
    my += y;
  }
  mx /= usable.size();
  my /= usable.size();
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [x, y] : usable) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  return sxy / sxx;
}

ConvergenceReport mean_square_study(const StudyConfig& cfg) {
  if (cfg.n_paths < 1) throw ValidationError("study: n_paths must be >= 1");
  if (cfg.methods.empty()) throw ValidationError("study: no methods given");
  if (cfg.levels.empty()) throw ValidationError("study: no levels given");
  for (int lvl : cfg.levels)
    if (lvl < 0 || lvl > cfg.finest_level)
      throw ValidationError("study: level out of range");

  const SdeProblem problem = make_problem(cfg.problem, cfg.sigma, cfg.a);
  const int workers = worker_count(cfg);
  const int M = cfg.n_paths;

  ConvergenceReport report;
  report.kind = "mean_square";
  report.config = cfg;

  for (const auto& mname : cfg.methods) {
    const ButcherTableau tab = resolve_method(cfg, mname);
    std::vector<std::pair<double, double>> fit_rows;
    for (int level : cfg.levels) {
      const double h = problem.spec.length() /
                       static_cast<double>(std::size_t{1} << level);
      std::vector<double> err(M, std::numeric_limits<double>::quiet_NaN());
      parallel_paths(M, workers, [&](int i) {
        const auto path = DrivingPath::generate(
            problem.spec, cfg.finest_level,
            derive_seed(cfg.master_seed, static_cast<std::uint64_t>(i)));
        std::vector<double> ref;
        if (problem.has_exact()) {
          ref = problem.exact(problem.spec.T, path.wiener_total());
        } else {
          auto fine = integrate(problem, tab, path, cfg.finest_level, cfg.solve);
          if (!fine.ok()) return;  // failed sample
          ref = fine.states.back();
        }
        auto traj = integrate(problem, tab, path, level, cfg.solve);
        if (!traj.ok()) return;
        err[i] = norm2_diff(traj.states.back(), ref);
      });
      const CellStats cs = reduce_errors(err);
      ReportRow row{mname, tab.stages, h,     level, cs.rms,
                    cs.mae, cs.stderr_v, cs.n_ok, cs.n_failed};
      report.rows.push_back(row);
      if (cs.n_ok > 0) fit_rows.emplace_back(h, cs.rms);
    }
    MethodFit fit;
    fit.method = mname;
    const auto od = deterministic_order(tab, 8);
    fit.p_d = od.order;
    fit.p_sde = predicted_sde_order(od.order);
    if (auto p = fit_order(fit_rows, cfg.error_floor)) {
      fit.p_num = *p;
      fit.enough_data = true;
    }
    report.fits.push_back(fit);
  }
  return report;
}

ConvergenceReport weak_study(const StudyConfig& cfg) {
  if (cfg.n_paths < 1) throw ValidationError("study: n_paths must be >= 1");
  if (cfg.methods.empty()) throw ValidationError("study: no methods given");
  if (cfg.weak_steps.empty()) throw ValidationError("weak study: no step sizes given");
  if (cfg.weak_order != 1 && cfg.weak_order != 2)
    throw ValidationError("weak study: weak_order must be 1 or 2");

  const SdeProblem problem = make_problem(cfg.problem, cfg.sigma, cfg.a);
  const Functional g{cfg.weak_functional};
  if (cfg.weak_functional >= problem.dim)
    throw ValidationError("weak study: functional component out of range");
  const double reference = std::isnan(cfg.weak_reference)
                               ? quadrature_reference(problem, g)
                               : cfg.weak_reference;
  const int workers = worker_count(cfg);
  const int M = cfg.n_paths;

  ConvergenceReport report;
  report.kind = "weak";
  report.config = cfg;
  report.weak_reference = reference;

  std::uint64_t cell_index = 0;
  for (const auto& mname : cfg.methods) {
    const ButcherTableau tab = resolve_method(cfg, mname);
    std::vector<std::pair<double, double>> fit_rows;
    for (double h : cfg.weak_steps) {
      if (!(h > 0.0)) throw ValidationError("weak study: step sizes must be positive");
      const int n_steps = std::max(
          1, static_cast<int>(std::llround(problem.spec.length() / h)));
      const bool coupled = problem.has_exact();
      // sample[i]: g(Y_N) - g(exact flow of the same discrete path) when
      // coupled, plain g(Y_N) otherwise; NaN = failed
      std::vector<double> sample(M, std::numeric_limits<double>::quiet_NaN());
      const std::uint64_t cell = cell_index++;
      parallel_paths(M, workers, [&](int i) {
        RngStream rng = RngStream::substream(
            cfg.master_seed,
            (cell << 40) + static_cast<std::uint64_t>(i) + 1);
        auto run = integrate_weak(problem, tab, h, n_steps, cfg.weak_order,
                                  rng, cfg.solve);
        if (!run.ok) return;
        double v = g(run.y);
        if (coupled) v -= g(problem.exact(problem.spec.T, run.wiener_sum));
        sample[i] = v;
      });
      double sum = 0.0;
      int n_ok = 0, n_failed = 0;
      for (double v : sample) {
        if (std::isnan(v)) {
          ++n_failed;
        } else {
          sum += v;
          ++n_ok;
        }
      }
      double estimate = std::numeric_limits<double>::quiet_NaN();
      double se = 0.0;
      if (n_ok > 0) {
        const double mean = sum / n_ok;
        double var = 0.0;
        for (double v : sample)
          if (!std::isnan(v)) var += (v - mean) * (v - mean);
        if (n_ok > 1) se = std::sqrt(var / (n_ok - 1) / n_ok);
        estimate = mean;
        if (coupled) {
          // exact mean of the coupling term over the discrete increment law
          const auto pmf = sign_sum_pmf(n_steps, cfg.weak_order);
          const double scale =
              std::sqrt((cfg.weak_order == 2 ? 3.0 : 1.0) * h);
          double disc_mean = 0.0;
          for (int k = -n_steps; k <= n_steps; ++k) {
            const double p = pmf[static_cast<std::size_t>(k + n_steps)];
            if (p == 0.0) continue;
            disc_mean += p * g(problem.exact(problem.spec.T, scale * k));
          }
          estimate += disc_mean;
        }
      }
      const double err = n_ok > 0 ? std::abs(estimate - reference)
                                  : std::numeric_limits<double>::quiet_NaN();
      const double lvl_f = std::log2(problem.spec.length() / h);
      const int level = std::abs(lvl_f - std::llround(lvl_f)) < 1e-9
                            ? static_cast<int>(std::llround(lvl_f))
                            : -1;
      ReportRow row{mname, tab.stages, h, level, err, err, se, n_ok, n_failed};
      report.rows.push_back(row);
      if (n_ok > 0) fit_rows.emplace_back(h, err);
    }
    MethodFit fit;
    fit.method = mname;
    const auto od = deterministic_order(tab, 8);
    fit.p_d = od.order;
    fit.p_sde = predicted_sde_order(od.order);
    if (auto p = fit_order(fit_rows, cfg.error_floor)) {
      fit.p_num = *p;
      fit.enough_data = true;
    }
    report.fits.push_back(fit);
  }
  return report;
}

std::vector<DriftSeries> invariant_drift_study(
    const SdeProblem& problem, const std::vector<ButcherTableau>& methods,
    double h, double horizon, std::uint64_t seed, const StageSolveConfig& cfg,
    int record_stride) {
  if (problem.invariants.empty())
    throw ValidationError("invariant study: problem has no invariants");
  if (!(h > 0.0) || !(horizon > 0.0))
    throw ValidationError("invariant study: h and horizon must be positive");
  if (record_stride < 1) record_stride = 1;

  const auto n_steps = static_cast<std::size_t>(std::llround(horizon / h));
  // shared path: one Gaussian increment sequence for every method
  std::vector<double> dw(n_steps);
  RngStream rng(seed);
  const double sqrt_h = std::sqrt(h);
  for (auto& v : dw) v = sqrt_h * rng.next_normal();

  std::vector<double> inv0;
  for (const auto& inv : problem.invariants) inv0.push_back(inv.fn(problem.x0));

  std::vector<DriftSeries> out;
  const JacobianField* jac = problem.jacobian ? &problem.jacobian : nullptr;
  for (const auto& tab : methods) {
    DriftSeries series;
    series.method = tab.name;
    for (const auto& inv : problem.invariants)
      series.invariant_names.push_back(inv.name);
    series.drifts.resize(problem.invariants.size());
    series.max_abs_drift.assign(problem.invariants.size(), 0.0);

    std::vector<double> y = problem.x0;
    for (std::size_t n = 0; n < n_steps; ++n) {
      const double dmu = problem.spec.lambda * h + problem.spec.sigma * dw[n];
      try {
        y = rk_step(tab, problem.f, jac, y, dmu, cfg);
      } catch (const StepError& e) {
        series.truncated = true;
        series.failure_reason = e.what();
        break;
      }
      ++series.steps_completed;
      bool record = (n + 1) % static_cast<std::size_t>(record_stride) == 0 ||
                    n + 1 == n_steps;
      for (std::size_t k = 0; k < problem.invariants.size(); ++k) {
        const double drift = problem.invariants[k].fn(y) - inv0[k];
        series.max_abs_drift[k] =
            std::max(series.max_abs_drift[k], std::abs(drift));
        if (record) series.drifts[k].push_back(drift);
      }
      if (record) series.times.push_back(static_cast<double>(n + 1) * h);
    }
    out.push_back(std::move(series));
  }
  return out;
}

std::string report_csv(const ConvergenceReport& report) {
  std::string out = "method,s,h,level,mse,mae,stderr,n_ok,n_failed\n";
  for (const auto& r : report.rows) {
    out += r.method + "," + std::to_string(r.stages) + "," + fmt_double(r.h) +
           "," + std::to_string(r.level) + "," + fmt_double(r.rms) + "," +
           fmt_double(r.mae) + "," + fmt_double(r.stderr_v) + "," +
           std::to_string(r.n_ok) + "," + std::to_string(r.n_failed) + "\n";
  }
  return out;
}

nlohmann::ordered_json report_json(const ConvergenceReport& report) {
  nlohmann::ordered_json j;
  j["kind"] = report.kind;
  nlohmann::json cfg;
  to_json(cfg, report.config);
  j["config"] = cfg;
  if (!std::isnan(report.weak_reference))
    j["weak_reference"] = report.weak_reference;
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto& r : report.rows) {
    nlohmann::ordered_json row;
    row["method"] = r.method;
    row["s"] = r.stages;
    row["h"] = r.h;
    row["level"] = r.level;
    row["mse"] = r.rms;
    row["mae"] = r.mae;
    row["stderr"] = r.stderr_v;
    row["n_ok"] = r.n_ok;
    row["n_failed"] = r.n_failed;
    j["rows"].push_back(row);
  }
  j["fits"] = nlohmann::ordered_json::array();
  for (const auto& f : report.fits) {
    nlohmann::ordered_json fit;
    fit["method"] = f.method;
    fit["p_d"] = f.p_d;
    fit["p_sde"] = f.p_sde;
    if (f.enough_data)
      fit["p_num"] = f.p_num;
    else
      fit["p_num"] = nullptr;
    j["fits"].push_back(fit);
  }
  return j;
}

std::string drift_csv(const std::vector<DriftSeries>& series) {
  std::string out = "method,invariant,t,drift\n";
  for (const auto& s : series)
    for (std::size_t k = 0; k < s.invariant_names.size(); ++k)
      for (std::size_t n = 0; n < s.times.size(); ++n)
        out += s.method + "," + s.invariant_names[k] + "," +
               fmt_double(s.times[n]) + "," + fmt_double(s.drifts[k][n]) + "\n";
  return out;
}

void to_json(nlohmann::json& j, const StudyConfig& cfg) {
  j = nlohmann::json{{"problem", cfg.problem},
                     {"sigma", cfg.sigma},
                     {"a", cfg.a},
                     {"methods", cfg.methods},
                     {"master_seed", cfg.master_seed},
                     {"n_paths", cfg.n_paths},
                     {"finest_level", cfg.finest_level},
                     {"levels", cfg.levels},
                     {"weak_steps", cfg.weak_steps},
                     {"weak_order", cfg.weak_order},
                     {"weak_functional", cfg.weak_functional},
                     {"error_floor", cfg.error_floor},
                     {"workers", cfg.workers},
                     {"solve_tol", cfg.solve.tol},
                     {"solve_max_iter", cfg.solve.max_iter}};
  if (!std::isnan(cfg.weak_reference)) j["weak_reference"] = cfg.weak_reference;
  if (!cfg.custom_tableaus.empty()) j["custom_tableaus"] = cfg.custom_tableaus;
}

void from_json(const nlohmann::json& j, StudyConfig& cfg) {
  cfg.problem = j.value("problem", cfg.problem);
  cfg.sigma = j.value("sigma", cfg.sigma);
  cfg.a = j.value("a", cfg.a);
  cfg.methods = j.value("methods", cfg.methods);
  if (j.contains("custom_tableaus"))
    cfg.custom_tableaus =
        std::vector<nlohmann::json>(j.at("custom_tableaus").begin(),
                                    j.at("custom_tableaus").end());
  cfg.master_seed = j.value("master_seed", cfg.master_seed);
  cfg.n_paths = j.value("n_paths", cfg.n_paths);
  cfg.finest_level = j.value("finest_level", cfg.finest_level);
  cfg.levels = j.value("levels", cfg.levels);
  cfg.weak_steps = j.value("weak_steps", cfg.weak_steps);
  cfg.weak_order = j.value("weak_order", cfg.weak_order);
  cfg.weak_functional = j.value("weak_functional", cfg.weak_functional);
  cfg.weak_reference = j.value("weak_reference", cfg.weak_reference);
  cfg.error_floor = j.value("error_floor", cfg.error_floor);
  cfg.workers = j.value("workers", cfg.workers);
  cfg.solve.tol = j.value("solve_tol", cfg.solve.tol);
  cfg.solve.max_iter = j.value("solve_max_iter", cfg.solve.max_iter);
}

}  // namespace singint
