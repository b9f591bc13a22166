#include "singint/singint.h"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>

#include "json.hpp"
#include "singint/btree.hpp"
#include "singint/errors.hpp"
#include "singint/study.hpp"

using nlohmann::json;

struct si_context {
  std::string last_error;
};

namespace {

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

template <typename Fn>
int guarded(si_context* ctx, Fn&& fn) {
  if (!ctx) return SI_ERR_VALIDATION;
  ctx->last_error.clear();
  try {
    fn();
    return SI_OK;
  } catch (const singint::ValidationError& e) {
    ctx->last_error = e.what();
    return SI_ERR_VALIDATION;
  } catch (const json::exception& e) {
    ctx->last_error = std::string("bad JSON input: ") + e.what();
    return SI_ERR_VALIDATION;
  } catch (const std::exception& e) {
    ctx->last_error = e.what();
    return SI_ERR_NUMERICAL;
  }
}

singint::StudyConfig parse_config(const char* config_json) {
  if (!config_json) throw singint::ValidationError("null config");
  return json::parse(config_json).get<singint::StudyConfig>();
}

singint::ButcherTableau tableau_from_spec(const singint::StudyConfig& cfg,
                                          const std::string& method) {
  return singint::resolve_method(cfg, method);
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

extern "C" {

si_context* si_context_create(void) { return new si_context; }

void si_context_destroy(si_context* ctx) { delete ctx; }

const char* si_last_error(const si_context* ctx) {
  return ctx ? ctx->last_error.c_str() : "null context";
}

void si_string_free(char* s) { std::free(s); }

int si_list_methods(si_context* ctx, char** out_json) {
  return guarded(ctx, [&] {
    json j = singint::builtin_tableau_names();
    if (out_json) *out_json = dup_string(j.dump());
  });
}

int si_method_order(si_context* ctx, const char* method, int max_check,
                    int* p_d, int* p_sde, char** failing_tree) {
  return guarded(ctx, [&] {
    if (!method) throw singint::ValidationError("null method");
    singint::ButcherTableau tab;
    if (method[0] == '{')
      tab = singint::load_tableau(json::parse(method));
    else
      tab = singint::builtin_tableau(method);
    const auto res = singint::deterministic_order(tab, max_check);
    if (p_d) *p_d = res.order;
    if (p_sde) *p_sde = singint::predicted_sde_order(res.order);
    if (failing_tree)
      *failing_tree = dup_string(
          res.failing_tree ? res.failing_tree->notation() : std::string());
  });
}

int si_tableau_check(si_context* ctx, const char* tableau_json,
                     char** out_json) {
  return guarded(ctx, [&] {
    if (!tableau_json) throw singint::ValidationError("null tableau document");
    const auto tab = singint::load_tableau(json::parse(tableau_json));
    if (out_json) *out_json = dup_string(singint::serialize_tableau(tab).dump());
  });
}

int si_mean_square_study(si_context* ctx, const char* config_json,
                         char** out_csv, char** out_json) {
  return guarded(ctx, [&] {
    const auto cfg = parse_config(config_json);
    const auto report = singint::mean_square_study(cfg);
    if (out_csv) *out_csv = dup_string(singint::report_csv(report));
    if (out_json) *out_json = dup_string(singint::report_json(report).dump(2));
  });
}

int si_weak_study(si_context* ctx, const char* config_json, char** out_csv,
                  char** out_json) {
  return guarded(ctx, [&] {
    const auto cfg = parse_config(config_json);
    const auto report = singint::weak_study(cfg);
    if (out_csv) *out_csv = dup_string(singint::report_csv(report));
    if (out_json) *out_json = dup_string(singint::report_json(report).dump(2));
  });
}

int si_trajectory(si_context* ctx, const char* config_json, char** out_csv) {
  return guarded(ctx, [&] {
    const auto j = json::parse(config_json ? config_json : "");
    const auto cfg = j.get<singint::StudyConfig>();
    if (cfg.methods.size() != 1)
      throw singint::ValidationError("trajectory: exactly one method required");
    const auto problem =
        singint::make_problem(cfg.problem, cfg.sigma, cfg.a);
    const auto tab = tableau_from_spec(cfg, cfg.methods[0]);
    const auto path = singint::DrivingPath::generate(
        problem.spec, cfg.finest_level, cfg.master_seed);
    const auto traj =
        singint::integrate(problem, tab, path, cfg.finest_level, cfg.solve);
    std::string csv = "t";
    for (int q = 0; q < problem.dim; ++q) csv += ",y" + std::to_string(q);
    csv += "\n";
    for (std::size_t n = 0; n < traj.states.size(); ++n) {
      csv += fmt17(traj.times[n]);
      for (double v : traj.states[n]) csv += "," + fmt17(v);
      csv += "\n";
    }
    if (!traj.ok())
      throw singint::NumericalError("trajectory failed at step " +
                                    std::to_string(traj.failure->step_index) +
                                    ": " + traj.failure->reason);
    if (out_csv) *out_csv = dup_string(csv);
  });
}

int si_invariant_drift(si_context* ctx, const char* config_json,
                       char** out_csv, char** out_json) {
  return guarded(ctx, [&] {
    const auto j = json::parse(config_json ? config_json : "");
    const auto cfg = j.get<singint::StudyConfig>();
    const double h = j.value("h", 0.5);
    const double horizon = j.value("horizon", 1000.0);
    const int stride = j.value("record_stride", 1);
    const auto problem =
        singint::make_problem(cfg.problem, cfg.sigma, cfg.a);
    std::vector<singint::ButcherTableau> tabs;
    for (const auto& m : cfg.methods) tabs.push_back(tableau_from_spec(cfg, m));
    const auto series = singint::invariant_drift_study(
        problem, tabs, h, horizon, cfg.master_seed, cfg.solve, stride);
    if (out_csv) *out_csv = dup_string(singint::drift_csv(series));
    if (out_json) {
      nlohmann::ordered_json out;
      out["problem"] = cfg.problem;
      out["h"] = h;
      out["horizon"] = horizon;
      out["series"] = nlohmann::ordered_json::array();
      for (const auto& s : series) {
        nlohmann::ordered_json e;
        e["method"] = s.method;
        e["invariants"] = s.invariant_names;
        e["max_abs_drift"] = s.max_abs_drift;
        e["steps_completed"] = s.steps_completed;
        e["truncated"] = s.truncated;
        if (s.truncated) e["failure"] = s.failure_reason;
        out["series"].push_back(e);
      }
      *out_json = dup_string(out.dump(2));
    }
  });
}

}  // extern "C"
