// Command-line front end. Talks to the solver library exclusively through
// the C API in singint/singint.h.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "singint/singint.h"

using nlohmann::json;

namespace {

struct StringOut {
  char* ptr = nullptr;
  ~StringOut() { si_string_free(ptr); }
  std::string str() const { return ptr ? std::string(ptr) : std::string(); }
};

struct CommonOpts {
  std::string problem = "sinh";
  std::string methods;  // comma-separated
  double sigma = 0.8;
  double a = 1.0;
  std::uint64_t seed = 1;
  int paths = 2000;
  int finest_level = 9;
  std::string levels;  // comma-separated ints
  double h = 0.5;
  double horizon = 1000.0;
  int weak_order = 2;
  int workers = 0;
  std::string tableau_file;
  std::string out;
  std::string format = "csv";
};

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

json build_config(const CommonOpts& o) {
  json cfg;
  cfg["problem"] = o.problem;
  cfg["sigma"] = o.sigma;
  cfg["a"] = o.a;
  cfg["methods"] = split_commas(o.methods);
  cfg["master_seed"] = o.seed;
  cfg["n_paths"] = o.paths;
  cfg["finest_level"] = o.finest_level;
  cfg["weak_order"] = o.weak_order;
  cfg["workers"] = o.workers;
  if (!o.levels.empty()) {
    std::vector<int> lv;
    for (const auto& t : split_commas(o.levels)) lv.push_back(std::stoi(t));
    cfg["levels"] = lv;
  }
  if (!o.tableau_file.empty()) {
    std::ifstream in(o.tableau_file);
    if (!in) throw CLI::ValidationError("--tableau-file",
                                        "cannot read " + o.tableau_file);
    json doc = json::parse(in);
    cfg["custom_tableaus"] = json::array({doc});
  }
  return cfg;
}

// writes the document to --out, or stdout when no file was given; the file
// is only created once the computation has succeeded
int emit(const CommonOpts& o, const std::string& doc) {
  if (o.out.empty()) {
    std::cout << doc;
    return 0;
  }
  std::ofstream f(o.out, std::ios::binary);
  if (!f) {
    std::cerr << "error: cannot write " << o.out << "\n";
    return 1;
  }
  f << doc;
  return 0;
}

int fail(si_context* ctx, int rc) {
  std::cerr << "error: " << si_last_error(ctx) << "\n";
  return rc == SI_ERR_VALIDATION ? 1 : 2;
}

void print_fits(const std::string& report_json_text) {
  const json j = json::parse(report_json_text);
  for (const auto& f : j.at("fits")) {
    std::cerr << "# " << f.at("method").get<std::string>()
              << ": p_d=" << f.at("p_d").get<int>()
              << " sde order=" << f.at("p_sde").get<int>() << " p_num=";
    if (f.at("p_num").is_null())
      std::cerr << "n/a (not enough data above error floor)";
    else
      std::cerr << f.at("p_num").get<double>();
    std::cerr << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic Runge-Kutta solver for single-integrand "
               "Stratonovich SDEs"};
  app.require_subcommand(1);
  CommonOpts o;

  auto* list = app.add_subcommand("list-methods", "List built-in tableaus");

  auto* order = app.add_subcommand(
      "order", "Deterministic order and predicted SDE order of a method");
  order->add_option("--method", o.methods, "Method name");
  order->add_option("--tableau-file", o.tableau_file,
                    "JSON tableau document instead of a built-in method");
  int max_check = 8;
  order->add_option("--max-check", max_check, "Highest order to test (<=12)");

  auto* conv = app.add_subcommand(
      "converge", "Mean-square convergence study (pathwise coupling)");
  auto* convw = app.add_subcommand(
      "converge-weak", "Weak convergence study (moment-matched increments)");
  auto* traj = app.add_subcommand("trajectory",
                                  "Integrate and dump one trajectory");
  auto* inv = app.add_subcommand(
      "invariants", "Invariant drift of one trajectory per method");

  std::string weak_steps;
  for (auto* cmd : {conv, convw, traj, inv}) {
    cmd->add_option("--problem", o.problem, "sinh | kubo | rigid_body");
    cmd->add_option("--sigma", o.sigma, "Diffusion scale");
    cmd->add_option("--a", o.a, "Kubo drift parameter");
    cmd->add_option("--method,--methods", o.methods,
                    "Comma-separated method names");
    cmd->add_option("--seed", o.seed, "Master seed");
    cmd->add_option("--tableau-file", o.tableau_file,
                    "Additional tableau JSON document");
    cmd->add_option("--out", o.out, "Output file (default stdout)");
    cmd->add_option("--format", o.format, "csv | json")
        ->check(CLI::IsMember({"csv", "json"}));
  }
  for (auto* cmd : {conv, convw}) {
    cmd->add_option("--paths", o.paths, "Monte Carlo sample count");
    cmd->add_option("--workers", o.workers,
                    "Worker threads (0 = hardware concurrency)");
  }
  conv->add_option("--finest-level", o.finest_level,
                   "Dyadic level of the shared fine path");
  conv->add_option("--levels", o.levels,
                   "Comma-separated coarse levels, e.g. 4,5,6,7,8,9");
  convw->add_option("--steps", weak_steps,
                    "Comma-separated step sizes, e.g. 0.125,0.0625");
  convw->add_option("--weak-order", o.weak_order, "1 or 2");
  traj->add_option("--finest-level", o.finest_level, "Dyadic grid level");
  inv->add_option("--step", o.h, "Step size");
  inv->add_option("--horizon", o.horizon, "Integration horizon");
  int record_stride = 1;
  inv->add_option("--record-stride", record_stride,
                  "Record drift every this many steps");

  CLI11_PARSE(app, argc, argv);

  std::unique_ptr<si_context, decltype(&si_context_destroy)> ctx(
      si_context_create(), &si_context_destroy);

  if (list->parsed()) {
    StringOut s;
    if (int rc = si_list_methods(ctx.get(), &s.ptr); rc != SI_OK)
      return fail(ctx.get(), rc);
    for (const auto& name : json::parse(s.str()))
      std::cout << name.get<std::string>() << "\n";
    return 0;
  }

  if (order->parsed()) {
    std::string method = o.methods;
    if (!o.tableau_file.empty()) {
      std::ifstream in(o.tableau_file);
      if (!in) {
        std::cerr << "error: cannot read " << o.tableau_file << "\n";
        return 1;
      }
      std::stringstream ss;
      ss << in.rdbuf();
      method = ss.str();
    }
    if (method.empty()) {
      std::cerr << "error: order requires --method or --tableau-file\n";
      return 1;
    }
    int p_d = 0, p_sde = 0;
    StringOut failing;
    if (int rc = si_method_order(ctx.get(), method.c_str(), max_check, &p_d,
                                 &p_sde, &failing.ptr);
        rc != SI_OK)
      return fail(ctx.get(), rc);
    std::cout << "p_d=" << p_d << ", sde order=" << p_sde << "\n";
    if (!failing.str().empty())
      std::cout << "first failing tree at order " << p_d + 1 << ": "
                << failing.str() << "\n";
    return 0;
  }

  if (conv->parsed() || convw->parsed()) {
    json cfg = build_config(o);
    if (convw->parsed()) {
      std::vector<double> hs;
      for (const auto& t : split_commas(weak_steps)) hs.push_back(std::stod(t));
      if (hs.empty()) {
        std::cerr << "error: converge-weak requires --steps\n";
        return 1;
      }
      cfg["weak_steps"] = hs;
    } else if (!cfg.contains("levels")) {
      cfg["levels"] = std::vector<int>{4, 5, 6, 7, 8, 9};
    }
    StringOut csv, js;
    const std::string cfg_text = cfg.dump();
    const int rc =
        conv->parsed()
            ? si_mean_square_study(ctx.get(), cfg_text.c_str(), &csv.ptr, &js.ptr)
            : si_weak_study(ctx.get(), cfg_text.c_str(), &csv.ptr, &js.ptr);
    if (rc != SI_OK) return fail(ctx.get(), rc);
    print_fits(js.str());
    return emit(o, o.format == "json" ? js.str() : csv.str());
  }

  if (traj->parsed()) {
    json cfg = build_config(o);
    StringOut csv;
    if (int rc = si_trajectory(ctx.get(), cfg.dump().c_str(), &csv.ptr);
        rc != SI_OK)
      return fail(ctx.get(), rc);
    return emit(o, csv.str());
  }

  if (inv->parsed()) {
    json cfg = build_config(o);
    cfg["h"] = o.h;
    cfg["horizon"] = o.horizon;
    cfg["record_stride"] = record_stride;
    StringOut csv, js;
    if (int rc = si_invariant_drift(ctx.get(), cfg.dump().c_str(), &csv.ptr,
                                    &js.ptr);
        rc != SI_OK)
      return fail(ctx.get(), rc);
    return emit(o, o.format == "json" ? js.str() : csv.str());
  }

  return 0;
}
