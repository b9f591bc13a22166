#include "singint/tableau.hpp"

#include <cmath>
#include <cstdlib>
#include <map>

#include "singint/errors.hpp"

namespace singint {

namespace {

double parse_coeff(const std::string& s) {
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0')
    throw ValidationError("bad coefficient: '" + s + "'");
  return v;
}

struct TableauDef {
  std::vector<std::vector<const char*>> A;
  std::vector<const char*> b;
};

// Coefficient source of truth: decimal strings, 36 significant digits for
// the irrational Gauss/Radau entries.
const std::map<std::string, TableauDef>& builtin_defs() {
  static const std::map<std::string, TableauDef> defs = {
      {"euler", {{{"0"}}, {"1"}}},
      {"heun", {{{"0", "0"}, {"1", "0"}}, {"0.5", "0.5"}}},
      {"erk3",  // Kutta's third-order method
       {{{"0", "0", "0"}, {"0.5", "0", "0"}, {"-1", "2", "0"}},
        {"0.166666666666666666666666666666666667",
         "0.666666666666666666666666666666666667",
         "0.166666666666666666666666666666666667"}}},
      {"erk4_classic",
       {{{"0", "0", "0", "0"},
         {"0.5", "0", "0", "0"},
         {"0", "0.5", "0", "0"},
         {"0", "0", "1", "0"}},
        {"0.166666666666666666666666666666666667",
         "0.333333333333333333333333333333333333",
         "0.333333333333333333333333333333333333",
         "0.166666666666666666666666666666666667"}}},
      {"erk5_fehlberg",  // 5th-order weights of the Fehlberg 4(5) pair
       {{{"0", "0", "0", "0", "0", "0"},
         {"0.25", "0", "0", "0", "0", "0"},
         {"0.09375", "0.28125", "0", "0", "0", "0"},
         {"0.879380974055530268548020027309968138",
          "-3.27719617660446062812926718252162039",
          "3.32089212562585343650432407828857533", "0", "0", "0"},
         {"2.03240740740740740740740740740740741", "-8",
          "7.17348927875243664717348927875243665",
          "-0.205896686159844054580896686159844055", "0", "0"},
         {"-0.296296296296296296296296296296296296", "2",
          "-1.38167641325536062378167641325536062",
          "0.45297270955165692007797270955165692", "-0.275", "0"}},
        {"0.118518518518518518518518518518518519", "0",
         "0.51898635477582846003898635477582846",
         "0.506131490342016657806131490342016658",
         "-0.18", "0.0363636363636363636363636363636363636"}}},
      {"gauss1", {{{"0.5"}}, {"1"}}},
      {"gauss2",
       {{{"0.25", "-0.0386751345948128822545743902509787278"},
         {"0.538675134594812882254574390250978728", "0.25"}},
        {"0.5", "0.5"}}},
      {"gauss3",
       {{{"0.138888888888888888888888888888888889",
          "-0.0359766675249389034563954710966044185",
          "0.00978944401530832604958004222947556853"},
         {"0.300263194980864592438024947213155539",
          "0.222222222222222222222222222222222222",
          "-0.0224854172030868146602471694353777616"},
         {"0.267988333762469451728197735548302209",
          "0.480421111969383347900839915541048863",
          "0.138888888888888888888888888888888889"}},
        {"0.277777777777777777777777777777777778",
         "0.444444444444444444444444444444444444",
         "0.277777777777777777777777777777777778"}}},
      {"radau_iia1", {{{"1"}}, {"1"}}},
      {"radau_iia2",
       {{{"0.416666666666666666666666666666666667",
          "-0.0833333333333333333333333333333333333"},
         {"0.75", "0.25"}},
        {"0.75", "0.25"}}},
      {"radau_iia3",
       {{{"0.19681547722366042586838614299182989",
          "-0.0655354258501983881085227825696086918",
          "0.023770974348220152420408232107189663"},
         {"0.394424314739087276997411671458497581",
          "0.292073411665228463020502745897058999",
          "-0.0415487521259979301981860098849674408"},
         {"0.376403062700467275050075442369280795",
          "0.512485826188421613838813446519608094",
          "0.111111111111111111111111111111111111"}},
        {"0.376403062700467275050075442369280795",
         "0.512485826188421613838813446519608094",
         "0.111111111111111111111111111111111111"}}},
  };
  return defs;
}

bool strictly_lower_triangular(const std::vector<std::vector<double>>& A) {
  for (std::size_t i = 0; i < A.size(); ++i)
    for (std::size_t j = i; j < A[i].size(); ++j)
      if (A[i][j] != 0.0) return false;
  return true;
}

std::vector<double> row_sums(const std::vector<std::vector<double>>& A) {
  std::vector<double> c(A.size(), 0.0);
  for (std::size_t i = 0; i < A.size(); ++i)
    for (double aij : A[i]) c[i] += aij;
  return c;
}

}  // namespace

void validate_tableau(const ButcherTableau& t) {
  const auto s = static_cast<std::size_t>(t.stages);
  if (t.stages <= 0) throw ValidationError("tableau '" + t.name + "': stage count must be positive");
  if (t.A.size() != s || t.b.size() != s || t.c.size() != s)
    throw ValidationError("tableau '" + t.name + "': dimension mismatch");
  for (const auto& row : t.A)
    if (row.size() != s)
      throw ValidationError("tableau '" + t.name + "': A is not " + std::to_string(t.stages) + "x" + std::to_string(t.stages));

  double bsum = 0.0;
  for (double bi : t.b) bsum += bi;
  if (std::abs(bsum - 1.0) > 1e-12)
    throw ValidationError("tableau '" + t.name + "': sum(b) = " + std::to_string(bsum) + ", must be 1");

  const auto rs = row_sums(t.A);
  for (std::size_t i = 0; i < s; ++i)
    if (std::abs(rs[i] - t.c[i]) > 1e-15 * (1.0 + std::abs(t.c[i])))
      throw ValidationError("tableau '" + t.name + "': c[" + std::to_string(i) + "] does not match the row sum of A");

  if (t.is_explicit != strictly_lower_triangular(t.A))
    throw ValidationError("tableau '" + t.name + "': explicit flag inconsistent with A");
}

ButcherTableau builtin_tableau(const std::string& name) {
  const auto& defs = builtin_defs();
  auto it = defs.find(name);
  if (it == defs.end()) {
    std::string msg = "unknown method '" + name + "'; available:";
    for (const auto& [n, d] : defs) msg += " " + n;
    throw ValidationError(msg);
  }
  ButcherTableau t;
  t.name = name;
  t.stages = static_cast<int>(it->second.b.size());
  for (const auto& row : it->second.A) {
    t.A.emplace_back();
    for (const char* e : row) t.A.back().push_back(parse_coeff(e));
  }
  for (const char* e : it->second.b) t.b.push_back(parse_coeff(e));
  t.c = row_sums(t.A);
  t.is_explicit = strictly_lower_triangular(t.A);
  validate_tableau(t);
  return t;
}

std::vector<std::string> builtin_tableau_names() {
  std::vector<std::string> names;
  for (const auto& [n, d] : builtin_defs()) names.push_back(n);
  return names;
}

namespace {

double json_coeff(const nlohmann::json& v) {
  if (v.is_string()) return parse_coeff(v.get<std::string>());
  if (v.is_number()) return v.get<double>();
  throw ValidationError("tableau entries must be numbers or decimal strings");
}

}  // namespace

ButcherTableau load_tableau(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ValidationError("tableau document must be a JSON object");
  ButcherTableau t;
  t.name = doc.value("name", std::string("custom"));
  if (!doc.contains("s") || !doc.contains("A") || !doc.contains("b"))
    throw ValidationError("tableau document requires keys s, A, b");
  t.stages = doc.at("s").get<int>();
  for (const auto& row : doc.at("A")) {
    t.A.emplace_back();
    for (const auto& e : row) t.A.back().push_back(json_coeff(e));
  }
  for (const auto& e : doc.at("b")) t.b.push_back(json_coeff(e));
  if (doc.contains("c")) {
    for (const auto& e : doc.at("c")) t.c.push_back(json_coeff(e));
  } else {
    if (t.A.size() != static_cast<std::size_t>(t.stages))
      throw ValidationError("tableau '" + t.name + "': dimension mismatch");
    t.c = row_sums(t.A);
  }
  t.is_explicit = strictly_lower_triangular(t.A);
  validate_tableau(t);
  return t;
}

nlohmann::json serialize_tableau(const ButcherTableau& t) {
  nlohmann::json doc;
  doc["name"] = t.name;
  doc["s"] = t.stages;
  doc["A"] = t.A;
  doc["b"] = t.b;
  doc["c"] = t.c;
  return doc;
}

}  // namespace singint
