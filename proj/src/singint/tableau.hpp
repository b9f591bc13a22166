#ifndef SINGINT_TABLEAU_HPP
#define SINGINT_TABLEAU_HPP

#include <string>
#include <vector>

#include "json.hpp"

namespace singint {

/// Butcher tableau of a deterministic Runge-Kutta method. The same
/// coefficients drive the stochastic scheme, with the step size replaced
/// by the increment of the driving measure.
struct ButcherTableau {
  std::string name;
  int stages = 0;
  std::vector<std::vector<double>> A;  // stages x stages
  std::vector<double> b;
  std::vector<double> c;               // c_i = sum_j A_ij
  bool is_explicit = false;

  double a(int i, int j) const { return A[i][j]; }
};

/// Throws ValidationError if sum(b) != 1 (to 1e-12), c does not match the
/// row sums of A (to 1e-15 of scale), or dimensions are inconsistent.
void validate_tableau(const ButcherTableau& t);

/// Built-in methods: euler, heun, erk3, erk4_classic, erk5_fehlberg,
/// gauss1..3, radau_iia1..3. Gauss/Radau coefficients are stored as
/// 36-digit decimal strings. Unknown names throw ValidationError listing
/// the available methods.
ButcherTableau builtin_tableau(const std::string& name);

std::vector<std::string> builtin_tableau_names();

/// Loads a tableau from a JSON document with keys name, s, A, b and
/// optional c; entries may be decimal strings or numbers. A missing c is
/// defaulted to the row sums of A. The result is validated.
ButcherTableau load_tableau(const nlohmann::json& doc);

nlohmann::json serialize_tableau(const ButcherTableau& t);

}  // namespace singint

#endif
