#ifndef SINGINT_BTREE_HPP
#define SINGINT_BTREE_HPP

#include <optional>
#include <string>
#include <vector>

#include "singint/rational.hpp"
#include "singint/tableau.hpp"

namespace singint {

/// Unlabeled rooted tree in canonical form: children are kept sorted by
/// (order, canonical key), so two trees compare equal iff isomorphic.
/// The empty tree is not represented; the single node is leaf().
class RootedTree {
 public:
  static RootedTree leaf();
  static RootedTree join(std::vector<RootedTree> children);

  int order() const { return order_; }  // node count rho(tau)
  const std::vector<RootedTree>& children() const { return children_; }
  const std::string& key() const { return key_; }

  /// Bracket notation for reports: "•", "[•]", "[•,•]", "[[•]]".
  std::string notation() const;

  bool operator==(const RootedTree& o) const { return key_ == o.key_; }
  bool operator<(const RootedTree& o) const {
    if (order_ != o.order_) return order_ < o.order_;
    return key_ < o.key_;
  }

 private:
  RootedTree() = default;
  std::vector<RootedTree> children_;
  int order_ = 1;
  std::string key_ = ".";
};

inline constexpr int kMaxTreeOrder = 12;

/// All non-empty rooted trees with order <= max_order, one per isomorphism
/// class, sorted by (order, canonical key). max_order must be in [1,12].
std::vector<RootedTree> enumerate_trees(int max_order);

/// Density: gamma(leaf) = 1, gamma([t1..tk]) = rho * prod gamma(tj).
Rational tree_gamma(const RootedTree& tree);

/// Symmetry coefficient: alpha([t1..tk]) = prod alpha(tj) / (r1!..rq!)
/// where r1..rq count equal children.
Rational tree_alpha(const RootedTree& tree);

/// Elementary weight phi_hat(tau) of a tableau: phi_i(leaf) = sum_j a_ij,
/// phi_i(tau) = sum_j a_ij prod_k phi_j(tau_k), phi_hat = sum_i b_i prod_k phi_i(tau_k).
double elementary_weight(const ButcherTableau& t, const RootedTree& tree);

struct OrderResult {
  int order = 0;
  // First tree at order+1 violating phi_hat = 1/gamma, if order < max_check.
  std::optional<RootedTree> failing_tree;
  double failing_residual = 0.0;
};

/// Largest p <= max_check such that |phi_hat(tau) - 1/gamma(tau)| <= tol
/// for every tree with rho(tau) <= p.
OrderResult deterministic_order(const ButcherTableau& t, int max_check,
                                double tol = 1e-10);

/// Theorem: mean-square and weak SDE order of a method of deterministic
/// order p_d is floor(p_d / 2).
int predicted_sde_order(int p_d);

}  // namespace singint

#endif
