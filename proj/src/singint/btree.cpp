#include "singint/btree.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "singint/errors.hpp"

namespace singint {

RootedTree RootedTree::leaf() { return RootedTree{}; }

RootedTree RootedTree::join(std::vector<RootedTree> children) {
  RootedTree t;
  std::sort(children.begin(), children.end());
  t.order_ = 1;
  for (const auto& c : children) t.order_ += c.order_;
  t.key_.clear();
  t.key_ += '[';
  for (const auto& c : children) t.key_ += c.key_;
  t.key_ += ']';
  if (children.empty()) t.key_ = ".";
  t.children_ = std::move(children);
  return t;
}

std::string RootedTree::notation() const {
  if (children_.empty()) return "•";
  std::string s = "[";
  for (std::size_t i = 0; i < children_.size(); ++i) {
    if (i) s += ",";
    s += children_[i].notation();
  }
  s += "]";
  return s;
}

namespace {

std::mutex tree_table_mutex;

// trees grouped by order, memoized across calls; guarded order keeps the
// table small (order 12 has 32973 classes). Caller must hold tree_table_mutex.
const std::vector<std::vector<RootedTree>>& trees_by_order(int max_order) {
  static std::vector<std::vector<RootedTree>> table;  // table[n-1]: order n
  static std::vector<RootedTree> flat;                // sorted, all orders so far

  while (static_cast<int>(table.size()) < max_order) {
    const int n = static_cast<int>(table.size()) + 1;
    std::vector<RootedTree> result;
    if (n == 1) {
      result.push_back(RootedTree::leaf());
    } else {
      // children drawn from flat with non-decreasing index, total order n-1
      std::vector<RootedTree> stack;
      auto rec = [&](auto&& self, std::size_t min_idx, int budget) -> void {
        if (budget == 0) {
          result.push_back(RootedTree::join(stack));
          return;
        }
        for (std::size_t i = min_idx; i < flat.size(); ++i) {
          if (flat[i].order() > budget) break;  // flat is sorted by order
          stack.push_back(flat[i]);
          self(self, i, budget - flat[i].order());
          stack.pop_back();
        }
      };
      rec(rec, 0, n - 1);
      std::sort(result.begin(), result.end());
    }
    flat.insert(flat.end(), result.begin(), result.end());
    table.push_back(std::move(result));
  }
  return table;
}

}  // namespace

std::vector<RootedTree> enumerate_trees(int max_order) {
  if (max_order < 1 || max_order > kMaxTreeOrder)
    throw ValidationError("enumerate_trees: max_order must be in [1," +
                          std::to_string(kMaxTreeOrder) + "]");
  std::lock_guard<std::mutex> lock(tree_table_mutex);
  const auto& table = trees_by_order(max_order);
  std::vector<RootedTree> out;
  for (int n = 0; n < max_order; ++n)
    out.insert(out.end(), table[n].begin(), table[n].end());
  return out;
}

Rational tree_gamma(const RootedTree& tree) {
  Rational g = tree.order();
  if (tree.children().empty()) return 1;
  for (const auto& c : tree.children()) g *= tree_gamma(c);
  return g;
}

Rational tree_alpha(const RootedTree& tree) {
  Rational a = 1;
  const auto& ch = tree.children();
  for (std::size_t i = 0; i < ch.size();) {
    std::size_t j = i;
    while (j < ch.size() && ch[j] == ch[i]) ++j;
    a *= tree_alpha(ch[i]);
    for (std::size_t k = 1; k < j - i; ++k) a *= tree_alpha(ch[i]);
    a /= Rational(factorial(static_cast<int>(j - i)));
    i = j;
  }
  return a;
}

namespace {

// stage weights phi_i(tau) for one tableau, memoized by canonical key
std::vector<double> stage_weights(const ButcherTableau& t, const RootedTree& tree,
                                  std::map<std::string, std::vector<double>>& memo) {
  auto it = memo.find(tree.key());
  if (it != memo.end()) return it->second;
  const int s = t.stages;
  std::vector<double> phi(s, 0.0);
  if (tree.children().empty()) {
    for (int i = 0; i < s; ++i) phi[i] = t.c[i];
  } else {
    std::vector<std::vector<double>> child_phi;
    for (const auto& c : tree.children())
      child_phi.push_back(stage_weights(t, c, memo));
    for (int i = 0; i < s; ++i) {
      double sum = 0.0;
      for (int j = 0; j < s; ++j) {
        double prod = t.a(i, j);
        for (const auto& cp : child_phi) prod *= cp[j];
        sum += prod;
      }
      phi[i] = sum;
    }
  }
  memo[tree.key()] = phi;
  return phi;
}

}  // namespace

double elementary_weight(const ButcherTableau& t, const RootedTree& tree) {
  std::map<std::string, std::vector<double>> memo;
  double w = 0.0;
  if (tree.children().empty()) {
    for (double bi : t.b) w += bi;
    return w;
  }
  std::vector<std::vector<double>> child_phi;
  for (const auto& c : tree.children())
    child_phi.push_back(stage_weights(t, c, memo));
  for (int i = 0; i < t.stages; ++i) {
    double prod = t.b[i];
    for (const auto& cp : child_phi) prod *= cp[i];
    w += prod;
  }
  return w;
}

OrderResult deterministic_order(const ButcherTableau& t, int max_check, double tol) {
  if (max_check < 1 || max_check > kMaxTreeOrder)
    throw ValidationError("deterministic_order: max_check must be in [1," +
                          std::to_string(kMaxTreeOrder) + "]");
  OrderResult res;
  std::map<std::string, std::vector<double>> memo;
  for (int p = 1; p <= max_check; ++p) {
    for (const auto& tree : enumerate_trees(p)) {
      if (tree.order() != p) continue;
      double w;
      if (tree.children().empty()) {
        w = 0.0;
        for (double bi : t.b) w += bi;
      } else {
        w = 0.0;
        std::vector<std::vector<double>> child_phi;
        for (const auto& c : tree.children())
          child_phi.push_back(stage_weights(t, c, memo));
        for (int i = 0; i < t.stages; ++i) {
          double prod = t.b[i];
          for (const auto& cp : child_phi) prod *= cp[i];
          w += prod;
        }
      }
      const double target =
          1.0 / static_cast<double>(tree_gamma(tree).convert_to<double>());
      const double resid = std::abs(w - target);
      if (resid > tol) {
        res.failing_tree = tree;
        res.failing_residual = resid;
        return res;
      }
    }
    res.order = p;
  }
  return res;
}

int predicted_sde_order(int p_d) {
  if (p_d < 0) throw ValidationError("predicted_sde_order: p_d must be >= 0");
  return p_d / 2;
}

}  // namespace singint
