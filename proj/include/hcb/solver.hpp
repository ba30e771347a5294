#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hcb/chain.hpp"
#include "hcb/plan.hpp"

namespace hcb {

/// One tabulated subproblem: the minimal FMA count for a subchain and the
/// split that attains it (-1 for length-1 subchains, whose Jacobians and
/// Hessians are given inputs at cost 0).
struct CostEntry {
  FmaCount cost = 0;
  int split = -1;

  bool operator==(const CostEntry&) const = default;
};

/// Triangular dynamic-programming tables over all subchains (hi, lo),
/// 0 <= lo <= hi <= q-1, for Jacobian and Hessian accumulation costs.
class CostTables {
 public:
  explicit CostTables(int q) : q_(q) {
    if (q < 1) throw ContractError("CostTables: chain length must be >= 1");
    const auto n = static_cast<std::size_t>(q) * (q + 1) / 2;
    jac_.resize(n);
    hess_.resize(n);
  }

  int q() const { return q_; }

  const CostEntry& jac(int hi, int lo) const { return jac_[index(hi, lo)]; }
  CostEntry& jac(int hi, int lo) { return jac_[index(hi, lo)]; }
  const CostEntry& hess(int hi, int lo) const { return hess_[index(hi, lo)]; }
  CostEntry& hess(int hi, int lo) { return hess_[index(hi, lo)]; }

  bool jacobian_solved() const { return jac_solved_; }
  bool hessian_solved() const { return hess_solved_; }
  void mark_jacobian_solved() { jac_solved_ = true; }
  void mark_hessian_solved() { hess_solved_ = true; }

 private:
  std::size_t index(int hi, int lo) const {
    if (!(0 <= lo && lo <= hi && hi < q_)) {
      throw ContractError("CostTables: subchain (" + std::to_string(hi) + "," +
                          std::to_string(lo) + ") out of range");
    }
    return static_cast<std::size_t>(hi) * (hi + 1) / 2 + lo;
  }

  int q_;
  std::vector<CostEntry> jac_;
  std::vector<CostEntry> hess_;
  bool jac_solved_ = false;
  bool hess_solved_ = false;
};

/// All split candidates for the Jacobian of subchain (hi, lo), as
/// (split, cost) pairs in ascending split order. Requires the Jacobian
/// table for strictly shorter subchains.
inline std::vector<std::pair<int, FmaCount>> jac_split_candidates(
    const ChainSpec& spec, const CostTables& tables, int hi, int lo) {
  std::vector<std::pair<int, FmaCount>> out;
  for (int s = lo + 1; s <= hi; ++s) {
    FmaCount c = detail::checked_add(tables.jac(hi, s).cost,
                                     tables.jac(s - 1, lo).cost);
    c = detail::checked_add(c, fma_jac_product(spec, hi + 1, s, lo));
    out.emplace_back(s, c);
  }
  return out;
}

/// All split candidates for the Hessian of subchain (hi, lo): for each split
/// s, the cost of both operand Jacobians (optimal, from the Jacobian table),
/// both part Hessians (from the Hessian table), and the combine step.
inline std::vector<std::pair<int, FmaCount>> hess_split_candidates(
    const ChainSpec& spec, const CostTables& tables, int hi, int lo) {
  std::vector<std::pair<int, FmaCount>> out;
  for (int s = lo + 1; s <= hi; ++s) {
    FmaCount c = detail::checked_add(tables.jac(hi, s).cost,
                                     tables.hess(s - 1, lo).cost);
    c = detail::checked_add(c, tables.hess(hi, s).cost);
    c = detail::checked_add(c, tables.jac(s - 1, lo).cost);
    c = detail::checked_add(c, fma_hess_combine(spec, hi + 1, s, lo));
    out.emplace_back(s, c);
  }
  return out;
}

namespace detail {

inline CostEntry min_candidate(
    const std::vector<std::pair<int, FmaCount>>& candidates) {
  CostEntry best{std::numeric_limits<FmaCount>::max(), -1};
  for (const auto& [split, cost] : candidates) {
    if (cost < best.cost) best = {cost, split};  // ties: smallest split wins
  }
  return best;
}

}  // namespace detail

/// Tabulates optimal Jacobian accumulation costs for every subchain:
///
///   jac(hi, lo) = min over lo < s <= hi of
///                 jac(hi, s) + jac(s-1, lo) + n_{hi+1} * n_s * n_lo
///
/// by increasing subchain length; O(q^3) time, O(q^2) space. Ties are broken
/// towards the smallest split.
inline CostTables solve_jacobian(const ChainSpec& spec) {
  const int q = spec.length();
  CostTables tables(q);
  for (int e = 0; e < q; ++e) tables.jac(e, e) = {0, -1};
  for (int len = 2; len <= q; ++len) {
    for (int lo = 0; lo + len - 1 < q; ++lo) {
      const int hi = lo + len - 1;
      tables.jac(hi, lo) =
          detail::min_candidate(jac_split_candidates(spec, tables, hi, lo));
    }
  }
  tables.mark_jacobian_solved();
  return tables;
}

/// Reads the Hessian argmin tree for the full chain out of solved tables.
inline Plan optimal_plan(const CostTables& tables) {
  if (!tables.hessian_solved()) {
    throw ContractError("optimal_plan: Hessian table not solved");
  }
  return Plan::build(tables.q(), [&tables](int hi, int lo) {
    return tables.hess(hi, lo).split;
  });
}

/// Tabulates optimal Hessian accumulation costs on top of a solved Jacobian
/// table. Operand Jacobian costs in the recurrence are the optimal ones from
/// the Jacobian table. Returns the argmin split tree for the full chain; the
/// filled Hessian table is left in `tables`.
inline Plan solve_hessian(const ChainSpec& spec, CostTables& tables) {
  if (!tables.jacobian_solved()) {
    throw ContractError("solve_hessian: Jacobian table not solved");
  }
  const int q = spec.length();
  if (tables.q() != q) {
    throw ContractError("solve_hessian: table size does not match spec");
  }
  for (int e = 0; e < q; ++e) tables.hess(e, e) = {0, -1};
  for (int len = 2; len <= q; ++len) {
    for (int lo = 0; lo + len - 1 < q; ++lo) {
      const int hi = lo + len - 1;
      tables.hess(hi, lo) =
          detail::min_candidate(hess_split_candidates(spec, tables, hi, lo));
    }
  }
  tables.mark_hessian_solved();
  return optimal_plan(tables);
}

/// Convenience bundle: both DP passes plus the optimal plan.
struct Solution {
  CostTables tables;
  Plan optimal;
};

inline Solution solve(const ChainSpec& spec) {
  CostTables tables = solve_jacobian(spec);
  Plan plan = solve_hessian(spec, tables);
  return {std::move(tables), std::move(plan)};
}

namespace detail {

/// Cost of accumulating the Jacobian of a node's subchain by multiplying
/// along that node's own subtree structure.
inline FmaCount jac_subtree_cost(const ChainSpec& spec, const Plan& plan,
                                 int id) {
  const Plan::Node& n = plan.node(id);
  if (n.is_leaf()) return 0;
  FmaCount c = checked_add(jac_subtree_cost(spec, plan, n.upper),
                           jac_subtree_cost(spec, plan, n.lower));
  return checked_add(c, fma_jac_product(spec, n.hi + 1, n.split, n.lo));
}

}  // namespace detail

/// Fixed-plan Hessian accumulation cost. Per internal node: the combine step
/// plus both operand Jacobians, each accumulated along the node's own
/// subtree. Operand Jacobians are recomputed per node without cross-node
/// caching, so subproducts shared between nodes are paid each time they
/// appear; this matches what executing the plan actually performs.
inline FmaCount plan_cost(const ChainSpec& spec, const Plan& plan) {
  if (plan.q() != spec.length()) {
    throw ContractError("plan_cost: plan does not match spec");
  }
  const std::function<FmaCount(int)> rec = [&](int id) -> FmaCount {
    const Plan::Node& n = plan.node(id);
    if (n.is_leaf()) return 0;
    FmaCount c = detail::checked_add(rec(n.upper), rec(n.lower));
    c = detail::checked_add(c, detail::jac_subtree_cost(spec, plan, n.upper));
    c = detail::checked_add(c, detail::jac_subtree_cost(spec, plan, n.lower));
    return detail::checked_add(c,
                               fma_hess_combine(spec, n.hi + 1, n.split, n.lo));
  };
  return rec(plan.root_id());
}

/// Fixed-plan cost under the dynamic program's objective: operand Jacobians
/// priced at their optimal (table) cost instead of along the plan's subtree.
/// This is the quantity solve_hessian minimizes over all plans.
inline FmaCount plan_cost_dp(const ChainSpec& spec, const Plan& plan,
                             const CostTables& tables) {
  if (plan.q() != spec.length() || tables.q() != spec.length()) {
    throw ContractError("plan_cost_dp: plan/tables do not match spec");
  }
  if (!tables.jacobian_solved()) {
    throw ContractError("plan_cost_dp: Jacobian table not solved");
  }
  const std::function<FmaCount(int)> rec = [&](int id) -> FmaCount {
    const Plan::Node& n = plan.node(id);
    if (n.is_leaf()) return 0;
    const Plan::Node& up = plan.node(n.upper);
    const Plan::Node& lw = plan.node(n.lower);
    FmaCount c = detail::checked_add(rec(n.upper), rec(n.lower));
    c = detail::checked_add(c, tables.jac(up.hi, up.lo).cost);
    c = detail::checked_add(c, tables.jac(lw.hi, lw.lo).cost);
    return detail::checked_add(c,
                               fma_hess_combine(spec, n.hi + 1, n.split, n.lo));
  };
  return rec(plan.root_id());
}

/// Greedy bracketing: top-down, each subchain takes the split with the
/// smallest immediate combine cost (ties towards the smallest split) and
/// recurses into both parts.
inline Plan greedy_plan(const ChainSpec& spec) {
  return Plan::build(spec.length(), [&spec](int hi, int lo) {
    int best_split = lo + 1;
    FmaCount best = fma_hess_combine(spec, hi + 1, lo + 1, lo);
    for (int s = lo + 2; s <= hi; ++s) {
      const FmaCount c = fma_hess_combine(spec, hi + 1, s, lo);
      if (c < best) {
        best = c;
        best_split = s;
      }
    }
    return best_split;
  });
}

/// Greedy variant whose local objective adds the optimal costs of the two
/// operand Jacobians to the combine cost.
inline Plan greedy_plan_weighted(const ChainSpec& spec,
                                 const CostTables& tables) {
  if (!tables.jacobian_solved()) {
    throw ContractError("greedy_plan_weighted: Jacobian table not solved");
  }
  return Plan::build(spec.length(), [&](int hi, int lo) {
    int best_split = -1;
    FmaCount best = std::numeric_limits<FmaCount>::max();
    for (int s = lo + 1; s <= hi; ++s) {
      FmaCount c = fma_hess_combine(spec, hi + 1, s, lo);
      c = detail::checked_add(c, tables.jac(hi, s).cost);
      c = detail::checked_add(c, tables.jac(s - 1, lo).cost);
      if (c < best) {
        best = c;
        best_split = s;
      }
    }
    return best_split;
  });
}

struct BruteForceResult {
  FmaCount cost = 0;
  Plan plan;
};

namespace detail {

// Shared-subtree arena for enumerating every bracketing of a range exactly
// once. Subtrees are reused across enclosing ranges, so per-node costs can
// be cached by node id.
struct PlanForest {
  struct Node {
    int lo, hi, split, upper, lower;
  };
  std::vector<Node> nodes;
  // roots[(hi,lo)] -> ids of all subtrees covering that range
  std::vector<std::vector<int>> roots;
  int q = 0;

  std::size_t range_index(int hi, int lo) const {
    return static_cast<std::size_t>(hi) * (hi + 1) / 2 + lo;
  }

  explicit PlanForest(int q_in) : q(q_in) {
    roots.resize(static_cast<std::size_t>(q) * (q + 1) / 2);
    for (int e = 0; e < q; ++e) {
      nodes.push_back({e, e, -1, -1, -1});
      roots[range_index(e, e)].push_back(static_cast<int>(nodes.size()) - 1);
    }
    for (int len = 2; len <= q; ++len) {
      for (int lo = 0; lo + len - 1 < q; ++lo) {
        const int hi = lo + len - 1;
        auto& out = roots[range_index(hi, lo)];
        for (int s = lo + 1; s <= hi; ++s) {
          for (int up : roots[range_index(hi, s)]) {
            for (int lw : roots[range_index(s - 1, lo)]) {
              nodes.push_back({lo, hi, s, up, lw});
              out.push_back(static_cast<int>(nodes.size()) - 1);
            }
          }
        }
      }
    }
  }
};

inline Plan materialize(const PlanForest& forest, int root, int q) {
  // Within one tree every node covers a distinct range, so the subtree is
  // fully described by its range -> split map.
  std::vector<int> split_of(static_cast<std::size_t>(q) * (q + 1) / 2, -1);
  const std::function<void(int)> collect = [&](int id) {
    const PlanForest::Node& n = forest.nodes[static_cast<std::size_t>(id)];
    if (n.split < 0) return;
    split_of[forest.range_index(n.hi, n.lo)] = n.split;
    collect(n.upper);
    collect(n.lower);
  };
  collect(root);
  return Plan::build(q, [&forest, &split_of](int hi, int lo) {
    return split_of[forest.range_index(hi, lo)];
  });
}

}  // namespace detail

/// Exhaustively enumerates all bracketings of the chain (Catalan-many) and
/// returns the minimum of plan_cost_dp together with an attaining plan. This
/// is the independent optimality oracle for solve_hessian; it refuses chains
/// longer than 12 elementals.
inline BruteForceResult brute_force_optimal(const ChainSpec& spec) {
  const int q = spec.length();
  if (q > 12) {
    throw GuardError(
        "brute_force_optimal: refusing q > 12 (enumeration is exponential)");
  }
  const CostTables tables = solve_jacobian(spec);
  detail::PlanForest forest(q);

  std::vector<FmaCount> node_cost(forest.nodes.size(), 0);
  std::vector<FmaCount> node_jac_cost(forest.nodes.size(), 0);
  for (std::size_t id = 0; id < forest.nodes.size(); ++id) {
    const auto& n = forest.nodes[id];
    if (n.split < 0) continue;  // leaf: cost 0 (nodes are built bottom-up)
    const auto ui = static_cast<std::size_t>(n.upper);
    const auto li = static_cast<std::size_t>(n.lower);
    node_jac_cost[id] = detail::checked_add(
        detail::checked_add(node_jac_cost[ui], node_jac_cost[li]),
        fma_jac_product(spec, n.hi + 1, n.split, n.lo));
    const auto& up = forest.nodes[ui];
    const auto& lw = forest.nodes[li];
    FmaCount c = detail::checked_add(node_cost[ui], node_cost[li]);
    c = detail::checked_add(c, tables.jac(up.hi, up.lo).cost);
    c = detail::checked_add(c, tables.jac(lw.hi, lw.lo).cost);
    node_cost[id] = detail::checked_add(
        c, fma_hess_combine(spec, n.hi + 1, n.split, n.lo));
  }

  const auto& full = forest.roots[forest.range_index(q - 1, 0)];
  int best_id = full.front();
  for (int id : full) {
    if (node_cost[static_cast<std::size_t>(id)] <
        node_cost[static_cast<std::size_t>(best_id)]) {
      best_id = id;
    }
  }
  return {node_cost[static_cast<std::size_t>(best_id)],
          detail::materialize(forest, best_id, q)};
}

/// Number of distinct bracketings of a q-chain (Catalan(q-1)); enumeration
/// based, subject to the same q <= 12 guard as the oracle.
inline std::uint64_t bracketing_count(int q) {
  if (q < 1) throw ContractError("bracketing_count: q must be >= 1");
  if (q > 12) throw GuardError("bracketing_count: refusing q > 12");
  detail::PlanForest forest(q);
  return forest.roots[forest.range_index(q - 1, 0)].size();
}

}  // namespace hcb
