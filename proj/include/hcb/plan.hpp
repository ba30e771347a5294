#pragma once

#include <string>
#include <utility>
#include <vector>

#include "hcb/chain.hpp"

namespace hcb {

/// One bracketing of a q-chain: a full binary split tree over the 0-based
/// elementals 0..q-1. An internal node covers the subchain lo..hi and splits
/// it before elemental `split` (lo < split <= hi) into an upper part
/// split..hi (the output-side factor) and a lower part lo..split-1. A plan
/// over a q-chain has exactly q-1 internal nodes; leaves, read in descending
/// order, are exactly hi..lo of the root subchain.
class Plan {
 public:
  struct Node {
    int lo = 0;
    int hi = 0;
    int split = -1;  // -1 for leaves
    int upper = -1;  // child node ids, -1 for leaves
    int lower = -1;

    bool is_leaf() const { return split < 0; }
    SubchainId range() const { return {hi, lo}; }

    bool operator==(const Node&) const = default;
  };

  /// Builds the plan chosen by `choose(hi, lo) -> split` applied recursively
  /// from the full chain downward. The chooser must return a split with
  /// lo < split <= hi.
  template <typename Chooser>
  static Plan build(int q, Chooser&& choose) {
    if (q < 1) {
      throw ContractError("Plan::build: chain length must be >= 1");
    }
    Plan plan;
    plan.q_ = q;
    plan.root_ = plan.build_node(q - 1, 0, choose);
    return plan;
  }

  int q() const { return q_; }
  int root_id() const { return root_; }
  const Node& root() const { return nodes_[static_cast<std::size_t>(root_)]; }
  const Node& node(int id) const {
    return nodes_[static_cast<std::size_t>(id)];
  }
  int node_count() const { return static_cast<int>(nodes_.size()); }

  int internal_count() const {
    int n = 0;
    for (const Node& nd : nodes_) n += nd.is_leaf() ? 0 : 1;
    return n;
  }

  /// Structural equality (same splits everywhere).
  bool operator==(const Plan& other) const {
    if (q_ != other.q_) return false;
    return same_subtree(*this, root_, other, other.root_);
  }

 private:
  template <typename Chooser>
  int build_node(int hi, int lo, Chooser& choose) {
    if (hi == lo) {
      nodes_.push_back(Node{lo, hi, -1, -1, -1});
      return static_cast<int>(nodes_.size()) - 1;
    }
    const int split = choose(hi, lo);
    if (!(lo < split && split <= hi)) {
      throw ContractError("Plan::build: split " + std::to_string(split) +
                          " out of range for subchain (" + std::to_string(hi) +
                          "," + std::to_string(lo) + ")");
    }
    const int upper = build_node(hi, split, choose);
    const int lower = build_node(split - 1, lo, choose);
    nodes_.push_back(Node{lo, hi, split, upper, lower});
    return static_cast<int>(nodes_.size()) - 1;
  }

  static bool same_subtree(const Plan& a, int ia, const Plan& b, int ib) {
    const Node& na = a.node(ia);
    const Node& nb = b.node(ib);
    if (na.lo != nb.lo || na.hi != nb.hi || na.split != nb.split) return false;
    if (na.is_leaf()) return true;
    return same_subtree(a, na.upper, b, nb.upper) &&
           same_subtree(a, na.lower, b, nb.lower);
  }

  std::vector<Node> nodes_;
  int root_ = -1;
  int q_ = 0;
};

/// ((F_q o F_{q-1}) o ...) o F_1: every node splits off the lowest remaining
/// elemental, accumulating from the output side.
inline Plan left_plan(int q) {
  return Plan::build(q, [](int, int lo) { return lo + 1; });
}

/// F_q o (... o (F_2 o F_1)): every node splits off the highest remaining
/// elemental, accumulating from the input side.
inline Plan right_plan(int q) {
  return Plan::build(q, [](int hi, int) { return hi; });
}

/// Random valid plan: at each node the split is drawn uniformly from the
/// admissible range (uniform over splits, not over trees).
template <typename Rng>
Plan random_plan(int q, Rng& rng) {
  return Plan::build(
      q, [&rng](int hi, int lo) { return lo + 1 + rng.next_index(hi - lo); });
}

}  // namespace hcb
