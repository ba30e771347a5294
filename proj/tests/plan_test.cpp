#include "hcb/plan.hpp"

#include <gtest/gtest.h>

#include <functional>
#include <vector>

#include "hcb/rng.hpp"

namespace hcb {
namespace {

std::vector<int> leaves_in_order(const Plan& plan) {
  std::vector<int> out;
  const std::function<void(int)> walk = [&](int id) {
    const Plan::Node& n = plan.node(id);
    if (n.is_leaf()) {
      out.push_back(n.lo);
      return;
    }
    walk(n.upper);
    walk(n.lower);
  };
  walk(plan.root_id());
  return out;
}

void expect_valid(const Plan& plan, int q) {
  EXPECT_EQ(plan.q(), q);
  EXPECT_EQ(plan.internal_count(), q - 1);
  const std::vector<int> leaves = leaves_in_order(plan);
  ASSERT_EQ(static_cast<int>(leaves.size()), q);
  // Upper-first traversal yields the elementals in descending order.
  for (int i = 0; i < q; ++i) EXPECT_EQ(leaves[static_cast<std::size_t>(i)], q - 1 - i);
}

TEST(Plan, LeftPlanSplitsOffLowestElemental) {
  const Plan plan = left_plan(4);
  expect_valid(plan, 4);
  const Plan::Node& root = plan.root();
  EXPECT_EQ(root.split, 1);
  const Plan::Node& upper = plan.node(root.upper);
  EXPECT_EQ(upper.split, 2);
  EXPECT_TRUE(plan.node(root.lower).is_leaf());
  EXPECT_EQ(plan.node(upper.upper).split, 3);
}

TEST(Plan, RightPlanSplitsOffHighestElemental) {
  const Plan plan = right_plan(4);
  expect_valid(plan, 4);
  const Plan::Node& root = plan.root();
  EXPECT_EQ(root.split, 3);
  EXPECT_TRUE(plan.node(root.upper).is_leaf());
  const Plan::Node& lower = plan.node(root.lower);
  EXPECT_EQ(lower.split, 2);
}

TEST(Plan, SingleElementalIsOneLeaf) {
  const Plan plan = left_plan(1);
  EXPECT_EQ(plan.internal_count(), 0);
  EXPECT_TRUE(plan.root().is_leaf());
  EXPECT_EQ(plan, right_plan(1));
}

TEST(Plan, TwoElementalsHaveUniquePlan) {
  EXPECT_EQ(left_plan(2), right_plan(2));
}

TEST(Plan, RandomPlansAreValid) {
  SplitMix64 rng(99);
  for (int q = 1; q <= 9; ++q) {
    for (int rep = 0; rep < 20; ++rep) {
      expect_valid(random_plan(q, rng), q);
    }
  }
}

TEST(Plan, BuildRejectsBadSplit) {
  EXPECT_THROW(Plan::build(3, [](int, int) { return 0; }), ContractError);
  EXPECT_THROW(Plan::build(3, [](int hi, int) { return hi + 1; }),
               ContractError);
  EXPECT_THROW(Plan::build(0, [](int, int lo) { return lo + 1; }),
               ContractError);
}

TEST(Plan, StructuralEquality) {
  EXPECT_EQ(left_plan(5), left_plan(5));
  EXPECT_NE(left_plan(5), right_plan(5));
  EXPECT_NE(left_plan(5), left_plan(4));
}

}  // namespace
}  // namespace hcb
