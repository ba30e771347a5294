#include "hcb/instance.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "hcb/chain.hpp"
#include "hcb/solver.hpp"
#include "hcb/tensor.hpp"

namespace hcb {
namespace {

TEST(GenerateRandom, BoundsAndDeterminism) {
  const ChainSpec a = generate_random(20, 4, 7);
  const ChainSpec b = generate_random(20, 4, 7);
  EXPECT_EQ(a, b);
  for (int i = 0; i <= 20; ++i) {
    EXPECT_GE(a.dim(i), 1);
    EXPECT_LE(a.dim(i), 4);
  }
  EXPECT_NE(generate_random(20, 4, 8), a);

  const ChainSpec tiny = generate_random(1, 1, 0);
  EXPECT_EQ(tiny.dim(0), 1);
  EXPECT_EQ(tiny.dim(1), 1);

  EXPECT_THROW(generate_random(0, 4, 1), ContractError);
  EXPECT_THROW(generate_random(3, 0, 1), ContractError);
}

TEST(GenerateElementals, ShapesRangeAndSymmetry) {
  const ChainSpec spec({3, 4, 2});
  const ElementalSet plain = generate_elementals(spec, 5, false);
  plain.require_conforming(spec);
  for (const auto& j : plain.jacobians) {
    for (double v : j.entries()) {
      EXPECT_GE(v, -1.0);
      EXPECT_LT(v, 1.0);
    }
  }
  const ElementalSet sym = generate_elementals(spec, 5, true);
  for (const auto& h : sym.hessians) {
    EXPECT_EQ(max_slice_asymmetry(h), 0.0);
  }
  const ElementalSet again = generate_elementals(spec, 5, true);
  EXPECT_EQ(entry_digest(again.hessians[0]), entry_digest(sym.hessians[0]));
}

TEST(SynthQuadratic, CoefficientRangeAndSymmetry) {
  const ChainSpec spec({4, 3, 2});
  const QuadraticChain chain = synth_quadratic(spec, 9);
  ASSERT_EQ(chain.linear.size(), 2u);
  for (const auto& b : chain.quadratic) {
    EXPECT_EQ(max_slice_asymmetry(b), 0.0);
  }
  for (const auto& a : chain.linear) {
    for (double v : a.entries()) {
      EXPECT_GE(v, -0.5);
      EXPECT_LT(v, 0.5);
    }
  }
  const QuadraticChain again = synth_quadratic(spec, 9);
  EXPECT_EQ(again.linear[0].entries(), chain.linear[0].entries());
}

TEST(EvaluateWithDerivatives, SingleLayerClosedForm) {
  const ChainSpec spec({2, 3});
  const QuadraticChain chain = synth_quadratic(spec, 17);
  const std::vector<double> x{0.3, -0.7};
  const EvaluationResult res = evaluate_with_derivatives(chain, x);
  // F'' = B_1 and F' = A_1 + B_1 x.
  EXPECT_EQ(res.elementals.hessians[0].entries(),
            chain.quadratic[0].entries());
  for (int l = 0; l < 3; ++l) {
    for (int c = 0; c < 2; ++c) {
      double expected = chain.linear[0].at(l, c);
      for (int d = 0; d < 2; ++d) {
        expected += chain.quadratic[0].at(l, c, d) * x[static_cast<std::size_t>(d)];
      }
      EXPECT_NEAR(res.elementals.jacobians[0].at(l, c), expected, 1e-15);
    }
  }
}

TEST(EvaluateWithDerivatives, LinearChainHasZeroHessian) {
  const ChainSpec spec({3, 4, 2});
  QuadraticChain chain = synth_quadratic(spec, 23);
  for (auto& b : chain.quadratic) {
    for (double& v : b.entries()) v = 0.0;
  }
  const std::vector<double> x{0.4, -0.2, 0.9};
  const EvaluationResult res = evaluate_with_derivatives(chain, x);
  const DenseHessian full = accumulate_direct(spec, res.elementals);
  EXPECT_EQ(frobenius_norm(full.entries()), 0.0);

  const DenseHessian fd = fd_hessian(chain, x);
  for (double v : fd.entries()) EXPECT_NEAR(v, 0.0, 1e-8);
}

TEST(FdHessian, RecoversSingleLayerQuadraticForm) {
  const ChainSpec spec({3, 2});
  const QuadraticChain chain = synth_quadratic(spec, 29);
  const std::vector<double> x{0.1, 0.5, -0.8};
  const DenseHessian fd = fd_hessian(chain, x);
  const DenseHessian exact = chain.quadratic[0];
  EXPECT_LE(relative_frobenius_distance(fd, exact), 1e-6);
}

TEST(FdHessian, CrossValidatesAccumulatedHessian) {
  SplitMix64 rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    const int q = 1 + rng.next_index(4);
    const ChainSpec spec = generate_random(q, 5, rng.next());
    const QuadraticChain chain = synth_quadratic(spec, rng.next());
    std::vector<double> x(static_cast<std::size_t>(spec.dim(0)));
    for (double& v : x) v = rng.next_double(-1.0, 1.0);
    const EvaluationResult res = evaluate_with_derivatives(chain, x);
    Solution sol = solve(spec);
    const ExecutionResult exec = execute_plan(spec, res.elementals, sol.optimal);
    const DenseHessian fd = fd_hessian(chain, x);
    EXPECT_LE(relative_frobenius_distance(fd, exec.hessian), 1e-5);
  }
}

TEST(BuildReduction, TwoSubsetDemo) {
  const EnsembleInstance instance{
      {"a", "b", "c"}, {{"a", "b"}, {"b", "c"}}, 2};
  const ReductionChain rc = build_reduction(instance);
  EXPECT_EQ(rc.q, 2);
  EXPECT_TRUE(rc.padding_primes.empty());
  const std::vector<std::int64_t> primes{2, 3, 5};
  EXPECT_EQ(rc.symbol_primes, primes);
  const std::vector<std::int64_t> expected{6, 15};
  EXPECT_EQ(reduction_hessian_entries(rc), expected);
  EXPECT_TRUE(verify_reduction(rc));
  // dims (1, |C|, ..., |C|)
  EXPECT_EQ(rc.spec.dim(0), 1);
  EXPECT_EQ(rc.spec.dim(1), 2);
  EXPECT_EQ(rc.spec.dim(2), 2);
}

TEST(BuildReduction, SingleSubset) {
  const ReductionChain rc = build_reduction({{"a"}, {{"a"}}, 0});
  EXPECT_EQ(rc.q, 1);
  const std::vector<std::int64_t> expected{2};
  EXPECT_EQ(reduction_hessian_entries(rc), expected);
  EXPECT_TRUE(verify_reduction(rc));
}

TEST(BuildReduction, PadsToUniformCardinality) {
  const ReductionChain rc =
      build_reduction({{"a", "b", "c"}, {{"a", "b"}, {"c"}}, 1});
  EXPECT_EQ(rc.q, 2);
  ASSERT_EQ(rc.padding_primes.size(), 1u);
  EXPECT_EQ(rc.padding_primes[0], 7);
  const std::vector<std::vector<std::int64_t>> expected{{2, 3}, {5, 7}};
  EXPECT_EQ(rc.padded_subsets, expected);
  EXPECT_EQ(rc.padded_budget, 2);
  EXPECT_TRUE(verify_reduction(rc));
}

TEST(BuildReduction, RejectsEmptySubset) {
  EXPECT_THROW(build_reduction({{"a"}, {{}}, 0}), ContractError);
  EXPECT_THROW(build_reduction({{"a"}, {}, 0}), ContractError);
}

TEST(VerifyReduction, DetectsCorruptedPrimes) {
  ReductionChain rc = build_reduction({{"a", "b"}, {{"a", "b"}}, 1});
  EXPECT_TRUE(verify_reduction(rc));
  rc.symbol_primes[1] = rc.symbol_primes[0];  // duplicate prime
  EXPECT_FALSE(verify_reduction(rc));
}

TEST(ReductionElementals, StructureMatchesConstruction) {
  const ReductionChain rc =
      build_reduction({{"a", "b", "c"}, {{"a", "b"}, {"b", "c"}}, 2});
  const ElementalSet elems = reduction_elementals(rc, 1.0);
  elems.require_conforming(rc.spec);
  // Only the first layer has a nonzero Hessian.
  for (std::size_t e = 1; e < elems.hessians.size(); ++e) {
    EXPECT_EQ(frobenius_norm(elems.hessians[e].entries()), 0.0);
  }
  // Numerical accumulation at x = 1 reproduces the integer entries.
  const DenseHessian full = accumulate_direct(rc.spec, elems);
  const auto entries = reduction_hessian_entries(rc);
  for (int j = 0; j < full.out(); ++j) {
    EXPECT_DOUBLE_EQ(full.at(j, 0, 0),
                     static_cast<double>(entries[static_cast<std::size_t>(j)]));
  }
}

TEST(BruteForceEnsemble, SmallInstances) {
  EXPECT_EQ(brute_force_ensemble({{"a", "b"}, {{"a", "b"}}, 0}), 1);
  EXPECT_EQ(brute_force_ensemble(
                {{"a", "b", "c"}, {{"a", "b"}, {"a", "b", "c"}}, 0}),
            2);
  EXPECT_EQ(brute_force_ensemble(
                {{"a", "b", "c", "d"}, {{"a", "b"}, {"c", "d"}}, 0}),
            2);
  EXPECT_EQ(brute_force_ensemble({{"a"}, {{"a"}}, 0}), 0);
}

TEST(BruteForceEnsemble, SharingBeatsIndependentComputation) {
  // {a,b,c} and {a,b,d} share ab: 3 multiplications, not 4.
  EXPECT_EQ(brute_force_ensemble({{"a", "b", "c", "d"},
                                  {{"a", "b", "c"}, {"a", "b", "d"}},
                                  0}),
            3);
}

TEST(BruteForceEnsemble, EnforcesGuards) {
  EXPECT_THROW(brute_force_ensemble({{"a", "b", "c", "d", "e", "f", "g"},
                                     {{"a", "b"}},
                                     0}),
               GuardError);
  EXPECT_THROW(
      brute_force_ensemble(
          {{"a", "b"}, {{"a"}, {"b"}, {"a", "b"}, {"a", "b"}}, 0}),
      GuardError);
  EXPECT_THROW(brute_force_ensemble(
                   {{"a", "b", "c", "d", "e"},
                    {{"a", "b", "c", "d", "e"}},
                    0}),
               GuardError);
}

}  // namespace
}  // namespace hcb
