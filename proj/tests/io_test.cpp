#include "hcb/io.hpp"

#include <gtest/gtest.h>

#include <string>

#include "hcb/instance.hpp"
#include "hcb/plan.hpp"
#include "hcb/rng.hpp"
#include "hcb/solver.hpp"

namespace hcb {
namespace {

const std::string kFourChainProblem = "4\n5 2\n1 5\n3 1\n2 3\n";
const std::string kFourChainSolution = "3 3 2\n1 1 0\n3 2 0\n";

TEST(ReadProblem, FourChainSample) {
  const ChainSpec spec = read_problem(kFourChainProblem);
  EXPECT_EQ(spec.length(), 4);
  const std::vector<int> expected{2, 5, 1, 3, 2};
  EXPECT_EQ(std::vector<int>(spec.dims().begin(), spec.dims().end()),
            expected);
}

TEST(ReadProblem, SingleElemental) {
  const ChainSpec spec = read_problem("1\n3 3\n");
  EXPECT_EQ(spec.length(), 1);
  EXPECT_EQ(spec.dim(0), 3);
  EXPECT_EQ(spec.dim(1), 3);
}

TEST(ReadProblem, RejectsNonConformingDimensions) {
  try {
    read_problem("2\n4 2\n3 5\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3);
  }
}

TEST(ReadProblem, RejectsMalformedDocuments) {
  EXPECT_THROW(read_problem(""), ParseError);
  EXPECT_THROW(read_problem("0\n"), ParseError);
  EXPECT_THROW(read_problem("x\n"), ParseError);
  EXPECT_THROW(read_problem("1\n3\n"), ParseError);
  EXPECT_THROW(read_problem("1\n3 x\n"), ParseError);
  EXPECT_THROW(read_problem("2\n3 2\n"), ParseError);
  EXPECT_THROW(read_problem("1\n3 2\n4 3\n"), ParseError);
  EXPECT_THROW(read_problem("1\n0 2\n"), ParseError);
}

TEST(WriteProblem, RoundTripsSampleByteExactly) {
  EXPECT_EQ(write_problem(read_problem(kFourChainProblem)),
            kFourChainProblem);
}

TEST(WriteSolution, FourChainOptimalPlanMatchesSample) {
  const ChainSpec spec = read_problem(kFourChainProblem);
  Solution sol = solve(spec);
  EXPECT_EQ(write_solution(sol.optimal), kFourChainSolution);
}

TEST(ReadSolution, FourChainSample) {
  const Plan plan = read_solution(kFourChainSolution, 4);
  EXPECT_EQ(plan.root().split, 2);
  EXPECT_EQ(plan.node(plan.root().upper).split, 3);
  EXPECT_EQ(plan.node(plan.root().lower).split, 1);
  EXPECT_EQ(write_solution(plan), kFourChainSolution);
}

TEST(ReadSolution, UniquePlanOfLengthTwo) {
  const Plan plan = read_solution("1 1 0\n", 2);
  EXPECT_EQ(plan.root().split, 1);
  EXPECT_EQ(write_solution(plan), "1 1 0\n");
}

TEST(ReadSolution, EmptyDocumentForSingleElemental) {
  const Plan plan = read_solution("", 1);
  EXPECT_TRUE(plan.root().is_leaf());
  EXPECT_EQ(write_solution(plan), "");
}

TEST(WriteSolution, RightPlanEmissionOrder) {
  // Post-order with the upper subtree first: innermost split line first,
  // root line last.
  EXPECT_EQ(write_solution(right_plan(3)), "1 1 0\n2 2 0\n");
  const Plan reread = read_solution("1 1 0\n2 2 0\n", 3);
  EXPECT_EQ(reread, right_plan(3));
}

TEST(ReadSolution, RejectsMalformedDocuments) {
  EXPECT_THROW(read_solution("3 3 2\n1 1 0\n", 4), ParseError);  // count
  EXPECT_THROW(read_solution("1 0 0\n", 2), ParseError);  // split too low
  EXPECT_THROW(read_solution("1 2 0\n", 2), ParseError);  // split too high
  EXPECT_THROW(read_solution("2 1 0\n", 2), ParseError);  // range beyond q
  EXPECT_THROW(read_solution("1 1 0\n1 1 0\n", 3), ParseError);  // duplicate
  // Right count, but the lines do not assemble into one split tree.
  EXPECT_THROW(read_solution("3 3 2\n1 1 0\n3 1 0\n", 4), ParseError);
  EXPECT_THROW(read_solution("2 2 1\n1 1 0\n3 2 0\n", 4), ParseError);
}

TEST(RoundTrip, RandomProblemsAndSolutions) {
  SplitMix64 rng(321);
  for (int trial = 0; trial < 50; ++trial) {
    const int q = 1 + rng.next_index(12);
    const ChainSpec spec = generate_random(q, 9, rng.next());
    const std::string text = write_problem(spec);
    EXPECT_EQ(write_problem(read_problem(text)), text);

    const Plan plan = random_plan(q, rng);
    const std::string sol_text = write_solution(plan);
    EXPECT_EQ(read_solution(sol_text, q), plan);
    EXPECT_EQ(write_solution(read_solution(sol_text, q)), sol_text);
  }
}

TEST(RoundTrip, SolverPlansAreAlwaysReadable) {
  SplitMix64 rng(654);
  for (int trial = 0; trial < 20; ++trial) {
    const int q = 1 + rng.next_index(10);
    const ChainSpec spec = generate_random(q, 8, rng.next());
    Solution sol = solve(spec);
    EXPECT_EQ(read_solution(write_solution(sol.optimal), q), sol.optimal);
    const Plan greedy = greedy_plan(spec);
    EXPECT_EQ(read_solution(write_solution(greedy), q), greedy);
  }
}

TEST(DumpTables, FourChainContent) {
  const ChainSpec spec = read_problem(kFourChainProblem);
  Solution sol = solve(spec);
  const std::string dump = dump_tables(sol.tables, spec);
  EXPECT_NE(dump.find("fma(F''(3,0))=156; split before 2"), std::string::npos);
  EXPECT_NE(dump.find("fma(F''(1,0))=90; split before 1"), std::string::npos);
  EXPECT_NE(dump.find("fma(F''(2,1))=165; split before 2"), std::string::npos);
  EXPECT_NE(dump.find("fma(F''(2,0))=130; split before 2"), std::string::npos);
  EXPECT_NE(dump.find("fma(F''(3,2))=30; split before 3"), std::string::npos);
  EXPECT_NE(dump.find("fma(F''(3,1))=146; split before 2"), std::string::npos);
  EXPECT_NE(dump.find("dim(F''(3,0))=2x2x2"), std::string::npos);
  EXPECT_NE(dump.find("dim(F''(2,1))=3x5x5"), std::string::npos);
}

TEST(DumpTables, ThreeChainContent) {
  const ChainSpec spec({2, 1, 2, 1});
  Solution sol = solve(spec);
  const std::string dump = dump_tables(sol.tables, spec);
  EXPECT_NE(dump.find("fma(F''(1,0))=20"), std::string::npos);
  EXPECT_NE(dump.find("fma(F''(2,1))=8"), std::string::npos);
  EXPECT_NE(dump.find("fma(F''(2,0))=20"), std::string::npos);
}

TEST(DumpTables, SingleSubchainForLengthTwo) {
  const ChainSpec spec({3, 4, 2});
  Solution sol = solve(spec);
  const std::string dump = dump_tables(sol.tables, spec);
  EXPECT_EQ(dump.find("fma(F''(1,0))="), 0u);
  EXPECT_EQ(dump.find('\n'), dump.size() - 1);
}

TEST(Report, KeyValueFormat) {
  ReportDocument report;
  report.dims = {2, 5, 1, 3, 2};
  report.strategies.push_back({"left", 342, 69, std::nullopt});
  report.strategies.push_back({"optimized", 156, std::nullopt, 0xabcdefull});
  const std::string text = write_report(report);
  EXPECT_NE(text.find("dims = 2 5 1 3 2\n"), std::string::npos);
  EXPECT_NE(text.find("q = 4\n"), std::string::npos);
  EXPECT_NE(text.find("left.fma = 342\n"), std::string::npos);
  EXPECT_NE(text.find("left.time_us = 69\n"), std::string::npos);
  EXPECT_NE(text.find("optimized.fma = 156\n"), std::string::npos);
  EXPECT_NE(text.find("optimized.digest = abcdef\n"), std::string::npos);
  EXPECT_EQ(text.find("left.digest"), std::string::npos);
}

}  // namespace
}  // namespace hcb
