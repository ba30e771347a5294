// Command-line front end: generate problem instances, solve them, evaluate
// the resulting bracketings numerically, benchmark strategies, and walk
// through the shared-subproduct hardness construction.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hcb/hcb.hpp"

namespace {

using hcb::ChainSpec;
using hcb::DenseHessian;
using hcb::ElementalSet;
using hcb::ExecutionResult;
using hcb::FmaCount;
using hcb::Plan;
using hcb::Solution;

/// A --check comparison failed; maps to exit code 3.
class CheckFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open '" + path + "' for reading");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open '" + path + "' for writing");
  }
  out << text;
}

template <typename Fn>
std::int64_t time_us(Fn&& fn) {
  const auto start = std::chrono::steady_clock::now();
  fn();
  const auto stop = std::chrono::steady_clock::now();
  return std::chrono::duration_cast<std::chrono::microseconds>(stop - start)
      .count();
}

template <typename Fn>
std::int64_t median_time_us(int reps, Fn&& fn) {
  std::vector<std::int64_t> samples;
  samples.reserve(static_cast<std::size_t>(reps));
  for (int r = 0; r < reps; ++r) samples.push_back(time_us(fn));
  std::sort(samples.begin(), samples.end());
  return samples[samples.size() / 2];
}

struct GenerateOptions {
  int q = 0;
  int bound = 0;
  std::uint64_t seed = 0;
  std::string out;
};

void cmd_generate(const GenerateOptions& opt) {
  const ChainSpec spec = hcb::generate_random(opt.q, opt.bound, opt.seed);
  const std::string text = hcb::write_problem(spec);
  if (opt.out.empty()) {
    std::cout << text;
  } else {
    write_file(opt.out, text);
  }
}

struct SolveOptions {
  std::string problem;
  std::string out;
  std::string heuristic_out;
  std::string report;
  bool dump_table = false;
};

void cmd_solve(const SolveOptions& opt) {
  const ChainSpec spec = hcb::read_problem(read_file(opt.problem));
  const int q = spec.length();
  const Solution sol = hcb::solve(spec);
  const Plan greedy = hcb::greedy_plan(spec);

  const FmaCount left = hcb::plan_cost(spec, hcb::left_plan(q));
  const FmaCount right = hcb::plan_cost(spec, hcb::right_plan(q));
  const FmaCount heuristic = hcb::plan_cost(spec, greedy);
  const FmaCount optimized = hcb::plan_cost(spec, sol.optimal);

  std::cout << "left bracketing fma = " << left << '\n'
            << "right bracketing fma = " << right << '\n'
            << "heuristic bracketing fma = " << heuristic << '\n'
            << "optimized bracketing fma = " << optimized << '\n';

  if (opt.dump_table) {
    std::cout << '\n'
              << "Dynamic Programming Table:\n"
              << hcb::dump_tables(sol.tables, spec);
  }
  if (!opt.out.empty()) {
    write_file(opt.out, hcb::write_solution(sol.optimal));
  }
  if (!opt.heuristic_out.empty()) {
    write_file(opt.heuristic_out, hcb::write_solution(greedy));
  }
  if (!opt.report.empty()) {
    hcb::ReportDocument report;
    report.dims.assign(spec.dims().begin(), spec.dims().end());
    report.strategies.push_back({"left", left, {}, {}});
    report.strategies.push_back({"right", right, {}, {}});
    report.strategies.push_back({"heuristic", heuristic, {}, {}});
    report.strategies.push_back({"optimized", optimized, {}, {}});
    write_file(opt.report, hcb::write_report(report));
  }
}

struct RunOptions {
  std::string problem;
  std::string solution;
  std::string heuristic_solution;
  std::uint64_t seed = 0;
  int reps = 5;
  bool check = false;
  std::string report;
};

void cmd_run(const RunOptions& opt) {
  const ChainSpec spec = hcb::read_problem(read_file(opt.problem));
  const int q = spec.length();
  const Plan optimized = hcb::read_solution(read_file(opt.solution), q);
  const Plan heuristic = opt.heuristic_solution.empty()
                             ? hcb::greedy_plan(spec)
                             : hcb::read_solution(
                                   read_file(opt.heuristic_solution), q);
  const ElementalSet elems =
      hcb::generate_elementals(spec, opt.seed, /*symmetric=*/true);

  struct Row {
    std::string name;
    Plan plan;
  };
  const std::vector<Row> rows{{"left", hcb::left_plan(q)},
                              {"right", hcb::right_plan(q)},
                              {"heuristic", heuristic},
                              {"optimized", optimized}};

  hcb::ReportDocument report;
  report.dims.assign(spec.dims().begin(), spec.dims().end());
  std::vector<DenseHessian> outputs;
  for (const Row& row : rows) {
    ExecutionResult result = hcb::execute_plan(spec, elems, row.plan);
    const std::int64_t us = median_time_us(opt.reps, [&] {
      result = hcb::execute_plan(spec, elems, row.plan);
    });
    report.strategies.push_back({row.name, result.fma.count, us,
                                 hcb::entry_digest(result.hessian)});
    outputs.push_back(std::move(result.hessian));
  }

  std::cout << "Instrumented fma counts:\n";
  for (const auto& s : report.strategies) {
    std::cout << s.name << " bracketing: " << s.fma << '\n';
  }
  std::cout << "Elapsed time (in microseconds):\n";
  for (const auto& s : report.strategies) {
    std::cout << s.name << " bracketing: " << *s.time_us << '\n';
  }

  if (opt.check) {
    const DenseHessian direct = hcb::accumulate_direct(spec, elems);
    double worst = 0.0;
    for (std::size_t i = 0; i < outputs.size(); ++i) {
      worst = std::max(
          worst, hcb::relative_frobenius_distance(outputs[i], direct));
      for (std::size_t j = i + 1; j < outputs.size(); ++j) {
        worst = std::max(
            worst, hcb::relative_frobenius_distance(outputs[i], outputs[j]));
      }
    }
    if (worst > 1e-10) {
      std::ostringstream message;
      message << "check failed: strategies disagree by " << worst
              << " relative Frobenius distance (tolerance 1e-10)";
      throw CheckFailure(message.str());
    }
    std::cout << "check: all strategies and the direct accumulation agree "
                 "within 1e-10 relative\n";
  }

  if (!opt.report.empty()) {
    write_file(opt.report, hcb::write_report(report));
  }
}

struct BenchOptions {
  std::vector<int> lengths;
  int bound = 50;
  std::uint64_t seed = 0;
  int reps = 3;
  std::string csv;
};

void cmd_bench(const BenchOptions& opt) {
  std::ostringstream csv;
  csv << "q,fma_opt,fma_left,fma_right,fma_greedy,fma_rel,"
         "t_opt_us,t_left_us,t_right_us,t_rel\n";
  hcb::SplitMix64 stream(opt.seed);
  for (const int q : opt.lengths) {
    if (q < 1) throw hcb::ContractError("bench: lengths must be >= 1");
    const std::uint64_t dims_seed = stream.next();
    const std::uint64_t elems_seed = stream.next();
    const ChainSpec spec = hcb::generate_random(q, opt.bound, dims_seed);
    const Solution sol = hcb::solve(spec);
    const Plan left = hcb::left_plan(q);
    const Plan right = hcb::right_plan(q);

    const FmaCount fma_opt = hcb::plan_cost(spec, sol.optimal);
    const FmaCount fma_left = hcb::plan_cost(spec, left);
    const FmaCount fma_right = hcb::plan_cost(spec, right);
    const FmaCount fma_greedy = hcb::plan_cost(spec, hcb::greedy_plan(spec));
    const double fma_rel =
        fma_opt == 0 ? 1.0
                     : static_cast<double>(std::min(fma_left, fma_right)) /
                           static_cast<double>(fma_opt);

    const ElementalSet elems =
        hcb::generate_elementals(spec, elems_seed, /*symmetric=*/true);
    const auto run_of = [&](const Plan& plan) {
      return median_time_us(opt.reps,
                            [&] { hcb::execute_plan(spec, elems, plan); });
    };
    const std::int64_t t_opt = run_of(sol.optimal);
    const std::int64_t t_left = run_of(left);
    const std::int64_t t_right = run_of(right);
    const double t_rel = static_cast<double>(std::min(t_left, t_right)) /
                         static_cast<double>(std::max<std::int64_t>(t_opt, 1));

    csv << q << ',' << fma_opt << ',' << fma_left << ',' << fma_right << ','
        << fma_greedy << ',' << fma_rel << ',' << t_opt << ',' << t_left << ','
        << t_right << ',' << t_rel << '\n';
  }
  if (opt.csv.empty()) {
    std::cout << csv.str();
  } else {
    write_file(opt.csv, csv.str());
  }
}

struct ReduceOptions {
  bool demo = false;
  std::string sets;
  long long budget = 0;
};

hcb::EnsembleInstance parse_sets(const std::string& text, long long budget,
                                 int* duplicates_removed) {
  hcb::EnsembleInstance instance;
  instance.budget = budget;
  std::vector<std::vector<std::string>> subsets;
  std::stringstream stream(text);
  std::string chunk;
  while (std::getline(stream, chunk, ';')) {
    std::vector<std::string> subset;
    if (chunk.find(',') != std::string::npos) {
      std::stringstream inner(chunk);
      std::string sym;
      while (std::getline(inner, sym, ',')) {
        std::erase_if(sym, [](unsigned char c) { return std::isspace(c); });
        if (!sym.empty()) subset.push_back(sym);
      }
    } else {
      for (char c : chunk) {
        if (!std::isspace(static_cast<unsigned char>(c))) {
          subset.emplace_back(1, c);
        }
      }
    }
    if (subset.empty()) continue;
    std::sort(subset.begin(), subset.end());
    subset.erase(std::unique(subset.begin(), subset.end()), subset.end());
    if (std::find(subsets.begin(), subsets.end(), subset) != subsets.end()) {
      ++*duplicates_removed;
      continue;
    }
    subsets.push_back(std::move(subset));
  }
  instance.subsets = std::move(subsets);
  for (const auto& subset : instance.subsets) {
    for (const auto& sym : subset) instance.ground_set.push_back(sym);
  }
  return instance;
}

void cmd_reduce(const ReduceOptions& opt) {
  int duplicates_removed = 0;
  hcb::EnsembleInstance instance;
  if (opt.demo) {
    instance = {{"a", "b", "c"}, {{"a", "b"}, {"b", "c"}}, opt.budget};
  } else {
    instance = parse_sets(opt.sets, opt.budget, &duplicates_removed);
    if (instance.subsets.empty()) {
      throw hcb::ContractError("reduce: no subsets given");
    }
  }
  if (duplicates_removed > 0) {
    std::cout << "note: removed " << duplicates_removed
              << " duplicate subset(s)\n";
  }

  // Guard check happens first so oversized instances are refused before any
  // output is produced.
  const int min_mults = hcb::brute_force_ensemble(instance);
  const hcb::ReductionChain rc = hcb::build_reduction(instance);

  std::cout << "ground set:";
  for (const auto& sym : rc.symbols) std::cout << ' ' << sym;
  std::cout << '\n' << "prime assignment:";
  for (std::size_t i = 0; i < rc.symbols.size(); ++i) {
    std::cout << ' ' << rc.symbols[i] << '=' << rc.symbol_primes[i];
  }
  std::cout << '\n' << "padding primes:";
  if (rc.padding_primes.empty()) {
    std::cout << " (none)";
  } else {
    for (const auto p : rc.padding_primes) std::cout << ' ' << p;
  }
  std::cout << '\n' << "padded collection (uniform cardinality " << rc.q
            << "):";
  for (const auto& subset : rc.padded_subsets) {
    std::cout << " {";
    for (std::size_t i = 0; i < subset.size(); ++i) {
      std::cout << (i ? "," : "") << subset[i];
    }
    std::cout << '}';
  }
  std::cout << '\n' << "padded budget: " << rc.padded_budget << '\n';
  std::cout << "chain dims:";
  for (const int d : rc.spec.dims()) std::cout << ' ' << d;
  std::cout << '\n' << "accumulated F'' entries:";
  for (const auto v : hcb::reduction_hessian_entries(rc)) {
    std::cout << ' ' << v;
  }
  std::cout << '\n' << "factorization verified: "
            << (hcb::verify_reduction(rc) ? "yes" : "NO") << '\n';
  std::cout << "minimal multiplications (exhaustive): " << min_mults << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Optimal bracketing of Hessian chain products: cost-model solver, "
      "instrumented numerical evaluation, and instance tooling"};
  app.require_subcommand(1);

  GenerateOptions gen;
  CLI::App* generate =
      app.add_subcommand("generate", "Write a random problem file");
  generate->add_option("q", gen.q, "chain length (number of elementals)")
      ->required()
      ->check(CLI::Range(1, 1'000'000));
  generate
      ->add_option("bound", gen.bound,
                   "inclusive upper bound on every dimension")
      ->required()
      ->check(CLI::Range(1, 1'000'000));
  generate->add_option("--seed", gen.seed, "random seed (default 0)");
  generate->add_option("--out", gen.out,
                       "output file (standard output when absent)");
  generate->callback([&gen] { cmd_generate(gen); });

  SolveOptions solve_opt;
  CLI::App* solve = app.add_subcommand(
      "solve", "Compute optimal and baseline bracketings of a problem");
  solve->add_option("problem", solve_opt.problem, "problem file")->required();
  solve->add_option("--out", solve_opt.out, "write the optimal bracketing");
  solve->add_option("--heuristic-out", solve_opt.heuristic_out,
                    "write the greedy bracketing");
  solve->add_flag("--dump-table", solve_opt.dump_table,
                  "print the dynamic programming table");
  solve->add_option("--report", solve_opt.report,
                    "write a key-value report of predicted fma counts");
  solve->callback([&solve_opt] { cmd_solve(solve_opt); });

  RunOptions run_opt;
  CLI::App* run = app.add_subcommand(
      "run", "Evaluate the Hessian numerically under several bracketings");
  run->add_option("problem", run_opt.problem, "problem file")->required();
  run->add_option("solution", run_opt.solution, "optimized bracketing file")
      ->required();
  run->add_option("heuristic_solution", run_opt.heuristic_solution,
                  "heuristic bracketing file (greedy is computed when "
                  "absent)");
  run->add_option("--seed", run_opt.seed,
                  "seed for the random elemental derivatives");
  run->add_option("--reps", run_opt.reps,
                  "timing repetitions per strategy (median is reported)")
      ->check(CLI::Range(1, 1'000'000));
  run->add_flag("--check", run_opt.check,
                "cross-check all strategies against the direct summation");
  run->add_option("--report", run_opt.report, "write a key-value report");
  run->callback([&run_opt] { cmd_run(run_opt); });

  BenchOptions bench_opt;
  CLI::App* bench = app.add_subcommand(
      "bench", "Sweep chain lengths and emit a CSV of costs and timings");
  bench
      ->add_option("--lengths", bench_opt.lengths,
                   "comma-separated chain lengths")
      ->required()
      ->delimiter(',');
  bench->add_option("--bound", bench_opt.bound,
                    "inclusive upper bound on dimensions (default 50)")
      ->check(CLI::Range(1, 1'000'000));
  bench->add_option("--seed", bench_opt.seed, "master seed for the sweep");
  bench->add_option("--reps", bench_opt.reps,
                    "timing repetitions per strategy")
      ->check(CLI::Range(1, 1'000'000));
  bench->add_option("--csv", bench_opt.csv,
                    "CSV output file (standard output when absent)");
  bench->callback([&bench_opt] { cmd_bench(bench_opt); });

  ReduceOptions reduce_opt;
  CLI::App* reduce = app.add_subcommand(
      "reduce",
      "Demonstrate the chain encoding of a shared-subproduct instance");
  reduce->add_flag("--demo", reduce_opt.demo, "run the built-in instance");
  reduce->add_option(
      "--sets", reduce_opt.sets,
      "subsets separated by ';' (symbols are characters, or "
      "comma-separated names)");
  reduce->add_option("--budget", reduce_opt.budget,
                     "multiplication budget of the decision instance");
  reduce->callback([&reduce_opt] {
    if (reduce_opt.demo != reduce_opt.sets.empty()) {
      throw CLI::ValidationError("reduce",
                                 "exactly one of --demo or --sets required");
    }
    cmd_reduce(reduce_opt);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const CheckFailure& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const hcb::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const hcb::GuardError& e) {
    std::cerr << "refused: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
