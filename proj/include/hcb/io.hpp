#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hcb/chain.hpp"
#include "hcb/plan.hpp"
#include "hcb/solver.hpp"

namespace hcb {

/// Malformed input document; the message names the offending line.
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}

  int line() const { return line_; }

 private:
  int line_;
};

namespace detail {

inline std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) {
      lines.emplace_back(text.substr(pos));
      break;
    }
    lines.emplace_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  // A trailing newline does not start another line; interior blank lines do.
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

inline std::vector<long long> parse_ints(const std::string& line,
                                         int line_number, int expected) {
  std::istringstream in(line);
  std::vector<long long> values;
  long long v = 0;
  while (in >> v) values.push_back(v);
  if (!in.eof()) {
    throw ParseError(line_number, "expected integers, got '" + line + "'");
  }
  if (static_cast<int>(values.size()) != expected) {
    throw ParseError(line_number, "expected " + std::to_string(expected) +
                                      " integer(s), got " +
                                      std::to_string(values.size()));
  }
  return values;
}

}  // namespace detail

/// Problem document: line 1 holds q; lines 2..q+1 hold "rows cols" of
/// elemental Jacobian i in ascending order, so line i+1 reads
/// "n_i n_{i-1}". Consecutive lines must conform (each elemental's input
/// dimension equals its predecessor's output dimension).
inline ChainSpec read_problem(std::string_view text) {
  const std::vector<std::string> lines = detail::split_lines(text);
  if (lines.empty()) throw ParseError(1, "empty problem document");
  const long long q = detail::parse_ints(lines[0], 1, 1)[0];
  if (q < 1) throw ParseError(1, "chain length must be >= 1");
  if (static_cast<long long>(lines.size()) != q + 1) {
    throw ParseError(static_cast<int>(lines.size()),
                     "expected " + std::to_string(q) +
                         " dimension lines after the chain length");
  }
  std::vector<int> dims(static_cast<std::size_t>(q) + 1, 0);
  for (long long e = 0; e < q; ++e) {
    const int line_number = static_cast<int>(e) + 2;
    const auto rc = detail::parse_ints(lines[static_cast<std::size_t>(e) + 1],
                                       line_number, 2);
    const long long rows = rc[0];
    const long long cols = rc[1];
    if (rows < 1 || cols < 1) {
      throw ParseError(line_number, "dimensions must be positive");
    }
    if (rows > 1'000'000 || cols > 1'000'000) {
      throw ParseError(line_number, "dimension too large");
    }
    if (e == 0) {
      dims[0] = static_cast<int>(cols);
    } else if (dims[static_cast<std::size_t>(e)] != static_cast<int>(cols)) {
      throw ParseError(line_number,
                       "input dimension " + std::to_string(cols) +
                           " does not match previous output dimension " +
                           std::to_string(dims[static_cast<std::size_t>(e)]));
    }
    dims[static_cast<std::size_t>(e) + 1] = static_cast<int>(rows);
  }
  return ChainSpec(std::move(dims));
}

inline std::string write_problem(const ChainSpec& spec) {
  std::ostringstream out;
  out << spec.length() << '\n';
  for (int e = 0; e < spec.length(); ++e) {
    out << spec.rows(e) << ' ' << spec.cols(e) << '\n';
  }
  return out.str();
}

/// Solution document: exactly q-1 lines "hi s lo" (0-based), one per
/// internal node, in post-order with the upper subtree first and the root
/// last. The subchain lo..hi splits before elemental s.
inline std::string write_solution(const Plan& plan) {
  std::ostringstream out;
  const std::function<void(int)> emit = [&](int id) {
    const Plan::Node& n = plan.node(id);
    if (n.is_leaf()) return;
    emit(n.upper);
    emit(n.lower);
    out << n.hi << ' ' << n.split << ' ' << n.lo << '\n';
  };
  emit(plan.root_id());
  return out.str();
}

inline Plan read_solution(std::string_view text, int q) {
  if (q < 1) throw ContractError("read_solution: q must be >= 1");
  const std::vector<std::string> lines = detail::split_lines(text);
  if (static_cast<int>(lines.size()) != q - 1) {
    throw ParseError(static_cast<int>(lines.size()) + 1,
                     "expected " + std::to_string(q - 1) +
                         " split lines for a chain of length " +
                         std::to_string(q));
  }

  struct Entry {
    int split = -1;
    int line = 0;
    bool used = false;
  };
  std::vector<Entry> entries(static_cast<std::size_t>(q) * (q + 1) / 2);
  const auto index = [q](int hi, int lo) {
    return static_cast<std::size_t>(hi) * (hi + 1) / 2 + lo;
  };
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    const int line_number = static_cast<int>(ln) + 1;
    const auto v = detail::parse_ints(lines[ln], line_number, 3);
    const long long hi = v[0], split = v[1], lo = v[2];
    if (lo < 0 || hi >= q || lo > hi) {
      throw ParseError(line_number, "subchain out of range");
    }
    if (!(lo < split && split <= hi)) {
      throw ParseError(line_number, "split out of range for subchain");
    }
    Entry& e = entries[index(static_cast<int>(hi), static_cast<int>(lo))];
    if (e.split >= 0) {
      throw ParseError(line_number, "duplicate subchain");
    }
    e.split = static_cast<int>(split);
    e.line = line_number;
  }

  int consumed = 0;
  Plan plan = Plan::build(q, [&](int hi, int lo) {
    Entry& e = entries[index(hi, lo)];
    if (e.split < 0 || e.used) {
      throw ParseError(static_cast<int>(lines.size()),
                       "no split given for subchain (" + std::to_string(hi) +
                           "," + std::to_string(lo) + ")");
    }
    e.used = true;
    ++consumed;
    return e.split;
  });
  if (consumed != q - 1) {
    // Unreachable when the line count matched, but keep the tree honest.
    throw ParseError(static_cast<int>(lines.size()), "inconsistent tree");
  }
  for (const Entry& e : entries) {
    if (e.split >= 0 && !e.used) {
      throw ParseError(e.line, "split line does not belong to the tree");
    }
  }
  return plan;
}

/// Human-readable dump of the Hessian table: one line per subchain of
/// length >= 2, grouped by upper elemental, with the attained cost, the
/// chosen split, and the result dimensions n_{hi+1} x n_lo x n_lo.
inline std::string dump_tables(const CostTables& tables,
                               const ChainSpec& spec) {
  if (!tables.hessian_solved()) {
    throw ContractError("dump_tables: Hessian table not solved");
  }
  std::ostringstream out;
  for (int hi = 1; hi < spec.length(); ++hi) {
    for (int lo = hi - 1; lo >= 0; --lo) {
      const CostEntry& e = tables.hess(hi, lo);
      out << "fma(F''(" << hi << ',' << lo << "))=" << e.cost
          << "; split before " << e.split << "; dim(F''(" << hi << ',' << lo
          << "))=" << spec.dim(hi + 1) << 'x' << spec.dim(lo) << 'x'
          << spec.dim(lo) << '\n';
    }
  }
  return out.str();
}

/// One strategy's results inside a report. Wall time and digest are present
/// only when the strategy was actually executed numerically.
struct StrategyReport {
  std::string name;
  FmaCount fma = 0;
  std::optional<std::int64_t> time_us;
  std::optional<std::uint64_t> digest;
};

/// Flat key-value run report; strategies are left, right, heuristic and
/// optimized, in that order.
struct ReportDocument {
  std::vector<int> dims;
  std::vector<StrategyReport> strategies;
};

inline std::string write_report(const ReportDocument& report) {
  std::ostringstream out;
  out << "dims =";
  for (int d : report.dims) out << ' ' << d;
  out << '\n';
  out << "q = " << (report.dims.empty() ? 0 : report.dims.size() - 1) << '\n';
  for (const StrategyReport& s : report.strategies) {
    out << s.name << ".fma = " << s.fma << '\n';
    if (s.time_us) {
      out << s.name << ".time_us = " << *s.time_us << '\n';
    }
    if (s.digest) {
      out << s.name << ".digest = " << std::hex << *s.digest << std::dec
          << '\n';
    }
  }
  return out.str();
}

}  // namespace hcb
