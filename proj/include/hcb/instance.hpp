#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hcb/chain.hpp"
#include "hcb/rng.hpp"
#include "hcb/tensor.hpp"

namespace hcb {

/// Random chain dimensions, each drawn independently and uniformly from
/// {1, ..., bound}. Deterministic for a given seed.
inline ChainSpec generate_random(int q, int bound, std::uint64_t seed) {
  if (q < 1 || bound < 1) {
    throw ContractError("generate_random: q and bound must be >= 1");
  }
  SplitMix64 rng(seed);
  std::vector<int> dims(static_cast<std::size_t>(q) + 1, 0);
  for (int& d : dims) d = 1 + rng.next_index(bound);
  return ChainSpec(std::move(dims));
}

/// Random elemental Jacobians and Hessians with entries uniform in [-1, 1).
/// With `symmetric` set, each Hessian is replaced by (H + H^T)/2 over its
/// trailing indices.
inline ElementalSet generate_elementals(const ChainSpec& spec,
                                        std::uint64_t seed, bool symmetric) {
  SplitMix64 rng(seed);
  ElementalSet elems;
  for (int e = 0; e < spec.length(); ++e) {
    DenseJacobian j(spec.rows(e), spec.cols(e));
    for (double& v : j.entries()) v = rng.next_double(-1.0, 1.0);
    DenseHessian h(spec.rows(e), spec.cols(e));
    for (double& v : h.entries()) v = rng.next_double(-1.0, 1.0);
    if (symmetric) {
      for (int d = 0; d < h.out(); ++d) {
        for (int b1 = 0; b1 < h.in(); ++b1) {
          for (int b2 = b1 + 1; b2 < h.in(); ++b2) {
            const double avg = (h.at(d, b1, b2) + h.at(d, b2, b1)) / 2.0;
            h.at(d, b1, b2) = avg;
            h.at(d, b2, b1) = avg;
          }
        }
      }
    }
    elems.jacobians.push_back(std::move(j));
    elems.hessians.push_back(std::move(h));
  }
  return elems;
}

/// Layered polynomial function with per-layer evaluation rule
///   v_i[l] = sum_c A_i[l][c] v_{i-1}[c]
///          + 1/2 sum_{c,d} B_i[l][c][d] v_{i-1}[c] v_{i-1}[d]
/// with B_i symmetric in (c, d). Closed-form layer derivatives:
/// F'_i(v) = A_i + B_i v (contraction over the trailing index) and
/// F''_i = B_i, constant.
struct QuadraticChain {
  ChainSpec spec;
  std::vector<DenseJacobian> linear;     // A_i, shape n_i x n_{i-1}
  std::vector<DenseHessian> quadratic;   // B_i, shape n_i x n_{i-1} x n_{i-1}
};

/// Random QuadraticChain with coefficients uniform in [-0.5, 0.5) (bounded
/// to keep composite derivatives well conditioned); B symmetrized.
inline QuadraticChain synth_quadratic(const ChainSpec& spec,
                                      std::uint64_t seed) {
  SplitMix64 rng(seed);
  QuadraticChain chain{spec, {}, {}};
  for (int e = 0; e < spec.length(); ++e) {
    DenseJacobian a(spec.rows(e), spec.cols(e));
    for (double& v : a.entries()) v = rng.next_double(-0.5, 0.5);
    DenseHessian b(spec.rows(e), spec.cols(e));
    for (double& v : b.entries()) v = rng.next_double(-0.5, 0.5);
    for (int d = 0; d < b.out(); ++d) {
      for (int c1 = 0; c1 < b.in(); ++c1) {
        for (int c2 = c1 + 1; c2 < b.in(); ++c2) {
          const double avg = (b.at(d, c1, c2) + b.at(d, c2, c1)) / 2.0;
          b.at(d, c1, c2) = avg;
          b.at(d, c2, c1) = avg;
        }
      }
    }
    chain.linear.push_back(std::move(a));
    chain.quadratic.push_back(std::move(b));
  }
  return chain;
}

/// Composite value at x (plain forward sweep, no derivatives).
inline std::vector<double> evaluate_primal(const QuadraticChain& chain,
                                           std::span<const double> x) {
  if (static_cast<int>(x.size()) != chain.spec.dim(0)) {
    throw ContractError("evaluate_primal: input has wrong length");
  }
  std::vector<double> v(x.begin(), x.end());
  for (int e = 0; e < chain.spec.length(); ++e) {
    const DenseJacobian& a = chain.linear[static_cast<std::size_t>(e)];
    const DenseHessian& b = chain.quadratic[static_cast<std::size_t>(e)];
    std::vector<double> next(static_cast<std::size_t>(a.rows()), 0.0);
    for (int l = 0; l < a.rows(); ++l) {
      double acc = 0.0;
      for (int c = 0; c < a.cols(); ++c) acc += a.at(l, c) * v[c];
      for (int c = 0; c < a.cols(); ++c) {
        for (int d = 0; d < a.cols(); ++d) {
          acc += 0.5 * b.at(l, c, d) * v[c] * v[d];
        }
      }
      next[static_cast<std::size_t>(l)] = acc;
    }
    v = std::move(next);
  }
  return v;
}

struct EvaluationResult {
  std::vector<double> value;  // v_q
  ElementalSet elementals;    // F'_i and F''_i at the visited points
};

/// Forward sweep computing v_0..v_q and, at each layer, the exact elemental
/// Jacobian A_i + B_i v_{i-1} and Hessian B_i.
inline EvaluationResult evaluate_with_derivatives(const QuadraticChain& chain,
                                                  std::span<const double> x) {
  if (static_cast<int>(x.size()) != chain.spec.dim(0)) {
    throw ContractError("evaluate_with_derivatives: input has wrong length");
  }
  EvaluationResult out;
  std::vector<double> v(x.begin(), x.end());
  for (int e = 0; e < chain.spec.length(); ++e) {
    const DenseJacobian& a = chain.linear[static_cast<std::size_t>(e)];
    const DenseHessian& b = chain.quadratic[static_cast<std::size_t>(e)];
    DenseJacobian jac(a.rows(), a.cols());
    for (int l = 0; l < a.rows(); ++l) {
      for (int c = 0; c < a.cols(); ++c) {
        double acc = a.at(l, c);
        for (int d = 0; d < a.cols(); ++d) acc += b.at(l, c, d) * v[d];
        jac.at(l, c) = acc;
      }
    }
    out.elementals.jacobians.push_back(std::move(jac));
    out.elementals.hessians.push_back(b);

    std::vector<double> next(static_cast<std::size_t>(a.rows()), 0.0);
    for (int l = 0; l < a.rows(); ++l) {
      double acc = 0.0;
      for (int c = 0; c < a.cols(); ++c) acc += a.at(l, c) * v[c];
      for (int c = 0; c < a.cols(); ++c) {
        for (int d = 0; d < a.cols(); ++d) {
          acc += 0.5 * b.at(l, c, d) * v[c] * v[d];
        }
      }
      next[static_cast<std::size_t>(l)] = acc;
    }
    v = std::move(next);
  }
  out.value = std::move(v);
  return out;
}

/// Default central-difference step: 1e-4 * max(1, |x|_inf).
inline double fd_default_step(std::span<const double> x) {
  double inf = 0.0;
  for (double v : x) inf = std::max(inf, std::abs(v));
  return 1e-4 * std::max(1.0, inf);
}

/// Second-order central differences of the primal composite:
/// F''[.][a][b] ~ (F(x+h e_a+h e_b) - F(x+h e_a-h e_b)
///               - F(x-h e_a+h e_b) + F(x-h e_a-h e_b)) / (4 h^2).
/// Pass h <= 0 to use the default step.
inline DenseHessian fd_hessian(const QuadraticChain& chain,
                               std::span<const double> x, double h = 0.0) {
  if (h <= 0.0) h = fd_default_step(x);
  const int n0 = chain.spec.dim(0);
  const int nq = chain.spec.dim(chain.spec.length());
  DenseHessian out(nq, n0);
  std::vector<double> probe(x.begin(), x.end());
  const auto eval_at = [&](int a, double da, int b, double db) {
    probe.assign(x.begin(), x.end());
    probe[static_cast<std::size_t>(a)] += da;
    probe[static_cast<std::size_t>(b)] += db;
    return evaluate_primal(chain, probe);
  };
  for (int a = 0; a < n0; ++a) {
    for (int b = 0; b < n0; ++b) {
      const auto pp = eval_at(a, h, b, h);
      const auto pm = eval_at(a, h, b, -h);
      const auto mp = eval_at(a, -h, b, h);
      const auto mm = eval_at(a, -h, b, -h);
      for (int d = 0; d < nq; ++d) {
        out.at(d, a, b) = (pp[static_cast<std::size_t>(d)] -
                           pm[static_cast<std::size_t>(d)] -
                           mp[static_cast<std::size_t>(d)] +
                           mm[static_cast<std::size_t>(d)]) /
                          (4.0 * h * h);
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Shared-subproduct hardness demonstrator
// ---------------------------------------------------------------------------

/// An instance of the ensemble-computation problem: produce the product of
/// every subset of C over ground set A with at most `budget` binary
/// multiplications (subproduct sharing allowed).
struct EnsembleInstance {
  std::vector<std::string> ground_set;
  std::vector<std::vector<std::string>> subsets;
  long long budget = 0;
};

/// The chain encoding of an ensemble instance: symbols become distinct
/// primes, subsets are padded with fresh primes to uniform cardinality q,
/// and the chain multiplies one prime per layer into each component. The
/// first layer carries the only nonzero elemental Hessian; all later layers
/// are diagonal linear maps, so the accumulated Hessian's components are
/// exactly the padded subset products.
struct ReductionChain {
  std::vector<std::string> symbols;           // sorted ground set
  std::vector<std::int64_t> symbol_primes;    // prime per symbol
  std::vector<std::int64_t> padding_primes;   // fresh primes used as padding
  std::vector<std::vector<std::int64_t>> padded_subsets;  // each of size q
  int q = 0;
  long long padded_budget = 0;                // original budget + |padding|
  ChainSpec spec;                             // dims (1, |C|, ..., |C|)
};

namespace detail {

inline std::int64_t next_prime(std::int64_t after) {
  std::int64_t candidate = after + 1;
  while (true) {
    if (candidate < 2) candidate = 2;
    bool prime = true;
    for (std::int64_t d = 2; d * d <= candidate; ++d) {
      if (candidate % d == 0) {
        prime = false;
        break;
      }
    }
    if (prime) return candidate;
    ++candidate;
  }
}

}  // namespace detail

/// Builds the chain encoding. Symbols are assigned the first |A| primes in
/// ascending symbol order; padded subsets keep ascending prime order.
inline ReductionChain build_reduction(const EnsembleInstance& instance) {
  if (instance.subsets.empty()) {
    throw ContractError("build_reduction: instance has no subsets");
  }
  std::set<std::string> symbols(instance.ground_set.begin(),
                                instance.ground_set.end());
  for (const auto& subset : instance.subsets) {
    if (subset.empty()) {
      throw ContractError("build_reduction: empty subset");
    }
    for (const auto& sym : subset) symbols.insert(sym);
  }

  std::map<std::string, std::int64_t> prime_of;
  std::int64_t prime = 1;
  for (const auto& sym : symbols) {
    prime = detail::next_prime(prime);
    prime_of[sym] = prime;
  }

  ReductionChain rc{{symbols.begin(), symbols.end()},
                    {},
                    {},
                    {},
                    0,
                    instance.budget,
                    ChainSpec({1, 1})};
  for (const auto& sym : rc.symbols) rc.symbol_primes.push_back(prime_of[sym]);

  int q = 0;
  for (const auto& subset : instance.subsets) {
    std::set<std::string> unique(subset.begin(), subset.end());
    q = std::max(q, static_cast<int>(unique.size()));
  }
  rc.q = q;

  for (const auto& subset : instance.subsets) {
    std::set<std::string> unique(subset.begin(), subset.end());
    std::vector<std::int64_t> primes;
    for (const auto& sym : unique) primes.push_back(prime_of[sym]);
    while (static_cast<int>(primes.size()) < q) {
      prime = detail::next_prime(prime);
      rc.padding_primes.push_back(prime);
      primes.push_back(prime);
    }
    std::sort(primes.begin(), primes.end());
    rc.padded_subsets.push_back(std::move(primes));
  }
  rc.padded_budget =
      instance.budget + static_cast<long long>(rc.padding_primes.size());

  std::vector<int> dims(static_cast<std::size_t>(q) + 1,
                        static_cast<int>(rc.padded_subsets.size()));
  dims[0] = 1;
  rc.spec = ChainSpec(std::move(dims));
  return rc;
}

/// Elemental derivatives of the reduction chain at scalar input x: layer 1
/// has Jacobian components c_j1 * x and Hessian components c_j1; layers
/// i >= 2 are diagonal with entries c_ji and have identically zero Hessians.
inline ElementalSet reduction_elementals(const ReductionChain& rc, double x) {
  ElementalSet elems;
  const int m = static_cast<int>(rc.padded_subsets.size());
  for (int layer = 0; layer < rc.q; ++layer) {
    if (layer == 0) {
      DenseJacobian j(m, 1);
      DenseHessian h(m, 1);
      for (int row = 0; row < m; ++row) {
        const double c = static_cast<double>(
            rc.padded_subsets[static_cast<std::size_t>(row)][0]);
        j.at(row, 0) = c * x;
        h.at(row, 0, 0) = c;
      }
      elems.jacobians.push_back(std::move(j));
      elems.hessians.push_back(std::move(h));
    } else {
      DenseJacobian j(m, m);
      DenseHessian h(m, m);  // identically zero
      for (int row = 0; row < m; ++row) {
        j.at(row, row) = static_cast<double>(
            rc.padded_subsets[static_cast<std::size_t>(row)]
                             [static_cast<std::size_t>(layer)]);
      }
      elems.jacobians.push_back(std::move(j));
      elems.hessians.push_back(std::move(h));
    }
  }
  return elems;
}

/// Exact integer accumulation of the chain's Hessian components: the product
/// of the diagonal factors of layers 2..q times the layer-1 Hessian entry,
/// per component.
inline std::vector<std::int64_t> reduction_hessian_entries(
    const ReductionChain& rc) {
  std::vector<std::int64_t> entries;
  for (const auto& primes : rc.padded_subsets) {
    FmaCount acc = static_cast<FmaCount>(primes[0]);  // layer-1 Hessian entry
    for (std::size_t i = 1; i < primes.size(); ++i) {
      acc = detail::checked_mul(acc, static_cast<FmaCount>(primes[i]));
    }
    entries.push_back(static_cast<std::int64_t>(acc));
  }
  return entries;
}

/// Checks the construction: all primes mutually distinct, uniform subset
/// cardinality, each padding prime used exactly once, and the accumulated
/// Hessian components equal the independently multiplied subset products.
inline bool verify_reduction(const ReductionChain& rc) {
  std::set<std::int64_t> seen;
  for (std::int64_t p : rc.symbol_primes) {
    if (!seen.insert(p).second) return false;
  }
  for (std::int64_t p : rc.padding_primes) {
    if (!seen.insert(p).second) return false;
  }
  std::map<std::int64_t, int> padding_uses;
  for (std::int64_t p : rc.padding_primes) padding_uses[p] = 0;
  for (const auto& primes : rc.padded_subsets) {
    if (static_cast<int>(primes.size()) != rc.q) return false;
    for (std::int64_t p : primes) {
      if (!seen.contains(p)) return false;
      if (auto it = padding_uses.find(p); it != padding_uses.end()) {
        ++it->second;
      }
    }
  }
  for (const auto& [p, uses] : padding_uses) {
    if (uses != 1) return false;
  }

  const std::vector<std::int64_t> accumulated = reduction_hessian_entries(rc);
  for (std::size_t j = 0; j < rc.padded_subsets.size(); ++j) {
    FmaCount direct = 1;
    for (std::int64_t p : rc.padded_subsets[j]) {
      direct = detail::checked_mul(direct, static_cast<FmaCount>(p));
    }
    if (static_cast<std::int64_t>(direct) != accumulated[j]) return false;
  }
  return true;
}

/// Minimal number of binary multiplications producing the product of every
/// subset, with sharing of intermediate products. Exhaustive iterative
/// deepening; refuses instances beyond desk scale
/// (|A| <= 6, |C| <= 3, max subset size <= 4).
inline int brute_force_ensemble(const EnsembleInstance& instance) {
  std::set<std::string> symbols(instance.ground_set.begin(),
                                instance.ground_set.end());
  for (const auto& subset : instance.subsets) {
    if (subset.empty()) {
      throw ContractError("brute_force_ensemble: empty subset");
    }
    for (const auto& sym : subset) symbols.insert(sym);
  }
  std::size_t max_card = 0;
  for (const auto& subset : instance.subsets) {
    std::set<std::string> unique(subset.begin(), subset.end());
    max_card = std::max(max_card, unique.size());
  }
  if (symbols.size() > 6 || instance.subsets.size() > 3 || max_card > 4) {
    throw GuardError(
        "brute_force_ensemble: instance exceeds the desk-scale guard "
        "(|A| <= 6, |C| <= 3, subset size <= 4)");
  }

  std::map<std::string, std::int64_t> prime_of;
  std::int64_t prime = 1;
  for (const auto& sym : symbols) {
    prime = detail::next_prime(prime);
    prime_of[sym] = prime;
  }
  std::set<std::int64_t> target_set;
  for (const auto& subset : instance.subsets) {
    std::set<std::string> unique(subset.begin(), subset.end());
    std::int64_t product = 1;
    for (const auto& sym : unique) product *= prime_of[sym];
    target_set.insert(product);
  }
  const std::vector<std::int64_t> targets(target_set.begin(),
                                          target_set.end());

  std::vector<std::int64_t> available;
  for (const auto& [sym, p] : prime_of) available.push_back(p);

  const auto missing = [&targets](const std::vector<std::int64_t>& have) {
    int count = 0;
    for (std::int64_t t : targets) {
      if (std::find(have.begin(), have.end(), t) == have.end()) ++count;
    }
    return count;
  };
  // Only products dividing some target can appear in a minimal sequence.
  const auto useful = [&targets](std::int64_t p) {
    for (std::int64_t t : targets) {
      if (t % p == 0) return true;
    }
    return false;
  };

  std::function<bool(std::vector<std::int64_t>&, int)> search =
      [&](std::vector<std::int64_t>& have, int steps_left) -> bool {
    const int need = missing(have);
    if (need == 0) return true;
    if (need > steps_left) return false;
    const std::size_t n = have.size();
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = a; b < n; ++b) {
        const std::int64_t p = have[a] * have[b];
        if (!useful(p)) continue;
        if (std::find(have.begin(), have.end(), p) != have.end()) continue;
        have.push_back(p);
        if (search(have, steps_left - 1)) return true;
        have.pop_back();
      }
    }
    return false;
  };

  for (int budget = 0;; ++budget) {
    std::vector<std::int64_t> have = available;
    if (search(have, budget)) return budget;
  }
}

}  // namespace hcb
