#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "hcb/chain.hpp"
#include "hcb/plan.hpp"

namespace hcb {

/// Counts scalar fused multiply-add operations; incremented only inside the
/// contraction kernels, once per multiply-add actually performed.
struct FmaCounter {
  FmaCount count = 0;
};

/// Dense row-major matrix of 64-bit floats.
class DenseJacobian {
 public:
  DenseJacobian() = default;
  DenseJacobian(int rows, int cols)
      : rows_(rows), cols_(cols),
        entries_(static_cast<std::size_t>(rows) * cols, 0.0) {
    if (rows < 1 || cols < 1) {
      throw ContractError("DenseJacobian: dimensions must be positive");
    }
  }

  static DenseJacobian identity(int n) {
    DenseJacobian m(n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1.0;
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  double& at(int r, int c) {
    return entries_[static_cast<std::size_t>(r) * cols_ + c];
  }
  double at(int r, int c) const {
    return entries_[static_cast<std::size_t>(r) * cols_ + c];
  }

  std::vector<double>& entries() { return entries_; }
  const std::vector<double>& entries() const { return entries_; }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> entries_;
};

/// Dense order-3 tensor out x in x in, layout [d][b1][b2] row-major.
class DenseHessian {
 public:
  DenseHessian() = default;
  DenseHessian(int out, int in)
      : out_(out), in_(in),
        entries_(static_cast<std::size_t>(out) * in * in, 0.0) {
    if (out < 1 || in < 1) {
      throw ContractError("DenseHessian: dimensions must be positive");
    }
  }

  int out() const { return out_; }
  int in() const { return in_; }

  double& at(int d, int b1, int b2) {
    return entries_[(static_cast<std::size_t>(d) * in_ + b1) * in_ + b2];
  }
  double at(int d, int b1, int b2) const {
    return entries_[(static_cast<std::size_t>(d) * in_ + b1) * in_ + b2];
  }

  std::vector<double>& entries() { return entries_; }
  const std::vector<double>& entries() const { return entries_; }

 private:
  int out_ = 0;
  int in_ = 0;
  std::vector<double> entries_;
};

/// The given (input) derivatives of all q elementals: jacobians[e] is
/// n_{e+1} x n_e, hessians[e] is n_{e+1} x n_e x n_e, 0-based elemental e.
struct ElementalSet {
  std::vector<DenseJacobian> jacobians;
  std::vector<DenseHessian> hessians;

  void require_conforming(const ChainSpec& spec) const {
    const int q = spec.length();
    if (static_cast<int>(jacobians.size()) != q ||
        static_cast<int>(hessians.size()) != q) {
      throw ContractError("ElementalSet: wrong number of elementals");
    }
    for (int e = 0; e < q; ++e) {
      const auto& j = jacobians[static_cast<std::size_t>(e)];
      const auto& h = hessians[static_cast<std::size_t>(e)];
      if (j.rows() != spec.rows(e) || j.cols() != spec.cols(e) ||
          h.out() != spec.rows(e) || h.in() != spec.cols(e)) {
        throw ContractError("ElementalSet: elemental " + std::to_string(e) +
                            " does not conform to the chain dimensions");
      }
    }
  }
};

/// Matrix product A * B. Exactly A.rows * A.cols * B.cols multiply-adds;
/// summation order is the inner index ascending, fixed for reproducibility.
inline DenseJacobian contract_jj(const DenseJacobian& a, const DenseJacobian& b,
                                 FmaCounter& ctr) {
  if (a.cols() != b.rows()) {
    throw ContractError("contract_jj: inner dimensions do not match");
  }
  DenseJacobian r(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < b.cols(); ++j) {
      double acc = 0.0;
      for (int g = 0; g < a.cols(); ++g) {
        acc += a.at(i, g) * b.at(g, j);
        ++ctr.count;
      }
      r.at(i, j) = acc;
    }
  }
  return r;
}

/// Jacobian applied to the leading tensor index:
/// r[d][b1][b2] = sum_g a[d][g] * h[g][b1][b2].
/// Exactly a.rows * a.cols * h.in^2 multiply-adds.
inline DenseHessian contract_jh(const DenseJacobian& a, const DenseHessian& h,
                                FmaCounter& ctr) {
  if (a.cols() != h.out()) {
    throw ContractError("contract_jh: inner dimensions do not match");
  }
  DenseHessian r(a.rows(), h.in());
  for (int d = 0; d < a.rows(); ++d) {
    for (int b1 = 0; b1 < h.in(); ++b1) {
      for (int b2 = 0; b2 < h.in(); ++b2) {
        double acc = 0.0;
        for (int g = 0; g < a.cols(); ++g) {
          acc += a.at(d, g) * h.at(g, b1, b2);
          ++ctr.count;
        }
        r.at(d, b1, b2) = acc;
      }
    }
  }
  return r;
}

namespace detail {

/// Congruence transform accumulated into `acc`: two successive single-index
/// contractions. Stage one contracts the trailing index with B
/// (h.out * h.in^2 * b.cols fmas), stage two the middle index
/// (h.out * h.in * b.cols^2 fmas), accumulating into acc so the tensor
/// addition is fused into the multiply-adds.
inline void contract_hjj_into(const DenseHessian& h, const DenseJacobian& b,
                              DenseHessian& acc, FmaCounter& ctr) {
  if (h.in() != b.rows()) {
    throw ContractError("contract_hjj: inner dimensions do not match");
  }
  if (acc.out() != h.out() || acc.in() != b.cols()) {
    throw ContractError("contract_hjj: accumulator has wrong shape");
  }
  // T[d][b1][a2] = sum_{b2} h[d][b1][b2] * b[b2][a2]
  std::vector<double> t(
      static_cast<std::size_t>(h.out()) * h.in() * b.cols(), 0.0);
  const auto t_at = [&t, &h, &b](int d, int b1, int a2) -> double& {
    return t[(static_cast<std::size_t>(d) * h.in() + b1) * b.cols() + a2];
  };
  for (int d = 0; d < h.out(); ++d) {
    for (int b1 = 0; b1 < h.in(); ++b1) {
      for (int a2 = 0; a2 < b.cols(); ++a2) {
        double accum = 0.0;
        for (int b2 = 0; b2 < h.in(); ++b2) {
          accum += h.at(d, b1, b2) * b.at(b2, a2);
          ++ctr.count;
        }
        t_at(d, b1, a2) = accum;
      }
    }
  }
  // acc[d][a1][a2] += sum_{b1} t[d][b1][a2] * b[b1][a1]
  for (int d = 0; d < h.out(); ++d) {
    for (int a1 = 0; a1 < b.cols(); ++a1) {
      for (int a2 = 0; a2 < b.cols(); ++a2) {
        double accum = acc.at(d, a1, a2);
        for (int b1 = 0; b1 < h.in(); ++b1) {
          accum += t_at(d, b1, a2) * b.at(b1, a1);
          ++ctr.count;
        }
        acc.at(d, a1, a2) = accum;
      }
    }
  }
}

}  // namespace detail

/// Jacobian applied to both trailing tensor indices (congruence transform):
/// r[d][a1][a2] = sum_{b1,b2} h[d][b1][b2] * b[b1][a1] * b[b2][a2],
/// executed as two successive single-index contractions for a total of
/// h.out * h.in * b.cols * (h.in + b.cols) multiply-adds.
inline DenseHessian contract_hjj(const DenseHessian& h, const DenseJacobian& b,
                                 FmaCounter& ctr) {
  DenseHessian r(h.out(), b.cols());
  detail::contract_hjj_into(h, b, r, ctr);
  return r;
}

struct ExecutionResult {
  DenseHessian hessian;   // full-chain Hessian n_q x n_0 x n_0
  DenseJacobian jacobian; // full-chain Jacobian n_q x n_0 (uncounted by-product)
  FmaCounter fma;
};

namespace detail {

// The *_of_subtree helpers return a reference either into the elemental set
// (leaves, no copy) or into the caller-provided storage (computed results).

inline const DenseJacobian& jacobian_of_subtree(const ElementalSet& elems,
                                                const Plan& plan, int id,
                                                FmaCounter& ctr,
                                                DenseJacobian& storage) {
  const Plan::Node& n = plan.node(id);
  if (n.is_leaf()) return elems.jacobians[static_cast<std::size_t>(n.lo)];
  DenseJacobian up_storage;
  DenseJacobian lw_storage;
  const DenseJacobian& up =
      jacobian_of_subtree(elems, plan, n.upper, ctr, up_storage);
  const DenseJacobian& lw =
      jacobian_of_subtree(elems, plan, n.lower, ctr, lw_storage);
  storage = contract_jj(up, lw, ctr);
  return storage;
}

inline const DenseHessian& hessian_of_subtree(const ElementalSet& elems,
                                              const Plan& plan, int id,
                                              FmaCounter& ctr,
                                              DenseHessian& storage) {
  const Plan::Node& n = plan.node(id);
  if (n.is_leaf()) return elems.hessians[static_cast<std::size_t>(n.lo)];
  DenseHessian up_hess_storage;
  DenseHessian lw_hess_storage;
  const DenseHessian& hess_up =
      hessian_of_subtree(elems, plan, n.upper, ctr, up_hess_storage);
  const DenseHessian& hess_lw =
      hessian_of_subtree(elems, plan, n.lower, ctr, lw_hess_storage);
  // Operand Jacobians are accumulated along this node's own subtrees and
  // recomputed per node; shared subproducts are deliberately not cached so
  // the counter reflects the fixed-plan cost model exactly.
  DenseJacobian up_jac_storage;
  DenseJacobian lw_jac_storage;
  const DenseJacobian& jac_up =
      jacobian_of_subtree(elems, plan, n.upper, ctr, up_jac_storage);
  const DenseJacobian& jac_lw =
      jacobian_of_subtree(elems, plan, n.lower, ctr, lw_jac_storage);
  storage = contract_jh(jac_up, hess_lw, ctr);
  contract_hjj_into(hess_up, jac_lw, storage, ctr);
  return storage;
}

}  // namespace detail

/// Evaluates the full-chain Hessian by executing the plan's split tree on
/// the given elemental derivatives. The counter equals
/// plan_cost(spec, plan) exactly. The full-chain Jacobian is returned as a
/// by-product; its final product chain is outside the Hessian cost model and
/// does not contribute to the counter.
inline ExecutionResult execute_plan(const ChainSpec& spec,
                                    const ElementalSet& elems,
                                    const Plan& plan) {
  elems.require_conforming(spec);
  if (plan.q() != spec.length()) {
    throw ContractError("execute_plan: plan does not match spec");
  }
  ExecutionResult out;
  DenseHessian hess_storage;
  const DenseHessian& hess = detail::hessian_of_subtree(
      elems, plan, plan.root_id(), out.fma, hess_storage);
  out.hessian = (&hess == &hess_storage) ? std::move(hess_storage) : hess;
  FmaCounter scratch;
  DenseJacobian jac_storage;
  const DenseJacobian& jac = detail::jacobian_of_subtree(
      elems, plan, plan.root_id(), scratch, jac_storage);
  out.jacobian = (&jac == &jac_storage) ? std::move(jac_storage) : jac;
  return out;
}

/// Direct q-term accumulation of the full-chain Hessian: all suffix and
/// prefix Jacobian products are formed by simple sequential multiplication,
/// then the q terms suffix_j * H_j * (prefix_{j-1} (x) prefix_{j-1}) are
/// summed. Independent numerical oracle; its operation count is not modeled.
inline DenseHessian accumulate_direct(const ChainSpec& spec,
                                      const ElementalSet& elems) {
  elems.require_conforming(spec);
  const int q = spec.length();
  FmaCounter scratch;

  // suffix[e]: Jacobian of elementals e..q-1 as a matrix n_q x n_e.
  std::vector<DenseJacobian> suffix(static_cast<std::size_t>(q) + 1);
  suffix[static_cast<std::size_t>(q)] = DenseJacobian::identity(spec.dim(q));
  for (int e = q - 1; e >= 0; --e) {
    suffix[static_cast<std::size_t>(e)] =
        contract_jj(suffix[static_cast<std::size_t>(e + 1)],
                    elems.jacobians[static_cast<std::size_t>(e)], scratch);
  }
  // prefix[e]: Jacobian of elementals 0..e-1 as a matrix n_e x n_0.
  std::vector<DenseJacobian> prefix(static_cast<std::size_t>(q) + 1);
  prefix[0] = DenseJacobian::identity(spec.dim(0));
  for (int e = 1; e <= q; ++e) {
    prefix[static_cast<std::size_t>(e)] =
        contract_jj(elems.jacobians[static_cast<std::size_t>(e - 1)],
                    prefix[static_cast<std::size_t>(e - 1)], scratch);
  }

  DenseHessian total(spec.dim(q), spec.dim(0));
  for (int e = 0; e < q; ++e) {
    const DenseHessian lifted =
        contract_jh(suffix[static_cast<std::size_t>(e + 1)],
                    elems.hessians[static_cast<std::size_t>(e)], scratch);
    detail::contract_hjj_into(lifted, prefix[static_cast<std::size_t>(e)],
                              total, scratch);
  }
  return total;
}

inline double frobenius_norm(const std::vector<double>& entries) {
  double s = 0.0;
  for (double v : entries) s += v * v;
  return std::sqrt(s);
}

/// |a - b|_F / max(|a|_F, |b|_F); 0 when both operands are zero.
inline double relative_frobenius_distance(const DenseHessian& a,
                                          const DenseHessian& b) {
  if (a.out() != b.out() || a.in() != b.in()) {
    throw ContractError("relative_frobenius_distance: shape mismatch");
  }
  double diff = 0.0;
  for (std::size_t i = 0; i < a.entries().size(); ++i) {
    const double d = a.entries()[i] - b.entries()[i];
    diff += d * d;
  }
  const double denom =
      std::max(frobenius_norm(a.entries()), frobenius_norm(b.entries()));
  if (denom == 0.0) return 0.0;
  return std::sqrt(diff) / denom;
}

/// Largest |h[d][b1][b2] - h[d][b2][b1]| over all slices.
inline double max_slice_asymmetry(const DenseHessian& h) {
  double worst = 0.0;
  for (int d = 0; d < h.out(); ++d) {
    for (int b1 = 0; b1 < h.in(); ++b1) {
      for (int b2 = b1 + 1; b2 < h.in(); ++b2) {
        worst = std::max(worst, std::abs(h.at(d, b1, b2) - h.at(d, b2, b1)));
      }
    }
  }
  return worst;
}

/// FNV-1a hash over the entries rounded to a 1e-9 grid (plus the shape), so
/// equal results hash equal across runs regardless of sub-nano noise.
inline std::uint64_t entry_digest(const DenseHessian& h) {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  const auto mix = [&hash](std::uint64_t v) {
    for (int byte = 0; byte < 8; ++byte) {
      hash ^= (v >> (8 * byte)) & 0xffull;
      hash *= 0x100000001b3ull;
    }
  };
  mix(static_cast<std::uint64_t>(h.out()));
  mix(static_cast<std::uint64_t>(h.in()));
  for (double v : h.entries()) {
    const double scaled = v * 1e9;
    const double clamped = std::clamp(scaled, -9.0e18, 9.0e18);
    mix(static_cast<std::uint64_t>(static_cast<std::int64_t>(
        std::llround(clamped))));
  }
  return hash;
}

}  // namespace hcb
