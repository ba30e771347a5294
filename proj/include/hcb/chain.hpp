#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hcb {

/// Count of scalar fused multiply-add operations. All cost accounting is
/// exact integer arithmetic; additions and multiplications are
/// overflow-checked (long chains with large dimensions exceed 32 bits).
using FmaCount = std::uint64_t;

/// A documented precondition was violated by the caller.
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Input exceeds a hard size guard of an exhaustive-search routine.
class GuardError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline FmaCount checked_add(FmaCount a, FmaCount b) {
  FmaCount r = 0;
  if (__builtin_add_overflow(a, b, &r)) {
    throw std::overflow_error("fma count overflow in addition");
  }
  return r;
}

inline FmaCount checked_mul(FmaCount a, FmaCount b) {
  FmaCount r = 0;
  if (__builtin_mul_overflow(a, b, &r)) {
    throw std::overflow_error("fma count overflow in multiplication");
  }
  return r;
}

inline FmaCount checked_mul(FmaCount a, FmaCount b, FmaCount c) {
  return checked_mul(checked_mul(a, b), c);
}

}  // namespace detail

/// Dimension sequence n_0..n_q of a layered function F = F_q o ... o F_1.
///
/// Elemental F_i (1-based, i = 1..q) maps R^{n_{i-1}} -> R^{n_i}; its
/// Jacobian has shape n_i x n_{i-1} and its Hessian n_i x n_{i-1} x n_{i-1}.
/// Public interfaces that name a single elemental use 0-based indices
/// (elemental e = F_{e+1}); the cost-model functions below take the 1-based
/// layer indices i > j > k that bound a subchain split.
class ChainSpec {
 public:
  explicit ChainSpec(std::vector<int> dims) : dims_(std::move(dims)) {
    if (dims_.size() < 2) {
      throw ContractError("ChainSpec: need at least two dimensions (q >= 1)");
    }
    for (std::size_t i = 0; i < dims_.size(); ++i) {
      if (dims_[i] < 1) {
        throw ContractError("ChainSpec: dimension n_" + std::to_string(i) +
                            " must be positive");
      }
    }
  }

  /// Number of elemental functions q.
  int length() const { return static_cast<int>(dims_.size()) - 1; }

  /// n_i for 0 <= i <= q.
  int dim(int i) const {
    if (i < 0 || i >= static_cast<int>(dims_.size())) {
      throw ContractError("ChainSpec::dim: index out of range");
    }
    return dims_[static_cast<std::size_t>(i)];
  }

  /// Output dimension n_{e+1} of 0-based elemental e.
  int rows(int elemental) const { return dim(elemental + 1); }
  /// Input dimension n_e of 0-based elemental e.
  int cols(int elemental) const { return dim(elemental); }

  std::span<const int> dims() const { return dims_; }

  bool operator==(const ChainSpec& other) const = default;

 private:
  std::vector<int> dims_;
};

/// Contiguous subchain of 0-based elementals lo..hi (inclusive), i.e. the
/// composition F_{hi+1} o ... o F_{lo+1}. Its Jacobian has shape
/// n_{hi+1} x n_lo and its Hessian n_{hi+1} x n_lo x n_lo.
struct SubchainId {
  int hi = 0;
  int lo = 0;

  int length() const { return hi - lo + 1; }
  int out_dim(const ChainSpec& spec) const { return spec.dim(hi + 1); }
  int in_dim(const ChainSpec& spec) const { return spec.dim(lo); }

  bool valid(const ChainSpec& spec) const {
    return 0 <= lo && lo <= hi && hi <= spec.length() - 1;
  }

  bool operator==(const SubchainId&) const = default;
};

namespace detail {

inline void require_split_indices(const ChainSpec& spec, int i, int j, int k,
                                  const char* what) {
  if (!(0 <= k && k < j && j < i && i <= spec.length())) {
    throw ContractError(std::string(what) +
                        ": indices must satisfy 0 <= k < j < i <= q");
  }
}

}  // namespace detail

/// FMA count of the dense matrix product of the subchain Jacobians split at
/// layer j: an (n_i x n_j) times (n_j x n_k) product, n_i * n_j * n_k.
inline FmaCount fma_jac_product(const ChainSpec& spec, int i, int j, int k) {
  detail::require_split_indices(spec, i, j, k, "fma_jac_product");
  return detail::checked_mul(static_cast<FmaCount>(spec.dim(i)),
                             static_cast<FmaCount>(spec.dim(j)),
                             static_cast<FmaCount>(spec.dim(k)));
}

/// FMA count of applying an (n_i x n_j) Jacobian to the leading index of an
/// (n_j x n_k x n_k) Hessian: n_i * n_j * n_k^2.
inline FmaCount fma_jac_hess_product(const ChainSpec& spec, int i, int j,
                                     int k) {
  detail::require_split_indices(spec, i, j, k, "fma_jac_hess_product");
  const auto ni = static_cast<FmaCount>(spec.dim(i));
  const auto nj = static_cast<FmaCount>(spec.dim(j));
  const auto nk = static_cast<FmaCount>(spec.dim(k));
  return detail::checked_mul(detail::checked_mul(ni, nj),
                             detail::checked_mul(nk, nk));
}

/// FMA count of applying an (n_j x n_k) Jacobian to both trailing indices of
/// an (n_i x n_j x n_j) Hessian, executed as two successive single-index
/// contractions: n_i * n_j^2 * n_k + n_i * n_j * n_k^2.
inline FmaCount fma_hess_congruence(const ChainSpec& spec, int i, int j,
                                    int k) {
  detail::require_split_indices(spec, i, j, k, "fma_hess_congruence");
  const auto ni = static_cast<FmaCount>(spec.dim(i));
  const auto nj = static_cast<FmaCount>(spec.dim(j));
  const auto nk = static_cast<FmaCount>(spec.dim(k));
  return detail::checked_mul(detail::checked_mul(ni, nj, nk),
                             detail::checked_add(nj, nk));
}

/// Total FMA count of combining the Hessians of the two parts of a subchain
/// split at layer j (k < j < i):
///
///   H_{[i,k)} = J_{[i,j)} * H_{[j,k)}  +  H_{[i,j)} * J_{[j,k)} (x) J_{[j,k)}
///
/// which is n_i*n_j*n_k^2 + n_i*n_j*n_k*(n_j + n_k) = n_i*n_j*n_k*(n_j+2n_k).
/// The elementwise addition of the two result tensors is fused into the
/// multiply-adds and carries no separate cost.
inline FmaCount fma_hess_combine(const ChainSpec& spec, int i, int j, int k) {
  detail::require_split_indices(spec, i, j, k, "fma_hess_combine");
  return detail::checked_add(fma_jac_hess_product(spec, i, j, k),
                             fma_hess_congruence(spec, i, j, k));
}

}  // namespace hcb
