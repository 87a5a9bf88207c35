#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "matspace/matrix_space.hpp"

namespace matspace {

/// W_0 = 0, W_{i+1} = space(A^{-1}(W_i)) inside GF(p)^m, up to the first
/// repeat: chain holds W_0 < ... < W_l and W_{l+1} == W_l was checked.
struct WongSequence {
  std::vector<Subspace> chain;
  std::size_t stabilization = 0;
  bool contained_in_image = false;
};

/// Throws std::invalid_argument when `a` is not an element of `space`.
WongSequence wong_sequence(const Matrix& a, const MatrixSpace& space);

/// V with s = dim V - dim space(V).
struct ShrunkWitness {
  Subspace v;
  std::ptrdiff_t s = 0;
};

struct ShrunkResult {
  bool has_shrunk = false;
  /// dim ker(A); the shrink amount the criterion speaks about.
  std::size_t target = 0;
  std::optional<ShrunkWitness> witness;
  /// Set when the candidate V = A^{-1}(W_l) failed re-validation.
  std::string diagnostic;
  WongSequence wong;
};

/// Whether the space has a dim(ker A)-shrunk subspace, decided by
/// W_l <= im(A). The candidate witness A^{-1}(W_l) is always re-validated.
ShrunkResult has_shrunk_subspace(const Matrix& a, const MatrixSpace& space);

struct BestShrunk {
  std::size_t s_max = 0;
  Subspace argmax;
  std::uint64_t visited = 0;
};

/// Exact max over all V <= GF(p)^n of dim V - dim space(V); ties go to the
/// first subspace in enumeration order.
BestShrunk best_shrunk_exhaustive(const MatrixSpace& space, std::uint64_t cap = kDefaultCap);

/// Facts about one matrix A reused across many pair checks.
class PairContext {
 public:
  explicit PairContext(const Matrix& a);

  const Matrix& matrix() const noexcept { return a_; }
  const Subspace& kernel() const noexcept { return ker_; }
  const Subspace& image() const noexcept { return im_; }

  /// B ker(A) <= im(A).
  bool direction_condition(const Matrix& b) const;

  /// B (A^{-1} B)^k ker(A) <= im(A) for k = 0..m, stopping early once the
  /// chain U_0 = ker A, U_{k+1} = A^{-1}(B U_k) stops growing.
  bool neutral_condition(const Matrix& b) const;

  /// Row vectors q with q A = 0; q B v = 0 for v in ker A encodes the
  /// direction condition linearly in B.
  const std::vector<Vec>& left_kernel() const noexcept { return lker_; }

 private:
  Matrix a_;
  Subspace ker_;
  Subspace im_;
  std::vector<Vec> lker_;
};

/// rns_pair_condition(B, A).
bool rns_pair_condition(const Matrix& b, const Matrix& a);

}  // namespace matspace
