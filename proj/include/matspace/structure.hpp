#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "matspace/criticality.hpp"
#include "matspace/matrix_space.hpp"

namespace matspace {

/// A decomposition failed its own re-verification. Never expected; reported
/// instead of returning a wrong answer.
class DecompositionDefect : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct PrimitivityReport {
  bool nondegenerate = false;
  bool row_primitive = false;
  bool column_primitive = false;
  bool pre_primitive = false;
  bool primitive = false;
  /// Intersection of im(A) over regular A.
  Subspace common_image;
  /// Span of ker(A) over regular A.
  Subspace kernel_span;
  /// Intersection of ker(A) over the whole space.
  Subspace common_kernel;
  /// Span of im(A) over the whole space.
  Subspace image_span;
  /// All five booleans are final (exhaustive stream, or a certified sampled
  /// rank with sampling already proving both primitivity conditions).
  bool exact = false;
};

PrimitivityReport primitivity_report(const MatrixSpace& space, const RunOptions& opts = {});

/// g A h^{-1} = canonical, where every element is
///
///   [ free rows 0..p-1, all columns          ]
///   [ free cols 0..q-1 |  P  0 ]
///   [                  |  0  0 ]
///
/// with P in the primitive r x s space at rows [p, p+r), cols [q, q+s).
struct Decomposition {
  Matrix g;
  Matrix h;
  std::size_t p = 0;
  std::size_t q = 0;
  std::size_t r = 0;
  std::size_t s = 0;
  MatrixSpace primitive_part;
  MatrixSpace canonical;
  std::size_t rank = 0;
  std::size_t primitive_rank = 0;
};

/// Throws std::invalid_argument for non-singular input and
/// DecompositionDefect when the result fails re-verification.
Decomposition decompose(const MatrixSpace& space, const RunOptions& opts = {});

/// Checks the three structural invariants of a decomposition of `space`;
/// returns an empty string on success, otherwise the first failure.
std::string verify_decomposition(const MatrixSpace& space, const Decomposition& d, const RunOptions& opts = {});

struct SplitReport {
  /// Projection onto C_{p,q} along its standard complement.
  MatrixSpace compression_part;
  /// Projection onto the standard complement along C_{p,q}.
  MatrixSpace complement_part;
  bool cond_compression_full = false;
  bool cond_direct = false;
};

SplitReport split_report(const MatrixSpace& canonical, std::size_t p, std::size_t q);

struct DecompositionCheck {
  Decomposition decomposition;
  SplitReport split;
  /// Condition (2): P rank-critical, or RND(P) = P for the RND variant.
  bool cond_primitive_part = false;
  bool conditions = false;
  /// The other side: rank-criticality, or RND(A) = A.
  bool direct_side = false;
  bool sides_match = false;
  /// Whether p >= 2 min(m, n) held for the space.
  bool field_hypothesis_ok = false;
  Method primitive_method = Method::theorem_rns;
  Method space_method = Method::theorem_rns;
};

/// Conditions (1)-(3) against rank-criticality of the space. Criticality is
/// decided by the theorem when the field is large enough, else by the oracle.
DecompositionCheck check_decomposition_critical(const MatrixSpace& space, const RunOptions& opts = {});

/// Conditions (1), RND(P) = P, (3) against RND(A) = A.
DecompositionCheck check_decomposition_rnd(const MatrixSpace& space, const RunOptions& opts = {});

struct SumCheck {
  PrimitivityReport first;
  PrimitivityReport second;
  MatrixSpace sum;
  CriticalityVerdict verdict;
  bool both_primitive = false;
  bool holds = false;
  /// RND of the sum has zero off-diagonal blocks; empty when not computed.
  std::optional<bool> rnd_block_diagonal;
};

/// Both inputs must be rank-critical (checked; std::invalid_argument
/// otherwise). Throws HypothesisViolation when p < 2 min(m1+m2, n1+n2)
/// unless forced.
SumCheck check_sum_theorem(const MatrixSpace& a1, const MatrixSpace& a2, const RunOptions& opts = {},
                           bool force = false);

/// Criticality by the theorem when the field is large enough, else by the
/// oracle.
CriticalityVerdict decide_critical(const MatrixSpace& space, const RunOptions& opts);

}  // namespace matspace
