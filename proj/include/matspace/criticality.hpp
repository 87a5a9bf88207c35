#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "matspace/matrix_space.hpp"

namespace matspace {

/// Raised when p < 2 min(m, n) and the caller did not force the analysis.
class HypothesisViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Sampled evidence could not settle the question either way.
class Undetermined : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline bool field_hypothesis(const Field& f, std::size_t m, std::size_t n) {
  return f.modulus() >= 2 * std::min(m, n);
}

struct RndResult {
  MatrixSpace space;
  std::uint64_t regulars_used = 0;
  Mode mode;
  /// The whole projective regular stream was used.
  bool exhaustive = false;
  /// Number of times the constraint system had to be re-solved.
  std::size_t resolves = 0;
};

/// Rank neutral directions: all B with B ker(A) <= im(A) for every regular A.
/// Sampled mode sees fewer constraints and so over-approximates.
RndResult rnd(const MatrixSpace& space, const RunOptions& opts = {});

struct RnsMembership {
  bool member = false;
  /// A sampled "true" only means no sampled regular refuted it.
  bool exact = false;
  std::uint64_t checked = 0;
  std::optional<Matrix> refuting;
};

RnsMembership rns_member(const MatrixSpace& space, const Matrix& b, const RunOptions& opts = {});

struct RnsSetOptions {
  /// Stop after this many extra members.
  std::uint64_t limit = UINT64_MAX;
  /// Run the full coset pass when the first pass finds nothing and
  /// dim RND - dim A is at most this.
  std::size_t fallback_bound = 3;
};

struct RnsSetResult {
  bool contains_strictly = false;
  /// Projective representatives of RNS \ A, in candidate order.
  std::vector<Matrix> extra_members;
  MatrixSpace rnd;
  std::size_t quotient_dim = 0;
  std::uint64_t candidates_checked = 0;
  bool fallback_used = false;
  bool truncated = false;
  bool exact = false;
};

/// RNS as A plus explicit extra members found inside RND.
RnsSetResult rns_set(const MatrixSpace& space, const RunOptions& opts = {}, const RnsSetOptions& set_opts = {});

enum class Verdict { critical, not_critical };
enum class Method { theorem_rns, oracle };

std::string to_string(Verdict v);
std::string to_string(Method m);

struct CriticalityVerdict {
  Verdict verdict = Verdict::critical;
  std::optional<Matrix> witness;
  Method method = Method::theorem_rns;
  bool field_hypothesis_ok = false;
  /// The verdict is proven, not just supported by sampling.
  bool exact = false;
  /// Whether rk(span{A, witness}) = rk(A) was confirmed by enumeration;
  /// empty when that enumeration was over the cap.
  std::optional<bool> witness_validated;
  std::size_t rank = 0;
  std::size_t rnd_dim = 0;
  /// RND of the space, kept from exact runs.
  std::optional<MatrixSpace> rnd;
  std::uint64_t candidates_checked = 0;
  /// How a sampled run reached an exact verdict.
  std::string reason;
};

/// Rank-criticality via RNS = A. Throws HypothesisViolation when
/// p < 2 min(m, n) unless `force`; sampled runs throw Undetermined when the
/// samples certify neither answer.
CriticalityVerdict is_rank_critical(const MatrixSpace& space, const RunOptions& opts = {}, bool force = false);

/// Brute force over every one-dimensional extension span{A, B}.
CriticalityVerdict oracle_is_rank_critical(const MatrixSpace& space, const RunOptions& opts = {});

/// True when rk(A + B) <= r for every A in the space, i.e. adding B keeps
/// the rank at r. Empty when p^dim exceeds the cap.
std::optional<bool> extension_keeps_rank(const MatrixSpace& space, const Matrix& b, std::size_t r,
                                         std::uint64_t cap = kDefaultCap);

/// Complement of `inner` inside `outer` (inner <= outer), as reduced rows
/// with zeros at the pivot coordinates of `inner`.
Matrix quotient_basis(const MatrixSpace& outer, const MatrixSpace& inner);

}  // namespace matspace
