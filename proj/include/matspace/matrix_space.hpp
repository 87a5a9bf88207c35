#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "matspace/enumerate.hpp"
#include "matspace/matrix.hpp"
#include "matspace/subspace.hpp"

namespace matspace {

/// Exhaustive enumeration over projective representatives.
struct ExactMode {
  bool operator==(const ExactMode&) const = default;
};

/// Uniformly random coordinate vectors drawn from a seeded generator.
struct SampledMode {
  std::uint64_t seed = 0;
  std::uint64_t trials = 256;
  bool operator==(const SampledMode&) const = default;
};

using Mode = std::variant<ExactMode, SampledMode>;

std::string describe(const Mode& mode);
inline bool is_exact(const Mode& mode) { return std::holds_alternative<ExactMode>(mode); }

inline constexpr std::uint64_t kDefaultCap = 10'000'000;

struct RunOptions {
  Mode mode = ExactMode{};
  /// Upper limit on representatives any single enumeration may visit.
  std::uint64_t cap = kDefaultCap;
  /// Worker threads for enumeration loops; results never depend on it.
  unsigned workers = 1;
};

struct RankData;

/// A linear subspace of M(m x n, GF(p)).
///
/// The basis is canonical: each matrix is flattened row-major, the flattened
/// vectors are brought to reduced row-echelon form, and the rows are folded
/// back. Equality is therefore entry-wise comparison of bases. The 0 x 0
/// ambient is allowed and has rank 0.
class MatrixSpace {
 public:
  /// The zero space.
  MatrixSpace(Field f, std::size_t m, std::size_t n);

  /// Canonical span of `matrices`; throws DimensionMismatch / ModulusMismatch
  /// on non-uniform input.
  static MatrixSpace make(Field f, std::size_t m, std::size_t n, std::span<const Matrix> matrices);
  /// Span of the rows of a (k x m*n) matrix of flattened elements.
  static MatrixSpace from_flat(Field f, std::size_t m, std::size_t n, const Matrix& flat);
  static MatrixSpace full(Field f, std::size_t m, std::size_t n);

  const Field& field() const noexcept { return flat_.field(); }
  std::size_t rows() const noexcept { return m_; }
  std::size_t cols() const noexcept { return n_; }
  std::size_t dim() const noexcept { return flat_.rows(); }
  bool is_zero() const noexcept { return dim() == 0; }

  /// Canonical basis as a dim x (m*n) reduced row-echelon matrix.
  const Matrix& flat_basis() const noexcept { return flat_; }
  std::span<const std::size_t> pivots() const noexcept { return pivots_; }
  std::vector<Matrix> basis() const;
  Matrix basis_element(std::size_t i) const;

  /// Coordinates of `b` in the canonical basis, or nullopt when b is outside.
  std::optional<Vec> coordinates(const Matrix& b) const;
  bool contains(const Matrix& b) const { return coordinates(b).has_value(); }
  bool contains(const MatrixSpace& other) const;

  /// sum_i c_i * basis_i.
  Matrix element(std::span<const Elem> coords) const;
  /// Reshapes a flattened m*n vector.
  Matrix unflatten(std::span<const Elem> flat) const;

  bool operator==(const MatrixSpace& o) const noexcept {
    return m_ == o.m_ && n_ == o.n_ && flat_ == o.flat_;
  }

  /// Shared memo of rank computations; write-once entries keyed by mode.
  std::shared_ptr<RankData> rank_cache() const { return cache_; }

 private:
  MatrixSpace(std::size_t m, std::size_t n, Matrix flat, std::vector<std::size_t> pivots);

  std::size_t m_;
  std::size_t n_;
  Matrix flat_;
  std::vector<std::size_t> pivots_;
  std::shared_ptr<RankData> cache_;
};

/// make_space.
inline MatrixSpace make_space(Field f, std::size_t m, std::size_t n, std::span<const Matrix> matrices) {
  return MatrixSpace::make(f, m, n, matrices);
}

/// member: coordinates when b lies in the space.
std::optional<Vec> member(const MatrixSpace& space, const Matrix& b);

/// span{space, extra}.
MatrixSpace span_with(const MatrixSpace& space, std::span<const Matrix> extra);
MatrixSpace span_with(const MatrixSpace& space, const Matrix& extra);

/// Result of space_rank.
struct RankResult {
  std::size_t rank = 0;
  Matrix witness;
  Mode mode;
  /// True for exhaustive enumeration, and for a sampled rank that matched the
  /// exhaustive shrunk-subspace upper bound.
  bool exact = false;
  bool certified = false;
  /// Candidates whose rank was computed.
  std::uint64_t inspected = 0;
};

/// Maximum rank over the space. Exact mode enumerates every projective
/// representative and throws CapExceeded beyond `opts.cap`. Sampled mode
/// returns the best of `trials` random elements, a lower bound that is exact
/// with probability at least 1 - (r/p)^trials, and tries to certify it
/// against rk <= n - max(dim V - dim A(V)) (and the transposed bound).
RankResult space_rank(const MatrixSpace& space, const RunOptions& opts = {});

/// Regular elements, one per projective class in exact mode.
///
/// Candidate indices are projective representative numbers (exact) or sample
/// numbers (sampled). A bitmap of regular candidates is computed once and
/// shared with the space's rank cache.
class RegularStream {
 public:
  RegularStream(const MatrixSpace& space, const RunOptions& opts);

  const MatrixSpace& space() const noexcept { return space_; }
  std::size_t target_rank() const noexcept { return rank_.rank; }
  const RankResult& rank() const noexcept { return rank_; }
  const Mode& mode() const noexcept { return rank_.mode; }
  bool exact() const noexcept { return is_exact(rank_.mode); }
  unsigned workers() const noexcept { return workers_; }

  /// Size of the candidate index range.
  std::uint64_t candidates() const noexcept { return candidates_; }
  /// Number of regular candidates.
  std::uint64_t count() const noexcept { return count_; }

  bool is_regular(std::uint64_t index) const noexcept {
    return (*bits_)[index >> 6] >> (index & 63) & 1u;
  }

  /// Rebuilds the element with a given candidate index.
  Matrix element_at(std::uint64_t index) const;

  /// Calls fn(index, element) for each regular candidate in [begin, end) in
  /// index order; stops and returns false as soon as fn returns false.
  template <class Fn>
  bool visit(std::uint64_t begin, std::uint64_t end, Fn&& fn) const;

  template <class Fn>
  bool for_each(Fn&& fn) const {
    return visit(0, candidates_, std::forward<Fn>(fn));
  }

  /// All regular elements, materialized (small spaces only).
  std::vector<Matrix> collect(std::uint64_t limit = UINT64_MAX) const;

 private:
  MatrixSpace space_;
  RankResult rank_;
  unsigned workers_;
  std::uint64_t candidates_ = 0;
  std::uint64_t count_ = 0;
  std::shared_ptr<const std::vector<std::uint64_t>> bits_;
};

/// regular_elements.
inline RegularStream regular_elements(const MatrixSpace& space, const RunOptions& opts = {}) {
  return RegularStream(space, opts);
}

/// Coordinates of sample `index` under the sampled mode's seed.
Vec sample_coords(const Field& f, std::size_t dim, std::uint64_t seed, std::uint64_t index);

template <class Fn>
bool RegularStream::visit(std::uint64_t begin, std::uint64_t end, Fn&& fn) const {
  end = std::min(end, candidates_);
  if (begin >= end) return true;
  const std::size_t m = space_.rows();
  const std::size_t n = space_.cols();
  if (space_.dim() == 0) {
    // The zero matrix is the only (and regular) element.
    return fn(std::uint64_t{0}, Matrix(space_.field(), m, n));
  }
  if (const auto* s = std::get_if<SampledMode>(&rank_.mode)) {
    for (std::uint64_t i = begin; i < end; ++i) {
      if (!is_regular(i)) continue;
      if (!fn(i, space_.element(sample_coords(space_.field(), space_.dim(), s->seed, i)))) return false;
    }
    return true;
  }
  ProjectiveWalker walk(space_.flat_basis(), begin);
  Matrix a(space_.field(), m, n);
  for (; walk.index() < end; walk.next()) {
    if (!is_regular(walk.index())) continue;
    auto v = walk.value();
    std::copy(v.begin(), v.end(), a.entries().begin());
    if (!fn(walk.index(), a)) return false;
  }
  return true;
}

/// space_image: span{A v : A in the basis, v in a basis of V}.
Subspace space_image(const MatrixSpace& space, const Subspace& v);

/// { g A h^{-1} : A in space }. Throws std::invalid_argument when g or h is
/// singular.
MatrixSpace transform(const MatrixSpace& space, const Matrix& g, const Matrix& h);

/// Same action with h^{-1} supplied directly.
MatrixSpace transform_with_inverse(const MatrixSpace& space, const Matrix& g, const Matrix& h_inv);

/// Block-diagonal sum.
MatrixSpace direct_sum(const MatrixSpace& a1, const MatrixSpace& a2);

MatrixSpace transpose_space(const MatrixSpace& space);

enum class CompressionKind { standard, complement };

/// Standard maximal compression space C_{p,q}^{m,n} (first p rows and first
/// q columns free), or its standard complement (rows >= p and cols >= q).
MatrixSpace compression_space(CompressionKind kind, std::size_t p_rows, std::size_t q_cols, std::size_t m,
                              std::size_t n, Field f);

/// Space of n x n skew-symmetric matrices with zero diagonal.
MatrixSpace skew_symmetric_space(Field f, std::size_t n);

/// Projection onto the block rows [r0, r0+nr) x cols [c0, c0+nc).
MatrixSpace block_space(const MatrixSpace& space, std::size_t r0, std::size_t c0, std::size_t nr,
                        std::size_t nc);

/// Image of the space under zeroing every entry where keep(i, j) is false.
template <class Keep>
MatrixSpace mask_space(const MatrixSpace& space, Keep&& keep) {
  Matrix flat = space.flat_basis();
  const std::size_t n = space.cols();
  for (std::size_t r = 0; r < flat.rows(); ++r)
    for (std::size_t k = 0; k < flat.cols(); ++k)
      if (!keep(k / n, k % n)) flat.set(r, k, 0);
  return MatrixSpace::from_flat(space.field(), space.rows(), space.cols(), flat);
}

/// Deterministic random space of dimension exactly d (dependent draws are
/// discarded and redrawn).
MatrixSpace random_space(std::uint64_t seed, Field f, std::size_t m, std::size_t n, std::size_t d);

/// Deterministic random matrix; entries drawn from the splitmix64 stream in
/// `state`.
Matrix random_matrix(std::uint64_t& state, Field f, std::size_t m, std::size_t n);
Matrix random_invertible(std::uint64_t& state, Field f, std::size_t n);

}  // namespace matspace
