#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "matspace/matrix.hpp"

namespace matspace {

/// A subspace of GF(p)^n stored by its reduced row-echelon basis, so two
/// subspaces are equal exactly when their bases agree entry-wise.
class Subspace {
 public:
  /// The zero subspace of GF(p)^n.
  Subspace(Field f, std::size_t ambient);

  static Subspace span(Field f, std::size_t ambient, std::span<const Vec> vectors);
  static Subspace full(Field f, std::size_t ambient);
  /// Row space of a matrix.
  static Subspace row_space(const Matrix& m);
  /// Column space of a matrix.
  static Subspace column_space(const Matrix& m);

  const Field& field() const noexcept { return basis_.field(); }
  std::size_t ambient() const noexcept { return basis_.cols(); }
  std::size_t dim() const noexcept { return basis_.rows(); }
  bool is_zero() const noexcept { return dim() == 0; }
  bool is_full() const noexcept { return dim() == ambient(); }

  /// dim x ambient, reduced row-echelon.
  const Matrix& basis() const noexcept { return basis_; }
  std::vector<Vec> basis_vectors() const;
  std::span<const std::size_t> pivots() const noexcept { return pivots_; }

  bool contains(std::span<const Elem> v) const;
  bool contains(const Subspace& other) const;

  Subspace sum(const Subspace& other) const;
  Subspace intersect(const Subspace& other) const;

  /// Rows w spanning {w : w.u = 0 for all u in this}; (ambient - dim) x ambient.
  Matrix annihilator() const;

  /// Standard basis vectors e_j (ascending j) completing this basis to the
  /// whole space: exactly the non-pivot coordinates.
  std::vector<Vec> standard_complement() const;

  bool operator==(const Subspace& o) const noexcept { return basis_ == o.basis_; }

 private:
  explicit Subspace(Matrix reduced, std::vector<std::size_t> pivots);

  Matrix basis_;
  std::vector<std::size_t> pivots_;
};

/// { v : A v in U }.
Subspace preimage(const Matrix& a, const Subspace& u);

/// { A v : v in V }.
Subspace image_of_subspace(const Matrix& a, const Subspace& v);

enum class LatticeOp { sum, intersect, contains };

/// Raised when an exhaustive enumeration would exceed its configured cap.
class CapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Number of subspaces of GF(p)^n (sum of Gaussian binomials), saturating at
/// UINT64_MAX.
std::uint64_t subspace_count(std::uint32_t p, std::size_t n);

/// Number of subspaces of GF(p)^n of dimension k, saturating.
std::uint64_t gaussian_binomial(std::uint32_t p, std::size_t n, std::size_t k);

/// Visits every subspace of GF(p)^n exactly once: by dimension, then pivot
/// set in lexicographic order, then free entries in odometer order. The
/// callback returns false to stop early. Throws CapExceeded when the total
/// count exceeds `cap`.
void enumerate_subspaces(Field f, std::size_t n, std::uint64_t cap,
                         const std::function<bool(const Subspace&)>& visit);

}  // namespace matspace
