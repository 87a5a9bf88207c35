#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <vector>

#include "matspace/field.hpp"

namespace matspace {

using Vec = std::vector<Elem>;

/// Dense row-major matrix over GF(p). Shape is fixed at construction; zero
/// rows or columns are allowed so that empty blocks compose cleanly.
class Matrix {
 public:
  Matrix(Field f, std::size_t rows, std::size_t cols)
      : field_(f), rows_(rows), cols_(cols), data_(rows * cols, 0) {}

  /// Entries are reduced modulo p.
  Matrix(Field f, std::size_t rows, std::size_t cols, std::span<const Elem> entries);

  /// Convenience for literals; negative values are reduced modulo p.
  static Matrix from_rows(Field f, std::initializer_list<std::initializer_list<std::int64_t>> rows);
  static Matrix identity(Field f, std::size_t n);
  /// E_ij with zero-based indices.
  static Matrix unit(Field f, std::size_t rows, std::size_t cols, std::size_t i, std::size_t j);
  /// Rows of the result are the given vectors.
  static Matrix from_row_vectors(Field f, std::size_t cols, std::span<const Vec> vs);
  /// Columns of the result are the given vectors.
  static Matrix from_col_vectors(Field f, std::size_t rows, std::span<const Vec> vs);

  const Field& field() const noexcept { return field_; }
  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }

  Elem operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }
  void set(std::size_t i, std::size_t j, Elem v) noexcept { data_[i * cols_ + j] = v; }

  std::span<const Elem> row(std::size_t i) const noexcept { return {data_.data() + i * cols_, cols_}; }
  std::span<Elem> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }
  Vec col(std::size_t j) const;
  std::span<const Elem> entries() const noexcept { return data_; }
  std::span<Elem> entries() noexcept { return data_; }

  bool is_zero() const noexcept;

  Matrix transpose() const;
  Matrix scaled(Elem c) const;
  Matrix operator+(const Matrix& o) const;
  Matrix operator-(const Matrix& o) const;
  Matrix operator*(const Matrix& o) const;

  /// Sub-block rows [r0, r0+nr) x cols [c0, c0+nc).
  Matrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const;

  bool operator==(const Matrix& o) const noexcept {
    return field_ == o.field_ && rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
  }

 private:
  Field field_;
  std::size_t rows_;
  std::size_t cols_;
  std::vector<Elem> data_;
};

/// Exact matrix-vector product; throws DimensionMismatch when |v| != cols.
Vec mat_apply(const Matrix& a, std::span<const Elem> v);

/// Row vector times matrix.
Vec row_apply(std::span<const Elem> q, const Matrix& a);

/// Rank, canonical reduced row-echelon form, and kernel/image/left-kernel
/// bases of a single matrix.
struct MatFacts {
  std::size_t rank = 0;
  Matrix rref;
  std::vector<std::size_t> pivots;
  /// Column vectors k with A k = 0, one per free column, unit at that column.
  std::vector<Vec> kernel_basis;
  /// Reduced row-echelon basis of the column space.
  std::vector<Vec> image_basis;
  /// Row vectors q with q A = 0, built the same way from A^T.
  std::vector<Vec> left_kernel_basis;
};

MatFacts mat_decompose(const Matrix& a);

/// Leftmost-pivot reduced row-echelon form. Pivot columns are appended to
/// `pivots` when it is non-null.
Matrix rref(const Matrix& a, std::vector<std::size_t>* pivots = nullptr);

/// In-place reduced row-echelon form of a rows x cols row-major buffer.
/// Returns the rank; zero rows end up at the bottom.
std::size_t rref_in_place(const Field& f, std::span<Elem> data, std::size_t rows, std::size_t cols,
                          std::vector<std::size_t>* pivots = nullptr);

/// Rank only; forward elimination on a scratch copy.
std::size_t rank_of(const Field& f, std::span<const Elem> data, std::size_t rows, std::size_t cols);
inline std::size_t rank_of(const Matrix& a) { return rank_of(a.field(), a.entries(), a.rows(), a.cols()); }

/// Kernel basis read off a reduced row-echelon form.
std::vector<Vec> kernel_from_rref(const Matrix& rref, std::span<const std::size_t> pivots);

/// Null space of a matrix, as column vectors.
std::vector<Vec> kernel(const Matrix& a);

std::optional<Matrix> inverse(const Matrix& a);

/// Kernel and left kernel from one elimination of [A | I], stored flat so
/// hot loops can reuse the buffers.
struct KernelPair {
  std::size_t rank = 0;
  std::size_t kernel_dim = 0;
  std::size_t left_dim = 0;
  /// kernel_dim x n, row i is the i-th kernel vector.
  std::vector<Elem> kernel;
  /// left_dim x m, row i is a vector q with q A = 0.
  std::vector<Elem> left;
  /// Pivot columns of the reduced form T A of A.
  std::vector<std::size_t> pivots;
  /// rank x m, the first rows of T. For w in im(A), x with x[pivots[i]] =
  /// (T w)[i] and zeros elsewhere solves A x = w.
  std::vector<Elem> solve;
};

void kernel_pair(const Field& f, std::span<const Elem> a, std::size_t rows, std::size_t cols, KernelPair& out);

}  // namespace matspace
