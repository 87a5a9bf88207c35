#include "matspace/matrix.hpp"

#include <algorithm>
#include <string>

namespace matspace {

namespace {

void require_same(const Matrix& a, const Matrix& b, const char* what) {
  if (!(a.field() == b.field())) throw ModulusMismatch(std::string(what) + ": modulus mismatch");
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionMismatch(std::string(what) + ": shape mismatch");
}

}  // namespace

Matrix::Matrix(Field f, std::size_t rows, std::size_t cols, std::span<const Elem> entries)
    : field_(f), rows_(rows), cols_(cols), data_(entries.begin(), entries.end()) {
  if (data_.size() != rows * cols) throw DimensionMismatch("matrix entry count does not match shape");
  for (auto& x : data_) x = x % f.modulus();
}

Matrix Matrix::from_rows(Field f, std::initializer_list<std::initializer_list<std::int64_t>> rows) {
  std::size_t m = rows.size();
  std::size_t n = m ? rows.begin()->size() : 0;
  Matrix out(f, m, n);
  std::size_t i = 0;
  for (const auto& r : rows) {
    if (r.size() != n) throw DimensionMismatch("ragged matrix literal");
    std::size_t j = 0;
    for (auto v : r) out.set(i, j++, f.reduce(v));
    ++i;
  }
  return out;
}

Matrix Matrix::identity(Field f, std::size_t n) {
  Matrix out(f, n, n);
  for (std::size_t i = 0; i < n; ++i) out.set(i, i, 1);
  return out;
}

Matrix Matrix::unit(Field f, std::size_t rows, std::size_t cols, std::size_t i, std::size_t j) {
  Matrix out(f, rows, cols);
  out.set(i, j, 1);
  return out;
}

Matrix Matrix::from_row_vectors(Field f, std::size_t cols, std::span<const Vec> vs) {
  Matrix out(f, vs.size(), cols);
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (vs[i].size() != cols) throw DimensionMismatch("row vector length mismatch");
    std::copy(vs[i].begin(), vs[i].end(), out.row(i).begin());
  }
  return out;
}

Matrix Matrix::from_col_vectors(Field f, std::size_t rows, std::span<const Vec> vs) {
  Matrix out(f, rows, vs.size());
  for (std::size_t j = 0; j < vs.size(); ++j) {
    if (vs[j].size() != rows) throw DimensionMismatch("column vector length mismatch");
    for (std::size_t i = 0; i < rows; ++i) out.set(i, j, vs[j][i]);
  }
  return out;
}

Vec Matrix::col(std::size_t j) const {
  Vec out(rows_);
  for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, j);
  return out;
}

bool Matrix::is_zero() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](Elem x) { return x == 0; });
}

Matrix Matrix::transpose() const {
  Matrix out(field_, cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out.set(j, i, (*this)(i, j));
  return out;
}

Matrix Matrix::scaled(Elem c) const {
  Matrix out = *this;
  for (auto& x : out.data_) x = field_.mul(x, c);
  return out;
}

Matrix Matrix::operator+(const Matrix& o) const {
  require_same(*this, o, "matrix addition");
  Matrix out = *this;
  for (std::size_t k = 0; k < data_.size(); ++k) out.data_[k] = field_.add(data_[k], o.data_[k]);
  return out;
}

Matrix Matrix::operator-(const Matrix& o) const {
  require_same(*this, o, "matrix subtraction");
  Matrix out = *this;
  for (std::size_t k = 0; k < data_.size(); ++k) out.data_[k] = field_.sub(data_[k], o.data_[k]);
  return out;
}

Matrix Matrix::operator*(const Matrix& o) const {
  if (!(field_ == o.field_)) throw ModulusMismatch("matrix product: modulus mismatch");
  if (cols_ != o.rows_) throw DimensionMismatch("matrix product: inner dimensions differ");
  Matrix out(field_, rows_, o.cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = 0; k < cols_; ++k) {
      Elem a = (*this)(i, k);
      if (a == 0) continue;
      for (std::size_t j = 0; j < o.cols_; ++j)
        out.data_[i * o.cols_ + j] = field_.mul_add(out.data_[i * o.cols_ + j], a, o(k, j));
    }
  return out;
}

Matrix Matrix::block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
  if (r0 + nr > rows_ || c0 + nc > cols_) throw DimensionMismatch("block outside matrix");
  Matrix out(field_, nr, nc);
  for (std::size_t i = 0; i < nr; ++i)
    for (std::size_t j = 0; j < nc; ++j) out.set(i, j, (*this)(r0 + i, c0 + j));
  return out;
}

Vec mat_apply(const Matrix& a, std::span<const Elem> v) {
  if (v.size() != a.cols()) throw DimensionMismatch("mat_apply: vector length differs from column count");
  const Field& f = a.field();
  Vec out(a.rows(), 0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    Elem acc = 0;
    auto r = a.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) acc = f.mul_add(acc, r[j], v[j]);
    out[i] = acc;
  }
  return out;
}

Vec row_apply(std::span<const Elem> q, const Matrix& a) {
  if (q.size() != a.rows()) throw DimensionMismatch("row_apply: vector length differs from row count");
  const Field& f = a.field();
  Vec out(a.cols(), 0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    if (q[i] == 0) continue;
    auto r = a.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) out[j] = f.mul_add(out[j], q[i], r[j]);
  }
  return out;
}

std::size_t rref_in_place(const Field& f, std::span<Elem> data, std::size_t rows, std::size_t cols,
                          std::vector<std::size_t>* pivots) {
  std::size_t rank = 0;
  for (std::size_t c = 0; c < cols && rank < rows; ++c) {
    std::size_t piv = rank;
    while (piv < rows && data[piv * cols + c] == 0) ++piv;
    if (piv == rows) continue;
    Elem* pr = data.data() + piv * cols;
    Elem* rr = data.data() + rank * cols;
    if (piv != rank) std::swap_ranges(pr, pr + cols, rr);
    Elem s = f.inv(rr[c]);
    for (std::size_t j = c; j < cols; ++j) rr[j] = f.mul(rr[j], s);
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == rank) continue;
      Elem* row = data.data() + i * cols;
      Elem t = row[c];
      if (t == 0) continue;
      Elem nt = f.neg(t);
      for (std::size_t j = c; j < cols; ++j) row[j] = f.mul_add(row[j], nt, rr[j]);
    }
    if (pivots) pivots->push_back(c);
    ++rank;
  }
  return rank;
}

std::size_t rank_of(const Field& f, std::span<const Elem> data, std::size_t rows, std::size_t cols) {
  thread_local std::vector<Elem> scratch;
  scratch.assign(data.begin(), data.end());
  // Eliminate along the shorter side.
  bool tr = cols < rows;
  if (tr) {
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) scratch[j * rows + i] = data[i * cols + j];
    std::swap(rows, cols);
  }
  Elem* d = scratch.data();
  std::size_t rank = 0;
  for (std::size_t c = 0; c < cols && rank < rows; ++c) {
    std::size_t piv = rank;
    while (piv < rows && d[piv * cols + c] == 0) ++piv;
    if (piv == rows) continue;
    Elem* rr = d + rank * cols;
    if (piv != rank) std::swap_ranges(d + piv * cols + c, d + piv * cols + cols, rr + c);
    Elem s = f.neg(f.inv(rr[c]));
    for (std::size_t i = rank + 1; i < rows; ++i) {
      Elem* row = d + i * cols;
      if (row[c] == 0) continue;
      Elem t = f.mul(row[c], s);
      for (std::size_t j = c + 1; j < cols; ++j) row[j] = f.mul_add(row[j], t, rr[j]);
    }
    ++rank;
  }
  return rank;
}

Matrix rref(const Matrix& a, std::vector<std::size_t>* pivots) {
  Matrix out = a;
  rref_in_place(a.field(), out.entries(), out.rows(), out.cols(), pivots);
  return out;
}

std::vector<Vec> kernel_from_rref(const Matrix& r, std::span<const std::size_t> pivots) {
  const Field& f = r.field();
  std::size_t n = r.cols();
  std::vector<bool> is_pivot(n, false);
  for (auto c : pivots) is_pivot[c] = true;
  std::vector<Vec> basis;
  for (std::size_t free = 0; free < n; ++free) {
    if (is_pivot[free]) continue;
    Vec v(n, 0);
    v[free] = 1;
    for (std::size_t i = 0; i < pivots.size(); ++i) v[pivots[i]] = f.neg(r(i, free));
    basis.push_back(std::move(v));
  }
  return basis;
}

std::vector<Vec> kernel(const Matrix& a) {
  std::vector<std::size_t> piv;
  Matrix r = rref(a, &piv);
  return kernel_from_rref(r, piv);
}

MatFacts mat_decompose(const Matrix& a) {
  std::vector<std::size_t> piv;
  Matrix r = rref(a, &piv);
  auto ker = kernel_from_rref(r, piv);

  std::vector<std::size_t> tpiv;
  Matrix rt = rref(a.transpose(), &tpiv);
  std::vector<Vec> image;
  for (std::size_t i = 0; i < tpiv.size(); ++i) {
    auto row = rt.row(i);
    image.emplace_back(row.begin(), row.end());
  }
  auto lker = kernel_from_rref(rt, tpiv);
  std::size_t rank = piv.size();
  return MatFacts{rank, std::move(r), std::move(piv), std::move(ker), std::move(image), std::move(lker)};
}

std::optional<Matrix> inverse(const Matrix& a) {
  if (a.rows() != a.cols()) throw DimensionMismatch("inverse of a non-square matrix");
  std::size_t n = a.rows();
  const Field& f = a.field();
  Matrix aug(f, n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug.set(i, j, a(i, j));
    aug.set(i, n + i, 1);
  }
  std::vector<std::size_t> piv;
  rref_in_place(f, aug.entries(), n, 2 * n, &piv);
  if (piv.size() < n || (n > 0 && piv[n - 1] != n - 1)) return std::nullopt;
  return aug.block(0, n, n, n);
}

void kernel_pair(const Field& f, std::span<const Elem> a, std::size_t rows, std::size_t cols, KernelPair& out) {
  const std::size_t w = cols + rows;
  thread_local std::vector<Elem> buf;
  thread_local std::vector<std::size_t> piv;
  buf.assign(rows * w, 0);
  for (std::size_t i = 0; i < rows; ++i) {
    std::copy(a.begin() + i * cols, a.begin() + (i + 1) * cols, buf.begin() + i * w);
    buf[i * w + cols + i] = 1;
  }
  piv.clear();
  Elem* d = buf.data();
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t p = r;
    while (p < rows && d[p * w + c] == 0) ++p;
    if (p == rows) continue;
    Elem* pr = d + r * w;
    if (p != r) std::swap_ranges(d + p * w, d + p * w + w, pr);
    Elem s = f.inv(pr[c]);
    for (std::size_t j = c; j < w; ++j) pr[j] = f.mul(pr[j], s);
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r) continue;
      Elem* row = d + i * w;
      if (row[c] == 0) continue;
      Elem t = f.neg(row[c]);
      for (std::size_t j = c; j < w; ++j) row[j] = f.mul_add(row[j], t, pr[j]);
    }
    piv.push_back(c);
    ++r;
  }
  out.rank = r;
  out.pivots.assign(piv.begin(), piv.end());
  out.solve.resize(r * rows);
  for (std::size_t i = 0; i < r; ++i) std::copy(d + i * w + cols, d + i * w + w, out.solve.begin() + i * rows);
  out.left_dim = rows - r;
  out.left.resize(out.left_dim * rows);
  for (std::size_t i = r; i < rows; ++i)
    std::copy(d + i * w + cols, d + i * w + w, out.left.begin() + (i - r) * rows);
  out.kernel_dim = cols - r;
  out.kernel.assign(out.kernel_dim * cols, 0);
  std::size_t k = 0, next_piv = 0;
  for (std::size_t j = 0; j < cols; ++j) {
    if (next_piv < piv.size() && piv[next_piv] == j) {
      ++next_piv;
      continue;
    }
    Elem* v = out.kernel.data() + k * cols;
    v[j] = 1;
    for (std::size_t i = 0; i < r; ++i) v[piv[i]] = f.neg(d[i * w + j]);
    ++k;
  }
}

}  // namespace matspace
