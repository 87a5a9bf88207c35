#include "matspace/subspace.hpp"

#include <algorithm>
#include <limits>
#include <string>
#include <numeric>

namespace matspace {

namespace {

constexpr std::uint64_t kSat = std::numeric_limits<std::uint64_t>::max();

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) { return a > kSat - b ? kSat : a + b; }
std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
  if (a == 0 || b == 0) return 0;
  return a > kSat / b ? kSat : a * b;
}

}  // namespace

Subspace::Subspace(Field f, std::size_t ambient) : basis_(f, 0, ambient) {}

Subspace::Subspace(Matrix reduced, std::vector<std::size_t> pivots)
    : basis_(std::move(reduced)), pivots_(std::move(pivots)) {}

Subspace Subspace::span(Field f, std::size_t ambient, std::span<const Vec> vectors) {
  Matrix m = Matrix::from_row_vectors(f, ambient, vectors);
  std::vector<std::size_t> piv;
  std::size_t r = rref_in_place(f, m.entries(), m.rows(), m.cols(), &piv);
  return Subspace(m.block(0, 0, r, ambient), std::move(piv));
}

Subspace Subspace::full(Field f, std::size_t ambient) {
  std::vector<std::size_t> piv(ambient);
  std::iota(piv.begin(), piv.end(), 0);
  return Subspace(Matrix::identity(f, ambient), std::move(piv));
}

Subspace Subspace::row_space(const Matrix& m) {
  Matrix r = m;
  std::vector<std::size_t> piv;
  std::size_t k = rref_in_place(m.field(), r.entries(), r.rows(), r.cols(), &piv);
  return Subspace(r.block(0, 0, k, m.cols()), std::move(piv));
}

Subspace Subspace::column_space(const Matrix& m) { return row_space(m.transpose()); }

std::vector<Vec> Subspace::basis_vectors() const {
  std::vector<Vec> out;
  out.reserve(dim());
  for (std::size_t i = 0; i < dim(); ++i) {
    auto r = basis_.row(i);
    out.emplace_back(r.begin(), r.end());
  }
  return out;
}

bool Subspace::contains(std::span<const Elem> v) const {
  if (v.size() != ambient()) throw DimensionMismatch("subspace membership: ambient mismatch");
  const Field& f = field();
  Vec w(v.begin(), v.end());
  for (std::size_t i = 0; i < pivots_.size(); ++i) {
    Elem c = w[pivots_[i]];
    if (c == 0) continue;
    Elem nc = f.neg(c);
    auto r = basis_.row(i);
    for (std::size_t j = pivots_[i]; j < w.size(); ++j) w[j] = f.mul_add(w[j], nc, r[j]);
  }
  for (auto x : w)
    if (x != 0) return false;
  return true;
}

bool Subspace::contains(const Subspace& other) const {
  if (other.ambient() != ambient()) throw DimensionMismatch("subspace containment: ambient mismatch");
  if (other.dim() > dim()) return false;
  for (std::size_t i = 0; i < other.dim(); ++i)
    if (!contains(other.basis_.row(i))) return false;
  return true;
}

Subspace Subspace::sum(const Subspace& other) const {
  if (other.ambient() != ambient()) throw DimensionMismatch("subspace sum: ambient mismatch");
  if (other.dim() == 0) return *this;
  if (dim() == 0) return other;
  Matrix m(field(), dim() + other.dim(), ambient());
  for (std::size_t i = 0; i < dim(); ++i) std::copy(basis_.row(i).begin(), basis_.row(i).end(), m.row(i).begin());
  for (std::size_t i = 0; i < other.dim(); ++i)
    std::copy(other.basis_.row(i).begin(), other.basis_.row(i).end(), m.row(dim() + i).begin());
  return row_space(m);
}

Subspace Subspace::intersect(const Subspace& other) const {
  if (other.ambient() != ambient()) throw DimensionMismatch("subspace intersection: ambient mismatch");
  const Field& f = field();
  std::size_t n = ambient();
  if (dim() == 0 || other.dim() == 0) return Subspace(f, n);
  // Solve U^T a + V^T b = 0; each solution gives U^T a in the intersection.
  std::size_t du = dim();
  std::size_t dv = other.dim();
  Matrix sys(f, n, du + dv);
  for (std::size_t i = 0; i < du; ++i)
    for (std::size_t j = 0; j < n; ++j) sys.set(j, i, basis_(i, j));
  for (std::size_t i = 0; i < dv; ++i)
    for (std::size_t j = 0; j < n; ++j) sys.set(j, du + i, other.basis_(i, j));
  std::vector<Vec> out;
  for (const auto& sol : kernel(sys)) {
    Vec x(n, 0);
    for (std::size_t i = 0; i < du; ++i) {
      if (sol[i] == 0) continue;
      for (std::size_t j = 0; j < n; ++j) x[j] = f.mul_add(x[j], sol[i], basis_(i, j));
    }
    out.push_back(std::move(x));
  }
  return span(f, n, out);
}

Matrix Subspace::annihilator() const {
  auto ker = kernel_from_rref(basis_, pivots_);
  return Matrix::from_row_vectors(field(), ambient(), ker);
}

std::vector<Vec> Subspace::standard_complement() const {
  std::vector<bool> is_pivot(ambient(), false);
  for (auto c : pivots_) is_pivot[c] = true;
  std::vector<Vec> out;
  for (std::size_t j = 0; j < ambient(); ++j) {
    if (is_pivot[j]) continue;
    Vec e(ambient(), 0);
    e[j] = 1;
    out.push_back(std::move(e));
  }
  return out;
}

Subspace preimage(const Matrix& a, const Subspace& u) {
  if (u.ambient() != a.rows()) throw DimensionMismatch("preimage: subspace ambient differs from row count");
  if (u.is_full()) return Subspace::full(a.field(), a.cols());
  Matrix constraints = u.annihilator() * a;
  return Subspace::span(a.field(), a.cols(), kernel(constraints));
}

Subspace image_of_subspace(const Matrix& a, const Subspace& v) {
  if (v.ambient() != a.cols()) throw DimensionMismatch("image: subspace ambient differs from column count");
  if (v.is_zero()) return Subspace(a.field(), a.rows());
  // Rows of (A V^T)^T = V A^T span the image.
  return Subspace::row_space(v.basis() * a.transpose());
}

std::uint64_t gaussian_binomial(std::uint32_t p, std::size_t n, std::size_t k) {
  if (k > n) return 0;
  // Pascal-style recurrence [n,k] = [n-1,k-1] + p^k [n-1,k].
  std::vector<std::uint64_t> row(k + 1, 0);
  row[0] = 1;
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = std::min(i, k); j >= 1; --j) {
      std::uint64_t pk = 1;
      for (std::size_t t = 0; t < j; ++t) pk = sat_mul(pk, p);
      row[j] = sat_add(row[j - 1], sat_mul(pk, row[j]));
    }
  }
  return row[k];
}

std::uint64_t subspace_count(std::uint32_t p, std::size_t n) {
  std::uint64_t total = 0;
  for (std::size_t k = 0; k <= n; ++k) total = sat_add(total, gaussian_binomial(p, n, k));
  return total;
}

void enumerate_subspaces(Field f, std::size_t n, std::uint64_t cap,
                         const std::function<bool(const Subspace&)>& visit) {
  std::uint64_t total = subspace_count(f.modulus(), n);
  if (total > cap)
    throw CapExceeded("subspace enumeration of GF(" + std::to_string(f.modulus()) + ")^" + std::to_string(n) +
                      " needs " + std::to_string(total) + " items, cap is " + std::to_string(cap));
  const std::uint32_t p = f.modulus();
  for (std::size_t k = 0; k <= n; ++k) {
    // Pivot sets as increasing k-combinations of {0..n-1}.
    std::vector<std::size_t> piv(k);
    std::iota(piv.begin(), piv.end(), 0);
    while (true) {
      // Free slots: (row i, column c) with c > piv[i] and c not a pivot.
      std::vector<bool> is_pivot(n, false);
      for (auto c : piv) is_pivot[c] = true;
      std::vector<std::pair<std::size_t, std::size_t>> slots;
      for (std::size_t i = 0; i < k; ++i)
        for (std::size_t c = piv[i] + 1; c < n; ++c)
          if (!is_pivot[c]) slots.emplace_back(i, c);
      std::vector<Elem> digits(slots.size(), 0);
      Matrix m(f, k, n);
      for (std::size_t i = 0; i < k; ++i) m.set(i, piv[i], 1);
      while (true) {
        for (std::size_t s = 0; s < slots.size(); ++s) m.set(slots[s].first, slots[s].second, digits[s]);
        if (!visit(Subspace::row_space(m))) return;
        bool done = true;
        for (std::size_t pos = slots.size(); pos > 0; --pos) {
          if (++digits[pos - 1] < p) {
            done = false;
            break;
          }
          digits[pos - 1] = 0;
        }
        if (done) break;
      }
      // Next combination.
      std::size_t i = k;
      while (i > 0 && piv[i - 1] == n - k + (i - 1)) --i;
      if (i == 0) break;
      ++piv[i - 1];
      for (std::size_t j = i; j < k; ++j) piv[j] = piv[j - 1] + 1;
    }
  }
}

}  // namespace matspace
