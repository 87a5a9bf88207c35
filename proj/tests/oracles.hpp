#pragma once

// Brute-force reference computations for the tests. Nothing here calls the
// library's elimination routines; everything is counted or enumerated.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <set>
#include <vector>

#include "matspace/enumerate.hpp"
#include "matspace/matrix.hpp"
#include "matspace/matrix_space.hpp"
#include "matspace/subspace.hpp"

namespace matspace {

inline constexpr std::uint64_t kTestCap = 10'000'000;

inline Matrix random_test_matrix(std::uint64_t& state, const Field& f, std::size_t m, std::size_t n) {
  Matrix a(f, m, n);
  for (auto& e : a.entries()) e = static_cast<Elem>(splitmix64(state) % f.modulus());
  return a;
}

inline Subspace random_test_subspace(std::uint64_t& state, const Field& f, std::size_t n) {
  std::size_t k = splitmix64(state) % (n + 1);
  std::vector<Vec> vs;
  for (std::size_t i = 0; i < k; ++i) {
    Vec v(n);
    for (auto& e : v) e = static_cast<Elem>(splitmix64(state) % f.modulus());
    vs.push_back(v);
  }
  return Subspace::span(f, n, vs);
}

namespace oracle {

/// Every vector of GF(p)^n, in odometer order.
inline std::vector<Vec> all_vectors(std::uint32_t p, std::size_t n) {
  std::vector<Vec> out;
  Vec v(n, 0);
  while (true) {
    out.push_back(v);
    std::size_t i = n;
    while (i > 0 && v[i - 1] + 1 == p) v[--i] = 0;
    if (i == 0) break;
    ++v[i - 1];
  }
  return out;
}

/// Every element of a subspace, by running over all coefficient vectors.
inline std::vector<Vec> elements(const Subspace& s) {
  const Field& f = s.field();
  std::vector<Vec> out;
  for (const auto& c : all_vectors(f.modulus(), s.dim())) {
    Vec v(s.ambient(), 0);
    for (std::size_t i = 0; i < c.size(); ++i)
      for (std::size_t j = 0; j < v.size(); ++j) v[j] = f.add(v[j], f.mul(c[i], s.basis()(i, j)));
    out.push_back(v);
  }
  return out;
}

/// log_p of the size of a set of vectors closed under the field operations.
inline std::size_t log_size(std::uint32_t p, std::size_t count) {
  std::size_t d = 0;
  for (std::size_t c = count; c > 1; c /= p) ++d;
  return d;
}

inline Elem det(const Field& f, const std::vector<std::vector<Elem>>& a) {
  // Leibniz expansion; only used for k <= 4.
  std::size_t k = a.size();
  std::vector<std::size_t> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  Elem total = 0;
  do {
    std::size_t inversions = 0;
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = i + 1; j < k; ++j) inversions += perm[i] > perm[j];
    Elem term = 1;
    for (std::size_t i = 0; i < k; ++i) term = f.mul(term, a[i][perm[i]]);
    total = inversions % 2 ? f.sub(total, term) : f.add(total, term);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

/// Size of the largest nonvanishing minor.
inline std::size_t minor_rank(const Matrix& a) {
  const Field& f = a.field();
  std::size_t m = a.rows(), n = a.cols();
  std::size_t best = 0;
  for (std::uint32_t rmask = 1; rmask < (1u << m); ++rmask) {
    for (std::uint32_t cmask = 1; cmask < (1u << n); ++cmask) {
      std::size_t k = static_cast<std::size_t>(__builtin_popcount(rmask));
      if (k != static_cast<std::size_t>(__builtin_popcount(cmask)) || k <= best) continue;
      std::vector<std::vector<Elem>> sub;
      for (std::size_t i = 0; i < m; ++i) {
        if (!(rmask >> i & 1)) continue;
        sub.emplace_back();
        for (std::size_t j = 0; j < n; ++j)
          if (cmask >> j & 1) sub.back().push_back(a(i, j));
      }
      if (det(f, sub) != 0) best = k;
    }
  }
  return best;
}

/// Rank as log_p of the number of distinct images A x.
inline std::size_t image_rank(const Matrix& a) {
  std::set<Vec> images;
  for (const auto& x : all_vectors(a.field().modulus(), a.cols())) images.insert(mat_apply(a, x));
  return log_size(a.field().modulus(), images.size());
}

/// Number of subspaces of GF(p)^n via the Galois-number recurrence
/// G(k+1) = 2 G(k) + (p^k - 1) G(k-1).
inline std::uint64_t gaussian_total(std::uint64_t p, std::size_t n) {
  std::uint64_t prev = 1, cur = 2;  // G(0), G(1)
  if (n == 0) return 1;
  std::uint64_t pk = 1;
  for (std::size_t k = 1; k < n; ++k) {
    pk *= p;
    std::uint64_t next = 2 * cur + (pk - 1) * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

inline std::size_t intersection_dim(const Subspace& u, const Subspace& v) {
  std::size_t count = 0;
  for (const auto& x : elements(u)) count += v.contains(x);
  return log_size(u.field().modulus(), count);
}

inline Subspace preimage(const Matrix& a, const Subspace& w) {
  std::vector<Vec> hits;
  for (const auto& x : all_vectors(a.field().modulus(), a.cols()))
    if (w.contains(mat_apply(a, x))) hits.push_back(x);
  return Subspace::span(a.field(), a.cols(), hits);
}

inline Subspace image(const Matrix& a, const Subspace& v) {
  std::vector<Vec> out;
  for (const auto& x : elements(v)) out.push_back(mat_apply(a, x));
  return Subspace::span(a.field(), a.rows(), out);
}

/// Every element of a matrix space, as matrices.
inline std::vector<Matrix> all_elements(const MatrixSpace& s) {
  std::vector<Matrix> out;
  const Field& f = s.field();
  for (const auto& c : all_vectors(f.modulus(), s.dim())) {
    Matrix a(f, s.rows(), s.cols());
    for (std::size_t i = 0; i < c.size(); ++i) a = a + s.basis_element(i).scaled(c[i]);
    out.push_back(a);
  }
  return out;
}

/// Max rank over every element (not just projective representatives).
inline std::size_t space_rank(const MatrixSpace& s) {
  std::size_t best = 0;
  for (const auto& a : all_elements(s)) best = std::max(best, minor_rank(a));
  return best;
}

/// dim of the span of {A v : A in space, v in V}, from all elements of both.
inline std::size_t space_image_dim(const std::vector<Matrix>& elems, const Subspace& v) {
  std::set<Vec> images;
  std::vector<Vec> vs = elements(v);
  for (const auto& a : elems)
    for (const auto& x : vs) images.insert(mat_apply(a, x));
  std::vector<Vec> gens(images.begin(), images.end());
  return Subspace::span(v.field(), elems.front().rows(), gens).dim();
}

}  // namespace oracle
}  // namespace matspace
