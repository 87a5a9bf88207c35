#include "matspace/structure.hpp"

#include <algorithm>

namespace matspace {

namespace {

Subspace annihilated_by(const Subspace& rows) {
  return Subspace::span(rows.field(), rows.ambient(), kernel(rows.basis()));
}

void absorb(Subspace& acc, const Elem* data, std::size_t count, std::size_t len) {
  for (std::size_t k = 0; k < count; ++k) {
    std::span<const Elem> v(data + k * len, len);
    if (acc.contains(v)) continue;
    Vec w(v.begin(), v.end());
    acc = acc.sum(Subspace::span(acc.field(), len, std::vector<Vec>{w}));
  }
}

// Columns: the vectors of `first`, then the earliest standard vectors
// completing them to a basis.
Matrix completed_basis(const Field& f, std::size_t n, const std::vector<Vec>& first, bool first_goes_last) {
  Subspace s = Subspace::span(f, n, first);
  std::vector<Vec> fill = s.standard_complement();
  std::vector<Vec> cols;
  if (first_goes_last) {
    cols = fill;
    cols.insert(cols.end(), first.begin(), first.end());
  } else {
    cols = first;
    cols.insert(cols.end(), fill.begin(), fill.end());
  }
  return Matrix::from_col_vectors(f, n, cols);
}

Matrix embed(const Matrix& local, std::size_t size, std::size_t at) {
  Matrix e = Matrix::identity(local.field(), size);
  for (std::size_t i = 0; i < local.rows(); ++i)
    for (std::size_t j = 0; j < local.cols(); ++j) e.set(at + i, at + j, local(i, j));
  return e;
}

RunOptions exact_of(const RunOptions& opts) {
  RunOptions e = opts;
  e.mode = ExactMode{};
  return e;
}

}  // namespace

PrimitivityReport primitivity_report(const MatrixSpace& space, const RunOptions& opts) {
  const Field& f = space.field();
  const std::size_t m = space.rows(), n = space.cols(), d = space.dim();

  Matrix stacked(f, d * m, n);
  Matrix side(f, m, d * n);
  for (std::size_t t = 0; t < d; ++t) {
    Matrix b = space.basis_element(t);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        stacked.set(t * m + i, j, b(i, j));
        side.set(i, t * n + j, b(i, j));
      }
  }
  PrimitivityReport rep{false, false, false, false, false, Subspace(f, m), Subspace(f, n),
                        Subspace::span(f, n, kernel(stacked)), Subspace::column_space(side), false};
  rep.nondegenerate = rep.common_kernel.is_zero() && rep.image_span.is_full();

  RegularStream stream(space, opts);
  Subspace lefts(f, m);
  KernelPair kp;
  stream.for_each([&](std::uint64_t, const Matrix& a) {
    kernel_pair(f, a.entries(), m, n, kp);
    absorb(lefts, kp.left.data(), kp.left_dim, m);
    absorb(rep.kernel_span, kp.kernel.data(), kp.kernel_dim, n);
    return !(lefts.is_full() && rep.kernel_span.is_full());
  });
  // The intersection of the images is what every left kernel annihilates.
  rep.common_image = annihilated_by(lefts);
  rep.row_primitive = rep.common_image.is_zero();
  rep.column_primitive = rep.kernel_span.is_full();
  rep.pre_primitive = rep.row_primitive && rep.column_primitive;
  rep.primitive = rep.pre_primitive && rep.nondegenerate;
  rep.exact = stream.exact() || (stream.rank().certified && rep.pre_primitive);
  return rep;
}

std::string verify_decomposition(const MatrixSpace& space, const Decomposition& d, const RunOptions& opts) {
  const std::size_t m = space.rows(), n = space.cols();
  RunOptions exact = exact_of(opts);
  if (d.p + d.q >= std::min(m, n)) return "p + q is not below min(m, n)";
  if (d.r > m - d.p || d.s > n - d.q) return "primitive block does not fit";
  if (!(d.canonical == transform(space, d.g, d.h))) return "canonical space is not g A h^{-1}";
  for (const auto& b : d.canonical.basis())
    for (std::size_t i = d.p; i < m; ++i)
      for (std::size_t j = d.q; j < n; ++j) {
        bool in_block = i < d.p + d.r && j < d.q + d.s;
        if (!in_block && b(i, j) != 0) return "entry outside the canonical pattern is nonzero";
      }
  if (!(d.primitive_part == block_space(d.canonical, d.p, d.q, d.r, d.s))) return "primitive part is not the block";
  std::size_t rk = space_rank(space, exact).rank;
  std::size_t rk_p = space_rank(d.primitive_part, exact).rank;
  if (rk != rk_p + d.p + d.q) return "rank identity fails";
  if (!primitivity_report(d.primitive_part, exact).primitive) return "primitive part is not primitive";
  return {};
}

Decomposition decompose(const MatrixSpace& space, const RunOptions& opts) {
  const Field& f = space.field();
  const std::size_t m = space.rows(), n = space.cols();
  RunOptions exact = exact_of(opts);
  const std::size_t rank = space_rank(space, exact).rank;
  if (rank == std::min(m, n)) throw std::invalid_argument("decompose: the space is not singular");

  Matrix g = Matrix::identity(f, m);
  Matrix h_inv = Matrix::identity(f, n);
  const Matrix id_m = g, id_n = h_inv;
  MatrixSpace cur = space;
  std::size_t p = 0, q = 0, row_end = m, col_end = n;

  auto change_rows = [&](const Matrix& local) {
    Matrix e = embed(local, m, p);
    g = e * g;
    cur = transform_with_inverse(cur, e, id_n);
  };
  auto change_cols = [&](const Matrix& local) {
    Matrix e = embed(local, n, q);
    h_inv = h_inv * e;
    cur = transform_with_inverse(cur, id_m, e);
  };

  for (std::size_t step = 0;; ++step) {
    if (step > 4 * (m + n) + 4) throw DecompositionDefect("decompose: no progress");
    const std::size_t rows = row_end - p, cols = col_end - q;
    if (rows == 0 || cols == 0) {
      row_end = p;
      col_end = q;
      break;
    }
    MatrixSpace window = block_space(cur, p, q, rows, cols);
    PrimitivityReport rep = primitivity_report(window, exact);
    if (!rep.common_kernel.is_zero()) {
      change_cols(completed_basis(f, cols, rep.common_kernel.basis_vectors(), true));
      col_end -= rep.common_kernel.dim();
      continue;
    }
    if (!rep.image_span.is_full()) {
      auto s = inverse(completed_basis(f, rows, rep.image_span.basis_vectors(), false));
      change_rows(*s);
      row_end = p + rep.image_span.dim();
      continue;
    }
    if (!rep.common_image.is_zero()) {
      auto s = inverse(completed_basis(f, rows, rep.common_image.basis_vectors(), false));
      change_rows(*s);
      p += rep.common_image.dim();
      continue;
    }
    if (!rep.kernel_span.is_full()) {
      change_cols(completed_basis(f, cols, rep.kernel_span.basis_vectors(), true));
      q += cols - rep.kernel_span.dim();
      continue;
    }
    break;
  }

  const std::size_t r = row_end - p, s = col_end - q;
  auto h = inverse(h_inv);
  Decomposition d{g, *h, p, q, r, s, block_space(cur, p, q, r, s), cur, rank, 0};
  d.primitive_rank = space_rank(d.primitive_part, exact).rank;
  if (auto err = verify_decomposition(space, d, exact); !err.empty()) throw DecompositionDefect("decompose: " + err);
  return d;
}

SplitReport split_report(const MatrixSpace& canonical, std::size_t p, std::size_t q) {
  const std::size_t m = canonical.rows(), n = canonical.cols();
  if (p > m || q > n) throw std::invalid_argument("split_report: (p, q) outside the ambient shape");
  SplitReport out{mask_space(canonical, [&](std::size_t i, std::size_t j) { return i < p || j < q; }),
                  mask_space(canonical, [&](std::size_t i, std::size_t j) { return i >= p && j >= q; }), false,
                  false};
  out.cond_compression_full =
      out.compression_part == compression_space(CompressionKind::standard, p, q, m, n, canonical.field());
  out.cond_direct = out.compression_part.dim() + out.complement_part.dim() == canonical.dim() &&
                    canonical.contains(out.compression_part) && canonical.contains(out.complement_part);
  return out;
}

CriticalityVerdict decide_critical(const MatrixSpace& space, const RunOptions& opts) {
  if (field_hypothesis(space.field(), space.rows(), space.cols())) return is_rank_critical(space, opts);
  return oracle_is_rank_critical(space, opts);
}

namespace {

DecompositionCheck start_check(const MatrixSpace& space, const RunOptions& opts) {
  Decomposition d = decompose(space, opts);
  SplitReport split = split_report(d.canonical, d.p, d.q);
  DecompositionCheck c{std::move(d), std::move(split)};
  c.field_hypothesis_ok = field_hypothesis(space.field(), space.rows(), space.cols());
  return c;
}

void finish_check(DecompositionCheck& c) {
  c.conditions = c.split.cond_compression_full && c.cond_primitive_part && c.split.cond_direct;
  c.sides_match = c.conditions == c.direct_side;
}

}  // namespace

DecompositionCheck check_decomposition_critical(const MatrixSpace& space, const RunOptions& opts) {
  DecompositionCheck c = start_check(space, opts);
  CriticalityVerdict pv = decide_critical(c.decomposition.primitive_part, opts);
  c.cond_primitive_part = pv.verdict == Verdict::critical;
  c.primitive_method = pv.method;
  CriticalityVerdict sv = decide_critical(space, opts);
  c.direct_side = sv.verdict == Verdict::critical;
  c.space_method = sv.method;
  finish_check(c);
  return c;
}

DecompositionCheck check_decomposition_rnd(const MatrixSpace& space, const RunOptions& opts) {
  DecompositionCheck c = start_check(space, opts);
  const MatrixSpace& prim = c.decomposition.primitive_part;
  c.cond_primitive_part = rnd(prim, opts).space == prim;
  c.direct_side = rnd(space, opts).space == space;
  finish_check(c);
  return c;
}

SumCheck check_sum_theorem(const MatrixSpace& a1, const MatrixSpace& a2, const RunOptions& opts, bool force) {
  if (!(a1.field() == a2.field())) throw ModulusMismatch("check_sum_theorem: factors over different fields");
  MatrixSpace sum = direct_sum(a1, a2);
  if (!field_hypothesis(sum.field(), sum.rows(), sum.cols()) && !force)
    throw HypothesisViolation("field too small for the direct sum: p = " + std::to_string(sum.field().modulus()) +
                              " < " + std::to_string(2 * std::min(sum.rows(), sum.cols())));
  for (const auto* factor : {&a1, &a2})
    if (decide_critical(*factor, opts).verdict != Verdict::critical)
      throw std::invalid_argument("check_sum_theorem: both factors must be rank-critical");

  SumCheck out{primitivity_report(a1, opts), primitivity_report(a2, opts), sum, {}, false, false, std::nullopt};
  out.verdict = is_rank_critical(sum, opts, force);
  out.both_primitive = out.first.primitive && out.second.primitive;
  out.holds = out.both_primitive == (out.verdict.verdict == Verdict::critical);
  if (out.verdict.rnd) {
    const std::size_t m1 = a1.rows(), n1 = a1.cols();
    auto off = mask_space(*out.verdict.rnd, [&](std::size_t i, std::size_t j) { return (i < m1) != (j < n1); });
    out.rnd_block_diagonal = off.is_zero();
  }
  return out;
}

}  // namespace matspace
