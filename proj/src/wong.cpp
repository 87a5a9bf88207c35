#include "matspace/wong.hpp"

#include <stdexcept>

namespace matspace {

WongSequence wong_sequence(const Matrix& a, const MatrixSpace& space) {
  if (a.rows() != space.rows() || a.cols() != space.cols())
    throw DimensionMismatch("wong_sequence: matrix shape differs from the space");
  if (!space.contains(a)) throw std::invalid_argument("wong_sequence: matrix is not an element of the space");
  const std::size_t m = space.rows();
  WongSequence out;
  out.chain.push_back(Subspace(space.field(), m));
  while (true) {
    Subspace next = space_image(space, preimage(a, out.chain.back()));
    if (next == out.chain.back()) break;
    if (next.dim() <= out.chain.back().dim() || !next.contains(out.chain.back()))
      throw std::logic_error("wong_sequence: chain is not strictly increasing");
    out.chain.push_back(std::move(next));
  }
  out.stabilization = out.chain.size() - 1;
  if (out.stabilization > m) throw std::logic_error("wong_sequence: stabilization index exceeds m");
  out.contained_in_image = Subspace::column_space(a).contains(out.chain.back());
  return out;
}

ShrunkResult has_shrunk_subspace(const Matrix& a, const MatrixSpace& space) {
  ShrunkResult out;
  out.wong = wong_sequence(a, space);
  out.target = a.cols() - rank_of(a);
  out.has_shrunk = out.wong.contained_in_image;
  if (!out.has_shrunk) return out;
  Subspace v = preimage(a, out.wong.chain.back());
  auto s = static_cast<std::ptrdiff_t>(v.dim()) - static_cast<std::ptrdiff_t>(space_image(space, v).dim());
  if (s >= static_cast<std::ptrdiff_t>(out.target)) {
    out.witness = ShrunkWitness{std::move(v), s};
  } else {
    out.diagnostic = "candidate A^{-1}(W_l) shrinks by " + std::to_string(s) + ", below dim ker(A) = " +
                     std::to_string(out.target);
  }
  return out;
}

BestShrunk best_shrunk_exhaustive(const MatrixSpace& space, std::uint64_t cap) {
  const std::size_t n = space.cols();
  BestShrunk best{0, Subspace(space.field(), n), 0};
  std::ptrdiff_t best_s = -1;
  enumerate_subspaces(space.field(), n, cap, [&](const Subspace& v) {
    ++best.visited;
    auto s = static_cast<std::ptrdiff_t>(v.dim()) - static_cast<std::ptrdiff_t>(space_image(space, v).dim());
    if (s > best_s) {
      best_s = s;
      best.argmax = v;
    }
    return true;
  });
  best.s_max = static_cast<std::size_t>(best_s);
  return best;
}

PairContext::PairContext(const Matrix& a)
    : a_(a), ker_(a.field(), a.cols()), im_(a.field(), a.rows()) {
  MatFacts facts = mat_decompose(a);
  ker_ = Subspace::span(a.field(), a.cols(), facts.kernel_basis);
  im_ = Subspace::span(a.field(), a.rows(), facts.image_basis);
  lker_ = std::move(facts.left_kernel_basis);
}

bool PairContext::direction_condition(const Matrix& b) const {
  if (ker_.is_zero()) return true;
  return im_.contains(image_of_subspace(b, ker_));
}

bool PairContext::neutral_condition(const Matrix& b) const {
  if (b.rows() != a_.rows() || b.cols() != a_.cols())
    throw DimensionMismatch("rns_pair_condition: shapes differ");
  if (ker_.is_zero()) return true;
  Subspace u = ker_;
  for (std::size_t k = 0; k <= a_.rows(); ++k) {
    Subspace v = image_of_subspace(b, u);
    if (!im_.contains(v)) return false;
    Subspace next = preimage(a_, v);
    if (next.dim() == u.dim()) return true;
    u = std::move(next);
  }
  return true;
}

bool rns_pair_condition(const Matrix& b, const Matrix& a) { return PairContext(a).neutral_condition(b); }

}  // namespace matspace
