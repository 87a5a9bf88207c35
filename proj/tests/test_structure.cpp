#include <doctest.h>

#include "matspace/structure.hpp"
#include "oracles.hpp"

using namespace matspace;

namespace {

MatrixSpace skew3(std::uint32_t p) { return skew_symmetric_space(Field(p), 3); }
MatrixSpace compression(std::size_t a, std::size_t b, std::size_t m, std::size_t n, std::uint32_t p) {
  return compression_space(CompressionKind::standard, a, b, m, n, Field(p));
}
MatrixSpace span_e11() {
  Field f(7);
  return make_space(f, 2, 2, std::vector<Matrix>{Matrix::unit(f, 2, 2, 0, 0)});
}

}  // namespace

TEST_CASE("primitivity_report examples") {
  Field f(7);
  auto s = primitivity_report(skew3(7));
  CHECK(s.primitive);
  CHECK(s.exact);
  CHECK(s.kernel_span.is_full());
  CHECK(s.common_image.is_zero());

  auto c = primitivity_report(compression(1, 1, 3, 3, 7));
  CHECK_FALSE(c.row_primitive);
  CHECK(c.common_image.contains(Vec{1, 0, 0}));
  CHECK(c.nondegenerate);

  auto z = primitivity_report(MatrixSpace(f, 2, 3));
  CHECK(z.pre_primitive);
  CHECK_FALSE(z.primitive);
  CHECK_FALSE(z.nondegenerate);

  CHECK(primitivity_report(MatrixSpace(f, 0, 0)).primitive);
}

TEST_CASE("primitivity matches brute force over regular elements") {
  Field f(3);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    auto s = random_space(seed, f, 2 + seed % 2, 3, 1 + seed % 3);
    auto rep = primitivity_report(s);
    std::size_t r = space_rank(s).rank;
    Subspace common = Subspace::full(f, s.rows());
    Subspace kspan(f, s.cols());
    for (const auto& a : oracle::all_elements(s)) {
      if (oracle::minor_rank(a) != r) continue;
      common = common.intersect(Subspace::column_space(a));
      kspan = kspan.sum(Subspace::span(f, s.cols(), kernel(a)));
    }
    CHECK(rep.common_image == common);
    CHECK(rep.kernel_span == kspan);
  }
}

TEST_CASE("decompose examples") {
  auto c = decompose(compression(1, 1, 3, 3, 7));
  CHECK(c.p == 1);
  CHECK(c.q == 1);
  CHECK(c.r == 0);
  CHECK(c.s == 0);

  auto s = decompose(skew3(7));
  CHECK(s.p == 0);
  CHECK(s.q == 0);
  CHECK(s.r == 3);
  CHECK(s.s == 3);
  CHECK(s.primitive_part.dim() == 3);

  auto e = decompose(span_e11());
  CHECK(e.p == 1);
  CHECK(e.q == 0);
  CHECK(e.r == 0);
  CHECK(e.s == 0);

  CHECK_THROWS_AS(decompose(MatrixSpace::full(Field(7), 2, 2)), std::invalid_argument);
}

TEST_CASE("decompose on random singular spaces") {
  Field f(7);
  int checked = 0;
  for (std::uint64_t seed = 0; checked < 40; ++seed) {
    auto s = random_space(seed, f, 3, 3 + seed % 2, 1 + seed % 3);
    if (space_rank(s).rank == 3) continue;
    ++checked;
    auto d = decompose(s);
    CHECK(verify_decomposition(s, d).empty());
    CHECK(d.rank == d.primitive_rank + d.p + d.q);
  }
}

TEST_CASE("split_report examples") {
  auto c = compression(1, 1, 3, 3, 7);
  auto r = split_report(c, 1, 1);
  CHECK(r.compression_part == c);
  CHECK(r.complement_part.is_zero());
  CHECK(r.cond_compression_full);
  CHECK(r.cond_direct);

  // Drop one compression basis element that keeps the rank.
  Field f(7);
  auto basis = c.basis();
  basis.erase(basis.begin());
  auto smaller = make_space(f, 3, 3, basis);
  REQUIRE(space_rank(smaller).rank == 2);
  CHECK_FALSE(split_report(smaller, 1, 1).cond_compression_full);
  CHECK(is_rank_critical(smaller).verdict == Verdict::not_critical);
  CHECK(oracle_is_rank_critical(smaller).verdict == Verdict::not_critical);

  // p = q = 1 with P = span{E11} inside the 2 x 2 block.
  Field g(11);
  std::vector<Matrix> gens = compression(1, 1, 4, 4, 11).basis();
  gens.push_back(Matrix::unit(g, 4, 4, 1, 1));
  auto sp = make_space(g, 4, 4, gens);
  auto rep = split_report(sp, 1, 1);
  CHECK(rep.cond_compression_full);
  CHECK(rep.cond_direct);
  auto prim = block_space(sp, 1, 1, 2, 2);
  CHECK(is_rank_critical(prim).verdict == Verdict::not_critical);
  RunOptions sampled;
  sampled.mode = SampledMode{3, 128};
  CHECK(is_rank_critical(sp, sampled).verdict == Verdict::not_critical);
}

TEST_CASE("check_decomposition_critical examples") {
  auto c = check_decomposition_critical(compression(1, 1, 3, 3, 7));
  CHECK(c.split.cond_compression_full);
  CHECK(c.cond_primitive_part);
  CHECK(c.split.cond_direct);
  CHECK(c.direct_side);
  CHECK(c.sides_match);

  auto e = check_decomposition_critical(span_e11());
  CHECK_FALSE(e.split.cond_compression_full);
  CHECK_FALSE(e.direct_side);
  CHECK(e.sides_match);

  auto s = check_decomposition_critical(skew3(7));
  CHECK(s.cond_primitive_part);
  CHECK(s.direct_side);
  CHECK(s.sides_match);
}

TEST_CASE("check_decomposition_rnd examples") {
  for (const auto& sp : {skew3(7), compression(1, 1, 3, 3, 7)}) {
    auto c = check_decomposition_rnd(sp);
    CHECK(c.conditions);
    CHECK(c.direct_side);
  }
  auto e = check_decomposition_rnd(span_e11());
  CHECK_FALSE(e.conditions);
  CHECK_FALSE(e.direct_side);
}

TEST_CASE("check_sum_theorem small cases") {
  auto s = check_sum_theorem(skew3(13), skew3(13));
  CHECK(s.both_primitive);
  CHECK(s.verdict.verdict == Verdict::critical);
  CHECK(s.holds);
  CHECK(s.rnd_block_diagonal == std::optional<bool>(true));

  Field f(11);
  auto c10 = compression(1, 0, 2, 2, 11), c01 = compression(0, 1, 2, 2, 11);
  auto t = check_sum_theorem(c10, c01);
  CHECK_FALSE(t.both_primitive);
  CHECK(t.verdict.verdict == Verdict::not_critical);
  CHECK(t.holds);
  REQUIRE(t.verdict.witness);
  CHECK(t.verdict.witness_validated == std::optional<bool>(true));

  CHECK_THROWS_AS(check_sum_theorem(span_e11(), span_e11(), {}, true), std::invalid_argument);
  CHECK_THROWS_AS(check_sum_theorem(skew3(7), skew3(7)), HypothesisViolation);
}
