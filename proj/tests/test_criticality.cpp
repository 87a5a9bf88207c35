#include <doctest.h>

#include "matspace/criticality.hpp"
#include "matspace/wong.hpp"
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

// Two-sided check of an RND result: every basis element satisfies every
// regular constraint, and every unit matrix outside fails some constraint.
void check_rnd_two_sided(const MatrixSpace& space, const MatrixSpace& result) {
  auto regs = regular_elements(space).collect();
  auto ok = [&](const Matrix& b) {
    for (const auto& a : regs)
      if (!PairContext(a).direction_condition(b)) return false;
    return true;
  };
  for (const auto& b : result.basis()) CHECK(ok(b));
  const Field& f = space.field();
  for (std::size_t i = 0; i < space.rows(); ++i)
    for (std::size_t j = 0; j < space.cols(); ++j) {
      Matrix e = Matrix::unit(f, space.rows(), space.cols(), i, j);
      if (!result.contains(e)) CHECK_FALSE(ok(e));
    }
}

}  // namespace

TEST_CASE("kernel_pair agrees with mat_decompose") {
  std::uint64_t state = 4;
  Field f(7);
  for (int i = 0; i < 200; ++i) {
    std::size_t m = 1 + i % 4, n = 1 + (i / 4) % 4;
    Matrix a = random_test_matrix(state, f, m, 1) * random_test_matrix(state, f, 1, n);
    if (i % 3 == 0) a = random_test_matrix(state, f, m, n);
    KernelPair kp;
    kernel_pair(f, a.entries(), m, n, kp);
    auto facts = mat_decompose(a);
    CHECK(kp.rank == facts.rank);
    std::vector<Vec> ker, left;
    for (std::size_t k = 0; k < kp.kernel_dim; ++k) ker.emplace_back(kp.kernel.begin() + k * n, kp.kernel.begin() + (k + 1) * n);
    for (std::size_t k = 0; k < kp.left_dim; ++k) left.emplace_back(kp.left.begin() + k * m, kp.left.begin() + (k + 1) * m);
    CHECK(Subspace::span(f, n, ker) == Subspace::span(f, n, facts.kernel_basis));
    CHECK(Subspace::span(f, m, left) == Subspace::span(f, m, facts.left_kernel_basis));

    Matrix x = random_test_matrix(state, f, n, 1);
    Vec w = mat_apply(a, x.entries());
    Vec sol(n, 0);
    for (std::size_t r = 0; r < kp.rank; ++r) {
      Elem acc = 0;
      for (std::size_t t = 0; t < m; ++t) acc = f.mul_add(acc, kp.solve[r * m + t], w[t]);
      sol[kp.pivots[r]] = acc;
    }
    CHECK(mat_apply(a, sol) == w);
  }
}

TEST_CASE("rnd examples") {
  auto full = MatrixSpace::full(Field(7), 2, 2);
  CHECK(rnd(full).space == full);

  auto s = skew3(7);
  auto rs = rnd(s);
  CHECK(rs.space == s);
  CHECK(rs.regulars_used == 57);
  CHECK(rs.exhaustive);
  check_rnd_two_sided(s, rs.space);

  auto c = compression(1, 1, 3, 3, 7);
  auto rc = rnd(c);
  CHECK(rc.space == c);
  check_rnd_two_sided(c, rc.space);

  auto e = rnd(span_e11());
  Field f(7);
  CHECK(e.space.contains(Matrix::unit(f, 2, 2, 0, 1)));
  check_rnd_two_sided(span_e11(), e.space);

  auto zero = MatrixSpace(f, 2, 3);
  CHECK(rnd(zero).space.is_zero());
}

TEST_CASE("rnd matches a brute-force solution on random spaces") {
  Field f(3);
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    auto s = random_space(seed, f, 2, 3, 1 + seed % 3);
    auto r = rnd(s).space;
    check_rnd_two_sided(s, r);
    // Brute force: every element of M(2x3, GF(3)) tested directly.
    auto regs = regular_elements(s).collect();
    std::size_t count = 0;
    for (const auto& b : oracle::all_elements(MatrixSpace::full(f, 2, 3))) {
      bool ok = true;
      for (const auto& a : regs) ok = ok && PairContext(a).direction_condition(b);
      CHECK(ok == r.contains(b));
      count += ok;
    }
    CHECK(count == oracle::elements(Subspace::full(f, r.dim())).size());
  }
}

TEST_CASE("rnd is independent of worker count") {
  RunOptions four;
  four.workers = 4;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto s = random_space(seed, Field(5), 3, 3, 2);
    auto a = rnd(s), b = rnd(s, four);
    CHECK(a.space == b.space);
    CHECK(a.resolves == b.resolves);
  }
}

TEST_CASE("rns_member examples") {
  auto c = compression(1, 1, 3, 3, 7);
  Field f(7);
  for (const auto& b : c.basis()) CHECK(rns_member(c, b).member);
  auto e33 = rns_member(c, Matrix::unit(f, 3, 3, 2, 2));
  CHECK_FALSE(e33.member);
  CHECK(e33.exact);
  REQUIRE(e33.refuting);

  auto full = MatrixSpace::full(f, 2, 2);
  CHECK(rns_member(full, Matrix::from_rows(f, {{1, 2}, {3, 4}})).member);
}

TEST_CASE("rns_set examples") {
  auto s = rns_set(skew3(7));
  CHECK_FALSE(s.contains_strictly);
  CHECK(s.quotient_dim == 0);

  Field f(7);
  auto e = rns_set(span_e11());
  CHECK(e.contains_strictly);
  bool has_e12 = false;
  for (const auto& b : e.extra_members) has_e12 = has_e12 || b == Matrix::unit(f, 2, 2, 0, 1);
  CHECK(has_e12);
  for (const auto& b : e.extra_members) {
    CHECK(rns_member(span_e11(), b).member);
    CHECK(e.rnd.contains(b));
  }

  CHECK_FALSE(rns_set(MatrixSpace::full(f, 2, 2)).contains_strictly);
}

TEST_CASE("is_rank_critical examples") {
  auto c = is_rank_critical(compression(1, 1, 3, 3, 7));
  CHECK(c.verdict == Verdict::critical);
  CHECK(c.exact);
  CHECK(c.method == Method::theorem_rns);
  CHECK(c.field_hypothesis_ok);

  Field f(7);
  auto e = is_rank_critical(span_e11());
  CHECK(e.verdict == Verdict::not_critical);
  REQUIRE(e.witness);
  CHECK(*e.witness == Matrix::unit(f, 2, 2, 0, 1));
  CHECK(e.witness_validated == std::optional<bool>(true));

  CHECK(is_rank_critical(skew3(7)).verdict == Verdict::critical);

  auto big = compression(1, 1, 4, 4, 7);
  CHECK_THROWS_AS(is_rank_critical(big), HypothesisViolation);
}

TEST_CASE("oracle_is_rank_critical examples") {
  CHECK(oracle_is_rank_critical(compression(1, 1, 3, 3, 7)).verdict == Verdict::critical);
  auto e = oracle_is_rank_critical(span_e11());
  CHECK(e.verdict == Verdict::not_critical);
  REQUIRE(e.witness);
  CHECK(extension_keeps_rank(span_e11(), *e.witness, 1) == std::optional<bool>(true));
  CHECK(oracle_is_rank_critical(skew3(7)).verdict == Verdict::critical);
  CHECK(oracle_is_rank_critical(MatrixSpace::full(Field(7), 2, 2)).verdict == Verdict::critical);
}

TEST_CASE("theorem and oracle agree on small random spaces") {
  Field f(5);
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    std::size_t m = 2, n = 2 + seed % 2;
    auto s = random_space(seed, f, m, n, 1 + seed % 3);
    auto t = is_rank_critical(s);
    auto o = oracle_is_rank_critical(s);
    CHECK(t.verdict == o.verdict);
    if (t.witness) CHECK(t.witness_validated == std::optional<bool>(true));
    if (t.verdict == Verdict::critical) CHECK_FALSE(rns_set(s).contains_strictly);
  }
}

TEST_CASE("sampled criticality on compression spaces") {
  RunOptions sampled;
  sampled.mode = SampledMode{7, 128};
  auto c = compression(1, 1, 3, 3, 7);
  auto v = is_rank_critical(c, sampled);
  CHECK(v.verdict == Verdict::critical);
  CHECK(v.exact);

  // Drop one basis element that keeps the rank.
  auto basis = c.basis();
  basis.erase(basis.begin() + 1);
  auto smaller = make_space(Field(7), 3, 3, basis);
  REQUIRE(space_rank(smaller).rank == 2);
  auto w = is_rank_critical(smaller, sampled);
  CHECK(w.verdict == Verdict::not_critical);
  CHECK(w.exact);
  REQUIRE(w.witness);
  CHECK(extension_keeps_rank(smaller, *w.witness, 2) == std::optional<bool>(true));
}

TEST_CASE("pair condition iff the pencil keeps the rank") {
  Field f(5);
  std::uint64_t state = 99;
  for (int i = 0; i < 200; ++i) {
    std::size_t k = 1 + i % 2;
    Matrix a = random_test_matrix(state, f, 3, k) * random_test_matrix(state, f, k, 3);
    if (a.is_zero()) continue;
    Matrix b = i % 4 == 0 ? random_test_matrix(state, f, 3, 3)
                          : random_test_matrix(state, f, 3, 1) * random_test_matrix(state, f, 1, 3);
    auto pencil = make_space(f, 3, 3, std::vector<Matrix>{a, b});
    CHECK(rns_pair_condition(b, a) == (oracle::space_rank(pencil) == rank_of(a)));
  }
}
