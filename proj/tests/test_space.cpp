#include <doctest.h>

#include <set>

#include "matspace/matrix_space.hpp"
#include "matspace/wong.hpp"
#include "oracles.hpp"

using namespace matspace;

namespace {

MatrixSpace skew3(std::uint32_t p) { return skew_symmetric_space(Field(p), 3); }

MatrixSpace compression(std::size_t p_rows, std::size_t q_cols, std::size_t m, std::size_t n, std::uint32_t p) {
  return compression_space(CompressionKind::standard, p_rows, q_cols, m, n, Field(p));
}

}  // namespace

TEST_CASE("make_space canonicalizes") {
  Field f(7);
  Matrix e11 = Matrix::unit(f, 2, 2, 0, 0);
  std::vector<Matrix> gens{e11, e11.scaled(2)};
  CHECK(make_space(f, 2, 2, gens).dim() == 1);
  CHECK(make_space(f, 2, 2, std::vector<Matrix>{}).dim() == 0);
  CHECK(skew3(7).dim() == 3);

  std::vector<Matrix> bad{e11, Matrix::unit(f, 3, 2, 0, 0)};
  CHECK_THROWS_AS(make_space(f, 2, 2, bad), DimensionMismatch);
  std::vector<Matrix> mixed{e11, Matrix::unit(Field(5), 2, 2, 0, 0)};
  CHECK_THROWS_AS(make_space(f, 2, 2, mixed), ModulusMismatch);

  std::uint64_t state = 1;
  for (int i = 0; i < 30; ++i) {
    std::vector<Matrix> g{random_test_matrix(state, f, 2, 3), random_test_matrix(state, f, 2, 3)};
    std::vector<Matrix> h{g[0] + g[1], g[0].scaled(3) + g[1].scaled(2)};
    CHECK(make_space(f, 2, 3, g) == make_space(f, 2, 3, h));
  }
}

TEST_CASE("member") {
  auto c11 = compression(1, 1, 3, 3, 7);
  Field f(7);
  CHECK(member(c11, Matrix(f, 3, 3)).has_value());
  for (std::size_t i = 0; i < c11.dim(); ++i) {
    auto c = member(c11, c11.basis_element(i));
    REQUIRE(c);
    for (std::size_t j = 0; j < c->size(); ++j) CHECK((*c)[j] == (i == j ? 1u : 0u));
  }
  CHECK_FALSE(member(c11, Matrix::unit(f, 3, 3, 2, 2)).has_value());
  Matrix b = Matrix::unit(f, 3, 3, 0, 2).scaled(4) + Matrix::unit(f, 3, 3, 1, 0).scaled(5);
  auto coords = member(c11, b);
  REQUIRE(coords);
  CHECK(c11.element(*coords) == b);
}

TEST_CASE("space_rank examples") {
  auto r = space_rank(skew3(7));
  CHECK(r.rank == 2);
  CHECK(rank_of(r.witness) == 2);
  CHECK(r.exact);
  CHECK(space_rank(compression(1, 1, 3, 3, 7)).rank == 2);
  auto z = space_rank(MatrixSpace(Field(7), 3, 3));
  CHECK(z.rank == 0);
  CHECK(z.witness.is_zero());
  CHECK(space_rank(MatrixSpace(Field(7), 0, 0)).rank == 0);
}

TEST_CASE("space_rank matches full enumeration") {
  for (std::uint32_t p : {2u, 3u, 5u}) {
    Field f(p);
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
      std::size_t m = 1 + seed % 3, n = 1 + (seed / 3) % 3;
      std::size_t d = seed % (std::min<std::size_t>(m * n, 3) + 1);
      auto s = random_space(seed, f, m, n, d);
      CHECK(s.dim() == d);
      CHECK(space_rank(s).rank == oracle::space_rank(s));
    }
  }
}

TEST_CASE("space_rank cap and sampled mode") {
  auto full = MatrixSpace::full(Field(7), 3, 3);
  RunOptions tight;
  tight.cap = 100;
  CHECK_THROWS_AS(space_rank(full, tight), CapExceeded);

  RunOptions sampled;
  sampled.mode = SampledMode{42, 64};
  auto r = space_rank(compression(1, 1, 3, 3, 7), sampled);
  CHECK(r.rank == 2);
  CHECK(r.certified);
  CHECK(std::holds_alternative<SampledMode>(r.mode));
  auto again = space_rank(compression(1, 1, 3, 3, 7), sampled);
  CHECK(again.witness == r.witness);
}

TEST_CASE("regular_elements") {
  auto reg = regular_elements(skew3(7));
  CHECK(reg.count() == 57);
  auto c10 = compression(1, 0, 2, 2, 7);
  CHECK(c10.dim() == 2);
  CHECK(regular_elements(c10).count() == 8);
  CHECK(regular_elements(MatrixSpace::full(Field(7), 1, 1)).count() == 1);

  std::set<std::vector<Elem>> seen;
  reg.for_each([&](std::uint64_t idx, const Matrix& a) {
    CHECK(rank_of(a) == 2);
    CHECK(reg.element_at(idx) == a);
    seen.insert(std::vector<Elem>(a.entries().begin(), a.entries().end()));
    return true;
  });
  CHECK(seen.size() == 57);

  // Every regular element is a scalar multiple of exactly one representative.
  Field f(7);
  auto all = oracle::all_elements(skew3(7));
  std::size_t regular = 0;
  for (const auto& a : all) regular += rank_of(a) == 2;
  CHECK(regular == 57 * 6);
}

TEST_CASE("direct sum regular set factorizes") {
  Field f(3);
  auto a1 = compression(1, 0, 2, 2, 3);
  auto a2 = random_space(4, f, 1, 2, 1);
  auto sum = direct_sum(a1, a2);
  CHECK(sum.dim() == a1.dim() + a2.dim());
  std::size_t r1 = space_rank(a1).rank, r2 = space_rank(a2).rank;
  CHECK(space_rank(sum).rank == r1 + r2);
  std::size_t n_sum = 0, n_prod = 0;
  for (const auto& a : oracle::all_elements(sum)) {
    bool regular = oracle::minor_rank(a) == r1 + r2;
    bool blocks = oracle::minor_rank(a.block(0, 0, 2, 2)) == r1 && oracle::minor_rank(a.block(2, 2, 1, 2)) == r2;
    CHECK(regular == blocks);
    n_sum += regular;
  }
  for (const auto& x : oracle::all_elements(a1))
    for (const auto& y : oracle::all_elements(a2)) n_prod += oracle::minor_rank(x) == r1 && oracle::minor_rank(y) == r2;
  CHECK(n_sum == n_prod);

  auto with_zero = direct_sum(skew3(7), MatrixSpace(Field(7), 1, 1));
  CHECK(space_rank(with_zero).rank == 2);
  CHECK(direct_sum(skew3(7), skew3(7)).dim() == 6);
  CHECK_THROWS_AS(direct_sum(skew3(7), skew3(5)), ModulusMismatch);
}

TEST_CASE("space_image examples") {
  Field f(7);
  CHECK(space_image(skew3(7), Subspace(f, 3)).is_zero());
  CHECK(space_image(skew3(7), Subspace::span(f, 3, std::vector<Vec>{{0, 0, 1}})) ==
        Subspace::span(f, 3, std::vector<Vec>{{1, 0, 0}, {0, 1, 0}}));
  CHECK(space_image(compression(1, 0, 3, 3, 7), Subspace::full(f, 3)) ==
        Subspace::span(f, 3, std::vector<Vec>{{1, 0, 0}}));
}

TEST_CASE("transform") {
  Field f(7);
  auto s = skew3(7);
  auto id = Matrix::identity(f, 3);
  CHECK(transform(s, id, id) == s);

  auto single = make_space(f, 2, 2, std::vector<Matrix>{Matrix::unit(f, 2, 2, 0, 1)});
  auto swap = Matrix::from_rows(f, {{0, 1}, {1, 0}});
  auto swapped = transform(single, swap, Matrix::identity(f, 2));
  CHECK(swapped.basis_element(0) == Matrix::unit(f, 2, 2, 1, 1));

  CHECK_THROWS_AS(transform(s, Matrix(f, 3, 3), id), std::invalid_argument);

  std::uint64_t state = 77;
  for (int i = 0; i < 20; ++i) {
    auto a = random_space(100 + i, f, 3, 3, 1 + i % 3);
    auto g = random_invertible(state, f, 3), h = random_invertible(state, f, 3);
    auto g2 = random_invertible(state, f, 3), h2 = random_invertible(state, f, 3);
    auto t = transform(a, g, h);
    CHECK(t.dim() == a.dim());
    CHECK(space_rank(t).rank == space_rank(a).rank);
    CHECK(transform(t, g2, h2) == transform(a, g2 * g, h2 * h));
  }
}

TEST_CASE("compression spaces") {
  CHECK(compression(1, 1, 3, 3, 7).dim() == 5);
  CHECK(compression(0, 0, 3, 4, 7).is_zero());
  CHECK(compression_space(CompressionKind::complement, 1, 1, 3, 3, Field(7)).dim() == 4);
  for (std::size_t m = 1; m <= 4; ++m)
    for (std::size_t n = 1; n <= 4; ++n)
      for (std::size_t p = 0; p <= m; ++p)
        for (std::size_t q = 0; q <= n; ++q)
          CHECK(compression(p, q, m, n, 3).dim() == m * q + p * n - p * q);
  CHECK_THROWS_AS(compression(4, 0, 3, 3, 7), std::invalid_argument);
}

TEST_CASE("random_space") {
  Field f(7);
  CHECK(random_space(5, f, 3, 3, 4) == random_space(5, f, 3, 3, 4));
  CHECK(random_space(5, f, 2, 3, 6) == MatrixSpace::full(f, 2, 3));
  CHECK(random_space(5, f, 3, 3, 0).is_zero());
}

TEST_CASE("rank bound from subspaces") {
  Field f(3);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    std::size_t n = 1 + seed % 3;
    auto s = random_space(seed, f, 3, n, 1 + seed % 3);
    std::size_t r = space_rank(s).rank;
    auto elems = oracle::all_elements(s);
    enumerate_subspaces(f, n, kTestCap, [&](const Subspace& v) {
      std::size_t img = space_image(s, v).dim();
      CHECK(img == oracle::space_image_dim(elems, v));
      CHECK(r + v.dim() <= n + img);
      return true;
    });
  }
}

TEST_CASE("wong sequence examples") {
  Field f(7);
  auto full = MatrixSpace::full(f, 2, 2);
  auto w = wong_sequence(Matrix::identity(f, 2), full);
  CHECK(w.stabilization == 0);
  CHECK(w.contained_in_image);

  auto c10 = compression(1, 0, 3, 3, 7);
  auto e11 = Matrix::unit(f, 3, 3, 0, 0);
  auto w2 = wong_sequence(e11, c10);
  CHECK(w2.stabilization == 1);
  CHECK(w2.chain[1] == Subspace::span(f, 3, std::vector<Vec>{{1, 0, 0}}));
  CHECK(w2.contained_in_image);

  Matrix a = Matrix::unit(f, 3, 3, 0, 1) + Matrix::unit(f, 3, 3, 1, 0).scaled(6);
  auto w3 = wong_sequence(a, skew3(7));
  REQUIRE(w3.chain.size() == 3);
  CHECK(w3.chain[1] == Subspace::span(f, 3, std::vector<Vec>{{1, 0, 0}, {0, 1, 0}}));
  CHECK(w3.chain[2].is_full());
  CHECK_FALSE(w3.contained_in_image);

  CHECK_THROWS_AS(wong_sequence(Matrix::unit(f, 3, 3, 2, 2), c10), std::invalid_argument);
}

TEST_CASE("has_shrunk_subspace examples") {
  Field f(7);
  auto s = skew3(7);
  regular_elements(s).for_each([&](std::uint64_t, const Matrix& a) {
    CHECK_FALSE(has_shrunk_subspace(a, s).has_shrunk);
    return true;
  });

  auto res = has_shrunk_subspace(Matrix::unit(f, 3, 3, 0, 0), compression(1, 0, 3, 3, 7));
  CHECK(res.has_shrunk);
  REQUIRE(res.witness);
  CHECK(res.witness->s >= 2);
  CHECK(res.target == 2);

  auto full = MatrixSpace::full(f, 2, 2);
  auto inv = has_shrunk_subspace(Matrix::identity(f, 2), full);
  CHECK(inv.has_shrunk);
  REQUIRE(inv.witness);
  CHECK(inv.witness->v.is_zero());
  CHECK(inv.witness->s == 0);
}

TEST_CASE("best_shrunk_exhaustive examples") {
  Field f(7);
  auto b = best_shrunk_exhaustive(skew3(7));
  CHECK(b.s_max == 0);
  CHECK(b.visited == 116);
  auto c = best_shrunk_exhaustive(compression(1, 1, 3, 3, 7));
  CHECK(c.s_max == 1);
  CHECK(c.argmax == Subspace::span(f, 3, std::vector<Vec>{{0, 1, 0}, {0, 0, 1}}));
  auto z = best_shrunk_exhaustive(MatrixSpace(f, 2, 3));
  CHECK(z.s_max == 3);
  CHECK(z.argmax.is_full());
}

TEST_CASE("rns_pair_condition examples") {
  Field f(7);
  std::uint64_t state = 8;
  for (int i = 0; i < 30; ++i) {
    Matrix a = random_test_matrix(state, f, 3, 3);
    CHECK(rns_pair_condition(a.scaled(3), a));
  }
  Matrix a = Matrix::unit(f, 3, 3, 0, 1) + Matrix::unit(f, 3, 3, 1, 0);
  CHECK_FALSE(rns_pair_condition(Matrix::unit(f, 3, 3, 2, 2), a));
  Matrix inv = Matrix::identity(f, 3);
  for (int i = 0; i < 10; ++i) CHECK(rns_pair_condition(random_test_matrix(state, f, 3, 3), inv));
}

TEST_CASE("rns_pair_condition is scalar invariant") {
  Field f(5);
  std::uint64_t state = 21;
  for (int i = 0; i < 100; ++i) {
    std::size_t k = 1 + i % 2;
    Matrix a = random_test_matrix(state, f, 3, k) * random_test_matrix(state, f, k, 3);
    Matrix b = random_test_matrix(state, f, 3, 3);
    bool base = rns_pair_condition(b, a);
    for (Elem c : {2u, 3u, 4u}) {
      CHECK(rns_pair_condition(b.scaled(c), a) == base);
      CHECK(rns_pair_condition(b, a.scaled(c)) == base);
    }
  }
}
