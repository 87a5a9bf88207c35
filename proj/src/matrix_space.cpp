#include "matspace/matrix_space.hpp"

#include <map>
#include <mutex>
#include <sstream>

#include "matspace/wong.hpp"

namespace matspace {

struct RankEntry {
  RankResult result;
  std::uint64_t candidates = 0;
  std::uint64_t count = 0;
  std::shared_ptr<const std::vector<std::uint64_t>> bits;
};

struct RankData {
  std::mutex mu;
  std::shared_ptr<const RankEntry> exact;
  std::map<std::pair<std::uint64_t, std::uint64_t>, std::shared_ptr<const RankEntry>> sampled;
};

std::string describe(const Mode& mode) {
  if (is_exact(mode)) return "exact";
  const auto& s = std::get<SampledMode>(mode);
  std::ostringstream os;
  os << "sampled(seed=" << s.seed << ", trials=" << s.trials << ")";
  return os.str();
}

MatrixSpace::MatrixSpace(Field f, std::size_t m, std::size_t n)
    : m_(m), n_(n), flat_(f, 0, m * n), cache_(std::make_shared<RankData>()) {}

MatrixSpace::MatrixSpace(std::size_t m, std::size_t n, Matrix flat, std::vector<std::size_t> pivots)
    : m_(m), n_(n), flat_(std::move(flat)), pivots_(std::move(pivots)), cache_(std::make_shared<RankData>()) {}

MatrixSpace MatrixSpace::from_flat(Field f, std::size_t m, std::size_t n, const Matrix& flat) {
  if (flat.cols() != m * n) throw DimensionMismatch("flattened basis width differs from m*n");
  if (!(flat.field() == f)) throw ModulusMismatch("flattened basis over a different field");
  Matrix r = flat;
  std::vector<std::size_t> piv;
  std::size_t k = rref_in_place(f, r.entries(), r.rows(), r.cols(), &piv);
  return MatrixSpace(m, n, r.block(0, 0, k, m * n), std::move(piv));
}

MatrixSpace MatrixSpace::make(Field f, std::size_t m, std::size_t n, std::span<const Matrix> matrices) {
  Matrix flat(f, matrices.size(), m * n);
  for (std::size_t i = 0; i < matrices.size(); ++i) {
    const Matrix& a = matrices[i];
    if (!(a.field() == f)) throw ModulusMismatch("make_space: element over a different field");
    if (a.rows() != m || a.cols() != n) throw DimensionMismatch("make_space: element shape differs from ambient");
    std::copy(a.entries().begin(), a.entries().end(), flat.row(i).begin());
  }
  return from_flat(f, m, n, flat);
}

MatrixSpace MatrixSpace::full(Field f, std::size_t m, std::size_t n) {
  return from_flat(f, m, n, Matrix::identity(f, m * n));
}

std::vector<Matrix> MatrixSpace::basis() const {
  std::vector<Matrix> out;
  out.reserve(dim());
  for (std::size_t i = 0; i < dim(); ++i) out.push_back(basis_element(i));
  return out;
}

Matrix MatrixSpace::basis_element(std::size_t i) const { return unflatten(flat_.row(i)); }

Matrix MatrixSpace::unflatten(std::span<const Elem> flat) const {
  return Matrix(field(), m_, n_, flat);
}

std::optional<Vec> MatrixSpace::coordinates(const Matrix& b) const {
  if (b.rows() != m_ || b.cols() != n_) throw DimensionMismatch("member: shape differs from ambient");
  if (!(b.field() == field())) throw ModulusMismatch("member: modulus differs");
  const Field& f = field();
  Vec coords(dim(), 0);
  Vec rest(b.entries().begin(), b.entries().end());
  for (std::size_t i = 0; i < dim(); ++i) {
    Elem c = rest[pivots_[i]];
    coords[i] = c;
    if (c == 0) continue;
    Elem nc = f.neg(c);
    auto r = flat_.row(i);
    for (std::size_t k = pivots_[i]; k < rest.size(); ++k) rest[k] = f.mul_add(rest[k], nc, r[k]);
  }
  for (auto x : rest)
    if (x != 0) return std::nullopt;
  return coords;
}

bool MatrixSpace::contains(const MatrixSpace& other) const {
  if (other.m_ != m_ || other.n_ != n_) throw DimensionMismatch("space containment: shape mismatch");
  for (std::size_t i = 0; i < other.dim(); ++i)
    if (!contains(other.basis_element(i))) return false;
  return true;
}

Matrix MatrixSpace::element(std::span<const Elem> coords) const {
  if (coords.size() != dim()) throw DimensionMismatch("element: coordinate count differs from dimension");
  const Field& f = field();
  Vec acc(m_ * n_, 0);
  for (std::size_t i = 0; i < coords.size(); ++i) {
    if (coords[i] == 0) continue;
    auto r = flat_.row(i);
    for (std::size_t k = 0; k < acc.size(); ++k) acc[k] = f.mul_add(acc[k], coords[i], r[k]);
  }
  return unflatten(acc);
}

std::optional<Vec> member(const MatrixSpace& space, const Matrix& b) { return space.coordinates(b); }

MatrixSpace span_with(const MatrixSpace& space, std::span<const Matrix> extra) {
  std::vector<Matrix> all = space.basis();
  all.insert(all.end(), extra.begin(), extra.end());
  return MatrixSpace::make(space.field(), space.rows(), space.cols(), all);
}

MatrixSpace span_with(const MatrixSpace& space, const Matrix& extra) {
  return span_with(space, std::span<const Matrix>(&extra, 1));
}

Vec sample_coords(const Field& f, std::size_t dim, std::uint64_t seed, std::uint64_t index) {
  std::uint64_t state = derive_seed(seed, index);
  Vec c(dim);
  for (auto& x : c) x = static_cast<Elem>(splitmix64(state) % f.modulus());
  return c;
}

namespace {

struct ChunkScan {
  std::uint64_t begin = 0;
  std::uint64_t end = 0;
  std::size_t max_rank = 0;
  std::uint64_t first = 0;
  std::uint64_t count = 0;
};

void clear_bits(std::vector<std::uint64_t>& bits, std::uint64_t from, std::uint64_t to) {
  for (std::uint64_t i = from; i < to; ++i) bits[i >> 6] &= ~(std::uint64_t{1} << (i & 63));
}

// One scan over candidate indices, keeping a bitmap of elements attaining the
// running maximum. Chunk boundaries are multiples of 64 so no two workers
// touch the same bitmap word.
template <class RankAt>
std::pair<std::shared_ptr<RankEntry>, std::uint64_t> scan_ranks(const MatrixSpace& space, std::uint64_t total,
                                                                 unsigned workers, Mode mode, RankAt&& rank_at_range) {
  auto bits = std::make_shared<std::vector<std::uint64_t>>((total + 63) / 64, 0);
  std::vector<ChunkScan> chunks;
  std::mutex mu;
  parallel_ranges(total, workers, 64, [&](std::uint64_t b, std::uint64_t e) {
    ChunkScan c{b, e, 0, b, 0};
    rank_at_range(b, e, [&](std::uint64_t idx, std::size_t r) {
      if (r > c.max_rank) {
        clear_bits(*bits, b, idx);
        c.max_rank = r;
        c.first = idx;
        c.count = 0;
      }
      if (r == c.max_rank) {
        (*bits)[idx >> 6] |= std::uint64_t{1} << (idx & 63);
        ++c.count;
      }
    });
    std::lock_guard lock(mu);
    chunks.push_back(c);
  });
  std::sort(chunks.begin(), chunks.end(), [](const ChunkScan& x, const ChunkScan& y) { return x.begin < y.begin; });
  std::size_t best = 0;
  for (const auto& c : chunks) best = std::max(best, c.max_rank);
  auto entry = std::make_shared<RankEntry>(RankEntry{RankResult{best, Matrix(space.field(), space.rows(), space.cols()), mode},
                                                     total, 0, nullptr});
  std::optional<std::uint64_t> witness;
  for (const auto& c : chunks) {
    if (c.max_rank < best) {
      clear_bits(*bits, c.begin, c.end);
      continue;
    }
    entry->count += c.count;
    if (!witness) witness = c.first;
  }
  entry->bits = std::move(bits);
  entry->result.inspected = total;
  return {entry, witness.value_or(0)};
}

std::shared_ptr<const RankEntry> zero_space_entry(const MatrixSpace& space, Mode mode) {
  auto bits = std::make_shared<std::vector<std::uint64_t>>(1, 1);
  RankResult r{0, Matrix(space.field(), space.rows(), space.cols()), mode, true, false, 0};
  return std::make_shared<RankEntry>(RankEntry{r, 1, 1, std::move(bits)});
}

std::shared_ptr<const RankEntry> exact_entry(const MatrixSpace& space, const RunOptions& opts) {
  auto cache = space.rank_cache();
  {
    std::lock_guard lock(cache->mu);
    if (cache->exact) return cache->exact;
  }
  std::shared_ptr<const RankEntry> result;
  if (space.dim() == 0) {
    result = zero_space_entry(space, ExactMode{});
  } else {
    const Field& f = space.field();
    std::uint64_t total = projective_count(f.modulus(), space.dim());
    if (total > opts.cap)
      throw CapExceeded("exact enumeration needs " + std::to_string(total) +
                        " projective representatives, cap is " + std::to_string(opts.cap) +
                        "; raise --cap or use --mode sampled");
    const std::size_t m = space.rows();
    const std::size_t n = space.cols();
    auto [entry, witness_index] = scan_ranks(space, total, opts.workers, ExactMode{}, [&](std::uint64_t b, std::uint64_t e, auto&& sink) {
      ProjectiveWalker walk(space.flat_basis(), b);
      for (; walk.index() < e; walk.next()) sink(walk.index(), rank_of(f, walk.value(), m, n));
    });
    ProjectiveWalker at(space.flat_basis(), witness_index);
    entry->result.witness = space.unflatten(at.value());
    entry->result.exact = true;
    result = std::move(entry);
  }
  std::lock_guard lock(cache->mu);
  if (!cache->exact) cache->exact = result;
  return cache->exact;
}

std::shared_ptr<const RankEntry> sampled_entry(const MatrixSpace& space, const RunOptions& opts) {
  const auto& s = std::get<SampledMode>(opts.mode);
  auto cache = space.rank_cache();
  auto key = std::make_pair(s.seed, s.trials);
  {
    std::lock_guard lock(cache->mu);
    auto it = cache->sampled.find(key);
    if (it != cache->sampled.end()) return it->second;
  }
  std::shared_ptr<const RankEntry> result;
  if (space.dim() == 0) {
    result = zero_space_entry(space, opts.mode);
  } else {
    const Field& f = space.field();
    const std::size_t m = space.rows();
    const std::size_t n = space.cols();
    std::uint64_t total = std::max<std::uint64_t>(1, s.trials);
    auto [entry, witness_index] = scan_ranks(space, total, opts.workers, opts.mode, [&](std::uint64_t b, std::uint64_t e, auto&& sink) {
      for (std::uint64_t i = b; i < e; ++i) {
        Matrix a = space.element(sample_coords(f, space.dim(), s.seed, i));
        sink(i, rank_of(a));
      }
    });
    entry->result.witness = space.element(sample_coords(f, space.dim(), s.seed, witness_index));
    std::size_t r = entry->result.rank;
    // Certification against the exhaustive shrunk-subspace bound, when the
    // subspace lattice is small enough to enumerate.
    if (subspace_count(f.modulus(), n) <= opts.cap) {
      auto best = best_shrunk_exhaustive(space, opts.cap);
      if (r == n - best.s_max) entry->result.certified = true;
    }
    if (!entry->result.certified && subspace_count(f.modulus(), m) <= opts.cap) {
      auto best = best_shrunk_exhaustive(transpose_space(space), opts.cap);
      if (r == m - best.s_max) entry->result.certified = true;
    }
    entry->result.exact = entry->result.certified;
    result = std::move(entry);
  }
  std::lock_guard lock(cache->mu);
  auto [it, inserted] = cache->sampled.emplace(key, result);
  return it->second;
}

std::shared_ptr<const RankEntry> rank_entry(const MatrixSpace& space, const RunOptions& opts) {
  if (is_exact(opts.mode)) return exact_entry(space, opts);
  return sampled_entry(space, opts);
}

}  // namespace

RankResult space_rank(const MatrixSpace& space, const RunOptions& opts) { return rank_entry(space, opts)->result; }

RegularStream::RegularStream(const MatrixSpace& space, const RunOptions& opts)
    : space_(space), rank_{0, Matrix(space.field(), 0, 0), opts.mode}, workers_(std::max(1u, opts.workers)) {
  auto entry = rank_entry(space, opts);
  rank_ = entry->result;
  candidates_ = entry->candidates;
  count_ = entry->count;
  bits_ = entry->bits;
}

Matrix RegularStream::element_at(std::uint64_t index) const {
  if (space_.dim() == 0) return Matrix(space_.field(), space_.rows(), space_.cols());
  if (const auto* s = std::get_if<SampledMode>(&rank_.mode))
    return space_.element(sample_coords(space_.field(), space_.dim(), s->seed, index));
  ProjectiveWalker walk(space_.flat_basis(), index);
  return space_.unflatten(walk.value());
}

std::vector<Matrix> RegularStream::collect(std::uint64_t limit) const {
  std::vector<Matrix> out;
  for_each([&](std::uint64_t, const Matrix& a) {
    out.push_back(a);
    return out.size() < limit;
  });
  return out;
}

Subspace space_image(const MatrixSpace& space, const Subspace& v) {
  if (v.ambient() != space.cols()) throw DimensionMismatch("space_image: subspace ambient differs from column count");
  const Field& f = space.field();
  const std::size_t m = space.rows();
  if (v.is_zero() || space.is_zero()) return Subspace(f, m);
  // Rows: for each basis matrix B and basis vector x of V, the vector B x.
  Matrix stacked(f, space.dim() * v.dim(), m);
  std::size_t row = 0;
  for (std::size_t i = 0; i < space.dim(); ++i) {
    Matrix b = space.basis_element(i);
    for (std::size_t k = 0; k < v.dim(); ++k) {
      Vec bx = mat_apply(b, v.basis().row(k));
      std::copy(bx.begin(), bx.end(), stacked.row(row++).begin());
    }
  }
  return Subspace::row_space(stacked);
}

MatrixSpace transform_with_inverse(const MatrixSpace& space, const Matrix& g, const Matrix& h_inv) {
  if (g.rows() != space.rows() || g.cols() != space.rows() || h_inv.rows() != space.cols() ||
      h_inv.cols() != space.cols())
    throw DimensionMismatch("transform: g must be m x m and h must be n x n");
  std::vector<Matrix> out;
  out.reserve(space.dim());
  for (std::size_t i = 0; i < space.dim(); ++i) out.push_back(g * space.basis_element(i) * h_inv);
  return MatrixSpace::make(space.field(), space.rows(), space.cols(), out);
}

MatrixSpace transform(const MatrixSpace& space, const Matrix& g, const Matrix& h) {
  if (g.rows() != g.cols() || !inverse(g)) throw std::invalid_argument("transform: g is singular");
  auto h_inv = h.rows() == h.cols() ? inverse(h) : std::nullopt;
  if (!h_inv) throw std::invalid_argument("transform: h is singular");
  return transform_with_inverse(space, g, *h_inv);
}

MatrixSpace direct_sum(const MatrixSpace& a1, const MatrixSpace& a2) {
  if (!(a1.field() == a2.field())) throw ModulusMismatch("direct_sum: modulus mismatch");
  const Field& f = a1.field();
  std::size_t m = a1.rows() + a2.rows();
  std::size_t n = a1.cols() + a2.cols();
  std::vector<Matrix> out;
  for (std::size_t k = 0; k < a1.dim(); ++k) {
    Matrix b = a1.basis_element(k);
    Matrix x(f, m, n);
    for (std::size_t i = 0; i < a1.rows(); ++i)
      for (std::size_t j = 0; j < a1.cols(); ++j) x.set(i, j, b(i, j));
    out.push_back(std::move(x));
  }
  for (std::size_t k = 0; k < a2.dim(); ++k) {
    Matrix b = a2.basis_element(k);
    Matrix x(f, m, n);
    for (std::size_t i = 0; i < a2.rows(); ++i)
      for (std::size_t j = 0; j < a2.cols(); ++j) x.set(a1.rows() + i, a1.cols() + j, b(i, j));
    out.push_back(std::move(x));
  }
  return MatrixSpace::make(f, m, n, out);
}

MatrixSpace transpose_space(const MatrixSpace& space) {
  std::vector<Matrix> out;
  for (std::size_t i = 0; i < space.dim(); ++i) out.push_back(space.basis_element(i).transpose());
  return MatrixSpace::make(space.field(), space.cols(), space.rows(), out);
}

MatrixSpace compression_space(CompressionKind kind, std::size_t p_rows, std::size_t q_cols, std::size_t m,
                              std::size_t n, Field f) {
  if (p_rows > m || q_cols > n) throw std::invalid_argument("compression_space: p must be <= m and q <= n");
  std::vector<Matrix> out;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      bool free = i < p_rows || j < q_cols;
      if (free == (kind == CompressionKind::standard)) out.push_back(Matrix::unit(f, m, n, i, j));
    }
  return MatrixSpace::make(f, m, n, out);
}

MatrixSpace skew_symmetric_space(Field f, std::size_t n) {
  std::vector<Matrix> out;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      Matrix a(f, n, n);
      a.set(i, j, 1);
      a.set(j, i, f.neg(1));
      out.push_back(std::move(a));
    }
  return MatrixSpace::make(f, n, n, out);
}

MatrixSpace block_space(const MatrixSpace& space, std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) {
  std::vector<Matrix> out;
  for (std::size_t i = 0; i < space.dim(); ++i) out.push_back(space.basis_element(i).block(r0, c0, nr, nc));
  return MatrixSpace::make(space.field(), nr, nc, out);
}

Matrix random_matrix(std::uint64_t& state, Field f, std::size_t m, std::size_t n) {
  Matrix a(f, m, n);
  for (auto& x : a.entries()) x = static_cast<Elem>(splitmix64(state) % f.modulus());
  return a;
}

Matrix random_invertible(std::uint64_t& state, Field f, std::size_t n) {
  while (true) {
    Matrix g = random_matrix(state, f, n, n);
    if (rank_of(g) == n) return g;
  }
}

MatrixSpace random_space(std::uint64_t seed, Field f, std::size_t m, std::size_t n, std::size_t d) {
  if (d > m * n) throw std::invalid_argument("random_space: dimension exceeds m*n");
  std::uint64_t state = derive_seed(seed, 0x5eedULL);
  std::vector<Matrix> picked;
  MatrixSpace current(f, m, n);
  while (current.dim() < d) {
    Matrix a = random_matrix(state, f, m, n);
    if (current.contains(a)) continue;
    picked.push_back(std::move(a));
    current = MatrixSpace::make(f, m, n, picked);
  }
  return current;
}

}  // namespace matspace
