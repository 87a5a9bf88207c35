#include "matspace/criticality.hpp"

#include <algorithm>

#include "matspace/wong.hpp"

namespace matspace {

namespace {

// Regular elements either materialized with their kernel data (small
// streams) or regenerated on the fly. Positions are table slots or candidate
// indices; both follow candidate order.
class RegularSource {
 public:
  static constexpr std::uint64_t kTableLimit = 1 << 17;

  RegularSource(const MatrixSpace& space, const RunOptions& opts) : stream_(space, opts) {
    const std::size_t m = space.rows(), n = space.cols();
    if (stream_.count() > kTableLimit) return;
    tabled_ = true;
    stream_.for_each([&](std::uint64_t, const Matrix& a) {
      entries_.push_back({a, {}});
      kernel_pair(a.field(), a.entries(), m, n, entries_.back().kp);
      return true;
    });
  }

  const RegularStream& stream() const noexcept { return stream_; }
  bool tabled() const noexcept { return tabled_; }
  std::uint64_t positions() const noexcept { return tabled_ ? entries_.size() : stream_.candidates(); }

  Matrix at(std::uint64_t pos) const { return tabled_ ? entries_[pos].a : stream_.element_at(pos); }

  // First position in [from, to) where hit(a, kp) holds.
  template <class Hit>
  std::optional<std::uint64_t> find_first(std::uint64_t from, std::uint64_t to, unsigned workers, Hit&& hit) const {
    if (from >= to) return std::nullopt;
    const std::size_t m = stream_.space().rows(), n = stream_.space().cols();
    std::uint64_t grain = tabled_ ? 256 : 1 << 14;
    auto found = parallel_find_first(to - from, workers, grain, [&](std::uint64_t b, std::uint64_t e) {
      std::optional<std::uint64_t> out;
      if (tabled_) {
        for (std::uint64_t i = from + b; i < from + e; ++i)
          if (hit(entries_[i].a, entries_[i].kp)) return std::optional<std::uint64_t>(i - from);
        return out;
      }
      KernelPair kp;
      stream_.visit(from + b, from + e, [&](std::uint64_t idx, const Matrix& a) {
        kernel_pair(a.field(), a.entries(), m, n, kp);
        if (!hit(a, kp)) return true;
        out = idx - from;
        return false;
      });
      return out;
    });
    if (!found) return std::nullopt;
    return *found + from;
  }

 private:
  struct Entry {
    Matrix a;
    KernelPair kp;
  };

  RegularStream stream_;
  bool tabled_ = false;
  std::vector<Entry> entries_;
};

// Solution basis with only the nonzero entries kept; RND bases are mostly
// unit-like, so this makes the per-regular check cheap.
struct SparseBasis {
  struct Term {
    std::uint32_t i, j;
    Elem v;
  };
  std::vector<std::vector<Term>> rows;

  SparseBasis(const Matrix& sol, std::size_t n) : rows(sol.rows()) {
    for (std::size_t s = 0; s < sol.rows(); ++s) {
      auto b = sol.row(s);
      for (std::size_t x = 0; x < b.size(); ++x)
        if (b[x]) rows[s].push_back({std::uint32_t(x / n), std::uint32_t(x % n), b[x]});
    }
  }
};

// Some basis element s of the solution space has q s v != 0 for a kernel
// vector v and left-kernel row q of A.
bool violates(const Field& f, const SparseBasis& sol, std::size_t m, std::size_t n, const KernelPair& kp) {
  if (kp.kernel_dim == 0 || kp.left_dim == 0) return false;
  for (const auto& terms : sol.rows)
    for (std::size_t k = 0; k < kp.kernel_dim; ++k) {
      const Elem* v = kp.kernel.data() + k * n;
      for (std::size_t l = 0; l < kp.left_dim; ++l) {
        const Elem* q = kp.left.data() + l * m;
        Elem acc = 0;
        for (const auto& t : terms)
          if (q[t.i] && v[t.j]) acc = f.mul_add(acc, f.mul(t.v, q[t.i]), v[t.j]);
        if (acc != 0) return true;
      }
    }
  return false;
}

// Vectors kept in insertion-order echelon form: each row is zero at the
// pivots of earlier rows and scaled to 1 at its own pivot.
class Echelon {
 public:
  void reset(std::size_t n) {
    n_ = n;
    rows_.clear();
    pivots_.clear();
  }
  // Adds x unless it is already in the span; x is reduced in place.
  bool insert(const Field& f, Elem* x) {
    for (std::size_t r = 0; r < pivots_.size(); ++r) {
      Elem c = x[pivots_[r]];
      if (!c) continue;
      const Elem* row = rows_.data() + r * n_;
      Elem t = f.neg(c);
      for (std::size_t j = 0; j < n_; ++j)
        if (row[j]) x[j] = f.mul_add(x[j], t, row[j]);
    }
    std::size_t p = 0;
    while (p < n_ && !x[p]) ++p;
    if (p == n_) return false;
    Elem s = f.inv(x[p]);
    for (std::size_t j = p; j < n_; ++j) x[j] = f.mul(x[j], s);
    rows_.insert(rows_.end(), x, x + n_);
    pivots_.push_back(p);
    return true;
  }

 private:
  std::size_t n_ = 0;
  std::vector<Elem> rows_;
  std::vector<std::size_t> pivots_;
};

// rns_pair_condition with the kernel data already at hand. Follows
// U_0 = ker A, U_{k+1} = A^{-1}(B U_k), checking B U_k <= im A on the new
// part of each U_k only.
bool neutral(const Matrix& b, const Matrix& a, const KernelPair& kp) {
  if (kp.kernel_dim == 0) return true;
  const Field& f = a.field();
  const std::size_t m = a.rows(), n = a.cols();
  thread_local std::vector<Elem> frontier, next, w, x, keep;
  thread_local Echelon span;
  w.resize(m);
  x.resize(n);
  span.reset(n);
  frontier.assign(kp.kernel.begin(), kp.kernel.begin() + kp.kernel_dim * n);
  for (std::size_t k = 0; k < kp.kernel_dim; ++k) {
    std::copy(kp.kernel.begin() + k * n, kp.kernel.begin() + (k + 1) * n, x.begin());
    span.insert(f, x.data());
  }
  while (!frontier.empty()) {
    next.clear();
    for (std::size_t u = 0; u < frontier.size() / n; ++u) {
      const Elem* v = frontier.data() + u * n;
      bool moved = false;
      for (std::size_t i = 0; i < m; ++i) {
        Elem acc = 0;
        for (std::size_t j = 0; j < n; ++j)
          if (v[j]) acc = f.mul_add(acc, b(i, j), v[j]);
        w[i] = acc;
        moved = moved || acc;
      }
      if (!moved) continue;
      for (std::size_t l = 0; l < kp.left_dim; ++l) {
        const Elem* q = kp.left.data() + l * m;
        Elem acc = 0;
        for (std::size_t i = 0; i < m; ++i) acc = f.mul_add(acc, q[i], w[i]);
        if (acc != 0) return false;
      }
      std::fill(x.begin(), x.end(), 0);
      for (std::size_t r = 0; r < kp.rank; ++r) {
        Elem acc = 0;
        for (std::size_t i = 0; i < m; ++i) acc = f.mul_add(acc, kp.solve[r * m + i], w[i]);
        x[kp.pivots[r]] = acc;
      }
      keep.assign(x.begin(), x.end());
      if (span.insert(f, x.data())) next.insert(next.end(), keep.begin(), keep.end());
    }
    frontier.swap(next);
  }
  return true;
}

std::optional<std::uint64_t> first_refuting(const RegularSource& src, const Matrix& b, unsigned workers) {
  return src.find_first(0, src.positions(), workers,
                        [&](const Matrix& a, const KernelPair& kp) { return !neutral(b, a, kp); });
}

// Candidates in a scan tend to be refuted by the same few regulars; trying
// recent refuters first changes only the cost, not the answer.
class Refuter {
 public:
  explicit Refuter(const RegularSource& src) : src_(src) {}

  bool refuted(const Matrix& b, unsigned workers) {
    for (std::size_t i = 0; i < cache_.size(); ++i)
      if (!neutral(b, cache_[i].a, cache_[i].kp)) {
        std::rotate(cache_.begin(), cache_.begin() + i, cache_.begin() + i + 1);
        return true;
      }
    auto hit = first_refuting(src_, b, workers);
    if (!hit) return false;
    Entry e{src_.at(*hit), {}};
    kernel_pair(e.a.field(), e.a.entries(), e.a.rows(), e.a.cols(), e.kp);
    if (cache_.size() == kSize) cache_.pop_back();
    cache_.insert(cache_.begin(), std::move(e));
    return true;
  }

 private:
  static constexpr std::size_t kSize = 32;
  struct Entry {
    Matrix a;
    KernelPair kp;
  };
  const RegularSource& src_;
  std::vector<Entry> cache_;
};

RndResult rnd_from(const RegularSource& src, const MatrixSpace& space, unsigned workers) {
  const Field& f = space.field();
  const std::size_t m = space.rows(), n = space.cols(), mn = m * n;
  Matrix constraints(f, 0, mn);
  Matrix sol = Matrix::identity(f, mn);
  SparseBasis sparse(sol, n);
  std::size_t resolves = 0;
  std::optional<std::uint64_t> last;
  const std::uint64_t total = src.positions();
  auto bad = [&](const Matrix&, const KernelPair& kp) { return violates(f, sparse, m, n, kp); };

  std::uint64_t pos = 0;
  while (pos < total) {
    auto hit = src.find_first(pos, total, workers, bad);
    if (!hit) break;
    Matrix a = src.at(*hit);
    KernelPair kp;
    kernel_pair(f, a.entries(), m, n, kp);
    Matrix grown(f, constraints.rows() + kp.kernel_dim * kp.left_dim, mn);
    std::copy(constraints.entries().begin(), constraints.entries().end(), grown.entries().begin());
    std::size_t row = constraints.rows();
    for (std::size_t l = 0; l < kp.left_dim; ++l)
      for (std::size_t k = 0; k < kp.kernel_dim; ++k, ++row) {
        const Elem* q = kp.left.data() + l * m;
        const Elem* v = kp.kernel.data() + k * n;
        auto c = grown.row(row);
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t j = 0; j < n; ++j) c[i * n + j] = f.mul(q[i], v[j]);
      }
    std::vector<std::size_t> piv;
    std::size_t rank = rref_in_place(f, grown.entries(), grown.rows(), mn, &piv);
    constraints = grown.block(0, 0, rank, mn);
    auto null = kernel_from_rref(constraints, piv);
    sol = Matrix::from_row_vectors(f, mn, null);
    sparse = SparseBasis(sol, n);
    ++resolves;
    last = *hit;
    pos = *hit + 1;
  }
  // Everything after the last re-solve was already checked against the
  // final solution; re-check the prefix.
  if (last && src.find_first(0, *last + 1, workers, bad))
    throw std::logic_error("rnd: final verification found a violated constraint");

  RndResult out{MatrixSpace::from_flat(f, m, n, sol), src.stream().count(), src.stream().mode(),
                src.stream().exact(), resolves};
  if (!out.space.contains(space)) throw std::logic_error("rnd: result does not contain the space");
  return out;
}

std::uint64_t checked_count(std::uint32_t p, std::size_t k, std::uint64_t cap, const char* what) {
  std::uint64_t count = projective_count(p, k);
  if (count > cap)
    throw CapExceeded(std::string(what) + " needs " + std::to_string(count) + " candidates, cap is " +
                      std::to_string(cap));
  return count;
}

}  // namespace

std::string to_string(Verdict v) { return v == Verdict::critical ? "critical" : "not_critical"; }
std::string to_string(Method m) { return m == Method::theorem_rns ? "theorem_rns" : "oracle"; }

Matrix quotient_basis(const MatrixSpace& outer, const MatrixSpace& inner) {
  const Field& f = outer.field();
  const std::size_t mn = outer.rows() * outer.cols();
  Matrix rows = outer.flat_basis();
  const Matrix& in = inner.flat_basis();
  auto piv = inner.pivots();
  for (std::size_t r = 0; r < rows.rows(); ++r) {
    auto row = rows.row(r);
    for (std::size_t i = 0; i < in.rows(); ++i) {
      Elem c = row[piv[i]];
      if (c == 0) continue;
      Elem nc = f.neg(c);
      auto s = in.row(i);
      for (std::size_t k = 0; k < mn; ++k) row[k] = f.mul_add(row[k], nc, s[k]);
    }
  }
  std::size_t k = rref_in_place(f, rows.entries(), rows.rows(), mn);
  if (k != outer.dim() - inner.dim()) throw std::logic_error("quotient_basis: inner space is not contained in outer");
  return rows.block(0, 0, k, mn);
}

RndResult rnd(const MatrixSpace& space, const RunOptions& opts) {
  RegularSource src(space, opts);
  return rnd_from(src, space, opts.workers);
}

RnsMembership rns_member(const MatrixSpace& space, const Matrix& b, const RunOptions& opts) {
  if (b.rows() != space.rows() || b.cols() != space.cols()) throw DimensionMismatch("rns_member: shape mismatch");
  RegularSource src(space, opts);
  RnsMembership out;
  out.checked = src.stream().count();
  auto hit = first_refuting(src, b, opts.workers);
  out.member = !hit;
  out.exact = src.stream().exact() || hit.has_value();
  if (hit) out.refuting = src.at(*hit);
  return out;
}

RnsSetResult rns_set(const MatrixSpace& space, const RunOptions& opts, const RnsSetOptions& set_opts) {
  RegularSource src(space, opts);
  RndResult r = rnd_from(src, space, opts.workers);
  const Field& f = space.field();
  RnsSetResult out{false, {}, r.space, r.space.dim() - space.dim(), 0, false, false, src.stream().exact()};
  if (out.quotient_dim == 0) return out;

  Matrix quotient = quotient_basis(r.space, space);
  const std::uint64_t count = checked_count(f.modulus(), out.quotient_dim, opts.cap, "rns_set");
  const unsigned workers = std::max(1u, opts.workers);

  // Fixed-size rounds keep the reported numbers independent of `workers`.
  constexpr std::uint64_t kRound = 256;
  Refuter refuter(src);
  auto scan = [&](std::uint64_t total, auto&& candidate_at) {
    std::uint64_t checked = 0;
    for (std::uint64_t base = 0; base < total && !out.truncated; base += kRound) {
      std::uint64_t len = std::min(kRound, total - base);
      std::vector<char> pass(len, 0);
      if (src.tabled()) {
        parallel_ranges(len, workers, 1, [&](std::uint64_t b, std::uint64_t e) {
          for (std::uint64_t i = b; i < e; ++i) pass[i] = !first_refuting(src, candidate_at(base + i), 1);
        });
      } else {
        // Members cost a full pass over the stream, so stop at the limit.
        std::uint64_t found = out.extra_members.size();
        for (std::uint64_t i = 0; i < len && found < set_opts.limit; ++i)
          found += pass[i] = !refuter.refuted(candidate_at(base + i), workers);
      }
      checked = base + len;
      for (std::uint64_t i = 0; i < len; ++i) {
        if (!pass[i]) continue;
        out.extra_members.push_back(candidate_at(base + i));
        if (out.extra_members.size() >= set_opts.limit) {
          out.truncated = base + i + 1 < total;
          checked = base + i + 1;
          break;
        }
      }
    }
    out.candidates_checked += checked;
  };

  scan(count, [&](std::uint64_t idx) {
    ProjectiveWalker w(quotient, idx);
    return space.unflatten(w.value());
  });

  // Coset pass: c + A for every nonzero A in the space.
  if (out.extra_members.empty() && out.quotient_dim <= set_opts.fallback_bound && space.dim() > 0) {
    std::uint64_t per = affine_count(f.modulus(), space.dim());
    if (per != UINT64_MAX && count <= opts.cap / per) {
      out.fallback_used = true;
      std::vector<Vec> shifts;
      for (AffineWalker a(space.flat_basis()); !a.done(); a.next())
        shifts.emplace_back(a.value().begin(), a.value().end());
      shifts.erase(shifts.begin());
      const std::uint64_t np = shifts.size();
      scan(count * np, [&](std::uint64_t idx) {
        ProjectiveWalker w(quotient, idx / np);
        Vec v(w.value().begin(), w.value().end());
        const Vec& s = shifts[idx % np];
        for (std::size_t k = 0; k < v.size(); ++k) v[k] = f.add(v[k], s[k]);
        return space.unflatten(v);
      });
    }
  }
  out.contains_strictly = !out.extra_members.empty();
  return out;
}

std::optional<bool> extension_keeps_rank(const MatrixSpace& space, const Matrix& b, std::size_t r,
                                         std::uint64_t cap) {
  const Field& f = space.field();
  std::uint64_t total = affine_count(f.modulus(), space.dim());
  if (total > cap) return std::nullopt;
  const std::size_t m = space.rows(), n = space.cols();
  Vec v(m * n);
  for (AffineWalker a(space.flat_basis()); !a.done(); a.next()) {
    auto x = a.value();
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = f.add(x[k], b.entries()[k]);
    if (rank_of(f, v, m, n) > r) return false;
  }
  return true;
}

CriticalityVerdict is_rank_critical(const MatrixSpace& space, const RunOptions& opts, bool force) {
  const Field& f = space.field();
  CriticalityVerdict out;
  out.method = Method::theorem_rns;
  out.field_hypothesis_ok = field_hypothesis(f, space.rows(), space.cols());
  if (!out.field_hypothesis_ok && !force)
    throw HypothesisViolation("field too small: p = " + std::to_string(f.modulus()) + " < 2 min(m, n) = " +
                              std::to_string(2 * std::min(space.rows(), space.cols())) +
                              "; pass --force-field to run anyway");

  if (is_exact(opts.mode)) {
    out.rank = space_rank(space, opts).rank;
    RnsSetResult set = rns_set(space, opts, {1, RnsSetOptions{}.fallback_bound});
    out.rnd_dim = set.rnd.dim();
    out.rnd = set.rnd;
    out.candidates_checked = set.candidates_checked;
    out.exact = out.field_hypothesis_ok;
    if (!set.contains_strictly) {
      out.verdict = Verdict::critical;
      return out;
    }
    out.verdict = Verdict::not_critical;
    out.witness = set.extra_members.front();
    out.witness_validated = extension_keeps_rank(space, *out.witness, out.rank, opts.cap);
    if (out.field_hypothesis_ok && out.witness_validated == false)
      throw std::logic_error("is_rank_critical: RNS witness raises the rank");
    return out;
  }

  RankResult rk = space_rank(space, opts);
  out.rank = rk.rank;
  RegularSource src(space, opts);
  RndResult r = rnd_from(src, space, opts.workers);
  out.rnd_dim = r.space.dim();
  if (r.space == space) {
    if (rk.certified && out.field_hypothesis_ok) {
      out.verdict = Verdict::critical;
      out.exact = true;
      out.reason = "certified rank and sampled RND equal to the space";
      return out;
    }
    throw Undetermined("sampled RND equals the space but the sampled rank is not certified");
  }

  Matrix quotient = quotient_basis(r.space, space);
  checked_count(f.modulus(), r.space.dim() - space.dim(), opts.cap, "is_rank_critical");
  std::uint64_t unresolved = 0;
  Refuter refuter(src);
  for (ProjectiveWalker w(quotient, 0); !w.done(); w.next()) {
    ++out.candidates_checked;
    Matrix b = space.unflatten(w.value());
    if (refuter.refuted(b, opts.workers)) continue;
    RankResult ext = space_rank(span_with(space, b), opts);
    if (ext.rank > rk.rank) continue;
    if (ext.certified && ext.rank == rk.rank) {
      out.verdict = Verdict::not_critical;
      out.witness = b;
      out.witness_validated = true;
      out.exact = true;
      out.reason = "witness extension has certified rank equal to the sampled rank";
      return out;
    }
    ++unresolved;
  }
  if (unresolved == 0 && rk.certified && out.field_hypothesis_ok) {
    out.verdict = Verdict::critical;
    out.exact = true;
    out.reason = "certified rank and every RND candidate refuted";
    return out;
  }
  throw Undetermined("sampling left " + std::to_string(unresolved) +
                     " candidate(s) unresolved; rerun in exact mode or with more trials");
}

CriticalityVerdict oracle_is_rank_critical(const MatrixSpace& space, const RunOptions& opts) {
  const Field& f = space.field();
  const std::size_t m = space.rows(), n = space.cols();
  CriticalityVerdict out;
  out.method = Method::oracle;
  out.field_hypothesis_ok = field_hypothesis(f, m, n);
  out.exact = true;
  RunOptions exact = opts;
  exact.mode = ExactMode{};
  out.rank = space_rank(space, exact).rank;
  const std::size_t r = out.rank;

  // Unit matrices at the non-pivot coordinates span a complement.
  std::vector<Vec> comp;
  std::vector<bool> pivot(m * n, false);
  for (auto p : space.pivots()) pivot[p] = true;
  for (std::size_t k = 0; k < m * n; ++k) {
    if (pivot[k]) continue;
    Vec e(m * n, 0);
    e[k] = 1;
    comp.push_back(std::move(e));
  }
  if (comp.empty()) {
    out.verdict = Verdict::critical;
    return out;
  }
  Matrix rows = Matrix::from_row_vectors(f, m * n, comp);
  const std::uint64_t count = checked_count(f.modulus(), comp.size(), opts.cap, "oracle_is_rank_critical");
  if (affine_count(f.modulus(), space.dim()) > opts.cap)
    throw CapExceeded("oracle_is_rank_critical: space has more than " + std::to_string(opts.cap) + " elements");

  std::vector<Vec> elements;
  for (AffineWalker a(space.flat_basis()); !a.done(); a.next()) elements.emplace_back(a.value().begin(), a.value().end());

  auto keeps = [&](std::span<const Elem> b) {
    thread_local Vec v;
    v.resize(m * n);
    for (const auto& x : elements) {
      for (std::size_t k = 0; k < v.size(); ++k) v[k] = f.add(x[k], b[k]);
      if (rank_of(f, v, m, n) > r) return false;
    }
    return true;
  };
  auto hit = parallel_find_first(count, opts.workers, 64, [&](std::uint64_t b, std::uint64_t e) {
    std::optional<std::uint64_t> found;
    for (ProjectiveWalker w(rows, b); w.index() < e; w.next())
      if (keeps(w.value())) return std::optional<std::uint64_t>(w.index());
    return found;
  });
  out.candidates_checked = hit ? *hit + 1 : count;
  if (!hit) {
    out.verdict = Verdict::critical;
    return out;
  }
  out.verdict = Verdict::not_critical;
  out.witness = space.unflatten(ProjectiveWalker(rows, *hit).value());
  out.witness_validated = true;
  return out;
}

}  // namespace matspace
