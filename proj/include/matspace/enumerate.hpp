#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <span>
#include <thread>
#include <vector>

#include "matspace/matrix.hpp"

namespace matspace {

/// (p^d - 1)/(p - 1), saturating at UINT64_MAX.
std::uint64_t projective_count(std::uint32_t p, std::size_t d);

/// p^d, saturating at UINT64_MAX.
std::uint64_t affine_count(std::uint32_t p, std::size_t d);

/// splitmix64 step; the seeded generator behind every sampled routine.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Stateless derivation of a sub-seed; sample i of a run with seed s draws from
/// derive_seed(s, i) so that samples can be regenerated in any order.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t s = seed ^ (index * 0xd1b54a32d192ed03ULL);
  splitmix64(s);
  return splitmix64(s);
}

/// Walks the projective representatives of GF(p)^d (vectors whose first
/// nonzero coordinate is 1) and keeps the combination sum_i c_i * rows[i]
/// up to date incrementally.
///
/// Order: representatives with the leading 1 at position 0 come first; within
/// one leading position the trailing coordinates count like an odometer with
/// the last coordinate fastest.
class ProjectiveWalker {
 public:
  /// `rows` is d x N. Starts at representative number `start`.
  ProjectiveWalker(const Matrix& rows, std::uint64_t start);

  std::uint64_t index() const noexcept { return index_; }
  bool done() const noexcept { return index_ >= total_; }
  std::span<const Elem> coords() const noexcept { return coords_; }
  std::span<const Elem> value() const noexcept { return value_; }
  void next();

 private:
  void load_block_start(std::size_t lead);

  const Matrix& rows_;
  Field f_;
  std::size_t d_;
  std::uint64_t total_;
  std::uint64_t index_;
  std::size_t lead_ = 0;
  Vec coords_;
  Vec value_;
  std::vector<Vec> suffix_;  // suffix_[t] = sum_{u >= t} rows[u]
};

/// Walks every vector of GF(p)^d in odometer order (last coordinate fastest),
/// starting at zero, keeping sum_i c_i * rows[i] up to date.
class AffineWalker {
 public:
  explicit AffineWalker(const Matrix& rows);

  bool done() const noexcept { return done_; }
  std::span<const Elem> coords() const noexcept { return coords_; }
  std::span<const Elem> value() const noexcept { return value_; }
  void next();

 private:
  const Matrix& rows_;
  Field f_;
  std::size_t d_;
  bool done_ = false;
  Vec coords_;
  Vec value_;
  std::vector<Vec> suffix_;
};

/// Splits [0, total) into `workers` contiguous ranges with boundaries aligned
/// to `align`, runs fn(begin, end) on each, and rethrows the first exception.
template <class Fn>
void parallel_ranges(std::uint64_t total, unsigned workers, std::uint64_t align, Fn&& fn) {
  workers = std::max(1u, workers);
  if (workers == 1 || total <= align) {
    fn(std::uint64_t{0}, total);
    return;
  }
  std::uint64_t per = (total + workers - 1) / workers;
  per = (per + align - 1) / align * align;
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex mu;
  for (std::uint64_t begin = 0; begin < total; begin += per) {
    std::uint64_t end = std::min(total, begin + per);
    pool.emplace_back([&, begin, end] {
      try {
        fn(begin, end);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

/// Smallest index in [0, total) reported by `search`, where search(begin, end)
/// returns the first hit in its own range. Work proceeds in rounds of
/// workers*grain indices so the answer does not depend on the worker count.
template <class Fn>
std::optional<std::uint64_t> parallel_find_first(std::uint64_t total, unsigned workers, std::uint64_t grain,
                                                 Fn&& search) {
  workers = std::max(1u, workers);
  grain = std::max<std::uint64_t>(1, grain);
  std::uint64_t round = grain * workers;
  for (std::uint64_t base = 0; base < total; base += round) {
    std::uint64_t len = std::min(round, total - base);
    std::vector<std::optional<std::uint64_t>> hits(workers);
    std::uint64_t per = (len + workers - 1) / workers;
    parallel_ranges(len, workers, std::max<std::uint64_t>(1, per), [&](std::uint64_t b, std::uint64_t e) {
      hits[b / per] = search(base + b, base + e);
    });
    for (const auto& h : hits)
      if (h) return h;
  }
  return std::nullopt;
}

}  // namespace matspace
