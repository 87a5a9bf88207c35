#include "matspace/enumerate.hpp"

#include <limits>

namespace matspace {

namespace {

constexpr std::uint64_t kSat = std::numeric_limits<std::uint64_t>::max();

std::vector<Vec> suffix_sums(const Matrix& rows) {
  const Field& f = rows.field();
  std::size_t d = rows.rows();
  std::size_t n = rows.cols();
  std::vector<Vec> suffix(d + 1, Vec(n, 0));
  for (std::size_t t = d; t-- > 0;) {
    auto r = rows.row(t);
    for (std::size_t j = 0; j < n; ++j) suffix[t][j] = f.add(suffix[t + 1][j], r[j]);
  }
  return suffix;
}

void add_into(const Field& f, Vec& acc, std::span<const Elem> v) {
  for (std::size_t j = 0; j < acc.size(); ++j) acc[j] = f.add(acc[j], v[j]);
}

}  // namespace

std::uint64_t affine_count(std::uint32_t p, std::size_t d) {
  std::uint64_t r = 1;
  for (std::size_t i = 0; i < d; ++i) {
    if (r > kSat / p) return kSat;
    r *= p;
  }
  return r;
}

std::uint64_t projective_count(std::uint32_t p, std::size_t d) {
  std::uint64_t a = affine_count(p, d);
  if (a == kSat) return kSat;
  return (a - 1) / (p - 1);
}

ProjectiveWalker::ProjectiveWalker(const Matrix& rows, std::uint64_t start)
    : rows_(rows),
      f_(rows.field()),
      d_(rows.rows()),
      total_(projective_count(rows.field().modulus(), rows.rows())),
      index_(start),
      coords_(rows.rows(), 0),
      value_(rows.cols(), 0),
      suffix_(suffix_sums(rows)) {
  if (index_ >= total_) return;
  const std::uint32_t p = f_.modulus();
  // Locate the block of the leading coordinate; block j holds p^(d-1-j) items.
  std::uint64_t offset = index_;
  std::size_t lead = 0;
  while (true) {
    std::uint64_t size = affine_count(p, d_ - 1 - lead);
    if (offset < size) break;
    offset -= size;
    ++lead;
  }
  lead_ = lead;
  coords_[lead] = 1;
  for (std::size_t pos = d_; pos-- > lead + 1;) {
    coords_[pos] = static_cast<Elem>(offset % p);
    offset /= p;
  }
  for (std::size_t i = lead; i < d_; ++i) {
    if (coords_[i] == 0) continue;
    auto r = rows_.row(i);
    for (std::size_t j = 0; j < value_.size(); ++j) value_[j] = f_.mul_add(value_[j], coords_[i], r[j]);
  }
}

void ProjectiveWalker::load_block_start(std::size_t lead) {
  std::fill(coords_.begin(), coords_.end(), 0);
  coords_[lead] = 1;
  auto r = rows_.row(lead);
  value_.assign(r.begin(), r.end());
  lead_ = lead;
}

void ProjectiveWalker::next() {
  ++index_;
  if (index_ >= total_) return;
  const std::uint32_t p = f_.modulus();
  for (std::size_t pos = d_; pos-- > lead_ + 1;) {
    if (coords_[pos] + 1 < p) {
      ++coords_[pos];
      for (std::size_t q = pos + 1; q < d_; ++q) coords_[q] = 0;
      add_into(f_, value_, suffix_[pos]);
      return;
    }
  }
  load_block_start(lead_ + 1);
}

AffineWalker::AffineWalker(const Matrix& rows)
    : rows_(rows),
      f_(rows.field()),
      d_(rows.rows()),
      coords_(rows.rows(), 0),
      value_(rows.cols(), 0),
      suffix_(suffix_sums(rows)) {}

void AffineWalker::next() {
  const std::uint32_t p = f_.modulus();
  for (std::size_t pos = d_; pos-- > 0;) {
    if (coords_[pos] + 1 < p) {
      ++coords_[pos];
      for (std::size_t q = pos + 1; q < d_; ++q) coords_[q] = 0;
      add_into(f_, value_, suffix_[pos]);
      return;
    }
  }
  done_ = true;
}

}  // namespace matspace
