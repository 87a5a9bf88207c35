#pragma once

#include <cstdint>
#include <stdexcept>

namespace matspace {

/// A reduced residue modulo the field characteristic.
using Elem = std::uint32_t;

/// Largest modulus accepted by Field; keeps every product of two residues
/// inside 64 bits and every sum inside 32 bits.
inline constexpr std::uint32_t kMaxModulus = (1u << 31) - 1;

bool is_prime(std::uint64_t n) noexcept;

enum class FpOp { add, sub, mul, neg, inv };

/// Arithmetic context for GF(p).
///
/// Field is a small trivially-copyable handle. For p < 2^16 it carries a
/// shared inverse table and a precomputed reciprocal used for fast reduction
/// of products; larger moduli fall back to hardware division.
class Field {
 public:
  /// Throws std::invalid_argument unless p is a prime in [2, kMaxModulus].
  explicit Field(std::uint32_t p);

  std::uint32_t modulus() const noexcept { return p_; }

  Elem reduce(std::int64_t x) const noexcept {
    auto r = x % static_cast<std::int64_t>(p_);
    return static_cast<Elem>(r < 0 ? r + p_ : r);
  }

  Elem add(Elem a, Elem b) const noexcept {
    Elem s = a + b;
    return s >= p_ ? s - p_ : s;
  }
  Elem sub(Elem a, Elem b) const noexcept { return a >= b ? a - b : a + p_ - b; }
  Elem neg(Elem a) const noexcept { return a == 0 ? 0 : p_ - a; }

  Elem mul(Elem a, Elem b) const noexcept {
    if (small_) return fastmod(a * b);
    return static_cast<Elem>(static_cast<std::uint64_t>(a) * b % p_);
  }

  /// a + b*c
  Elem mul_add(Elem a, Elem b, Elem c) const noexcept { return add(a, mul(b, c)); }

  /// Throws std::domain_error for a == 0.
  Elem inv(Elem a) const;

  Elem pow(Elem a, std::uint64_t e) const noexcept;

  bool operator==(const Field& o) const noexcept { return p_ == o.p_; }

 private:
  Elem fastmod(std::uint32_t a) const noexcept {
    std::uint64_t low = reciprocal_ * a;
    return static_cast<Elem>((static_cast<__uint128_t>(low) * p_) >> 64);
  }

  std::uint32_t p_;
  bool small_;
  std::uint64_t reciprocal_;
  const Elem* inverses_;
};

/// Single-operation entry point over the field; `b` is ignored for unary ops.
Elem fp_arith(const Field& f, Elem a, Elem b, FpOp op);

/// Raised when an operand does not match the shape an operation requires.
class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when operands live over different fields.
class ModulusMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace matspace
