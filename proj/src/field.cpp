#include "matspace/field.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace matspace {

bool is_prime(std::uint64_t n) noexcept {
  if (n < 2) return false;
  if (n % 2 == 0) return n == 2;
  for (std::uint64_t d = 3; d * d <= n; d += 2)
    if (n % d == 0) return false;
  return true;
}

namespace {

constexpr std::uint32_t kTableLimit = 1u << 16;

// Inverse tables live for the whole process; Field only keeps a raw pointer.
const Elem* inverse_table(std::uint32_t p) {
  static std::mutex mu;
  static std::map<std::uint32_t, std::unique_ptr<std::vector<Elem>>> tables;
  std::lock_guard lock(mu);
  auto& slot = tables[p];
  if (!slot) {
    auto t = std::make_unique<std::vector<Elem>>(p, 0);
    if (p > 1) (*t)[1] = 1;
    for (std::uint32_t a = 2; a < p; ++a)
      (*t)[a] = static_cast<Elem>(p - static_cast<std::uint64_t>(p / a) * (*t)[p % a] % p);
    slot = std::move(t);
  }
  return slot->data();
}

}  // namespace

Field::Field(std::uint32_t p)
    : p_(p), small_(p < kTableLimit), reciprocal_(0), inverses_(nullptr) {
  if (p < 2 || p > kMaxModulus || !is_prime(p))
    throw std::invalid_argument("modulus " + std::to_string(p) + " is not a supported prime");
  if (small_) {
    reciprocal_ = UINT64_C(0xFFFFFFFFFFFFFFFF) / p + 1;
    inverses_ = inverse_table(p);
  }
}

Elem Field::pow(Elem a, std::uint64_t e) const noexcept {
  Elem result = 1 % p_;
  while (e) {
    if (e & 1) result = mul(result, a);
    a = mul(a, a);
    e >>= 1;
  }
  return result;
}

Elem Field::inv(Elem a) const {
  if (a % p_ == 0) throw std::domain_error("inverse of zero in GF(" + std::to_string(p_) + ")");
  if (inverses_) return inverses_[a];
  return pow(a, p_ - 2);
}

Elem fp_arith(const Field& f, Elem a, Elem b, FpOp op) {
  a = f.reduce(a);
  b = f.reduce(b);
  switch (op) {
    case FpOp::add: return f.add(a, b);
    case FpOp::sub: return f.sub(a, b);
    case FpOp::mul: return f.mul(a, b);
    case FpOp::neg: return f.neg(a);
    case FpOp::inv: return f.inv(a);
  }
  throw std::invalid_argument("unknown field operation");
}

}  // namespace matspace
