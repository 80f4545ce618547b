#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "msrforge/errors.hpp"

namespace msrforge {

// Canonical element representation: an integer in [0, q). Prime fields use
// residues, binary extensions the polynomial-basis bit pattern.
using elem = std::uint16_t;

enum class field_kind { prime, binary_ext };

namespace detail {

inline bool is_prime(unsigned n) {
  if (n < 2) return false;
  for (unsigned d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

inline int poly_degree(unsigned p) {
  int d = -1;
  while (p) {
    p >>= 1;
    ++d;
  }
  return d;
}

inline unsigned poly_rem(unsigned a, unsigned m) {
  const int dm = poly_degree(m);
  for (int da = poly_degree(a); da >= dm; da = poly_degree(a))
    a ^= m << (da - dm);
  return a;
}

inline bool poly_irreducible(unsigned m, int degree) {
  if (poly_degree(m) != degree) return false;
  for (int d = 1; d <= degree / 2; ++d)
    for (unsigned p = 1u << d; p < (2u << d); ++p)
      if (poly_rem(m, p) == 0) return false;
  return true;
}

// shift-and-reduce product; only used to bootstrap the log/exp tables
inline unsigned poly_mul(unsigned a, unsigned b, unsigned m) {
  unsigned acc = 0;
  for (unsigned bit = 0; b >> bit; ++bit)
    if ((b >> bit) & 1u) acc ^= a << bit;
  return poly_rem(acc, m);
}

}  // namespace detail

/// Arithmetic context for GF(q): q prime up to 2^16, or q = 2^m with
/// m in {2,4,8}. Immutable after construction and cheap to copy; extension
/// fields share their log/exp tables.
class field {
 public:
  field() : field(2) {}  // smallest valid order; placeholder until assigned

  explicit field(unsigned q) : field(q, 0) {}

  field(unsigned q, unsigned modulus) : q_(q) {
    if (q == 4 || q == 16 || q == 256) {
      kind_ = field_kind::binary_ext;
      modulus_ = modulus ? modulus : default_modulus(q);
      const int m = detail::poly_degree(q);
      if (!detail::poly_irreducible(modulus_, m))
        fail(errc::reducible_modulus,
             "modulus " + std::to_string(modulus_) +
                 " is not irreducible of degree " + std::to_string(m));
      build_tables();
    } else if (q >= 2 && q <= 65536 && detail::is_prime(q)) {
      kind_ = field_kind::prime;
      modulus_ = 0;
      if (modulus)
        fail(errc::unsupported_order, "modulus given for a prime field");
    } else {
      fail(errc::unsupported_order,
           "q=" + std::to_string(q) + " is neither prime nor 2^m, m in {2,4,8}");
    }
  }

  static unsigned default_modulus(unsigned q) {
    switch (q) {
      case 4: return 0b111;              // x^2 + x + 1
      case 16: return 0b10011;           // x^4 + x + 1
      case 256: return 0b100011101;      // x^8 + x^4 + x^3 + x^2 + 1
    }
    return 0;
  }

  unsigned q() const { return q_; }
  field_kind kind() const { return kind_; }
  unsigned modulus() const { return modulus_; }

  void require(elem x) const {
    if (x >= q_)
      fail(errc::value_out_of_field, "element " + std::to_string(x) +
                                         " outside GF(" + std::to_string(q_) + ")");
  }

  elem add(elem x, elem y) const {
    require(x);
    require(y);
    if (kind_ == field_kind::prime) {
      unsigned s = unsigned(x) + unsigned(y);
      return elem(s >= q_ ? s - q_ : s);
    }
    return elem(x ^ y);
  }

  elem neg(elem x) const {
    require(x);
    if (kind_ == field_kind::prime) return elem(x ? q_ - x : 0);
    return x;
  }

  elem sub(elem x, elem y) const { return add(x, neg(y)); }

  elem mul(elem x, elem y) const {
    require(x);
    require(y);
    if (kind_ == field_kind::prime)
      return elem((std::uint32_t(x) * std::uint32_t(y)) % q_);
    if (x == 0 || y == 0) return 0;
    return (*exp_)[(unsigned((*log_)[x]) + unsigned((*log_)[y])) % (q_ - 1)];
  }

  elem inv(elem x) const {
    require(x);
    if (x == 0) fail(errc::divide_by_zero, "inverse of zero");
    if (kind_ == field_kind::binary_ext)
      return (*exp_)[(q_ - 1 - unsigned((*log_)[x])) % (q_ - 1)];
    // extended Euclid on (q, x)
    long long r0 = q_, r1 = x, t0 = 0, t1 = 1;
    while (r1 != 0) {
      long long quot = r0 / r1;
      long long r2 = r0 - quot * r1;
      long long t2 = t0 - quot * t1;
      r0 = r1; r1 = r2;
      t0 = t1; t1 = t2;
    }
    t0 %= static_cast<long long>(q_);
    if (t0 < 0) t0 += q_;
    return elem(t0);
  }

  elem div(elem x, elem y) const { return mul(x, inv(y)); }

  // the element acting as -1; equal to 1 in binary extensions
  elem minus_one() const { return neg(1); }

  bool operator==(const field& o) const {
    return q_ == o.q_ && modulus_ == o.modulus_;
  }
  bool operator!=(const field& o) const { return !(*this == o); }

 private:
  void build_tables() {
    std::vector<elem> lg(q_, 0), ex(q_ - 1, 0);
    unsigned g = 2;
    for (;; ++g) {
      unsigned t = g, ord = 1;
      while (t != 1) {
        t = detail::poly_mul(t, g, modulus_);
        ++ord;
      }
      if (ord == q_ - 1) break;
    }
    unsigned v = 1;
    for (unsigned i = 0; i + 1 < q_; ++i) {
      ex[i] = elem(v);
      lg[v] = elem(i);
      v = detail::poly_mul(v, g, modulus_);
    }
    log_ = std::make_shared<const std::vector<elem>>(std::move(lg));
    exp_ = std::make_shared<const std::vector<elem>>(std::move(ex));
  }

  unsigned q_ = 0;
  field_kind kind_ = field_kind::prime;
  unsigned modulus_ = 0;
  std::shared_ptr<const std::vector<elem>> log_, exp_;
};

}  // namespace msrforge
