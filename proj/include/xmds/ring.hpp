// Exact arithmetic in the two binary quotient rings used by the array codes:
//
//   R_p        = F2[x] / (1 + x + ... + x^(p-1)),  p prime   ("evenodd ring")
//   C_n        = F2[x] / (x^n + 1)                            ("circulant ring")
//
// Elements are packed coefficient bit vectors.  R_p elements are kept in a
// length-p representation under x^p + 1 so that multiplication by x^e is a
// pure cyclic rotation; the canonical form zeroes the x^(p-1) coefficient by
// adding the modulus polynomial M_p(x) = 1 + x + ... + x^(p-1) whenever the
// top bit is set.  Circulant elements are never reduced (x^n == 1 only wraps
// indices).
#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace xmds {

// Thrown when a ring division is requested with a non-invertible divisor.
class NotInvertible : public std::domain_error {
 public:
  explicit NotInvertible(const std::string& what) : std::domain_error(what) {}
};

enum class RingKind : std::uint8_t { EvenoddRing, Circulant };

// Descriptor of the quotient ring an element lives in.
class Modulus {
 public:
  // F2[x]/(1 + x + ... + x^(p-1)); requires p prime, p >= 3.
  static Modulus evenodd_ring(unsigned p);
  // F2[x]/(x^n + 1); requires n >= 1.
  static Modulus circulant(unsigned n);

  RingKind kind() const { return kind_; }
  // Length of the coefficient vector: p for EvenoddRing, n for Circulant.
  unsigned size() const { return size_; }
  bool is_evenodd() const { return kind_ == RingKind::EvenoddRing; }
  // Bits that are actually stored/transmitted per element: p-1 canonical
  // coefficients for EvenoddRing (the top one is always zero), n for
  // Circulant.
  unsigned payload_bits() const {
    return is_evenodd() ? size_ - 1 : size_;
  }

  friend bool operator==(const Modulus& a, const Modulus& b) {
    return a.kind_ == b.kind_ && a.size_ == b.size_;
  }
  friend bool operator!=(const Modulus& a, const Modulus& b) {
    return !(a == b);
  }

 private:
  Modulus(RingKind kind, unsigned size) : kind_(kind), size_(size) {}
  RingKind kind_;
  unsigned size_;
};

bool is_prime(unsigned n);

// Immutable element of R_p or C_n as a packed bit vector of coefficients.
// All operations are pure; values are safe to share between threads.
class RingElement {
 public:
  static RingElement zero(const Modulus& m);
  static RingElement one(const Modulus& m);
  // x^e (e is reduced modulo the representation length).
  static RingElement monomial(const Modulus& m, unsigned e);
  // From explicit coefficients c[0] + c[1]x + ...; shorter vectors are
  // zero-extended, longer ones rejected.  The result is canonicalized.
  static RingElement from_coefficients(const Modulus& m,
                                       const std::vector<std::uint8_t>& coeffs);

  const Modulus& modulus() const { return mod_; }
  unsigned length() const { return mod_.size(); }
  bool coefficient(unsigned i) const;
  bool is_zero() const;
  std::vector<std::uint8_t> coefficients() const;
  // Human-readable polynomial, e.g. "1+x^2" or "0".
  std::string to_string() const;

  friend bool operator==(const RingElement& a, const RingElement& b) {
    return a.mod_ == b.mod_ && a.bits_ == b.bits_;
  }
  friend bool operator!=(const RingElement& a, const RingElement& b) {
    return !(a == b);
  }

  // Coefficient-wise XOR (the ring addition; its own inverse).
  friend RingElement ring_add(const RingElement& a, const RingElement& b);
  // x^e * a: cyclic rotation of the representation, then canonicalization.
  friend RingElement shift_mul(const RingElement& a, unsigned e);
  // General product a * f in the ring.
  friend RingElement poly_mul(const RingElement& a, const RingElement& f);
  // Multiplicative inverse via the extended Euclidean algorithm over F2[x]
  // against x^p+1 (resp. x^n+1).  Returns nullopt when gcd(f, modulus) != 1;
  // non-invertibility is an expected outcome, not an exception.
  friend std::optional<RingElement> ring_inv(const RingElement& f);
  // u / f.  Requires f invertible; throws NotInvertible otherwise.
  friend RingElement solve_scaled(const RingElement& u, const RingElement& f);

  RingElement operator+(const RingElement& o) const { return ring_add(*this, o); }
  RingElement operator*(const RingElement& o) const { return poly_mul(*this, o); }

 private:
  RingElement(Modulus m, std::vector<std::uint64_t> bits)
      : mod_(m), bits_(std::move(bits)) {}
  void canonicalize();

  Modulus mod_;
  std::vector<std::uint64_t> bits_;  // packed little-endian: bit i = coeff of x^i
};

}  // namespace xmds
