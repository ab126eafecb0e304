#include "xmds/ring.hpp"

#include <algorithm>

namespace xmds {

namespace {

constexpr unsigned kWordBits = 64;

std::size_t words_for(unsigned bits) { return (bits + kWordBits - 1) / kWordBits; }

bool get_bit(const std::vector<std::uint64_t>& w, unsigned i) {
  return (w[i / kWordBits] >> (i % kWordBits)) & 1u;
}

void set_bit(std::vector<std::uint64_t>& w, unsigned i, bool v) {
  std::uint64_t mask = std::uint64_t{1} << (i % kWordBits);
  if (v)
    w[i / kWordBits] |= mask;
  else
    w[i / kWordBits] &= ~mask;
}

void xor_into(std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] ^= b[i];
}

// Cyclic left rotation by e within an n-bit vector: bit i -> bit (i+e) mod n.
std::vector<std::uint64_t> rotate_bits(const std::vector<std::uint64_t>& src,
                                       unsigned n, unsigned e) {
  std::vector<std::uint64_t> out(src.size(), 0);
  for (unsigned i = 0; i < n; ++i) {
    if (get_bit(src, i)) set_bit(out, (i + e) % n, true);
  }
  return out;
}

// --- dense F2[x] polynomials for the extended Euclidean algorithm ---

struct Poly {
  std::vector<std::uint64_t> w;  // bit i = coefficient of x^i
  int deg = -1;                  // -1 for the zero polynomial

  bool bit(unsigned i) const {
    return i / kWordBits < w.size() && ((w[i / kWordBits] >> (i % kWordBits)) & 1u);
  }
  void grow(unsigned bits) {
    if (w.size() < words_for(bits)) w.resize(words_for(bits), 0);
  }
  void refresh_deg(int from) {
    deg = -1;
    for (int i = from; i >= 0; --i) {
      if (bit(static_cast<unsigned>(i))) {
        deg = i;
        break;
      }
    }
  }
  bool is_zero() const { return deg < 0; }
};

// a ^= b * x^shift
void xor_shifted(Poly& a, const Poly& b, unsigned shift) {
  if (b.is_zero()) return;
  a.grow(static_cast<unsigned>(b.deg) + shift + 1);
  for (int i = 0; i <= b.deg; ++i) {
    if (b.bit(static_cast<unsigned>(i))) {
      unsigned pos = static_cast<unsigned>(i) + shift;
      a.w[pos / kWordBits] ^= std::uint64_t{1} << (pos % kWordBits);
    }
  }
  a.refresh_deg(std::max(a.deg, b.deg + static_cast<int>(shift)));
}

// Replaces a with a mod b and returns the quotient; b must be nonzero.
Poly divmod(Poly& a, const Poly& b) {
  Poly q;
  while (!a.is_zero() && a.deg >= b.deg) {
    unsigned shift = static_cast<unsigned>(a.deg - b.deg);
    Poly one;
    one.grow(shift + 1);
    one.w[shift / kWordBits] |= std::uint64_t{1} << (shift % kWordBits);
    one.deg = static_cast<int>(shift);
    xor_shifted(q, one, 0);
    xor_shifted(a, b, shift);
  }
  return q;
}

Poly poly_from_bits(const std::vector<std::uint64_t>& bits, unsigned n) {
  Poly p;
  p.w.assign(bits.begin(), bits.end());
  p.grow(n);
  p.refresh_deg(static_cast<int>(n) - 1);
  return p;
}

}  // namespace

bool is_prime(unsigned n) {
  if (n < 2) return false;
  for (unsigned q = 2; q * q <= n; ++q) {
    if (n % q == 0) return false;
  }
  return true;
}

Modulus Modulus::evenodd_ring(unsigned p) {
  if (p < 3 || !is_prime(p))
    throw std::invalid_argument("evenodd ring requires a prime p >= 3, got " +
                                std::to_string(p));
  return Modulus(RingKind::EvenoddRing, p);
}

Modulus Modulus::circulant(unsigned n) {
  if (n < 1) throw std::invalid_argument("circulant ring requires n >= 1");
  return Modulus(RingKind::Circulant, n);
}

void RingElement::canonicalize() {
  if (mod_.kind() != RingKind::EvenoddRing) return;
  unsigned p = mod_.size();
  if (!get_bit(bits_, p - 1)) return;
  // Add M_p(x) = 1 + x + ... + x^(p-1): XOR with p ones.
  for (unsigned i = 0; i < p; ++i)
    bits_[i / kWordBits] ^= std::uint64_t{1} << (i % kWordBits);
}

RingElement RingElement::zero(const Modulus& m) {
  return RingElement(m, std::vector<std::uint64_t>(words_for(m.size()), 0));
}

RingElement RingElement::one(const Modulus& m) {
  RingElement r = zero(m);
  set_bit(r.bits_, 0, true);
  return r;
}

RingElement RingElement::monomial(const Modulus& m, unsigned e) {
  RingElement r = zero(m);
  set_bit(r.bits_, e % m.size(), true);
  r.canonicalize();
  return r;
}

RingElement RingElement::from_coefficients(const Modulus& m,
                                           const std::vector<std::uint8_t>& coeffs) {
  if (coeffs.size() > m.size())
    throw std::invalid_argument("coefficient vector longer than the ring size");
  RingElement r = zero(m);
  for (unsigned i = 0; i < coeffs.size(); ++i) {
    if (coeffs[i] & 1) set_bit(r.bits_, i, true);
  }
  r.canonicalize();
  return r;
}

bool RingElement::coefficient(unsigned i) const {
  if (i >= mod_.size()) throw std::out_of_range("coefficient index out of range");
  return get_bit(bits_, i);
}

bool RingElement::is_zero() const {
  for (auto w : bits_)
    if (w) return false;
  return true;
}

std::vector<std::uint8_t> RingElement::coefficients() const {
  std::vector<std::uint8_t> out(mod_.size());
  for (unsigned i = 0; i < mod_.size(); ++i) out[i] = get_bit(bits_, i) ? 1 : 0;
  return out;
}

std::string RingElement::to_string() const {
  std::string s;
  for (unsigned i = 0; i < mod_.size(); ++i) {
    if (!get_bit(bits_, i)) continue;
    if (!s.empty()) s += "+";
    if (i == 0)
      s += "1";
    else if (i == 1)
      s += "x";
    else
      s += "x^" + std::to_string(i);
  }
  return s.empty() ? "0" : s;
}

RingElement ring_add(const RingElement& a, const RingElement& b) {
  if (a.mod_ != b.mod_) throw std::invalid_argument("ring_add: modulus mismatch");
  RingElement r = a;
  xor_into(r.bits_, b.bits_);
  // XOR of two canonical elements keeps the top coefficient clear; for
  // circulant elements there is nothing to reduce.
  return r;
}

RingElement shift_mul(const RingElement& a, unsigned e) {
  RingElement r(a.mod_, rotate_bits(a.bits_, a.mod_.size(), e % a.mod_.size()));
  r.canonicalize();
  return r;
}

RingElement poly_mul(const RingElement& a, const RingElement& f) {
  if (a.mod_ != f.mod_) throw std::invalid_argument("poly_mul: modulus mismatch");
  unsigned n = a.mod_.size();
  RingElement r = RingElement::zero(a.mod_);
  // x^i * f is a rotation in the length-n representation; sum over set bits.
  for (unsigned i = 0; i < n; ++i) {
    if (get_bit(a.bits_, i)) xor_into(r.bits_, rotate_bits(f.bits_, n, i));
  }
  r.canonicalize();
  return r;
}

std::optional<RingElement> ring_inv(const RingElement& f) {
  const Modulus& m = f.modulus();
  unsigned n = m.size();

  // The modulus polynomial to invert against: M_p(x) for the evenodd ring
  // (inversion must be computed in the quotient by M_p, not by x^p+1, since
  // the length-p representation is only a container), x^n+1 for circulant.
  Poly modpoly;
  if (m.is_evenodd()) {
    modpoly.grow(n);
    for (unsigned i = 0; i < n; ++i)
      modpoly.w[i / kWordBits] |= std::uint64_t{1} << (i % kWordBits);
    modpoly.deg = static_cast<int>(n) - 1;
  } else {
    modpoly.grow(n + 1);
    modpoly.w[0] |= 1;
    modpoly.w[n / kWordBits] |= std::uint64_t{1} << (n % kWordBits);
    modpoly.deg = static_cast<int>(n);
  }

  // For the evenodd ring, work with the canonical degree <= p-2 representative
  // (elements are stored canonical, so the bit vector is usable as-is).
  std::vector<std::uint64_t> fw(words_for(n), 0);
  for (unsigned i = 0; i < n; ++i)
    if (f.coefficient(i)) set_bit(fw, i, true);
  Poly a = poly_from_bits(fw, n);
  if (a.is_zero()) return std::nullopt;

  // Extended Euclid: maintain r0 = modpoly, r1 = a, with s-coefficients for a.
  Poly r0 = modpoly, r1 = a;
  Poly s0, s1;
  s1.grow(1);
  s1.w[0] = 1;
  s1.deg = 0;
  while (!r1.is_zero()) {
    Poly rem = r0;
    Poly q = divmod(rem, r1);
    // (r0, r1) <- (r1, r0 - q r1); (s0, s1) <- (s1, s0 - q s1)
    Poly s2 = s0;
    if (!q.is_zero() && !s1.is_zero()) {
      for (int i = 0; i <= q.deg; ++i)
        if (q.bit(static_cast<unsigned>(i)))
          xor_shifted(s2, s1, static_cast<unsigned>(i));
    }
    r0 = r1;
    r1 = rem;
    s0 = s1;
    s1 = s2;
  }
  if (r0.deg != 0) return std::nullopt;  // gcd != 1
  // s0 * f == 1 (mod modpoly); s0 has degree < deg(modpoly) <= n.
  std::vector<std::uint8_t> coeffs(n, 0);
  for (unsigned i = 0; i < n; ++i) coeffs[i] = s0.bit(i) ? 1 : 0;
  return RingElement::from_coefficients(m, coeffs);
}

RingElement solve_scaled(const RingElement& u, const RingElement& f) {
  if (u.modulus() != f.modulus())
    throw std::invalid_argument("solve_scaled: modulus mismatch");
  auto inv = ring_inv(f);
  if (!inv) throw NotInvertible("solve_scaled: divisor " + f.to_string() +
                                " is not invertible");
  return poly_mul(u, *inv);
}

}  // namespace xmds
