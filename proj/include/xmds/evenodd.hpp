// EVENODD encoding and erasure decoding over R_p for arbitrary (k, r, p):
// information columns hold polynomials a_0(x)..a_{k-1}(x); parity column k+j
// stores sum_i x^(i*j) a_i(x).  This is the base layer every transformation
// builds on.  The classical EVENODD adjuster bit is absorbed by ring
// canonicalization (all arithmetic stays in R_p).
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "xmds/ring.hpp"

namespace xmds {

// Code parameters shared by the base code and its transformed versions.
//   k      information columns (>= 1)
//   r      parity columns (>= 1)
//   d      helper-column count used by repair, k <= d <= k+r-1
//   p      prime with p >= max(k, r)
//   e      shift exponent of the encoding coefficient 1+x^e, 1 <= e <= p-1
//   layers number of transformation layers (0 = untransformed base code)
struct CodeParams {
  unsigned k = 0;
  unsigned r = 0;
  unsigned d = 0;
  unsigned p = 0;
  unsigned e = 1;
  unsigned layers = 0;

  // Validates all invariants; throws std::invalid_argument with a message.
  static CodeParams make(unsigned k, unsigned r, unsigned d, unsigned p,
                         unsigned e = 1, unsigned layers = 0);

  unsigned n() const { return k + r; }
  unsigned t() const { return d - k + 1; }
  // Ring elements per column: t^layers.
  unsigned rows() const;
  // Sub-packetization in bits per column: (p-1) * t^layers.
  unsigned subpacketization_bits() const { return (p - 1) * rows(); }
  Modulus ring() const { return Modulus::evenodd_ring(p); }
};

// A (k+r)-column codeword; every column is an ordered list of row
// polynomials (one RingElement per row, rows() of them).
struct CodewordArray {
  CodeParams params;
  std::vector<std::vector<RingElement>> columns;

  static CodewordArray zero(const CodeParams& params);
};

// A set of erased column indices, |erased| <= r.
struct ErasurePattern {
  std::vector<unsigned> erased;  // distinct, each < k+r

  static ErasurePattern make(std::vector<unsigned> erased, const CodeParams& p);
  bool contains(unsigned column) const;
};

// Encodes k information polynomials into a layers=0 codeword (one row).
CodewordArray evenodd_encode(const std::vector<RingElement>& info,
                             const CodeParams& params);

// Recovers the erased columns of a layers=0 codeword by subtracting the known
// information contributions from the surviving parities and solving the
// resulting system by successive elimination (invertible x^a+x^b pivots).
// Only non-erased columns of `array` are read.  Returns the fully restored
// codeword, or nullopt when the system is singular (non-MDS parameters).
std::optional<CodewordArray> syndrome_decode(const CodewordArray& array,
                                             const ErasurePattern& pattern);

// Empirical MDS verification: every k-subset of columns must decode basis and
// seeded-random codewords exactly.
struct CheckMdsResult {
  bool ok = false;
  std::vector<unsigned> failing_subset;  // surviving-column set that failed
};
CheckMdsResult check_mds(const CodeParams& params, unsigned random_trials = 4,
                         std::uint64_t seed = 0x9e3779b97f4a7c15ull);

}  // namespace xmds
