// Two-instance transformed EVENODD with r=2: optimal repair access for both
// parity columns while information columns keep the efficient (~3/4)
// repair of the base code, at sub-packetization 2(p-1) bits per column.
//
// Two base EVENODD codewords a, b over R_p are paired per column.  With
// a_k = sum_j a_j (row parity) and a_{k+1} = sum_j x^j a_j (diagonal
// parity), the stored columns are:
//
//   column j < k :  ( a_j             , b_j     )
//   column k     :  ( a_k + b_k       , b_{k+1} )
//   column k + 1 :  ( a_k + b̄_k + b*_k, a_{k+1} )
//
// where star swaps adjacent coefficient pairs of the (p-1)-vector and bar
// zeroes its odd coefficients.  Parity repairs read k+1 whole vectors --
// exactly the (k+1)(p-1)-bit cut-set bound for d = k+1.  Information repairs
// run the base code's partial-column repair on each instance, reading twice
// the base cost; they require p-1 divisible by 4 (the pair-swap unmixing
// needs an even number of coefficient pairs per half).
#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "xmds/access.hpp"
#include "xmds/ring.hpp"

namespace xmds {

// One stored column: the two instance polynomials in R_p.
struct TePair {
  RingElement a;
  RingElement b;

  friend bool operator==(const TePair& l, const TePair& r) {
    return l.a == r.a && l.b == r.b;
  }
  friend bool operator!=(const TePair& l, const TePair& r) { return !(l == r); }
};

// Swaps adjacent coefficient pairs: out[2i] = v[2i+1], out[2i+1] = v[2i]
// over the p-1 canonical coefficients.
RingElement te2_star(const RingElement& v);
// Zeroes the odd canonical coefficients.
RingElement te2_bar(const RingElement& v);

// Encodes k information pairs into k+2 columns.  Requires p an odd prime
// with k <= p-1; encoding itself does not need p-1 divisible by 4.
std::vector<TePair> te2_encode(const std::vector<TePair>& info, unsigned p);

// Recovers the k information pairs from any k distinct surviving columns
// (the other columns of `array` are never read).
std::vector<TePair> te2_decode(const std::vector<TePair>& array,
                               const std::vector<unsigned>& available);

// Partial-column download sets S_0..S_{k+1} realizing the base r=2 EVENODD
// information repair of column f (S_f itself is empty): the first half of
// column f is rebuilt from rows S_k = {0..(p-1)/2-1} of the row parity, the
// rest from the diagonals S_{k+1} of the diagonal parity.  Every returned
// family is validated by repairing a full information-bit basis before being
// returned.
std::vector<std::vector<unsigned>> evenodd_info_repair_sets(unsigned f,
                                                            unsigned k,
                                                            unsigned p);

// Repairs one column of the transformed code.  Parity columns need no
// repair sets and read (k+1)(p-1) bits (the cut-set bound).  Information
// columns require p-1 divisible by 4 plus valid base repair sets, and read
// twice the base-code download.
std::pair<TePair, AccessReport> te2_repair(
    unsigned f, const std::vector<TePair>& array,
    const std::vector<std::vector<unsigned>>& base_repair_sets = {});

}  // namespace xmds
