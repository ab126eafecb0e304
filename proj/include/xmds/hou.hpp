// The fixed-parameter (k=2, r=2, d=3, p=3, tau=4) binary MDS array code with
// asymptotically optimal information repair, plus its transformed version
// with optimal parity repair.
//
// Each base column stores 8 bits; four derived extra bits (never stored)
// extend a column to a 12-bit vector closed under multiplication by x in
// F2[x]/(1+x^12), which makes parity definitions with mod-12 subscripts and
// the x^4 mixing coefficient work.  The transformed code interleaves two
// base instances (a, b): 16 bits per column, pairing the parity columns with
// mixing coefficient x^4 (columns 2/3 store a2, b2+x^4*a3 and a3+b2, b3).
//
// Everything is GF(2)-linear in the 32 information bits, so encode, decode,
// and repair are implemented against an explicit generator matrix; the fixed
// repair download sets are known-answer data with access costs
// {12, 14, 16, 16} (base) and {24, 28, 24, 24} (transformed) by column.
#pragma once

#include <array>
#include <cstdint>
#include <utility>

#include "xmds/access.hpp"
#include "xmds/ring.hpp"

namespace xmds {

// 8 stored bits of one base-code column; bits[i] in {0,1}.
struct HouColumn {
  std::array<std::uint8_t, 8> bits{};

  friend bool operator==(const HouColumn& a, const HouColumn& b) {
    return a.bits == b.bits;
  }
};

using HouInfo = std::array<HouColumn, 2>;
using HouArray = std::array<HouColumn, 4>;

// The four derived extra bits: extra[u] = bits[u] + bits[4+u].
std::array<std::uint8_t, 4> hou_extra_bits(const HouColumn& column);

// Parity columns: column 2 bit i = a_{i,0}+a_{i,1}; column 3 bit i =
// a_{i-1,0}+a_{i-2,1} with subscripts wrapping through the 12-bit extended
// vector.
HouArray hou_encode(const HouInfo& info);

// Recovers both information columns from any two distinct surviving columns.
HouInfo hou_decode(const HouArray& array, const std::array<unsigned, 2>& available);

// Repairs one column from the other three using the fixed download sets.
// Costs: column 0 reads 12 bits (optimal), column 1 reads 14, parity columns
// read all 16 information bits.
std::pair<HouColumn, AccessReport> hou_repair(unsigned f, const HouArray& array);

// 16 stored bits of one transformed column: the degree-0..7 coefficients of
// the column's first polynomial (bits 0..7) and second polynomial (8..15).
struct HouTransformedColumn {
  std::array<std::uint8_t, 16> bits{};

  friend bool operator==(const HouTransformedColumn& a,
                         const HouTransformedColumn& b) {
    return a.bits == b.bits;
  }
};

using HouTransformedArray = std::array<HouTransformedColumn, 4>;

// x^4 in F2[x]/(1+x^12), the reference mixing coefficient.
RingElement hou_default_coefficient();

// Encodes two base instances and pairs the parity columns with the mixing
// coefficient (an element of F2[x]/(1+x^12)).
HouTransformedArray hou_transformed_encode(
    const HouInfo& a_info, const HouInfo& b_info,
    const RingElement& coefficient = hou_default_coefficient());

// Recovers both instances' information columns from any two surviving
// transformed columns (first result: instance a, second: instance b).
std::pair<HouInfo, HouInfo> hou_transformed_decode(
    const HouTransformedArray& array, const std::array<unsigned, 2>& available,
    const RingElement& coefficient = hou_default_coefficient());

// Repairs one transformed column.  Costs: {24, 28, 24, 24} bits by column;
// parity repairs and the column-0 repair meet the cut-set bound (24).
std::pair<HouTransformedColumn, AccessReport> hou_transformed_repair(
    unsigned f, const HouTransformedArray& array,
    const RingElement& coefficient = hou_default_coefficient());

// Exact rank tests of what a mixing coefficient preserves in the transformed
// code (no sampling).  Because the extra-bit subspace is the kernel of
// 1+x^4+x^8, only the coefficient's residue modulo 1+x^4+x^8 matters:
// residues x^4 and x^8 (so also 1+x^8 and 1+x^4) preserve everything;
// residue 0 (e.g. 1+x^4+x^8) keeps decodability and the information repairs
// but breaks the column-3 repair; every other residue (e.g. x, or x^4+x^8
// which is congruent to 1) loses the information-column repair sets.
struct HouCoefficientReport {
  bool decodable = false;      // every 2-of-4 column pair recovers all info
  bool info_repair = false;    // fixed download sets for columns 0 and 1
  bool parity_repair = false;  // fixed download sets for columns 2 and 3
  bool all() const { return decodable && info_repair && parity_repair; }
};
HouCoefficientReport hou_certify_coefficient(const RingElement& coefficient);

}  // namespace xmds
