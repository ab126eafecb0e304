// The column-pairing transformation that powers every construction in this
// library.  Given t = d-k+1 parallel instances of a code and a contiguous
// window ("partition") of t columns, the first transform mixes the instances
// inside the window so that each window column can later be repaired by
// reading a single row from every helper; the systematic variant substitutes
// the window's information columns first so the transformed code stores raw
// information.  Both generalize to vector-valued rows, which is how layered
// codes are built.
#pragma once

#include <utility>
#include <vector>

#include "xmds/evenodd.hpp"
#include "xmds/ring.hpp"

namespace xmds {

// Descriptor of one transformation application: the window of `width`
// consecutive columns starting at `partition_start` (wrapping modulo the
// column count), the mixing coefficient (default 1 + x^e), and whether the
// systematic variant is intended.  Construction validates that
// coefficient + 1 is invertible, which keeps pair_solve well-defined.
class TransformSpec {
 public:
  static TransformSpec make(unsigned partition_start, unsigned width,
                            RingElement coefficient, bool systematic);
  // The default coefficient 1 + x^e in R_p, from the code parameters.
  static TransformSpec standard(const CodeParams& params,
                                unsigned partition_start, bool systematic);

  unsigned partition_start() const { return partition_start_; }
  unsigned width() const { return width_; }
  const RingElement& coefficient() const { return coefficient_; }
  bool systematic() const { return systematic_; }
  // (coefficient + 1)^-1, the divisor used by pair_solve.
  const RingElement& mix_inverse() const { return mix_inverse_; }

  // Column index of the partition member with local label u.
  unsigned member(unsigned u, unsigned total_columns) const {
    return (partition_start_ + u) % total_columns;
  }

 private:
  TransformSpec(unsigned start, unsigned width, RingElement coefficient,
                RingElement mix_inverse, bool systematic)
      : partition_start_(start),
        width_(width),
        coefficient_(std::move(coefficient)),
        mix_inverse_(std::move(mix_inverse)),
        systematic_(systematic) {}

  unsigned partition_start_;
  unsigned width_;
  RingElement coefficient_;
  RingElement mix_inverse_;
  bool systematic_;
};

// t parallel codewords with identical parameters and row counts.
struct InstanceBundle {
  std::vector<CodewordArray> instances;

  // Validates that all instances share params and per-column row counts.
  static InstanceBundle make(std::vector<CodewordArray> instances);
};

// First (non-systematic) transform.  The output column with local label i in
// the window stores, as row blocks l = 0..t-1 (each block one input row
// vector long):
//   l < i : inst_l[col_i] + inst_i[col_l]
//   l = i : inst_i[col_i]
//   l > i : inst_l[col_i] + coefficient * inst_i[col_l]
// Columns outside the window store the t instances stacked unchanged.
// The result has t times the sub-packetization (params.layers + 1); with
// t = 1 the transform is the identity and the shape is unchanged.
CodewordArray first_transform(const InstanceBundle& bundle,
                              const TransformSpec& spec);

// Inverts the off-diagonal pairing: given
//   u = a_ij + coefficient * a_ji   and   v = a_ij + a_ji,
// returns (a_ij, a_ji).  Throws NotInvertible only for specs that bypassed
// validation.
std::pair<RingElement, RingElement> pair_solve(const RingElement& u,
                                               const RingElement& v,
                                               const TransformSpec& spec);
// Component-wise variant for vector-valued rows.
std::pair<std::vector<RingElement>, std::vector<RingElement>> pair_solve(
    const std::vector<RingElement>& u, const std::vector<RingElement>& v,
    const TransformSpec& spec);

// Systematic transform of one layer over the base code: takes the raw
// information cells info[j][l] (column j = 0..k-1, instance l = 0..t-1),
// substitutes the window columns by
//   u = l : info[j][l]
//   u > l : c * (info[j][l] + info[col_l][u])
//   u < l : c * info[j][l] + (1 + c) * info[col_l][u]
// with c = mix_inverse() and u the local label of column j, then encodes
// every substituted instance with the base code.  The output stores the raw
// information cells in the k information columns and the per-instance
// parities in the r parity columns (t rows each).  The window must lie
// inside the information columns.
CodewordArray systematic_transform(
    const std::vector<std::vector<RingElement>>& info,
    const TransformSpec& spec, const CodeParams& params);

// Verifies on concrete data that the two transform variants are equivalent:
// substituting the window columns of the bundle's information cells and
// running the first transform must reproduce systematic_transform bit for
// bit.  The bundle must hold t single-row base codewords.
bool transform_equivalence_check(const InstanceBundle& bundle,
                                 const TransformSpec& spec);

}  // namespace xmds
