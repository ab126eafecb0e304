// Layered transformed codes with optimal repair access for every column.
//
// The code is built by repeatedly applying the column-pairing transformation:
// once per information partition (systematic variant) and once per parity
// partition (first variant).  A code with L layers stores t^L row polynomials
// per column (t = d-k+1).  Repairing column f touches the t^(L-1) rows whose
// layer-lambda_f digit selects f's slot inside its partition, reading exactly
// d*t^(L-1) elements -- the cut-set bound.
//
// Repairs and decodes are compiled once per (code, column/pattern) into
// recipes: each recovered cell is a fixed linear combination of the cells
// actually read.  Compilation runs a structural solver over the layer
// relations (pair equations per layer plus the base-code parity equations
// per row), so a returned plan is correct for every codeword.
#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "xmds/access.hpp"
#include "xmds/evenodd.hpp"
#include "xmds/ring.hpp"

namespace xmds {

// A partition: `size` consecutive columns starting at `start`.
struct Partition {
  unsigned start = 0;
  unsigned size = 0;
  bool parity = false;  // true when the member columns are parity columns

  bool contains(unsigned column) const {
    return column >= start && column < start + size;
  }
};

// Ordered partition layout.  parts[i] has label i+1; information partitions
// come first (info_count of them), parity partitions follow.
struct PartitionMap {
  std::vector<Partition> parts;
  unsigned info_count = 0;

  // ceil(k/t) information partitions starting at min(i*t, k-t) and
  // ceil(r/t) parity partitions starting at k + min(i*t, r-t): partitions
  // tile the columns in index order, and the last partition of each side
  // covers the last t columns, overlapping its predecessor when t does not
  // divide k (or r).
  static PartitionMap standard(const CodeParams& params);
};

class MultilayerCode {
 public:
  // Standard construction with layers = ceil(k/t) + ceil(r/t).  Validates
  // parameters, verifies the base code is MDS (throws std::invalid_argument
  // otherwise), and checks the mixing coefficient 1+x^e and its successor
  // are invertible.  d = k degenerates to the untransformed base code
  // (layers = 0).
  static MultilayerCode build(unsigned k, unsigned r, unsigned d, unsigned p,
                              unsigned e = 1);
  // Custom partition layout with params.layers = map.parts.size(); used for
  // single-layer and partially layered codes.  Skips the base MDS check.
  static MultilayerCode custom(const CodeParams& params, PartitionMap map);

  const CodeParams& params() const { return params_; }
  const PartitionMap& partitions() const { return map_; }
  // The mixing coefficient 1 + x^e.
  const RingElement& coefficient() const { return gamma_; }
  unsigned layers() const { return params_.layers; }
  unsigned rows() const { return params_.rows(); }
  // The digit of `row` that selects the instance slot at layer `label`
  // (labels are 1-based; the first-applied layer has stride 1).
  unsigned digit(unsigned row, unsigned label) const;
  // t^(label-1), the row stride of layer `label`.
  unsigned stride(unsigned label) const;

 private:
  MultilayerCode(CodeParams params, PartitionMap map, RingElement gamma)
      : params_(params), map_(std::move(map)), gamma_(std::move(gamma)) {}

  CodeParams params_;
  PartitionMap map_;
  RingElement gamma_;
};

MultilayerCode build_multilayer(unsigned k, unsigned r, unsigned d, unsigned p,
                                unsigned e = 1);

// Systematic encode: info[j] holds rows() elements for information column j.
CodewordArray encode_multilayer(
    const std::vector<std::vector<RingElement>>& info,
    const MultilayerCode& code);

// Compiled linear program reconstructing one column from helper reads.
struct RepairRecipe;

struct RepairPlan {
  unsigned failed = 0;
  // Label of the partition whose slot structure drives the repair (0 for the
  // degenerate t=1 code), and the decomposition it induces: for an
  // information column f = t*m_f + r_f holds on partition-aligned layouts;
  // for a parity column the same with f-k.
  unsigned layer = 0;
  unsigned m_f = 0;
  unsigned r_f = 0;
  std::vector<unsigned> helpers;  // d columns, ascending
  std::vector<unsigned> rows;     // row indices read from every helper
  std::uint64_t predicted_bits = 0;
  CodeParams params;
  std::shared_ptr<const RepairRecipe> recipe;
};

// Deterministic helper selection for repairing column f: the other t-1
// columns of f's partition are always included; the remaining helpers are
// chosen greedily (whole partitions in ascending label order, then the
// lowest-indexed columns of the lowest-labeled partitions), and every
// candidate set is verified by compiling its repair recipe before being
// returned.  The emitted row set is the layer-lambda_f digit class of f.
RepairPlan select_helpers(unsigned f, const MultilayerCode& code);

// Applies a compiled plan.  Reads only plan.helpers x plan.rows cells of
// `survivors` (the failed column is never read) and returns the rebuilt
// column plus the audited access report.
std::pair<std::vector<RingElement>, AccessReport> repair_column(
    const CodewordArray& survivors, const RepairPlan& plan);

// Compiled eraser-pattern decoder; compile once, apply to many codewords.
class MultilayerDecoder {
 public:
  // Returns nullopt when the pattern is not decodable (non-MDS parameters).
  static std::optional<MultilayerDecoder> compile(const MultilayerCode& code,
                                                  const ErasurePattern& pattern);
  // Restores the erased columns from the surviving ones (erased column
  // contents in the input are ignored).
  CodewordArray operator()(const CodewordArray& damaged) const;

  const std::vector<unsigned>& erased() const { return erased_; }

 private:
  struct Term {
    unsigned column = 0;  // surviving column read
    unsigned row = 0;
    RingElement coeff;
  };
  MultilayerDecoder() = default;

  CodeParams params_;
  std::vector<unsigned> erased_;
  std::vector<std::vector<std::vector<Term>>> recipes_;  // [erased][row]
};

// Convenience wrapper: rebuilds the standard code for array.params, compiles
// the pattern, and applies it.  Returns nullopt when undecodable.
std::optional<CodewordArray> decode_multilayer(const CodewordArray& array,
                                               const ErasurePattern& pattern);

}  // namespace xmds
