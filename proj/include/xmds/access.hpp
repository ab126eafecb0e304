// Exact read/transfer accounting for repairs.  Every repair operation fills
// an AccessTrace while it touches helper columns; audit() turns the trace
// into an AccessReport comparing the transferred bits against the cut-set
// lower bound d*m/(d-k+1) for a single-column repair with d helpers and m
// bits per column.  "Read" counts bits touched at the helpers, "transferred"
// counts bits sent to the repairer; the two coincide for uncoded repair.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "xmds/evenodd.hpp"

namespace xmds {

// One read from a helper column: `elements` stored elements, `bits` bits.
struct HelperRead {
  unsigned column = 0;
  std::uint64_t elements = 0;
  std::uint64_t bits = 0;
};

// Log produced by an instrumented repair.  The repairer records every helper
// read, the bits it shipped, the bound for the column it is rebuilding, and
// whether any helper-side arithmetic occurred before transfer.
struct AccessTrace {
  std::vector<HelperRead> reads;
  std::uint64_t bits_transferred = 0;
  std::uint64_t optimal_bits = 0;
  bool coded = false;

  // Appends a read that is transferred verbatim (uncoded repair).
  void add_read(unsigned column, std::uint64_t elements, std::uint64_t bits);
};

// Exact rational, kept unreduced so reports show the raw bit counts.
struct ExactRatio {
  std::uint64_t num = 0;
  std::uint64_t den = 1;

  friend bool operator==(const ExactRatio& a, const ExactRatio& b) {
    return a.num == b.num && a.den == b.den;
  }
  bool is_one() const { return num == den && den != 0; }
};

// Totals of one repair, serializable to a stable JSON object.
struct AccessReport {
  std::uint64_t bits_read = 0;
  std::uint64_t bits_transferred = 0;
  std::uint64_t elements_read = 0;
  std::vector<unsigned> helpers_used;  // distinct columns, in first-read order
  std::uint64_t optimal_bits = 0;
  ExactRatio ratio;  // bits_transferred / optimal_bits
  bool uncoded = false;

  std::string to_json_string() const;
};

// The bound d*m/(d-k+1) in bits for column_bits = m bits per column.
// Throws std::invalid_argument when the bound is not an exact integer
// (which signals misconfigured parameters for the codes in this library).
std::uint64_t optimal_bound(const CodeParams& params,
                            std::uint64_t column_bits);

// Totals a trace into a report.  An empty trace yields an all-zero report
// with ratio 0/1.
AccessReport audit(const AccessTrace& trace);

}  // namespace xmds
