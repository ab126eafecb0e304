#include "xmds/access.hpp"

#include <algorithm>
#include <stdexcept>

#include "json.hpp"

namespace xmds {

void AccessTrace::add_read(unsigned column, std::uint64_t elements,
                           std::uint64_t bits) {
  reads.push_back(HelperRead{column, elements, bits});
  bits_transferred += bits;
}

std::uint64_t optimal_bound(const CodeParams& params,
                            std::uint64_t column_bits) {
  const std::uint64_t d = params.d;
  const std::uint64_t t = params.t();
  const std::uint64_t numerator = d * column_bits;
  if (t == 0 || numerator % t != 0) {
    throw std::invalid_argument(
        "optimal_bound: d*m is not divisible by d-k+1");
  }
  return numerator / t;
}

AccessReport audit(const AccessTrace& trace) {
  AccessReport report;
  for (const HelperRead& read : trace.reads) {
    report.bits_read += read.bits;
    report.elements_read += read.elements;
    if (std::find(report.helpers_used.begin(), report.helpers_used.end(),
                  read.column) == report.helpers_used.end()) {
      report.helpers_used.push_back(read.column);
    }
  }
  report.bits_transferred = trace.bits_transferred;
  report.optimal_bits = trace.optimal_bits;
  if (trace.optimal_bits == 0) {
    report.ratio = ExactRatio{report.bits_transferred, 1};
  } else {
    report.ratio = ExactRatio{report.bits_transferred, trace.optimal_bits};
  }
  report.uncoded = !trace.coded;
  return report;
}

std::string AccessReport::to_json_string() const {
  nlohmann::json j;
  j["bits_read"] = bits_read;
  j["bits_transferred"] = bits_transferred;
  j["elements_read"] = elements_read;
  j["helpers_used"] = helpers_used;
  j["optimal_bits"] = optimal_bits;
  j["ratio"] = {{"num", ratio.num}, {"den", ratio.den}};
  j["uncoded"] = uncoded;
  return j.dump();
}

}  // namespace xmds
