// Access accounting tests: trace totalling, the cut-set bound, unreduced
// ratios, and the JSON report shape.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "json.hpp"
#include "xmds/access.hpp"
#include "xmds/evenodd.hpp"

using namespace xmds;

TEST_CASE("optimal_bound is d*m/(d-k+1) and requires exactness") {
  // (4,2,5,5) three layers: 32 bits per column, bound 5*32/2 = 80.
  CHECK(optimal_bound(CodeParams::make(4, 2, 5, 5, 1, 3), 32) == 80);
  // The low sub-packetization parameters: 16-bit columns, d=3, t=2.
  CHECK(optimal_bound(CodeParams::make(2, 2, 3, 3), 16) == 24);
  CHECK(optimal_bound(CodeParams::make(2, 2, 3, 3), 8) == 12);
  // k=3, p=5, d=k+1: 8-bit columns, bound 4*8/2 = 16.
  CHECK(optimal_bound(CodeParams::make(3, 2, 4, 5), 8) == 16);
  // 5*33 is odd, so the bound is not an integer.
  CHECK_THROWS_AS(optimal_bound(CodeParams::make(4, 2, 5, 5, 1, 3), 33),
                  std::invalid_argument);
}

TEST_CASE("audit totals a trace") {
  AccessTrace trace;
  trace.add_read(2, 4, 16);
  trace.add_read(3, 4, 16);
  trace.add_read(2, 1, 4);  // second read from column 2: no new helper
  trace.optimal_bits = 24;

  const AccessReport report = audit(trace);
  CHECK(report.bits_read == 36);
  CHECK(report.bits_transferred == 36);
  CHECK(report.elements_read == 9);
  CHECK(report.helpers_used == std::vector<unsigned>{2, 3});
  CHECK(report.optimal_bits == 24);
  // The ratio stays unreduced so reports show the raw counts.
  CHECK(report.ratio == ExactRatio{36, 24});
  CHECK_FALSE(report.ratio.is_one());
  CHECK(report.uncoded);
}

TEST_CASE("audit of an empty trace is all zero with ratio 0/1") {
  const AccessReport report = audit(AccessTrace{});
  CHECK(report.bits_read == 0);
  CHECK(report.bits_transferred == 0);
  CHECK(report.elements_read == 0);
  CHECK(report.helpers_used.empty());
  CHECK(report.optimal_bits == 0);
  CHECK(report.ratio == ExactRatio{0, 1});
  CHECK(report.uncoded);
}

TEST_CASE("coded traces clear the uncoded flag") {
  AccessTrace trace;
  trace.add_read(0, 2, 8);
  trace.coded = true;
  trace.optimal_bits = 8;
  const AccessReport report = audit(trace);
  CHECK_FALSE(report.uncoded);
  CHECK(report.ratio.is_one());
}

TEST_CASE("json report carries every field") {
  AccessTrace trace;
  trace.add_read(1, 4, 16);
  trace.add_read(4, 4, 16);
  trace.optimal_bits = 32;
  const AccessReport report = audit(trace);

  const nlohmann::json j = nlohmann::json::parse(report.to_json_string());
  CHECK(j.at("bits_read") == 32);
  CHECK(j.at("bits_transferred") == 32);
  CHECK(j.at("elements_read") == 8);
  CHECK(j.at("helpers_used") == nlohmann::json({1, 4}));
  CHECK(j.at("optimal_bits") == 32);
  CHECK(j.at("ratio").at("num") == 32);
  CHECK(j.at("ratio").at("den") == 32);
  CHECK(j.at("uncoded") == true);
}
