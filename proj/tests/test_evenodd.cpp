// Base EVENODD code tests: parameter validation, encoding against both the
// algebraic oracle and the classical bit-level known-answer table, full
// erasure decoding for every pattern, and the empirical MDS check.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdint>
#include <random>
#include <vector>

#include "test_util.hpp"
#include "xmds/evenodd.hpp"

using namespace xmds;
using namespace xmds::testutil;

namespace {

const std::vector<CodeParams> kGrid = {
    CodeParams::make(2, 2, 3, 3), CodeParams::make(3, 2, 4, 5),
    CodeParams::make(4, 2, 5, 5), CodeParams::make(4, 3, 5, 5),
    CodeParams::make(5, 3, 7, 7), CodeParams::make(4, 2, 5, 7, 2)};

std::vector<RingElement> random_info(const CodeParams& params,
                                     std::mt19937_64& rng) {
  std::vector<RingElement> info;
  for (unsigned j = 0; j < params.k; ++j)
    info.push_back(random_element(params.ring(), rng));
  return info;
}

// Every erasure pattern of size 1..max over n columns.
std::vector<std::vector<unsigned>> patterns(unsigned n, unsigned max) {
  std::vector<std::vector<unsigned>> out;
  std::vector<unsigned> cur;
  const std::function<void(unsigned)> walk = [&](unsigned from) {
    if (!cur.empty()) out.push_back(cur);
    if (cur.size() == max) return;
    for (unsigned c = from; c < n; ++c) {
      cur.push_back(c);
      walk(c + 1);
      cur.pop_back();
    }
  };
  walk(0);
  return out;
}

}  // namespace

TEST_CASE("parameter validation") {
  const CodeParams ok = CodeParams::make(4, 2, 5, 5);
  CHECK(ok.n() == 6);
  CHECK(ok.t() == 2);
  CHECK(ok.rows() == 1);
  CHECK(ok.subpacketization_bits() == 4);
  CHECK(CodeParams::make(4, 2, 5, 5, 1, 3).rows() == 8);
  CHECK(CodeParams::make(4, 2, 5, 5, 1, 3).subpacketization_bits() == 32);
  CHECK(CodeParams::make(4, 3, 6, 5, 1, 3).rows() == 27);

  CHECK_THROWS_AS(CodeParams::make(0, 2, 5, 5), std::invalid_argument);
  CHECK_THROWS_AS(CodeParams::make(4, 0, 4, 5), std::invalid_argument);
  CHECK_THROWS_AS(CodeParams::make(4, 2, 3, 5), std::invalid_argument);   // d < k
  CHECK_THROWS_AS(CodeParams::make(4, 2, 6, 5), std::invalid_argument);   // d > k+r-1
  CHECK_THROWS_AS(CodeParams::make(4, 2, 5, 4), std::invalid_argument);   // p not prime
  CHECK_THROWS_AS(CodeParams::make(4, 2, 5, 9), std::invalid_argument);
  CHECK_THROWS_AS(CodeParams::make(5, 2, 6, 3), std::invalid_argument);   // p < k
  CHECK_THROWS_AS(CodeParams::make(4, 2, 5, 5, 0), std::invalid_argument);
  CHECK_THROWS_AS(CodeParams::make(4, 2, 5, 5, 5), std::invalid_argument);
  CHECK_THROWS_AS(CodeParams::make(4, 2, 4, 5, 1, 2), std::invalid_argument);
  CHECK_THROWS_WITH_AS(CodeParams::make(4, 2, 5, 4),
                       "p must be a prime >= 3, got 4", std::invalid_argument);
}

TEST_CASE("erasure pattern validation") {
  const CodeParams params = CodeParams::make(4, 2, 5, 5);
  CHECK(ErasurePattern::make({5, 0}, params).contains(0));
  CHECK_FALSE(ErasurePattern::make({5, 0}, params).contains(1));
  CHECK_THROWS_AS(ErasurePattern::make({1, 1}, params), std::invalid_argument);
  CHECK_THROWS_AS(ErasurePattern::make({6}, params), std::invalid_argument);
  CHECK_THROWS_AS(ErasurePattern::make({0, 1, 2}, params),
                  std::invalid_argument);
}

TEST_CASE("encode matches the algebraic oracle") {
  std::mt19937_64 rng(10);
  for (const CodeParams& params : kGrid) {
    CAPTURE(params.k);
    CAPTURE(params.p);
    for (int trial = 0; trial < 25; ++trial) {
      const std::vector<RingElement> info = random_info(params, rng);
      const CodewordArray cw = evenodd_encode(info, params);
      REQUIRE(cw.columns.size() == params.n());
      for (unsigned j = 0; j < params.k; ++j)
        CHECK(cw.columns[j][0] == info[j]);
      // Parity h is sum_j x^(j*h) a_j, recomputed with the slow oracle.
      for (unsigned h = 0; h < params.r; ++h) {
        Poly expected;
        for (unsigned j = 0; j < params.k; ++j) {
          Poly shift(j * h % params.p + 1, 0);
          shift.back() = 1;
          expected = poly_add(
              expected, oracle_ring_mul(shift, to_poly(info[j]), params.p));
        }
        CHECK(to_poly(cw.columns[params.k + h][0]) == expected);
      }
    }
  }
}

TEST_CASE("classical bit table for k=3, r=2, p=5") {
  // Known-answer test: with column bits a[0..3][j], the row-parity column is
  // the per-row sum and the diagonal-parity column is
  //   bit 0: a00 + a32 + S    bit 1: a10 + a01 + S
  //   bit 2: a20 + a11 + a02 + S    bit 3: a30 + a21 + a12 + S
  // with the adjuster S = a31 + a22.
  const CodeParams params = CodeParams::make(3, 2, 4, 5);
  const Modulus m = params.ring();
  std::mt19937_64 rng(11);
  auto run = [&](const std::array<std::array<int, 3>, 4>& a) {
    std::vector<RingElement> info;
    for (unsigned j = 0; j < 3; ++j)
      info.push_back(RingElement::from_coefficients(
          m, {std::uint8_t(a[0][j]), std::uint8_t(a[1][j]),
              std::uint8_t(a[2][j]), std::uint8_t(a[3][j])}));
    const CodewordArray cw = evenodd_encode(info, params);
    const auto row_parity = cw.columns[3][0].coefficients();
    const auto diag_parity = cw.columns[4][0].coefficients();
    const int s = a[3][1] ^ a[2][2];
    for (unsigned i = 0; i < 4; ++i)
      CHECK(int(row_parity[i]) == (a[i][0] ^ a[i][1] ^ a[i][2]));
    CHECK(int(diag_parity[0]) == (a[0][0] ^ a[3][2] ^ s));
    CHECK(int(diag_parity[1]) == (a[1][0] ^ a[0][1] ^ s));
    CHECK(int(diag_parity[2]) == (a[2][0] ^ a[1][1] ^ a[0][2] ^ s));
    CHECK(int(diag_parity[3]) == (a[3][0] ^ a[2][1] ^ a[1][2] ^ s));
  };
  // All twelve single-bit basis inputs, then random fills.
  for (unsigned i = 0; i < 4; ++i)
    for (unsigned j = 0; j < 3; ++j) {
      std::array<std::array<int, 3>, 4> a{};
      a[i][j] = 1;
      run(a);
    }
  for (int trial = 0; trial < 50; ++trial) {
    std::array<std::array<int, 3>, 4> a;
    for (auto& row : a)
      for (auto& bit : row) bit = int(rng() & 1);
    run(a);
  }
}

TEST_CASE("syndrome decode restores every erasure pattern") {
  std::mt19937_64 rng(12);
  for (const CodeParams& params : kGrid) {
    CAPTURE(params.k);
    CAPTURE(params.r);
    CAPTURE(params.p);
    const CodewordArray original =
        evenodd_encode(random_info(params, rng), params);
    for (const auto& erased : patterns(params.n(), params.r)) {
      const ErasurePattern pattern = ErasurePattern::make(erased, params);
      CodewordArray damaged = original;
      for (unsigned c : erased)
        damaged.columns[c][0] = RingElement::zero(params.ring());
      const auto restored = syndrome_decode(damaged, pattern);
      REQUIRE(restored.has_value());
      for (unsigned c = 0; c < params.n(); ++c)
        CHECK(restored->columns[c][0] == original.columns[c][0]);
    }
  }
}

TEST_CASE("basis codewords decode exactly") {
  for (const CodeParams& params :
       {CodeParams::make(3, 2, 4, 5), CodeParams::make(4, 3, 5, 5)}) {
    const Modulus m = params.ring();
    for (unsigned j = 0; j < params.k; ++j)
      for (unsigned b = 0; b + 1 < params.p; ++b) {
        std::vector<RingElement> info(params.k, RingElement::zero(m));
        info[j] = RingElement::monomial(m, b);
        const CodewordArray original = evenodd_encode(info, params);
        for (const auto& erased : patterns(params.n(), params.r)) {
          const ErasurePattern pattern = ErasurePattern::make(erased, params);
          CodewordArray damaged = original;
          for (unsigned c : erased)
            damaged.columns[c][0] = RingElement::zero(m);
          const auto restored = syndrome_decode(damaged, pattern);
          REQUIRE(restored.has_value());
          for (unsigned c = 0; c < params.n(); ++c)
            CHECK(restored->columns[c][0] == original.columns[c][0]);
        }
      }
  }
}

TEST_CASE("check_mds accepts the working parameter grid") {
  for (const CodeParams& params : kGrid) {
    const CheckMdsResult result = check_mds(params);
    CHECK(result.ok);
    CHECK(result.failing_subset.empty());
  }
}
