#include "xmds/hou.hpp"

#include <bit>
#include <optional>
#include <stdexcept>
#include <vector>

namespace xmds {

namespace {

// Every stored bit is a GF(2)-linear function of the information bits,
// represented as a mask: base code over 16 info bits (column 0 -> bits 0..7,
// column 1 -> 8..15), transformed code over 32 (instance a as above,
// instance b shifted up by 16).
using Mask = std::uint32_t;
using Rows8 = std::array<Mask, 8>;
using Rows12 = std::array<Mask, 12>;

// Extends 8 stored rows by the four extra bits v[8+u] = v[u] + v[4+u].
Rows12 extend(const Rows8& rows) {
  Rows12 v{};
  for (unsigned i = 0; i < 8; ++i) {
    v[i] = rows[i];
  }
  for (unsigned u = 0; u < 4; ++u) {
    v[8 + u] = rows[u] ^ rows[4 + u];
  }
  return v;
}

// The extended vectors of all four base columns as functions of the 16 info
// bits starting at `offset` in the mask space.
std::array<Rows12, 4> base_columns(unsigned offset) {
  Rows8 c0{};
  Rows8 c1{};
  for (unsigned i = 0; i < 8; ++i) {
    c0[i] = Mask{1} << (offset + i);
    c1[i] = Mask{1} << (offset + 8 + i);
  }
  const Rows12 v0 = extend(c0);
  const Rows12 v1 = extend(c1);
  Rows8 c2{};
  Rows8 c3{};
  for (unsigned i = 0; i < 8; ++i) {
    c2[i] = v0[i] ^ v1[i];
    c3[i] = v0[(i + 11) % 12] ^ v1[(i + 10) % 12];
  }
  return {v0, v1, extend(c2), extend(c3)};
}

// v(x) * coefficient in F2[x]/(1+x^12), acting on extended row vectors.
Rows12 mul_rows(const Rows12& v, const RingElement& coefficient) {
  Rows12 out{};
  for (unsigned e = 0; e < 12; ++e) {
    if (!coefficient.coefficient(e)) {
      continue;
    }
    for (unsigned i = 0; i < 12; ++i) {
      out[i] ^= v[(i + 12 - e) % 12];
    }
  }
  return out;
}

struct BaseGenerator {
  std::array<Rows8, 4> col;  // stored bit (c, i) as a mask over 16 info bits

  BaseGenerator() {
    const std::array<Rows12, 4> v = base_columns(0);
    for (unsigned c = 0; c < 4; ++c) {
      for (unsigned i = 0; i < 8; ++i) {
        col[c][i] = v[c][i];
      }
    }
  }
};

struct TransformedGenerator {
  std::array<std::array<Mask, 16>, 4> col;  // masks over 32 info bits

  explicit TransformedGenerator(const RingElement& coefficient) {
    if (coefficient.modulus() != Modulus::circulant(12)) {
      throw std::invalid_argument(
          "hou: the mixing coefficient must live in F2[x]/(1+x^12)");
    }
    const std::array<Rows12, 4> a = base_columns(0);
    const std::array<Rows12, 4> b = base_columns(16);
    const Rows12 ga3 = mul_rows(a[3], coefficient);
    for (unsigned c = 0; c < 2; ++c) {
      for (unsigned i = 0; i < 8; ++i) {
        col[c][i] = a[c][i];
        col[c][8 + i] = b[c][i];
      }
    }
    for (unsigned i = 0; i < 8; ++i) {
      col[2][i] = a[2][i];
      col[2][8 + i] = b[2][i] ^ ga3[i];
      col[3][i] = a[3][i] ^ b[2][i];
      col[3][8 + i] = b[3][i];
    }
  }
};

std::uint8_t apply(Mask mask, Mask word) {
  return static_cast<std::uint8_t>(std::popcount(mask & word) & 1);
}

Mask pack_info(const HouInfo& info, unsigned offset) {
  Mask word = 0;
  for (unsigned c = 0; c < 2; ++c) {
    for (unsigned i = 0; i < 8; ++i) {
      if (info[c].bits[i]) {
        word |= Mask{1} << (offset + 8 * c + i);
      }
    }
  }
  return word;
}

// Incremental GF(2) elimination: one basis row per leading-bit position;
// express() reduces a mask against the basis and yields its value when the
// mask lies in the span.
class F2Span {
 public:
  void add(Mask mask, std::uint8_t value) {
    reduce(mask, value);
    if (mask != 0) {
      const unsigned lead = std::bit_width(mask) - 1;
      basis_mask_[lead] = mask;
      basis_value_[lead] = value;
    }
  }
  std::optional<std::uint8_t> express(Mask mask) const {
    std::uint8_t value = 0;
    reduce(mask, value);
    if (mask != 0) {
      return std::nullopt;
    }
    return value;
  }

 private:
  void reduce(Mask& mask, std::uint8_t& value) const {
    while (mask != 0) {
      const unsigned lead = std::bit_width(mask) - 1;
      if (basis_mask_[lead] == 0) {
        break;
      }
      mask ^= basis_mask_[lead];
      value ^= basis_value_[lead];
    }
  }

  std::array<Mask, 32> basis_mask_{};
  std::array<std::uint8_t, 32> basis_value_{};
};

struct BitRef {
  unsigned column;
  unsigned index;
};

// Fixed download sets.
std::vector<BitRef> base_download(unsigned f) {
  auto take = [](unsigned c, std::initializer_list<unsigned> idx,
                 std::vector<BitRef>& out) {
    for (unsigned i : idx) {
      out.push_back({c, i});
    }
  };
  std::vector<BitRef> out;
  switch (f) {
    case 0:
      for (unsigned c : {1u, 2u, 3u}) {
        take(c, {0, 2, 4, 6}, out);
      }
      break;
    case 1:
      take(0, {0, 1, 3, 4, 5, 7}, out);
      take(2, {0, 1, 4, 5}, out);
      take(3, {0, 1, 4, 5}, out);
      break;
    case 2:
    case 3:
      take(0, {0, 1, 2, 3, 4, 5, 6, 7}, out);
      take(1, {0, 1, 2, 3, 4, 5, 6, 7}, out);
      break;
    default:
      throw std::invalid_argument("hou_repair: column out of range");
  }
  return out;
}

std::vector<BitRef> transformed_download(unsigned f) {
  auto take = [](unsigned c, std::initializer_list<unsigned> idx,
                 std::vector<BitRef>& out) {
    for (unsigned i : idx) {
      out.push_back({c, i});
    }
  };
  std::vector<BitRef> out;
  switch (f) {
    case 0:
      for (unsigned c : {1u, 2u, 3u}) {
        take(c, {0, 2, 4, 6, 8, 10, 12, 14}, out);
      }
      break;
    case 1:
      take(0, {0, 1, 3, 4, 5, 7, 8, 9, 11, 12, 13, 15}, out);
      take(2, {0, 1, 4, 5, 8, 9, 12, 13}, out);
      take(3, {0, 1, 4, 5, 8, 9, 12, 13}, out);
      break;
    case 2:
      take(0, {0, 1, 2, 3, 4, 5, 6, 7}, out);
      take(1, {0, 1, 2, 3, 4, 5, 6, 7}, out);
      take(3, {0, 1, 2, 3, 4, 5, 6, 7}, out);
      break;
    case 3:
      take(0, {8, 9, 10, 11, 12, 13, 14, 15}, out);
      take(1, {8, 9, 10, 11, 12, 13, 14, 15}, out);
      take(2, {8, 9, 10, 11, 12, 13, 14, 15}, out);
      break;
    default:
      throw std::invalid_argument("hou_transformed_repair: column out of range");
  }
  return out;
}

AccessReport report_from(const std::vector<BitRef>& downloads,
                         unsigned column_bits) {
  AccessTrace trace;
  trace.optimal_bits =
      optimal_bound(CodeParams::make(2, 2, 3, 3), column_bits);
  unsigned current = downloads.front().column;
  std::uint64_t count = 0;
  for (const BitRef& ref : downloads) {
    if (ref.column != current) {
      trace.add_read(current, count, count);
      current = ref.column;
      count = 0;
    }
    ++count;
  }
  trace.add_read(current, count, count);
  return audit(trace);
}

// Expresses every row of `targets` in the span of the downloaded rows.
template <typename Generator, typename Array>
std::optional<std::vector<std::uint8_t>> solve_targets(
    const Generator& gen, const Array& array,
    const std::vector<BitRef>& downloads, unsigned f, unsigned column_bits) {
  F2Span span;
  for (const BitRef& ref : downloads) {
    span.add(gen.col[ref.column][ref.index], array[ref.column].bits[ref.index]);
  }
  std::vector<std::uint8_t> out;
  out.reserve(column_bits);
  for (unsigned i = 0; i < column_bits; ++i) {
    const auto v = span.express(gen.col[f][i]);
    if (!v) {
      return std::nullopt;
    }
    out.push_back(*v);
  }
  return out;
}

}  // namespace

std::array<std::uint8_t, 4> hou_extra_bits(const HouColumn& column) {
  std::array<std::uint8_t, 4> extra{};
  for (unsigned u = 0; u < 4; ++u) {
    extra[u] = column.bits[u] ^ column.bits[4 + u];
  }
  return extra;
}

HouArray hou_encode(const HouInfo& info) {
  const BaseGenerator gen;
  const Mask word = pack_info(info, 0);
  HouArray out{};
  for (unsigned c = 0; c < 4; ++c) {
    for (unsigned i = 0; i < 8; ++i) {
      out[c].bits[i] = apply(gen.col[c][i], word);
    }
  }
  return out;
}

HouInfo hou_decode(const HouArray& array,
                   const std::array<unsigned, 2>& available) {
  if (available[0] >= 4 || available[1] >= 4 || available[0] == available[1]) {
    throw std::invalid_argument("hou_decode: need two distinct columns");
  }
  const BaseGenerator gen;
  F2Span span;
  for (unsigned c : available) {
    for (unsigned i = 0; i < 8; ++i) {
      span.add(gen.col[c][i], array[c].bits[i]);
    }
  }
  HouInfo info{};
  for (unsigned c = 0; c < 2; ++c) {
    for (unsigned i = 0; i < 8; ++i) {
      const auto v = span.express(Mask{1} << (8 * c + i));
      if (!v) {
        throw std::runtime_error("hou_decode: singular column pair");
      }
      info[c].bits[i] = *v;
    }
  }
  return info;
}

std::pair<HouColumn, AccessReport> hou_repair(unsigned f,
                                              const HouArray& array) {
  const BaseGenerator gen;
  const std::vector<BitRef> downloads = base_download(f);
  const auto bits = solve_targets(gen, array, downloads, f, 8);
  if (!bits) {
    throw std::runtime_error("hou_repair: download set is insufficient");
  }
  HouColumn column{};
  for (unsigned i = 0; i < 8; ++i) {
    column.bits[i] = (*bits)[i];
  }
  return {column, report_from(downloads, 8)};
}

RingElement hou_default_coefficient() {
  return RingElement::monomial(Modulus::circulant(12), 4);
}

HouTransformedArray hou_transformed_encode(const HouInfo& a_info,
                                           const HouInfo& b_info,
                                           const RingElement& coefficient) {
  const TransformedGenerator gen(coefficient);
  const Mask word = pack_info(a_info, 0) | pack_info(b_info, 16);
  HouTransformedArray out{};
  for (unsigned c = 0; c < 4; ++c) {
    for (unsigned i = 0; i < 16; ++i) {
      out[c].bits[i] = apply(gen.col[c][i], word);
    }
  }
  return out;
}

std::pair<HouInfo, HouInfo> hou_transformed_decode(
    const HouTransformedArray& array, const std::array<unsigned, 2>& available,
    const RingElement& coefficient) {
  if (available[0] >= 4 || available[1] >= 4 || available[0] == available[1]) {
    throw std::invalid_argument(
        "hou_transformed_decode: need two distinct columns");
  }
  const TransformedGenerator gen(coefficient);
  F2Span span;
  for (unsigned c : available) {
    for (unsigned i = 0; i < 16; ++i) {
      span.add(gen.col[c][i], array[c].bits[i]);
    }
  }
  HouInfo a{};
  HouInfo b{};
  for (unsigned c = 0; c < 2; ++c) {
    for (unsigned i = 0; i < 8; ++i) {
      const auto va = span.express(Mask{1} << (8 * c + i));
      const auto vb = span.express(Mask{1} << (16 + 8 * c + i));
      if (!va || !vb) {
        throw std::runtime_error("hou_transformed_decode: singular column pair");
      }
      a[c].bits[i] = *va;
      b[c].bits[i] = *vb;
    }
  }
  return {a, b};
}

std::pair<HouTransformedColumn, AccessReport> hou_transformed_repair(
    unsigned f, const HouTransformedArray& array,
    const RingElement& coefficient) {
  const TransformedGenerator gen(coefficient);
  const std::vector<BitRef> downloads = transformed_download(f);
  const auto bits = solve_targets(gen, array, downloads, f, 16);
  if (!bits) {
    throw std::runtime_error(
        "hou_transformed_repair: download set is insufficient for this "
        "coefficient");
  }
  HouTransformedColumn column{};
  for (unsigned i = 0; i < 16; ++i) {
    column.bits[i] = (*bits)[i];
  }
  return {column, report_from(downloads, 16)};
}

HouCoefficientReport hou_certify_coefficient(const RingElement& coefficient) {
  const TransformedGenerator gen(coefficient);
  HouCoefficientReport report;
  // Any-2-of-4 decodability: the 32 rows of each column pair span all of
  // GF(2)^32.
  report.decodable = true;
  for (unsigned c1 = 0; c1 < 4 && report.decodable; ++c1) {
    for (unsigned c2 = c1 + 1; c2 < 4 && report.decodable; ++c2) {
      F2Span span;
      for (unsigned i = 0; i < 16; ++i) {
        span.add(gen.col[c1][i], 0);
        span.add(gen.col[c2][i], 0);
      }
      for (unsigned bit = 0; bit < 32; ++bit) {
        if (!span.express(Mask{1} << bit)) {
          report.decodable = false;
          break;
        }
      }
    }
  }
  // A fixed repair download set remains valid when it still determines every
  // bit of its column.
  auto repairable = [&](unsigned f) {
    F2Span span;
    for (const BitRef& ref : transformed_download(f)) {
      span.add(gen.col[ref.column][ref.index], 0);
    }
    for (unsigned i = 0; i < 16; ++i) {
      if (!span.express(gen.col[f][i])) {
        return false;
      }
    }
    return true;
  };
  report.info_repair = repairable(0) && repairable(1);
  report.parity_repair = repairable(2) && repairable(3);
  return report;
}

}  // namespace xmds
