#include "xmds/shard.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>

namespace xmds {

namespace {

void put_u16(std::uint8_t* at, std::uint16_t v) {
  at[0] = static_cast<std::uint8_t>(v);
  at[1] = static_cast<std::uint8_t>(v >> 8);
}

void put_u64(std::uint8_t* at, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) at[i] = static_cast<std::uint8_t>(v >> (8 * i));
}

std::uint16_t get_u16(const std::uint8_t* at) {
  return static_cast<std::uint16_t>(at[0] | (at[1] << 8));
}

std::uint64_t get_u64(const std::uint8_t* at) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(at[i]) << (8 * i);
  return v;
}

}  // namespace

const char* code_id_name(CodeId id) {
  switch (id) {
    case CodeId::multilayer_evenodd:
      return "multilayer_evenodd";
    case CodeId::hou_base:
      return "hou_base";
    case CodeId::hou_transformed:
      return "hou_transformed";
    case CodeId::te2:
      return "te2";
  }
  return "unknown";
}

std::optional<CodeId> code_id_from_name(std::string_view name) {
  for (CodeId id : {CodeId::multilayer_evenodd, CodeId::hou_base,
                    CodeId::hou_transformed, CodeId::te2})
    if (name == code_id_name(id)) return id;
  return std::nullopt;
}

std::array<std::uint8_t, ShardHeader::kSize> ShardHeader::serialize() const {
  std::array<std::uint8_t, kSize> out{};
  std::memcpy(out.data(), kMagic.data(), kMagic.size());
  put_u16(out.data() + 8, version);
  out[10] = static_cast<std::uint8_t>(code_id);
  put_u16(out.data() + 11, k);
  put_u16(out.data() + 13, r);
  put_u16(out.data() + 15, d);
  put_u16(out.data() + 17, p);
  put_u16(out.data() + 19, e);
  out[21] = layers;
  put_u16(out.data() + 22, column_index);
  put_u64(out.data() + 24, payload_len_bits);
  return out;
}

ShardHeader ShardHeader::parse(const std::uint8_t* bytes, std::size_t len) {
  if (len < kSize) throw ShardFormatError("shard shorter than its header");
  if (std::memcmp(bytes, kMagic.data(), kMagic.size()) != 0)
    throw ShardFormatError("bad shard magic");
  ShardHeader h;
  h.version = get_u16(bytes + 8);
  if (h.version != kVersion)
    throw ShardFormatError("unsupported shard version " +
                           std::to_string(h.version));
  if (bytes[10] > static_cast<std::uint8_t>(CodeId::te2))
    throw ShardFormatError("unknown code id " + std::to_string(bytes[10]));
  h.code_id = static_cast<CodeId>(bytes[10]);
  h.k = get_u16(bytes + 11);
  h.r = get_u16(bytes + 13);
  h.d = get_u16(bytes + 15);
  h.p = get_u16(bytes + 17);
  h.e = get_u16(bytes + 19);
  h.layers = bytes[21];
  h.column_index = get_u16(bytes + 22);
  h.payload_len_bits = get_u64(bytes + 24);
  if (h.k == 0 || h.r == 0 || h.d < h.k || h.d >= h.k + h.r)
    throw ShardFormatError("shard header has inconsistent k/r/d");
  if (h.column_index >= h.columns())
    throw ShardFormatError("shard column index out of range");
  h.column_bits();  // validates the per-code geometry
  return h;
}

unsigned ShardHeader::column_bits() const {
  switch (code_id) {
    case CodeId::multilayer_evenodd: {
      if (p < 2) throw ShardFormatError("multilayer shard requires p >= 2");
      const unsigned t = d - k + 1;
      std::uint64_t bits = p - 1;
      for (unsigned i = 0; i < layers; ++i) {
        bits *= t;
        if (bits > (1u << 26))
          throw ShardFormatError("multilayer shard geometry too large");
      }
      return static_cast<unsigned>(bits);
    }
    case CodeId::hou_base:
      if (k != 2 || r != 2 || d != 3 || p != 3 || layers != 0)
        throw ShardFormatError("hou_base shard requires k=2 r=2 d=3 p=3");
      return 8;
    case CodeId::hou_transformed:
      if (k != 2 || r != 2 || d != 3 || p != 3 || layers != 1)
        throw ShardFormatError(
            "hou_transformed shard requires k=2 r=2 d=3 p=3 layers=1");
      return 16;
    case CodeId::te2:
      if (r != 2 || d != k + 1 || p < 3 || k > p - 1 || layers != 0)
        throw ShardFormatError("te2 shard requires r=2, d=k+1, k <= p-1");
      return 2 * (p - 1);
  }
  throw ShardFormatError("unknown code id");
}

std::uint64_t ShardHeader::stripes() const {
  const std::uint64_t stripe_bits =
      static_cast<std::uint64_t>(k) * column_bits();
  return (payload_len_bits + stripe_bits - 1) / stripe_bits;
}

std::uint64_t ShardHeader::payload_bytes() const {
  return (stripes() * column_bits() + 7) / 8;
}

bool ShardHeader::same_family(const ShardHeader& o) const {
  return version == o.version && code_id == o.code_id && k == o.k &&
         r == o.r && d == o.d && p == o.p && e == o.e && layers == o.layers &&
         payload_len_bits == o.payload_len_bits;
}

Shard make_shard(const ShardHeader& header) {
  Shard s;
  s.header = header;
  s.payload.assign(header.payload_bytes(), 0);
  return s;
}

std::vector<std::uint8_t> serialize_shard(const Shard& shard) {
  const std::array<std::uint8_t, ShardHeader::kSize> head =
      shard.header.serialize();
  std::vector<std::uint8_t> out(ShardHeader::kSize + shard.payload.size());
  std::copy(head.begin(), head.end(), out.begin());
  std::copy(shard.payload.begin(), shard.payload.end(),
            out.begin() + ShardHeader::kSize);
  return out;
}

Shard parse_shard(const std::vector<std::uint8_t>& bytes) {
  Shard s;
  s.header = ShardHeader::parse(bytes.data(), bytes.size());
  if (bytes.size() != ShardHeader::kSize + s.header.payload_bytes())
    throw ShardFormatError("shard payload size disagrees with its header");
  s.payload.assign(bytes.begin() + ShardHeader::kSize, bytes.end());
  return s;
}

std::string shard_file_name(unsigned column) {
  return "col_" + std::to_string(column) + ".shard";
}

void write_shard_file(const std::filesystem::path& path, const Shard& shard) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  const std::vector<std::uint8_t> bytes = serialize_shard(shard);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("short write to " + path.string());
}

Shard read_shard_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return parse_shard(bytes);
}

}  // namespace xmds
