// On-disk container for one code column.  A shard is a fixed 32-byte
// little-endian header followed by the column's payload bits packed
// little-endian within bytes and zero-padded to a byte boundary.
//
//   offset  size  field
//        0     8  magic "XMDSARR\0"
//        8     2  version (currently 1)
//       10     1  code_id
//       11     2  k          13  2  r          15  2  d
//       17     2  p          19  2  e
//       21     1  layers
//       22     2  column_index
//       24     8  payload_len_bits
//
// payload_len_bits is the total information bit length of the encoded file
// and is identical across a shard family; the per-shard payload size
// follows from it (stripes = ceil(payload_len_bits / (k * column_bits)),
// payload = ceil(stripes * column_bits / 8) bytes), so any shard alone
// fixes the family geometry and a repaired shard can rebuild its header.
#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace xmds {

enum class CodeId : std::uint8_t {
  multilayer_evenodd = 0,
  hou_base = 1,
  hou_transformed = 2,
  te2 = 3,
};

// Stable names used by the CLI's --code flag.
const char* code_id_name(CodeId id);
std::optional<CodeId> code_id_from_name(std::string_view name);

class ShardFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ShardHeader {
  static constexpr std::size_t kSize = 32;
  static constexpr std::uint16_t kVersion = 1;
  static constexpr std::array<std::uint8_t, 8> kMagic = {'X', 'M', 'D', 'S',
                                                         'A', 'R', 'R', 0};

  std::uint16_t version = kVersion;
  CodeId code_id = CodeId::multilayer_evenodd;
  std::uint16_t k = 0;
  std::uint16_t r = 0;
  std::uint16_t d = 0;
  std::uint16_t p = 0;
  std::uint16_t e = 0;
  std::uint8_t layers = 0;
  std::uint16_t column_index = 0;
  std::uint64_t payload_len_bits = 0;

  std::array<std::uint8_t, kSize> serialize() const;
  // Throws ShardFormatError on bad magic, version, code id, or geometry.
  static ShardHeader parse(const std::uint8_t* bytes, std::size_t len);

  unsigned columns() const { return k + r; }
  // Stored bits per column and stripe for this code.
  unsigned column_bits() const;
  std::uint64_t stripes() const;
  std::uint64_t payload_bytes() const;
  // True when `o` describes another column of the same encoded file.
  bool same_family(const ShardHeader& o) const;
};

struct Shard {
  ShardHeader header;
  std::vector<std::uint8_t> payload;

  bool bit(std::uint64_t i) const {
    return (payload[i >> 3] >> (i & 7)) & 1;
  }
  void set_bit(std::uint64_t i, bool v) {
    if (v)
      payload[i >> 3] |= static_cast<std::uint8_t>(1u << (i & 7));
    else
      payload[i >> 3] &= static_cast<std::uint8_t>(~(1u << (i & 7)));
  }
};

// A shard with an all-zero payload of the size the header implies.
Shard make_shard(const ShardHeader& header);

std::vector<std::uint8_t> serialize_shard(const Shard& shard);
// Throws ShardFormatError when the payload size disagrees with the header.
Shard parse_shard(const std::vector<std::uint8_t>& bytes);

std::string shard_file_name(unsigned column);
void write_shard_file(const std::filesystem::path& path, const Shard& shard);
Shard read_shard_file(const std::filesystem::path& path);

}  // namespace xmds
