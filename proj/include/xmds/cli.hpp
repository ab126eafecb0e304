// Command-line front end: stripes files across the information columns of a
// chosen code, writes one shard file per column, and repairs / decodes /
// verifies shard directories.  Large files are sequences of independent
// stripes (no cross-stripe coding), so every stripe repairs with the same
// deterministic access pattern and the same per-stripe report.
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>

#include "xmds/shard.hpp"

namespace xmds {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitInsufficientHelpers = 2;
inline constexpr int kExitTooManyErasures = 3;

struct EncodeOptions {
  CodeId code = CodeId::multilayer_evenodd;
  unsigned k = 0;
  unsigned r = 2;
  unsigned d = 0;
  unsigned p = 0;
  unsigned e = 1;
  std::filesystem::path input;
  std::filesystem::path outdir;
};

struct RepairOptions {
  std::filesystem::path dir;
  unsigned failed = 0;
  // Report JSON path; defaults to <dir>/col_<failed>.repair.json.
  std::optional<std::filesystem::path> report;
};

struct DecodeOptions {
  std::filesystem::path dir;
  std::filesystem::path output;
};

struct VerifyOptions {
  CodeId code = CodeId::multilayer_evenodd;
  unsigned k = 0;
  unsigned r = 2;
  unsigned d = 0;
  unsigned p = 0;
  unsigned e = 1;
  std::uint64_t seed = 0x9e3779b97f4a7c15ull;
};

// Each command returns one of the kExit* codes and reports problems on
// stderr; they are the bodies behind the CLI subcommands.
int cmd_encode(const EncodeOptions& opts);
int cmd_repair(const RepairOptions& opts);
int cmd_decode(const DecodeOptions& opts);
int cmd_verify(const VerifyOptions& opts);

// Full argv entry point (parses subcommands and flags).
int run_cli(int argc, const char* const* argv);

}  // namespace xmds
