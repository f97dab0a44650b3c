#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ehc {

enum class AccessKind : std::uint8_t { Read = 0, Write = 1 };

/// One LLC access.
struct AccessRecord {
  std::uint64_t seq = 0;
  std::uint8_t core = 0;
  std::uint64_t pc = 0;
  std::uint64_t addr = 0;
  AccessKind kind = AccessKind::Read;

  friend bool operator==(const AccessRecord&, const AccessRecord&) = default;
};

/// An ordered access stream plus the instruction count used for MPKI.
struct Trace {
  std::vector<AccessRecord> records;
  std::uint64_t instruction_count = 0;

  /// Builds a trace whose instruction_count is the max seq over `records`.
  static Trace from_records(std::vector<AccessRecord> records);

  std::size_t size() const { return records.size(); }
  bool empty() const { return records.empty(); }

  friend bool operator==(const Trace&, const Trace&) = default;
};

class TraceError : public std::runtime_error {
 public:
  enum class Kind { BadMagic, UnsupportedVersion, Truncated, BadRecord, InvalidSpec, TooManyCores, Io };

  TraceError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

// On-disk layout, little-endian: "EHCT", version, record count, instruction
// count, then fixed 26-byte records (seq, pc, addr, core, kind).
inline constexpr std::uint8_t kTraceMagic[4] = {0x45, 0x48, 0x43, 0x54};
inline constexpr std::uint8_t kTraceVersion = 1;
inline constexpr std::size_t kTraceHeaderBytes = 21;
inline constexpr std::size_t kTraceRecordBytes = 26;

std::vector<std::uint8_t> write_trace(const Trace& trace);
Trace read_trace(std::span<const std::uint8_t> bytes);

void save_trace(const Trace& trace, const std::string& path);
Trace load_trace(const std::string& path);

enum class GeneratorKind { Stream, Loop, Zipf, RegionCorrelated, Mixed };

struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::Loop;
  std::uint64_t block_count = 1;
  std::uint64_t length = 1;
  double alpha = 1.0;
  std::uint64_t seed = 42;
};

GeneratorKind parse_generator_kind(const std::string& name);

inline constexpr std::uint64_t kBlockBytes = 64;
inline constexpr std::uint64_t kRegionBytes = 128 * 1024;
inline constexpr std::uint64_t kBlocksPerRegion = kRegionBytes / kBlockBytes;
inline constexpr std::uint64_t kPcPoolSize = 8;

/// Deterministic synthetic trace. Throws TraceError(InvalidSpec) on zero
/// length or block_count.
Trace gen_synthetic(const GeneratorSpec& spec);

/// Merges traces in global seq order; input i becomes core i and is placed in
/// its own 4 GB address window.
Trace interleave(std::span<const Trace> traces);

}  // namespace ehc
