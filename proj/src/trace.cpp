#include "ehc/trace.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <random>

namespace ehc {

namespace {

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint64_t get_u64(std::span<const std::uint8_t> in, std::size_t at) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(in[at + i]) << (8 * i);
  return v;
}

}  // namespace

Trace Trace::from_records(std::vector<AccessRecord> records) {
  Trace t;
  for (const auto& r : records) t.instruction_count = std::max(t.instruction_count, r.seq);
  t.records = std::move(records);
  return t;
}

std::vector<std::uint8_t> write_trace(const Trace& trace) {
  std::vector<std::uint8_t> out;
  out.reserve(kTraceHeaderBytes + kTraceRecordBytes * trace.records.size());
  out.insert(out.end(), std::begin(kTraceMagic), std::end(kTraceMagic));
  out.push_back(kTraceVersion);
  put_u64(out, trace.records.size());
  put_u64(out, trace.instruction_count);
  for (const auto& r : trace.records) {
    put_u64(out, r.seq);
    put_u64(out, r.pc);
    put_u64(out, r.addr);
    out.push_back(r.core);
    out.push_back(static_cast<std::uint8_t>(r.kind));
  }
  return out;
}

Trace read_trace(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || !std::equal(std::begin(kTraceMagic), std::end(kTraceMagic), bytes.begin()))
    throw TraceError(TraceError::Kind::BadMagic, "not a trace file (bad magic)");
  if (bytes.size() < 5) throw TraceError(TraceError::Kind::Truncated, "trace header truncated");
  if (bytes[4] != kTraceVersion)
    throw TraceError(TraceError::Kind::UnsupportedVersion,
                     "unsupported trace version " + std::to_string(bytes[4]));
  if (bytes.size() < kTraceHeaderBytes) throw TraceError(TraceError::Kind::Truncated, "trace header truncated");

  const std::uint64_t count = get_u64(bytes, 5);
  Trace t;
  t.instruction_count = get_u64(bytes, 13);
  const std::size_t available = (bytes.size() - kTraceHeaderBytes) / kTraceRecordBytes;
  if (count > available)
    throw TraceError(TraceError::Kind::Truncated, "header declares " + std::to_string(count) +
                                                      " records, only " + std::to_string(available) +
                                                      " present");
  t.records.reserve(count);
  std::size_t at = kTraceHeaderBytes;
  for (std::uint64_t i = 0; i < count; ++i, at += kTraceRecordBytes) {
    AccessRecord r;
    r.seq = get_u64(bytes, at);
    r.pc = get_u64(bytes, at + 8);
    r.addr = get_u64(bytes, at + 16);
    r.core = bytes[at + 24];
    const std::uint8_t kind = bytes[at + 25];
    if (kind > 1)
      throw TraceError(TraceError::Kind::BadRecord, "record " + std::to_string(i) + " has invalid kind " +
                                                        std::to_string(kind));
    r.kind = static_cast<AccessKind>(kind);
    t.records.push_back(r);
  }
  return t;
}

void save_trace(const Trace& trace, const std::string& path) {
  const auto bytes = write_trace(trace);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw TraceError(TraceError::Kind::Io, "cannot open " + path + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw TraceError(TraceError::Kind::Io, "write failed: " + path);
}

Trace load_trace(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw TraceError(TraceError::Kind::Io, "cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return read_trace(bytes);
}

GeneratorKind parse_generator_kind(const std::string& name) {
  if (name == "stream") return GeneratorKind::Stream;
  if (name == "loop") return GeneratorKind::Loop;
  if (name == "zipf") return GeneratorKind::Zipf;
  if (name == "region") return GeneratorKind::RegionCorrelated;
  if (name == "mixed") return GeneratorKind::Mixed;
  throw TraceError(TraceError::Kind::InvalidSpec, "unknown generator kind '" + name + "'");
}

namespace {

constexpr std::uint64_t kPcBase = 0x400000;
constexpr std::uint64_t kPhaseAddressStride = 256ull << 20;

std::uint64_t below(std::mt19937_64& rng, std::uint64_t n) { return rng() % n; }

double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Appends `length` records of one phase. Each phase owns a pool of
// kPcPoolSize PCs cycled per record and an address window starting at `base`.
class PhaseWriter {
 public:
  PhaseWriter(std::vector<AccessRecord>& out, std::uint64_t phase, std::uint64_t base)
      : out_(out), pc_base_(kPcBase + phase * 0x1000), base_(base) {}

  // `stream` selects a separate PC pool inside the phase.
  void emit(std::uint64_t block, std::uint64_t stream = 0) {
    AccessRecord r;
    r.seq = out_.size();
    r.pc = pc_base_ + stream * 0x100 + (cycle_++ % kPcPoolSize) * 4;
    r.addr = base_ + block * kBlockBytes;
    out_.push_back(r);
  }

 private:
  std::vector<AccessRecord>& out_;
  std::uint64_t pc_base_;
  std::uint64_t base_;
  std::uint64_t cycle_ = 0;
};

void gen_stream(PhaseWriter& w, std::uint64_t length) {
  for (std::uint64_t i = 0; i < length; ++i) w.emit(i);
}

void gen_loop(PhaseWriter& w, std::uint64_t blocks, std::uint64_t length) {
  for (std::uint64_t i = 0; i < length; ++i) w.emit(i % blocks);
}

void gen_zipf(PhaseWriter& w, std::uint64_t blocks, std::uint64_t length, double alpha, std::mt19937_64& rng) {
  std::vector<double> cdf(blocks);
  double sum = 0.0;
  for (std::uint64_t k = 0; k < blocks; ++k) {
    sum += 1.0 / std::pow(static_cast<double>(k + 1), alpha);
    cdf[k] = sum;
  }
  for (std::uint64_t i = 0; i < length; ++i) {
    const double u = unit(rng) * sum;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.end()) --it;
    w.emit(static_cast<std::uint64_t>(it - cdf.begin()));
  }
}

// Region-correlated workload. Blocks are handed out from class-pure 128 KB
// regions, so every block of a region shares one behavior:
//   short  - lives in a small pool, touched kShortTouches times
//   medium - lives in a larger pool, touched kMediumTouches times
//   never  - touched once
// Each class draws fresh blocks from kActiveRegions regions at once, which
// keeps a region in use long enough for its history to matter. A pooled block
// is retired after its last touch and replaced by a fresh block of its class.
// Short and medium touches come from the same PCs, and the never stream has
// its own. `blocks` is the combined live pool size.
void gen_region(PhaseWriter& w, std::uint64_t blocks, std::uint64_t length, std::mt19937_64& rng) {
  constexpr std::uint32_t kShortTouches = 8;
  constexpr std::uint32_t kMediumTouches = 3;
  constexpr double kNeverShare = 0.30;
  constexpr double kShortShare = 0.40;
  constexpr std::size_t kActiveRegions = 16;

  struct Cursor {
    std::uint64_t region = 0;
    std::uint64_t offset = 0;
  };
  std::uint64_t next_region = 0;
  std::vector<Cursor> active[3];
  for (auto& a : active)
    for (std::size_t i = 0; i < kActiveRegions; ++i) a.push_back({next_region++, 0});

  auto fresh = [&](int cls) {
    Cursor& c = active[cls][below(rng, kActiveRegions)];
    const std::uint64_t block = c.region * kBlocksPerRegion + c.offset;
    if (++c.offset == kBlocksPerRegion) c = {next_region++, 0};
    return block;
  };

  struct Live {
    std::uint64_t block;
    std::uint32_t remaining;
  };
  const std::uint64_t short_size = std::max<std::uint64_t>(1, blocks / 4);
  const std::uint64_t medium_size = std::max<std::uint64_t>(1, blocks - std::min(blocks, short_size));
  std::vector<Live> short_pool, medium_pool;
  for (std::uint64_t i = 0; i < short_size; ++i) short_pool.push_back({fresh(0), kShortTouches});
  for (std::uint64_t i = 0; i < medium_size; ++i) medium_pool.push_back({fresh(1), kMediumTouches});

  // Short and medium blocks share one PC pool, so only their region tells
  // them apart. Short blocks are picked at random, medium blocks round robin.
  std::size_t medium_cursor = 0;
  auto touch = [&](std::vector<Live>& pool, int cls, std::uint32_t touches) {
    Live& l = cls == 0 ? pool[below(rng, pool.size())] : pool[medium_cursor++ % pool.size()];
    w.emit(l.block, 0);
    if (--l.remaining == 0) l = {fresh(cls), touches};
  };

  for (std::uint64_t i = 0; i < length; ++i) {
    const double u = unit(rng);
    if (u < kNeverShare)
      w.emit(fresh(2), 1);
    else if (u < kNeverShare + kShortShare)
      touch(short_pool, 0, kShortTouches);
    else
      touch(medium_pool, 1, kMediumTouches);
  }
}

void gen_phase(PhaseWriter& w, GeneratorKind kind, const GeneratorSpec& spec, std::uint64_t length,
               std::mt19937_64& rng) {
  switch (kind) {
    case GeneratorKind::Stream: gen_stream(w, length); break;
    case GeneratorKind::Loop: gen_loop(w, spec.block_count, length); break;
    case GeneratorKind::Zipf: gen_zipf(w, spec.block_count, length, spec.alpha, rng); break;
    case GeneratorKind::RegionCorrelated: gen_region(w, spec.block_count, length, rng); break;
    case GeneratorKind::Mixed: break;
  }
}

}  // namespace

Trace gen_synthetic(const GeneratorSpec& spec) {
  if (spec.length == 0 || spec.block_count == 0)
    throw TraceError(TraceError::Kind::InvalidSpec, "generator needs length >= 1 and block_count >= 1");
  if (!(spec.alpha >= 0.0)) throw TraceError(TraceError::Kind::InvalidSpec, "zipf alpha must be nonnegative");

  std::mt19937_64 rng(spec.seed);
  std::vector<AccessRecord> records;
  records.reserve(spec.length);

  if (spec.kind != GeneratorKind::Mixed) {
    PhaseWriter w(records, 0, 0);
    gen_phase(w, spec.kind, spec, spec.length, rng);
  } else {
    constexpr GeneratorKind kPhases[] = {GeneratorKind::Loop, GeneratorKind::Zipf, GeneratorKind::Stream,
                                         GeneratorKind::RegionCorrelated};
    const std::uint64_t per_phase = spec.length / std::size(kPhases);
    for (std::uint64_t p = 0; p < std::size(kPhases); ++p) {
      const std::uint64_t len = p + 1 == std::size(kPhases) ? spec.length - per_phase * p : per_phase;
      if (len == 0) continue;
      PhaseWriter w(records, p, p * kPhaseAddressStride);
      gen_phase(w, kPhases[p], spec, len, rng);
    }
  }
  return Trace::from_records(std::move(records));
}

Trace interleave(std::span<const Trace> traces) {
  if (traces.size() > 255)
    throw TraceError(TraceError::Kind::TooManyCores, "cannot interleave more than 255 traces");

  std::vector<AccessRecord> merged;
  std::size_t total = 0;
  for (const auto& t : traces) total += t.size();
  merged.reserve(total);

  std::vector<std::size_t> cursor(traces.size(), 0);
  Trace out;
  for (const auto& t : traces) out.instruction_count = std::max(out.instruction_count, t.instruction_count);

  // k-way merge on seq; the lowest input index wins ties.
  while (merged.size() < total) {
    std::size_t pick = traces.size();
    for (std::size_t i = 0; i < traces.size(); ++i) {
      if (cursor[i] == traces[i].size()) continue;
      if (pick == traces.size() || traces[i].records[cursor[i]].seq < traces[pick].records[cursor[pick]].seq)
        pick = i;
    }
    AccessRecord r = traces[pick].records[cursor[pick]++];
    r.core = static_cast<std::uint8_t>(pick);
    r.addr += static_cast<std::uint64_t>(pick) << 32;
    merged.push_back(r);
  }
  out.records = std::move(merged);
  return out;
}

}  // namespace ehc
