#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ehc/trace.hpp"

namespace ehc {

inline constexpr std::uint8_t kMaxRrpv = 7;
inline constexpr std::uint8_t kMaxEfh = 7;

struct CacheGeometry {
  std::uint32_t num_sets = 2048;
  std::uint32_t associativity = 16;
  std::uint32_t block_offset_bits = 6;

  /// Throws std::invalid_argument unless num_sets is a power of two and the
  /// other fields are positive.
  void validate() const;

  std::uint32_t set_bits() const;
  std::uint64_t block_number(std::uint64_t addr) const { return addr >> block_offset_bits; }
  std::uint64_t tag(std::uint64_t addr) const { return addr >> (block_offset_bits + set_bits()); }
  std::uint64_t capacity_blocks() const { return std::uint64_t{num_sets} * associativity; }
};

std::uint32_t set_index(std::uint64_t addr, const CacheGeometry& geom);

/// Per-way metadata. Policies own rrpv and efh; the engine maintains the rest.
struct BlockState {
  bool valid = false;
  std::uint64_t tag = 0;
  std::uint8_t rrpv = 0;
  std::uint8_t efh = 0;
  std::uint64_t recency_stamp = 0;
  std::uint64_t insert_seq = 0;
  std::uint32_t residency_hits = 0;
  std::uint64_t last_pc = 0;
  std::uint64_t block_addr = 0;
};

using SetView = std::span<BlockState>;
using ConstSetView = std::span<const BlockState>;

struct SimStats {
  std::uint64_t accesses = 0;
  std::uint64_t hits = 0;
  std::uint64_t misses = 0;
  std::uint64_t evictions = 0;
  std::uint64_t replacements_total = 0;
  std::uint64_t replacements_no_averse = 0;
  std::map<std::string, std::uint64_t> per_policy;

  /// accesses == hits + misses and no_averse <= total <= misses.
  bool consistent() const;
};

/// Everything a policy callback may look at for the current access.
struct AccessContext {
  std::uint64_t position = 0;  // index of the record in the trace
  std::uint32_t set = 0;
  std::uint64_t tag = 0;
  std::uint64_t block_addr = 0;  // addr with the offset bits cleared
  const AccessRecord* record = nullptr;

  std::uint64_t pc() const { return record->pc; }
  std::uint8_t core() const { return record->core; }
};

struct VictimChoice {
  static constexpr std::uint32_t kBypass = ~0u;

  std::uint32_t way = kBypass;
  // Set when the policy had no cache-averse candidate to fall back on.
  bool no_averse = false;

  bool bypass() const { return way == kBypass; }
  static VictimChoice evict(std::uint32_t way, bool no_averse = false) { return {way, no_averse}; }
  static VictimChoice bypass_incoming() { return {kBypass, false}; }
};

class ReplacementPolicy {
 public:
  virtual ~ReplacementPolicy() = default;

  virtual std::string_view name() const = 0;

  /// Called for every access before lookup.
  virtual void on_observe(const AccessContext&) {}
  virtual void on_hit(SetView set, std::uint32_t way, const AccessContext& ctx) = 0;
  /// Called only when every way of the set is valid.
  virtual VictimChoice choose_victim(SetView set, const AccessContext& ctx) = 0;
  /// Called with the victim's state just before it is overwritten.
  virtual void on_evict(SetView, std::uint32_t, const AccessContext&) {}
  virtual void on_insert(SetView set, std::uint32_t way, const AccessContext& ctx) = 0;
  virtual void export_counters(std::map<std::string, std::uint64_t>&) const {}
};

/// One victim-selection decision, logged for victim-quality ranking.
struct ReplacementEvent {
  std::uint64_t position = 0;
  std::uint32_t set = 0;
  std::uint64_t incoming_block = 0;  // block number (addr >> offset bits)
  std::uint32_t victim_way = VictimChoice::kBypass;
  bool no_averse = false;
  std::vector<std::uint64_t> residents;  // block numbers, way order
};

using EventLog = std::vector<ReplacementEvent>;

struct AccessOutcome {
  bool hit = false;
  bool bypassed = false;
  std::uint32_t way = VictimChoice::kBypass;
  std::optional<std::uint32_t> evicted_way;
  bool no_averse = false;
};

class VictimOutOfRange : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Set-associative cache driven one access at a time.
class Cache {
 public:
  Cache(const CacheGeometry& geom, ReplacementPolicy& policy, bool record_events = false);

  AccessOutcome access(const AccessRecord& record);

  const CacheGeometry& geometry() const { return geom_; }
  const SimStats& stats() const { return stats_; }
  ConstSetView set(std::uint32_t index) const;
  const EventLog& events() const { return events_; }
  bool recording_events() const { return record_events_; }

  /// Stats with the policy's exported counters merged in.
  SimStats final_stats() const;
  EventLog take_events() { return std::move(events_); }

 private:
  SetView mutable_set(std::uint32_t index);
  void fill(SetView set, std::uint32_t way, const AccessContext& ctx);

  CacheGeometry geom_;
  ReplacementPolicy& policy_;
  bool record_events_;
  std::vector<BlockState> blocks_;
  SimStats stats_;
  EventLog events_;
  std::uint64_t position_ = 0;
  std::uint64_t stamp_ = 0;
};

struct SimResult {
  SimStats stats;
  std::optional<EventLog> events;
};

struct SimOptions {
  bool record_events = false;
};

SimResult simulate(const Trace& trace, ReplacementPolicy& policy, const CacheGeometry& geom,
                   const SimOptions& options = {});

}  // namespace ehc
