#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <optional>
#include <unordered_map>
#include <vector>

#include "ehc/cache.hpp"
#include "ehc/counters.hpp"

namespace ehc {

enum class MinDecision : std::uint8_t { ColdMiss, Hit, Miss };

inline constexpr std::uint32_t kSampleStride = 64;
inline constexpr std::uint32_t kHistoryPerWay = 8;

/// One of every kSampleStride sets runs the MIN emulation.
constexpr bool is_sampled_set(std::uint32_t set) { return set % kSampleStride == 0; }

/// Load-PC friendliness predictor trained by the MIN emulation.
class PcCounterTable {
 public:
  static constexpr unsigned kHashBits = 13;
  static constexpr std::size_t kEntries = std::size_t{1} << kHashBits;
  static constexpr std::uint16_t kInit = 4;
  static constexpr std::uint16_t kFriendlyThreshold = 4;

  PcCounterTable() : counters_(kEntries, SaturatingCounter<3>(kInit)) {}

  static std::uint32_t hash(std::uint64_t pc) { return xor_fold(pc, kHashBits); }

  void train(std::uint64_t pc, bool min_hit);
  void detrain(std::uint64_t pc) { counters_[hash(pc)].decrement(); }
  bool friendly(std::uint64_t pc) const { return counters_[hash(pc)].value() >= kFriendlyThreshold; }

  std::uint16_t counter(std::uint64_t pc) const { return counters_[hash(pc)].value(); }
  std::uint16_t counter_at(std::size_t index) const { return counters_[index].value(); }
  std::size_t size() const { return counters_.size(); }

 private:
  std::vector<SaturatingCounter<3>> counters_;
};

enum class PcClass { Friendly, Averse };

PcClass pc_classify(std::uint64_t pc, const PcCounterTable& table);

/// Recent MIN-emulated hit counts per 128 KB memory region.
class RegionHitTable {
 public:
  static constexpr unsigned kRegionShift = 17;
  static constexpr unsigned kHashBits = 10;
  static constexpr std::size_t kEntries = std::size_t{1} << kHashBits;
  static constexpr std::size_t kRingSize = 4;
  static constexpr std::uint8_t kDefaultExpectedHits = 1;

  struct Entry {
    bool valid = false;
    std::uint64_t region = 0;
    std::array<std::uint32_t, kRingSize> ring{};  // oldest first
    std::uint8_t count = 0;

    std::vector<std::uint32_t> values() const { return {ring.begin(), ring.begin() + count}; }
  };

  RegionHitTable() : entries_(kEntries) {}

  static std::uint64_t region_id(std::uint64_t addr) { return addr >> kRegionShift; }
  static std::uint32_t hash(std::uint64_t addr) { return xor_fold(region_id(addr), kHashBits); }

  /// Round-half-up mean of the region's ring clamped to [0, 7], or 1 when the
  /// region has no history.
  std::uint8_t expected_hits(std::uint64_t addr) const;
  void record_eviction(std::uint64_t addr, std::uint32_t hits);

  const Entry& entry_for(std::uint64_t addr) const { return entries_[hash(addr)]; }
  const Entry& entry_at(std::size_t index) const { return entries_[index]; }
  std::size_t size() const { return entries_.size(); }

 private:
  std::vector<Entry> entries_;
};

std::uint8_t region_expected_hits(std::uint64_t addr, const RegionHitTable& table);
void region_record_eviction(std::uint64_t addr, std::uint32_t hits, RegionHitTable& table);

/// Round-half-up integer mean; 0 for an empty sequence.
std::uint32_t rounded_mean(const std::vector<std::uint32_t>& values);

/// OPTGen state for one sampled set: occupancy counters for the recent access
/// window plus an address cache pointing at each line's last window slot.
///
/// Slot i covers the interval between recorded accesses i and i+1. A reuse of
/// a line last seen at p is a MIN hit iff every slot in [p, now) has spare
/// capacity, in which case those slots are charged to the line.
class SampledSetHistory {
 public:
  struct LineEntry {
    std::uint64_t last_position = 0;
    std::uint64_t last_pc = 0;
    std::uint64_t block_addr = 0;
    std::uint32_t min_hits = 0;
  };

  /// `window_capacity` of 0 keeps the full history.
  explicit SampledSetHistory(std::uint32_t associativity, std::size_t window_capacity)
      : assoc_(associativity), capacity_(window_capacity) {}

  MinDecision access(std::uint64_t tag, std::uint64_t block_addr, std::uint64_t pc, PcCounterTable& pcs,
                     RegionHitTable& regions);

  std::vector<std::uint32_t> occupancy() const { return {occupancy_.begin(), occupancy_.end()}; }
  std::size_t window_size() const { return occupancy_.size(); }
  std::uint64_t window_start() const { return start_; }
  std::size_t lines_tracked() const { return lines_.size(); }
  const LineEntry* line(std::uint64_t tag) const;
  std::uint32_t associativity() const { return assoc_; }

 private:
  void retire_oldest(RegionHitTable& regions);

  std::uint32_t assoc_;
  std::size_t capacity_;
  std::uint64_t start_ = 0;  // absolute position of occupancy_.front()
  std::deque<std::uint32_t> occupancy_;
  std::deque<std::uint64_t> slot_tag_;
  std::unordered_map<std::uint64_t, LineEntry> lines_;
};

MinDecision optgen_access(SampledSetHistory& history, std::uint64_t tag, std::uint64_t block_addr,
                          std::uint64_t pc, PcCounterTable& pcs, RegionHitTable& regions);

/// MIN emulation across the sampled sets of a cache, with the shared PC and
/// region tables it trains.
class MinSampler {
 public:
  explicit MinSampler(const CacheGeometry& geom);

  /// Runs OPTGen for sampled sets; nullopt for the others.
  std::optional<MinDecision> observe(const AccessContext& ctx);

  const PcCounterTable& pcs() const { return pcs_; }
  PcCounterTable& pcs() { return pcs_; }
  const RegionHitTable& regions() const { return regions_; }
  RegionHitTable& regions() { return regions_; }
  const SampledSetHistory* history(std::uint32_t set) const;

  std::uint64_t min_hits() const { return hits_; }
  std::uint64_t min_misses() const { return misses_; }
  std::uint64_t min_cold() const { return cold_; }

 private:
  std::vector<SampledSetHistory> histories_;
  PcCounterTable pcs_;
  RegionHitTable regions_;
  std::uint64_t hits_ = 0;
  std::uint64_t misses_ = 0;
  std::uint64_t cold_ = 0;
};

}  // namespace ehc
