#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "ehc/cache.hpp"
#include "ehc/min_sampler.hpp"
#include "ehc/trace.hpp"

namespace ehc {

inline constexpr std::uint64_t kNoNextUse = std::numeric_limits<std::uint64_t>::max();

/// next[i] is the position of the next access to the block accessed at i, or
/// kNoNextUse.
struct NextUseIndex {
  std::vector<std::uint64_t> next;
};

NextUseIndex compute_next_use(const Trace& trace, const CacheGeometry& geom);

struct ResidencyRecord {
  std::uint64_t block_addr = 0;  // byte address of the block
  std::uint64_t fill_position = 0;
  std::uint64_t end_position = 0;  // evicting access, or trace length
  std::uint32_t hits = 0;
  bool bypassed = false;  // zero-hit residency ending right after its fill
};

struct MinResult {
  SimStats stats;
  std::vector<MinDecision> decisions;  // one per access
  std::vector<ResidencyRecord> residencies;
  std::optional<EventLog> events;
};

/// Offline Belady MIN. Evicts the resident with the farthest next use (lowest
/// way on ties). With `bypass`, the incoming block competes too and is
/// bypassed only when strictly farther than every resident.
MinResult simulate_min(const Trace& trace, const CacheGeometry& geom, bool bypass, bool record_events = false);

/// Buckets |actual - predicted| into 0, 1, 2, 3 and >= 4.
struct ErrorHistogram {
  std::array<std::uint64_t, 5> buckets{};

  std::uint64_t total() const;
  double fraction(std::size_t bucket) const;
  void add(std::uint32_t actual, std::uint32_t predicted);
};

/// Prediction = rounded mean of up to four earlier residencies of the same
/// block. Residencies with no history are skipped.
ErrorHistogram per_block_prediction_error(std::span<const ResidencyRecord> residencies);

/// Prediction = rounded mean of the last four residencies evicted from the
/// same 128 KB region before this fill.
ErrorHistogram per_region_prediction_error(std::span<const ResidencyRecord> residencies);

class MissingEventLog : public std::invalid_argument {
 public:
  MissingEventLog() : std::invalid_argument("victim-quality analysis needs a recorded event log") {}
};

struct VictimQuality {
  std::vector<std::uint64_t> rank_histogram;  // associativity + 1 buckets

  std::uint64_t decisions() const;
  double mean_rank() const;
};

/// Rank of a victim among the residents plus the incoming block ordered by
/// next use, farthest first. Candidates tied with the victim do not push it
/// down, so rank 0 means no candidate was strictly farther away.
std::uint32_t victim_rank(std::span<const std::uint64_t> resident_next_use, std::uint64_t incoming_next_use,
                          std::uint32_t victim_way);

VictimQuality victim_quality(const std::optional<EventLog>& log, const Trace& trace, const CacheGeometry& geom);

}  // namespace ehc
