#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "ehc/cache.hpp"
#include "ehc/counters.hpp"

namespace ehc {

// ---- LRU -------------------------------------------------------------------

/// Way with the smallest recency stamp.
std::uint32_t lru_choose_victim(ConstSetView set);

class LruPolicy final : public ReplacementPolicy {
 public:
  std::string_view name() const override { return "lru"; }
  void on_hit(SetView, std::uint32_t, const AccessContext&) override {}
  VictimChoice choose_victim(SetView set, const AccessContext&) override;
  void on_insert(SetView, std::uint32_t, const AccessContext&) override {}
};

// ---- RRIP family -----------------------------------------------------------

inline constexpr std::uint8_t kRripLongInsert = kMaxRrpv - 1;
inline constexpr std::uint32_t kBrripLongChance = 32;

/// Ages the whole set until some way reaches kMaxRrpv and returns the lowest
/// such way. Mutates rrpv values.
std::uint32_t rrip_choose_victim(SetView set);

std::uint8_t srrip_insert_rrpv();
/// kRripLongInsert with probability 1/32, otherwise kMaxRrpv.
std::uint8_t brrip_insert_rrpv(std::mt19937_64& rng);

enum class RripInsertion { Srrip, Brrip };
enum class LeaderRole { Follower, SrripLeader, BrripLeader };

/// Set-dueling selector between SRRIP and BRRIP insertion.
class DrripState {
 public:
  static constexpr std::uint16_t kPselInit = 512;
  static constexpr std::uint16_t kPselThreshold = 512;
  static constexpr std::uint32_t kLeaderStride = 64;
  static constexpr std::uint32_t kSrripLeaderOffset = 0;
  static constexpr std::uint32_t kBrripLeaderOffset = 33;

  DrripState() : psel_(kPselInit) {}

  static LeaderRole role(std::uint32_t set);
  RripInsertion policy_for_set(std::uint32_t set) const;
  /// Leader-set misses move PSEL toward the other policy.
  void record_miss(std::uint32_t set);

  std::uint16_t psel() const { return psel_.value(); }
  void set_psel(std::uint16_t v) { psel_ = SaturatingCounter<10>(v); }

 private:
  SaturatingCounter<10> psel_;
};

RripInsertion drrip_policy_for_set(std::uint32_t set, const DrripState& state);

class RripPolicy final : public ReplacementPolicy {
 public:
  enum class Mode { Srrip, Brrip, Drrip };

  RripPolicy(Mode mode, std::uint64_t seed);

  std::string_view name() const override;
  void on_hit(SetView set, std::uint32_t way, const AccessContext&) override;
  VictimChoice choose_victim(SetView set, const AccessContext&) override;
  void on_insert(SetView set, std::uint32_t way, const AccessContext& ctx) override;
  void export_counters(std::map<std::string, std::uint64_t>& out) const override;

  const DrripState& dueling() const { return drrip_; }

 private:
  Mode mode_;
  std::mt19937_64 rng_;
  DrripState drrip_;
  std::uint64_t brrip_inserts_ = 0;
  std::uint64_t srrip_inserts_ = 0;
};

// ---- SHiP ------------------------------------------------------------------

/// Signature history counter table.
class ShipTable {
 public:
  static constexpr unsigned kSignatureBits = 14;
  static constexpr std::size_t kEntries = std::size_t{1} << kSignatureBits;
  static constexpr std::uint16_t kInit = 1;

  ShipTable() : counters_(kEntries, SaturatingCounter<3>(kInit)) {}

  static std::uint32_t signature(std::uint64_t pc) { return xor_fold(pc, kSignatureBits); }

  /// Eviction-time training: reused residencies strengthen the signature.
  void train(std::uint32_t signature, bool reused);
  /// kMaxRrpv when the signature predicts a dead block.
  std::uint8_t insert_rrpv(std::uint32_t signature) const;

  std::uint16_t counter(std::uint32_t signature) const { return counters_[signature].value(); }
  void set_counter(std::uint32_t signature, std::uint16_t v) { counters_[signature] = SaturatingCounter<3>(v); }
  std::size_t size() const { return counters_.size(); }

 private:
  std::vector<SaturatingCounter<3>> counters_;
};

class ShipPolicy final : public ReplacementPolicy {
 public:
  explicit ShipPolicy(const CacheGeometry& geom);

  std::string_view name() const override { return "ship"; }
  void on_hit(SetView set, std::uint32_t way, const AccessContext& ctx) override;
  VictimChoice choose_victim(SetView set, const AccessContext&) override;
  void on_evict(SetView set, std::uint32_t way, const AccessContext& ctx) override;
  void on_insert(SetView set, std::uint32_t way, const AccessContext& ctx) override;

  const ShipTable& table() const { return table_; }
  bool outcome(std::uint32_t set, std::uint32_t way) const { return outcome_[slot(set, way)]; }

 private:
  std::size_t slot(std::uint32_t set, std::uint32_t way) const { return std::size_t{set} * assoc_ + way; }

  std::uint32_t assoc_;
  ShipTable table_;
  std::vector<std::uint32_t> signature_;
  std::vector<bool> outcome_;
};

}  // namespace ehc
