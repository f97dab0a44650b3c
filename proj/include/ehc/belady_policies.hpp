#pragma once

#include <cstdint>
#include <optional>

#include "ehc/cache.hpp"
#include "ehc/min_sampler.hpp"

namespace ehc {

struct HawkeyeOptions {
  // Age other friendly blocks when a friendly block is inserted.
  bool aging = true;
  // EHC only: force every inserted block's expected-further-hits to this value
  // instead of the region estimate.
  std::optional<std::uint8_t> ehc_fixed_init;
};

/// Applies the PC classification to a touched block. Averse blocks go to
/// kMaxRrpv; friendly blocks go to 0, and a friendly insertion ages every
/// other valid friendly block that is below kMaxRrpv - 1.
void hawkeye_on_access(SetView set, std::uint32_t way, PcClass cls, bool insertion, bool aging = true);

/// Lowest-indexed rrpv==7 way; otherwise the lowest-indexed way with the
/// largest rrpv, flagged no_averse. Does not detrain.
VictimChoice hawkeye_choose_victim(ConstSetView set);

/// Same as hawkeye_choose_victim when an averse block exists; otherwise the
/// lowest-indexed way minimizing (efh - rrpv), flagged no_averse.
VictimChoice ehc_choose_victim(ConstSetView set);

constexpr int ehc_score(const BlockState& b) { return int{b.efh} - int{b.rrpv}; }

/// Count-down with saturation at 0.
constexpr std::uint8_t ehc_after_hit(std::uint8_t efh) { return efh == 0 ? 0 : efh - 1; }

class HawkeyePolicy : public ReplacementPolicy {
 public:
  HawkeyePolicy(const CacheGeometry& geom, HawkeyeOptions options = {});

  std::string_view name() const override { return "hawkeye"; }
  void on_observe(const AccessContext& ctx) override;
  void on_hit(SetView set, std::uint32_t way, const AccessContext& ctx) override;
  VictimChoice choose_victim(SetView set, const AccessContext& ctx) override;
  void on_insert(SetView set, std::uint32_t way, const AccessContext& ctx) override;
  void export_counters(std::map<std::string, std::uint64_t>& out) const override;

  const MinSampler& sampler() const { return sampler_; }

 protected:
  virtual VictimChoice select(ConstSetView set) const { return hawkeye_choose_victim(set); }

  MinSampler sampler_;
  HawkeyeOptions options_;

 private:
  std::uint64_t friendly_fills_ = 0;
  std::uint64_t averse_fills_ = 0;
  std::uint64_t detrains_ = 0;
};

class EhcPolicy final : public HawkeyePolicy {
 public:
  EhcPolicy(const CacheGeometry& geom, HawkeyeOptions options = {});

  std::string_view name() const override { return "ehc"; }
  void on_hit(SetView set, std::uint32_t way, const AccessContext& ctx) override;
  void on_insert(SetView set, std::uint32_t way, const AccessContext& ctx) override;

 protected:
  VictimChoice select(ConstSetView set) const override { return ehc_choose_victim(set); }
};

}  // namespace ehc
