#include "ehc/belady_policies.hpp"

#include <algorithm>

namespace ehc {

void hawkeye_on_access(SetView set, std::uint32_t way, PcClass cls, bool insertion, bool aging) {
  if (cls == PcClass::Averse) {
    set[way].rrpv = kMaxRrpv;
    return;
  }
  if (insertion && aging) {
    for (std::uint32_t w = 0; w < set.size(); ++w)
      if (w != way && set[w].valid && set[w].rrpv < kMaxRrpv - 1) ++set[w].rrpv;
  }
  set[way].rrpv = 0;
}

VictimChoice hawkeye_choose_victim(ConstSetView set) {
  for (std::uint32_t w = 0; w < set.size(); ++w)
    if (set[w].rrpv == kMaxRrpv) return VictimChoice::evict(w, false);
  std::uint32_t oldest = 0;
  for (std::uint32_t w = 1; w < set.size(); ++w)
    if (set[w].rrpv > set[oldest].rrpv) oldest = w;
  return VictimChoice::evict(oldest, true);
}

VictimChoice ehc_choose_victim(ConstSetView set) {
  const bool averse_present =
      std::any_of(set.begin(), set.end(), [](const BlockState& b) { return b.rrpv == kMaxRrpv; });
  if (averse_present) return hawkeye_choose_victim(set);
  std::uint32_t best = 0;
  for (std::uint32_t w = 1; w < set.size(); ++w)
    if (ehc_score(set[w]) < ehc_score(set[best])) best = w;
  return VictimChoice::evict(best, true);
}

HawkeyePolicy::HawkeyePolicy(const CacheGeometry& geom, HawkeyeOptions options)
    : sampler_(geom), options_(options) {}

void HawkeyePolicy::on_observe(const AccessContext& ctx) { sampler_.observe(ctx); }

void HawkeyePolicy::on_hit(SetView set, std::uint32_t way, const AccessContext& ctx) {
  hawkeye_on_access(set, way, pc_classify(ctx.pc(), sampler_.pcs()), false, options_.aging);
}

VictimChoice HawkeyePolicy::choose_victim(SetView set, const AccessContext& ctx) {
  const VictimChoice choice = select(set);
  // Evicting a block predicted friendly means the prediction was wrong. Only
  // sampled sets train, so only they detrain.
  if (choice.no_averse && is_sampled_set(ctx.set)) {
    sampler_.pcs().detrain(set[choice.way].last_pc);
    ++detrains_;
  }
  return choice;
}

void HawkeyePolicy::on_insert(SetView set, std::uint32_t way, const AccessContext& ctx) {
  const PcClass cls = pc_classify(ctx.pc(), sampler_.pcs());
  ++(cls == PcClass::Friendly ? friendly_fills_ : averse_fills_);
  hawkeye_on_access(set, way, cls, true, options_.aging);
}

void HawkeyePolicy::export_counters(std::map<std::string, std::uint64_t>& out) const {
  out["optgen_hits"] = sampler_.min_hits();
  out["optgen_misses"] = sampler_.min_misses();
  out["optgen_cold"] = sampler_.min_cold();
  out["friendly_fills"] = friendly_fills_;
  out["averse_fills"] = averse_fills_;
  out["detrains"] = detrains_;
}

EhcPolicy::EhcPolicy(const CacheGeometry& geom, HawkeyeOptions options) : HawkeyePolicy(geom, options) {}

void EhcPolicy::on_hit(SetView set, std::uint32_t way, const AccessContext& ctx) {
  set[way].efh = ehc_after_hit(set[way].efh);
  HawkeyePolicy::on_hit(set, way, ctx);
}

void EhcPolicy::on_insert(SetView set, std::uint32_t way, const AccessContext& ctx) {
  set[way].efh = options_.ehc_fixed_init ? std::min(*options_.ehc_fixed_init, kMaxEfh)
                                         : region_expected_hits(ctx.block_addr, sampler_.regions());
  HawkeyePolicy::on_insert(set, way, ctx);
}

}  // namespace ehc
