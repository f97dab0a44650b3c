#include "ehc/baseline_policies.hpp"

#include <algorithm>

namespace ehc {

std::uint32_t lru_choose_victim(ConstSetView set) {
  auto it = std::min_element(set.begin(), set.end(), [](const BlockState& a, const BlockState& b) {
    return a.recency_stamp < b.recency_stamp;
  });
  return static_cast<std::uint32_t>(it - set.begin());
}

VictimChoice LruPolicy::choose_victim(SetView set, const AccessContext&) {
  return VictimChoice::evict(lru_choose_victim(set));
}

std::uint32_t rrip_choose_victim(SetView set) {
  for (;;) {
    for (std::uint32_t w = 0; w < set.size(); ++w)
      if (set[w].rrpv >= kMaxRrpv) return w;
    for (auto& b : set) ++b.rrpv;
  }
}

std::uint8_t srrip_insert_rrpv() { return kRripLongInsert; }

std::uint8_t brrip_insert_rrpv(std::mt19937_64& rng) {
  return rng() % kBrripLongChance == 0 ? kRripLongInsert : kMaxRrpv;
}

LeaderRole DrripState::role(std::uint32_t set) {
  switch (set % kLeaderStride) {
    case kSrripLeaderOffset: return LeaderRole::SrripLeader;
    case kBrripLeaderOffset: return LeaderRole::BrripLeader;
    default: return LeaderRole::Follower;
  }
}

RripInsertion DrripState::policy_for_set(std::uint32_t set) const {
  switch (role(set)) {
    case LeaderRole::SrripLeader: return RripInsertion::Srrip;
    case LeaderRole::BrripLeader: return RripInsertion::Brrip;
    case LeaderRole::Follower: break;
  }
  return psel_.value() < kPselThreshold ? RripInsertion::Srrip : RripInsertion::Brrip;
}

void DrripState::record_miss(std::uint32_t set) {
  switch (role(set)) {
    case LeaderRole::SrripLeader: psel_.increment(); break;
    case LeaderRole::BrripLeader: psel_.decrement(); break;
    case LeaderRole::Follower: break;
  }
}

RripInsertion drrip_policy_for_set(std::uint32_t set, const DrripState& state) {
  return state.policy_for_set(set);
}

RripPolicy::RripPolicy(Mode mode, std::uint64_t seed) : mode_(mode), rng_(seed) {}

std::string_view RripPolicy::name() const {
  switch (mode_) {
    case Mode::Srrip: return "srrip";
    case Mode::Brrip: return "brrip";
    case Mode::Drrip: break;
  }
  return "drrip";
}

void RripPolicy::on_hit(SetView set, std::uint32_t way, const AccessContext&) { set[way].rrpv = 0; }

VictimChoice RripPolicy::choose_victim(SetView set, const AccessContext&) {
  return VictimChoice::evict(rrip_choose_victim(set));
}

void RripPolicy::on_insert(SetView set, std::uint32_t way, const AccessContext& ctx) {
  RripInsertion ins = mode_ == Mode::Srrip ? RripInsertion::Srrip : RripInsertion::Brrip;
  if (mode_ == Mode::Drrip) {
    drrip_.record_miss(ctx.set);
    ins = drrip_.policy_for_set(ctx.set);
  }
  if (ins == RripInsertion::Srrip) {
    set[way].rrpv = srrip_insert_rrpv();
    ++srrip_inserts_;
  } else {
    set[way].rrpv = brrip_insert_rrpv(rng_);
    ++brrip_inserts_;
  }
}

void RripPolicy::export_counters(std::map<std::string, std::uint64_t>& out) const {
  out["srrip_inserts"] = srrip_inserts_;
  out["brrip_inserts"] = brrip_inserts_;
  if (mode_ == Mode::Drrip) out["psel"] = drrip_.psel();
}

void ShipTable::train(std::uint32_t signature, bool reused) {
  if (reused)
    counters_[signature].increment();
  else
    counters_[signature].decrement();
}

std::uint8_t ShipTable::insert_rrpv(std::uint32_t signature) const {
  return counters_[signature].value() == 0 ? kMaxRrpv : kRripLongInsert;
}

ShipPolicy::ShipPolicy(const CacheGeometry& geom)
    : assoc_(geom.associativity), signature_(geom.capacity_blocks(), 0), outcome_(geom.capacity_blocks(), false) {}

void ShipPolicy::on_hit(SetView set, std::uint32_t way, const AccessContext& ctx) {
  set[way].rrpv = 0;
  outcome_[slot(ctx.set, way)] = true;
}

VictimChoice ShipPolicy::choose_victim(SetView set, const AccessContext&) {
  return VictimChoice::evict(rrip_choose_victim(set));
}

void ShipPolicy::on_evict(SetView, std::uint32_t way, const AccessContext& ctx) {
  const std::size_t s = slot(ctx.set, way);
  table_.train(signature_[s], outcome_[s]);
}

void ShipPolicy::on_insert(SetView set, std::uint32_t way, const AccessContext& ctx) {
  const std::size_t s = slot(ctx.set, way);
  signature_[s] = ShipTable::signature(ctx.pc());
  outcome_[s] = false;
  set[way].rrpv = table_.insert_rrpv(signature_[s]);
}

}  // namespace ehc
