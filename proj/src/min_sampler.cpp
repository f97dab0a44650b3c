#include "ehc/min_sampler.hpp"

#include <algorithm>

namespace ehc {

void PcCounterTable::train(std::uint64_t pc, bool min_hit) {
  auto& c = counters_[hash(pc)];
  if (min_hit)
    c.increment();
  else
    c.decrement();
}

PcClass pc_classify(std::uint64_t pc, const PcCounterTable& table) {
  return table.friendly(pc) ? PcClass::Friendly : PcClass::Averse;
}

std::uint32_t rounded_mean(const std::vector<std::uint32_t>& values) {
  if (values.empty()) return 0;
  std::uint64_t sum = 0;
  for (auto v : values) sum += v;
  const std::uint64_t n = values.size();
  return static_cast<std::uint32_t>((2 * sum + n) / (2 * n));
}

std::uint8_t RegionHitTable::expected_hits(std::uint64_t addr) const {
  const Entry& e = entries_[hash(addr)];
  if (!e.valid || e.region != region_id(addr) || e.count == 0) return kDefaultExpectedHits;
  return static_cast<std::uint8_t>(std::min<std::uint32_t>(rounded_mean(e.values()), kMaxEfh));
}

void RegionHitTable::record_eviction(std::uint64_t addr, std::uint32_t hits) {
  Entry& e = entries_[hash(addr)];
  const std::uint64_t region = region_id(addr);
  if (!e.valid || e.region != region) e = Entry{true, region, {}, 0};
  if (e.count == kRingSize) {
    std::rotate(e.ring.begin(), e.ring.begin() + 1, e.ring.end());
    e.ring.back() = hits;
  } else {
    e.ring[e.count++] = hits;
  }
}

std::uint8_t region_expected_hits(std::uint64_t addr, const RegionHitTable& table) {
  return table.expected_hits(addr);
}

void region_record_eviction(std::uint64_t addr, std::uint32_t hits, RegionHitTable& table) {
  table.record_eviction(addr, hits);
}

const SampledSetHistory::LineEntry* SampledSetHistory::line(std::uint64_t tag) const {
  auto it = lines_.find(tag);
  return it == lines_.end() ? nullptr : &it->second;
}

void SampledSetHistory::retire_oldest(RegionHitTable& regions) {
  const std::uint64_t tag = slot_tag_.front();
  auto it = lines_.find(tag);
  if (it != lines_.end() && it->second.last_position == start_) {
    regions.record_eviction(it->second.block_addr, it->second.min_hits);
    lines_.erase(it);
  }
  occupancy_.pop_front();
  slot_tag_.pop_front();
  ++start_;
}

MinDecision SampledSetHistory::access(std::uint64_t tag, std::uint64_t block_addr, std::uint64_t pc,
                                      PcCounterTable& pcs, RegionHitTable& regions) {
  const std::uint64_t now = start_ + occupancy_.size();
  MinDecision decision = MinDecision::ColdMiss;

  auto it = lines_.find(tag);
  if (it == lines_.end()) {
    it = lines_.emplace(tag, LineEntry{}).first;
  } else {
    LineEntry& line = it->second;
    const auto first = occupancy_.begin() + static_cast<std::ptrdiff_t>(line.last_position - start_);
    const bool fits = std::all_of(first, occupancy_.end(), [&](std::uint32_t o) { return o < assoc_; });
    pcs.train(line.last_pc, fits);
    if (fits) {
      std::for_each(first, occupancy_.end(), [](std::uint32_t& o) { ++o; });
      ++line.min_hits;
      decision = MinDecision::Hit;
    } else {
      regions.record_eviction(line.block_addr, line.min_hits);
      line.min_hits = 0;
      decision = MinDecision::Miss;
    }
  }

  LineEntry& line = it->second;
  line.last_position = now;
  line.last_pc = pc;
  line.block_addr = block_addr;

  if (capacity_ != 0 && occupancy_.size() == capacity_) retire_oldest(regions);
  occupancy_.push_back(0);
  slot_tag_.push_back(tag);
  return decision;
}

MinDecision optgen_access(SampledSetHistory& history, std::uint64_t tag, std::uint64_t block_addr,
                          std::uint64_t pc, PcCounterTable& pcs, RegionHitTable& regions) {
  return history.access(tag, block_addr, pc, pcs, regions);
}

MinSampler::MinSampler(const CacheGeometry& geom) {
  const std::uint32_t sampled = (geom.num_sets + kSampleStride - 1) / kSampleStride;
  histories_.reserve(sampled);
  for (std::uint32_t i = 0; i < sampled; ++i)
    histories_.emplace_back(geom.associativity, std::size_t{kHistoryPerWay} * geom.associativity);
}

std::optional<MinDecision> MinSampler::observe(const AccessContext& ctx) {
  if (!is_sampled_set(ctx.set)) return std::nullopt;
  const MinDecision d =
      histories_[ctx.set / kSampleStride].access(ctx.tag, ctx.block_addr, ctx.pc(), pcs_, regions_);
  switch (d) {
    case MinDecision::Hit: ++hits_; break;
    case MinDecision::Miss: ++misses_; break;
    case MinDecision::ColdMiss: ++cold_; break;
  }
  return d;
}

const SampledSetHistory* MinSampler::history(std::uint32_t set) const {
  if (!is_sampled_set(set) || set / kSampleStride >= histories_.size()) return nullptr;
  return &histories_[set / kSampleStride];
}

}  // namespace ehc
