#include "ehc/cache.hpp"

#include <bit>

namespace ehc {

void CacheGeometry::validate() const {
  if (num_sets == 0 || !std::has_single_bit(num_sets))
    throw std::invalid_argument("num_sets must be a positive power of two");
  if (associativity == 0) throw std::invalid_argument("associativity must be positive");
  if (block_offset_bits == 0 || block_offset_bits > 32)
    throw std::invalid_argument("block_offset_bits must be in [1, 32]");
}

std::uint32_t CacheGeometry::set_bits() const { return static_cast<std::uint32_t>(std::countr_zero(num_sets)); }

std::uint32_t set_index(std::uint64_t addr, const CacheGeometry& geom) {
  return static_cast<std::uint32_t>((addr >> geom.block_offset_bits) & (geom.num_sets - 1));
}

bool SimStats::consistent() const {
  return accesses == hits + misses && replacements_no_averse <= replacements_total &&
         replacements_total <= misses;
}

Cache::Cache(const CacheGeometry& geom, ReplacementPolicy& policy, bool record_events)
    : geom_(geom), policy_(policy), record_events_(record_events) {
  geom_.validate();
  blocks_.resize(geom_.capacity_blocks());
}

ConstSetView Cache::set(std::uint32_t index) const {
  return ConstSetView(blocks_).subspan(std::size_t{index} * geom_.associativity, geom_.associativity);
}

SetView Cache::mutable_set(std::uint32_t index) {
  return SetView(blocks_).subspan(std::size_t{index} * geom_.associativity, geom_.associativity);
}

void Cache::fill(SetView set, std::uint32_t way, const AccessContext& ctx) {
  BlockState& b = set[way];
  b = BlockState{};
  b.valid = true;
  b.tag = ctx.tag;
  b.block_addr = ctx.block_addr;
  b.recency_stamp = ++stamp_;
  b.insert_seq = ctx.position;
  b.last_pc = ctx.pc();
  policy_.on_insert(set, way, ctx);
}

AccessOutcome Cache::access(const AccessRecord& record) {
  AccessContext ctx;
  ctx.position = position_++;
  ctx.set = set_index(record.addr, geom_);
  ctx.tag = geom_.tag(record.addr);
  ctx.block_addr = record.addr & ~((std::uint64_t{1} << geom_.block_offset_bits) - 1);
  ctx.record = &record;

  policy_.on_observe(ctx);
  ++stats_.accesses;

  SetView set = mutable_set(ctx.set);
  AccessOutcome out;
  for (std::uint32_t w = 0; w < set.size(); ++w) {
    BlockState& b = set[w];
    if (b.valid && b.tag == ctx.tag) {
      ++stats_.hits;
      ++b.residency_hits;
      b.recency_stamp = ++stamp_;
      b.last_pc = record.pc;
      policy_.on_hit(set, w, ctx);
      out.hit = true;
      out.way = w;
      return out;
    }
  }

  ++stats_.misses;
  for (std::uint32_t w = 0; w < set.size(); ++w) {
    if (!set[w].valid) {
      fill(set, w, ctx);
      out.way = w;
      return out;
    }
  }

  const VictimChoice choice = policy_.choose_victim(set, ctx);
  if (!choice.bypass() && choice.way >= geom_.associativity)
    throw VictimOutOfRange(std::string(policy_.name()) + " returned way " + std::to_string(choice.way) +
                           " for a " + std::to_string(geom_.associativity) + "-way cache");

  if (record_events_) {
    ReplacementEvent e;
    e.position = ctx.position;
    e.set = ctx.set;
    e.incoming_block = geom_.block_number(record.addr);
    e.victim_way = choice.way;
    e.no_averse = choice.no_averse;
    e.residents.reserve(set.size());
    for (const auto& b : set) e.residents.push_back(geom_.block_number(b.block_addr));
    events_.push_back(std::move(e));
  }

  out.no_averse = choice.no_averse;
  if (choice.bypass()) {
    out.bypassed = true;
  } else {
    policy_.on_evict(set, choice.way, ctx);
    ++stats_.evictions;
    ++stats_.replacements_total;
    if (choice.no_averse) ++stats_.replacements_no_averse;
    fill(set, choice.way, ctx);
    out.way = choice.way;
    out.evicted_way = choice.way;
  }
  if (!stats_.consistent()) throw InvariantViolation("cache statistics became inconsistent");
  return out;
}

SimStats Cache::final_stats() const {
  SimStats s = stats_;
  policy_.export_counters(s.per_policy);
  return s;
}

SimResult simulate(const Trace& trace, ReplacementPolicy& policy, const CacheGeometry& geom,
                   const SimOptions& options) {
  Cache cache(geom, policy, options.record_events);
  for (const auto& r : trace.records) cache.access(r);
  SimResult result;
  result.stats = cache.final_stats();
  if (options.record_events) result.events = cache.take_events();
  return result;
}

}  // namespace ehc
