#include "ehc/min_oracle.hpp"

#include <algorithm>
#include <deque>
#include <unordered_map>
#include <unordered_set>

namespace ehc {

NextUseIndex compute_next_use(const Trace& trace, const CacheGeometry& geom) {
  NextUseIndex idx;
  idx.next.assign(trace.size(), kNoNextUse);
  std::unordered_map<std::uint64_t, std::uint64_t> upcoming;
  for (std::size_t i = trace.size(); i-- > 0;) {
    const std::uint64_t block = geom.block_number(trace.records[i].addr);
    auto [it, inserted] = upcoming.try_emplace(block, i);
    if (!inserted) {
      idx.next[i] = it->second;
      it->second = i;
    }
  }
  return idx;
}

namespace {

struct Resident {
  bool valid = false;
  std::uint64_t block = 0;
  std::uint64_t next_use = kNoNextUse;
  std::uint64_t fill_position = 0;
  std::uint32_t hits = 0;
};

}  // namespace

MinResult simulate_min(const Trace& trace, const CacheGeometry& geom, bool bypass, bool record_events) {
  geom.validate();
  const NextUseIndex next = compute_next_use(trace, geom);
  const std::uint32_t assoc = geom.associativity;
  std::vector<Resident> blocks(geom.capacity_blocks());
  std::unordered_set<std::uint64_t> seen;

  MinResult out;
  out.decisions.reserve(trace.size());
  if (record_events) out.events.emplace();
  SimStats& st = out.stats;

  auto block_addr = [&](std::uint64_t block) { return block << geom.block_offset_bits; };

  for (std::uint64_t i = 0; i < trace.size(); ++i) {
    const std::uint64_t block = geom.block_number(trace.records[i].addr);
    const std::uint32_t set_idx = set_index(trace.records[i].addr, geom);
    std::span<Resident> set(blocks.data() + std::size_t{set_idx} * assoc, assoc);
    ++st.accesses;
    const bool cold = seen.insert(block).second;

    auto hit = std::find_if(set.begin(), set.end(), [&](const Resident& r) { return r.valid && r.block == block; });
    if (hit != set.end()) {
      ++st.hits;
      ++hit->hits;
      hit->next_use = next.next[i];
      out.decisions.push_back(MinDecision::Hit);
      continue;
    }
    ++st.misses;
    out.decisions.push_back(cold ? MinDecision::ColdMiss : MinDecision::Miss);

    const Resident incoming{true, block, next.next[i], i, 0};
    auto free = std::find_if(set.begin(), set.end(), [](const Resident& r) { return !r.valid; });
    if (free != set.end()) {
      *free = incoming;
      continue;
    }

    std::uint32_t victim = 0;
    for (std::uint32_t w = 1; w < assoc; ++w)
      if (set[w].next_use > set[victim].next_use) victim = w;
    const bool skip = bypass && incoming.next_use > set[victim].next_use;

    if (record_events) {
      ReplacementEvent e;
      e.position = i;
      e.set = set_idx;
      e.incoming_block = block;
      e.victim_way = skip ? VictimChoice::kBypass : victim;
      for (const auto& r : set) e.residents.push_back(r.block);
      out.events->push_back(std::move(e));
    }

    if (skip) {
      out.residencies.push_back({block_addr(block), i, i + 1, 0, true});
      continue;
    }
    const Resident& old = set[victim];
    out.residencies.push_back({block_addr(old.block), old.fill_position, i, old.hits, false});
    ++st.evictions;
    ++st.replacements_total;
    set[victim] = incoming;
  }

  for (const auto& r : blocks)
    if (r.valid) out.residencies.push_back({block_addr(r.block), r.fill_position, trace.size(), r.hits, false});
  return out;
}

std::uint64_t ErrorHistogram::total() const {
  std::uint64_t t = 0;
  for (auto b : buckets) t += b;
  return t;
}

double ErrorHistogram::fraction(std::size_t bucket) const {
  const std::uint64_t t = total();
  return t == 0 ? 0.0 : static_cast<double>(buckets.at(bucket)) / static_cast<double>(t);
}

void ErrorHistogram::add(std::uint32_t actual, std::uint32_t predicted) {
  const std::uint32_t diff = actual > predicted ? actual - predicted : predicted - actual;
  ++buckets[std::min<std::uint32_t>(diff, buckets.size() - 1)];
}

namespace {

// Replays residencies in time order. At each fill the key's history (hit
// counts of residencies that ended before the fill) yields a prediction; at
// each end the residency's hits join its key's history. Ends sort before fills
// at the same position because the eviction precedes the refill.
template <typename KeyFn>
ErrorHistogram replay_predictions(std::span<const ResidencyRecord> residencies, KeyFn key) {
  struct Event {
    std::uint64_t position;
    int order;  // 0 = end, 1 = fill
    std::size_t index;
  };
  std::vector<Event> events;
  events.reserve(2 * residencies.size());
  for (std::size_t i = 0; i < residencies.size(); ++i) {
    events.push_back({residencies[i].fill_position, 1, i});
    events.push_back({residencies[i].end_position, 0, i});
  }
  std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
    if (a.position != b.position) return a.position < b.position;
    if (a.order != b.order) return a.order < b.order;
    return a.index < b.index;
  });

  std::unordered_map<std::uint64_t, std::deque<std::uint32_t>> history;
  ErrorHistogram hist;
  for (const Event& e : events) {
    const ResidencyRecord& r = residencies[e.index];
    auto& h = history[key(r)];
    if (e.order == 1) {
      if (!h.empty()) hist.add(r.hits, rounded_mean({h.begin(), h.end()}));
    } else {
      h.push_back(r.hits);
      if (h.size() > RegionHitTable::kRingSize) h.pop_front();
    }
  }
  return hist;
}

}  // namespace

ErrorHistogram per_block_prediction_error(std::span<const ResidencyRecord> residencies) {
  return replay_predictions(residencies, [](const ResidencyRecord& r) { return r.block_addr; });
}

ErrorHistogram per_region_prediction_error(std::span<const ResidencyRecord> residencies) {
  return replay_predictions(residencies,
                            [](const ResidencyRecord& r) { return RegionHitTable::region_id(r.block_addr); });
}

std::uint64_t VictimQuality::decisions() const {
  std::uint64_t n = 0;
  for (auto c : rank_histogram) n += c;
  return n;
}

double VictimQuality::mean_rank() const {
  const std::uint64_t n = decisions();
  if (n == 0) return 0.0;
  double sum = 0.0;
  for (std::size_t r = 0; r < rank_histogram.size(); ++r) sum += static_cast<double>(r * rank_histogram[r]);
  return sum / static_cast<double>(n);
}

std::uint32_t victim_rank(std::span<const std::uint64_t> resident_next_use, std::uint64_t incoming_next_use,
                          std::uint32_t victim_way) {
  const bool bypassed = victim_way == VictimChoice::kBypass;
  const std::uint64_t victim_next = bypassed ? incoming_next_use : resident_next_use[victim_way];
  std::uint32_t rank = 0;
  for (std::uint32_t w = 0; w < resident_next_use.size(); ++w)
    if (w != victim_way && resident_next_use[w] > victim_next) ++rank;
  if (!bypassed && incoming_next_use > victim_next) ++rank;
  return rank;
}

VictimQuality victim_quality(const std::optional<EventLog>& log, const Trace& trace, const CacheGeometry& geom) {
  if (!log) throw MissingEventLog();
  const NextUseIndex next = compute_next_use(trace, geom);

  VictimQuality q;
  q.rank_histogram.assign(geom.associativity + 1, 0);
  std::unordered_map<std::uint64_t, std::uint64_t> last_seen;
  std::uint64_t cursor = 0;
  std::vector<std::uint64_t> resident_next;

  for (const ReplacementEvent& e : *log) {
    if (e.position >= trace.size() || e.position + 1 < cursor)
      throw std::invalid_argument("event log does not match trace");
    for (; cursor <= e.position; ++cursor) last_seen[geom.block_number(trace.records[cursor].addr)] = cursor;
    resident_next.clear();
    for (std::uint64_t b : e.residents) {
      auto it = last_seen.find(b);
      resident_next.push_back(it == last_seen.end() ? kNoNextUse : next.next[it->second]);
    }
    const std::uint32_t rank = victim_rank(resident_next, next.next[e.position], e.victim_way);
    ++q.rank_histogram.at(rank);
  }
  return q;
}

}  // namespace ehc
