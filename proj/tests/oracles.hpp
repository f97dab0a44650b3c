#pragma once

// Brute-force reference models used only by the tests. They are deliberately
// naive so they share no code or data structures with the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <list>
#include <map>
#include <random>
#include <vector>

#include "ehc/cache.hpp"
#include "ehc/trace.hpp"

namespace oracle {

// One record per entry of `blocks`, addr = block << offset bits, seq = index.
inline ehc::Trace make_trace(const std::vector<std::uint64_t>& blocks, const ehc::CacheGeometry& geom,
                             const std::vector<std::uint64_t>& pcs = {}) {
  std::vector<ehc::AccessRecord> recs;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    ehc::AccessRecord r;
    r.seq = i;
    r.addr = blocks[i] << geom.block_offset_bits;
    r.pc = pcs.empty() ? 0x1000 + (blocks[i] % 5) * 4 : pcs[i];
    recs.push_back(r);
  }
  return ehc::Trace::from_records(std::move(recs));
}

// Random block stream over `distinct` blocks, with PCs drawn from a small pool.
inline ehc::Trace random_trace(std::mt19937_64& rng, std::size_t length, std::uint64_t distinct,
                               const ehc::CacheGeometry& geom) {
  std::vector<std::uint64_t> blocks, pcs;
  for (std::size_t i = 0; i < length; ++i) {
    blocks.push_back(rng() % distinct);
    pcs.push_back(0x2000 + (rng() % 4) * 4);
  }
  return make_trace(blocks, geom, pcs);
}

inline std::uint64_t block_of(const ehc::AccessRecord& r, const ehc::CacheGeometry& geom) {
  return r.addr >> geom.block_offset_bits;
}

inline std::uint32_t set_of(const ehc::AccessRecord& r, const ehc::CacheGeometry& geom) {
  return static_cast<std::uint32_t>(block_of(r, geom) % geom.num_sets);
}

// Recency list per set, most recent at the front.
inline std::vector<bool> lru_hits(const ehc::Trace& trace, const ehc::CacheGeometry& geom) {
  std::map<std::uint32_t, std::list<std::uint64_t>> stacks;
  std::vector<bool> out;
  for (const auto& r : trace.records) {
    auto& s = stacks[set_of(r, geom)];
    const std::uint64_t b = block_of(r, geom);
    auto it = std::find(s.begin(), s.end(), b);
    out.push_back(it != s.end());
    if (it != s.end()) s.erase(it);
    s.push_front(b);
    if (s.size() > geom.associativity) s.pop_back();
  }
  return out;
}

// O(n^2) scan for the next access to the same block.
inline std::vector<std::uint64_t> naive_next_use(const ehc::Trace& trace, const ehc::CacheGeometry& geom) {
  std::vector<std::uint64_t> out(trace.size(), UINT64_MAX);
  for (std::size_t i = 0; i < trace.size(); ++i)
    for (std::size_t j = i + 1; j < trace.size(); ++j)
      if (block_of(trace.records[j], geom) == block_of(trace.records[i], geom)) {
        out[i] = j;
        break;
      }
  return out;
}

// Maximum achievable hits over every eviction (and optionally bypass) schedule.
// Memoized on (position, cache contents); only usable for tiny traces.
class ExhaustiveMin {
 public:
  ExhaustiveMin(const ehc::Trace& trace, const ehc::CacheGeometry& geom, bool bypass)
      : trace_(trace), geom_(geom), bypass_(bypass) {}

  std::uint64_t best() {
    std::vector<std::vector<std::uint64_t>> sets(geom_.num_sets);
    return search(0, sets);
  }

 private:
  using State = std::vector<std::vector<std::uint64_t>>;

  std::uint64_t search(std::size_t i, State& sets) {
    if (i == trace_.size()) return 0;
    State key = sets;
    for (auto& s : key) std::sort(s.begin(), s.end());
    auto memo = memo_.find({i, key});
    if (memo != memo_.end()) return memo->second;

    const auto& r = trace_.records[i];
    auto& s = sets[set_of(r, geom_)];
    const std::uint64_t b = block_of(r, geom_);
    std::uint64_t best = 0;
    if (std::find(s.begin(), s.end(), b) != s.end()) {
      best = 1 + search(i + 1, sets);
    } else if (s.size() < geom_.associativity) {
      s.push_back(b);
      best = search(i + 1, sets);
      s.pop_back();
    } else {
      for (std::size_t w = 0; w < s.size(); ++w) {
        const std::uint64_t old = s[w];
        s[w] = b;
        best = std::max(best, search(i + 1, sets));
        s[w] = old;
      }
      if (bypass_) best = std::max(best, search(i + 1, sets));
    }
    memo_[{i, key}] = best;
    return best;
  }

  const ehc::Trace& trace_;
  ehc::CacheGeometry geom_;
  bool bypass_;
  std::map<std::pair<std::size_t, State>, std::uint64_t> memo_;
};

inline std::uint64_t exhaustive_min_hits(const ehc::Trace& trace, const ehc::CacheGeometry& geom, bool bypass) {
  return ExhaustiveMin(trace, geom, bypass).best();
}

// Rank by sorting: position of the victim in the farthest-first order where
// equal next uses share the best position.
inline std::uint32_t sorted_rank(std::vector<std::uint64_t> candidates, std::uint64_t victim_next) {
  std::sort(candidates.begin(), candidates.end(), std::greater<>());
  return static_cast<std::uint32_t>(std::find(candidates.begin(), candidates.end(), victim_next) -
                                    candidates.begin());
}

// Mean of `values` rounded half up, by floating point.
inline std::uint32_t float_rounded_mean(const std::vector<std::uint32_t>& values) {
  double sum = 0;
  for (auto v : values) sum += v;
  return static_cast<std::uint32_t>(std::floor(sum / static_cast<double>(values.size()) + 0.5));
}

}  // namespace oracle
