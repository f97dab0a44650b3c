#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <map>
#include <random>
#include <set>

#include "ehc/analysis.hpp"
#include "ehc/trace.hpp"
#include "oracles.hpp"

using namespace ehc;

namespace {

Trace three_records() {
  return Trace::from_records({{0, 0, 0x400000, 0x1000, AccessKind::Read},
                              {1, 0, 0x400004, 0x1040, AccessKind::Write},
                              {2, 0, 0x400008, 0x1000, AccessKind::Read}});
}

TraceError::Kind read_error(const std::vector<std::uint8_t>& bytes) {
  try {
    read_trace(bytes);
  } catch (const TraceError& e) {
    return e.kind();
  }
  FAIL("read_trace accepted malformed input");
  return TraceError::Kind::Io;
}

}  // namespace

TEST_CASE("empty trace encodes to a bare header") {
  const auto bytes = write_trace(Trace{});
  CHECK(bytes.size() == 21);
  CHECK(bytes[0] == 'E');
  CHECK(bytes[3] == 'T');
  CHECK(bytes[4] == 1);
  CHECK(read_trace(bytes).empty());
}

TEST_CASE("one record adds 26 bytes") {
  Trace t = Trace::from_records({{5, 0, 1, 2, AccessKind::Read}});
  CHECK(write_trace(t).size() == 21 + 26);
}

TEST_CASE("three-record round trip") {
  const Trace t = three_records();
  CHECK(t.instruction_count == 2);
  CHECK(read_trace(write_trace(t)) == t);
}

TEST_CASE("field layout is little-endian") {
  Trace t = Trace::from_records({{0x0102030405060708ull, 3, 0x11, 0x22, AccessKind::Write}});
  const auto b = write_trace(t);
  CHECK(b[21] == 0x08);
  CHECK(b[28] == 0x01);
  CHECK(b[29] == 0x11);
  CHECK(b[37] == 0x22);
  CHECK(b[45] == 3);
  CHECK(b[46] == 1);
  // instruction count sits right after the record count
  CHECK(b[13] == 0x08);
}

TEST_CASE("malformed inputs") {
  const auto good = write_trace(three_records());

  SUBCASE("declared count exceeds payload") {
    Trace ten;
    for (std::uint64_t i = 0; i < 10; ++i) ten.records.push_back({i, 0, 0, i * 64, AccessKind::Read});
    ten.instruction_count = 9;
    auto bytes = write_trace(ten);
    bytes.resize(bytes.size() - 26);
    CHECK(read_error(bytes) == TraceError::Kind::Truncated);
  }
  SUBCASE("bad magic") {
    auto bytes = good;
    bytes[0] = 'X';
    CHECK(read_error(bytes) == TraceError::Kind::BadMagic);
    CHECK(read_error({}) == TraceError::Kind::BadMagic);
  }
  SUBCASE("unknown version") {
    auto bytes = good;
    bytes[4] = 2;
    CHECK(read_error(bytes) == TraceError::Kind::UnsupportedVersion);
  }
  SUBCASE("short header") {
    std::vector<std::uint8_t> bytes(good.begin(), good.begin() + 12);
    CHECK(read_error(bytes) == TraceError::Kind::Truncated);
  }
  SUBCASE("invalid access kind") {
    auto bytes = good;
    bytes[21 + 25] = 7;
    CHECK(read_error(bytes) == TraceError::Kind::BadRecord);
  }
}

TEST_CASE("random traces round trip bit-exactly") {
  std::mt19937_64 rng(3);
  for (int n = 0; n < 50; ++n) {
    std::vector<AccessRecord> recs(rng() % 40);
    for (auto& r : recs) {
      r.seq = rng();
      r.core = static_cast<std::uint8_t>(rng());
      r.pc = rng();
      r.addr = rng();
      r.kind = rng() % 2 ? AccessKind::Write : AccessKind::Read;
    }
    Trace t;
    t.records = recs;
    t.instruction_count = rng();
    const auto bytes = write_trace(t);
    CHECK(read_trace(bytes) == t);
    CHECK(write_trace(read_trace(bytes)) == bytes);
  }
}

TEST_CASE("save and load through a file") {
  const auto path = std::filesystem::temp_directory_path() / "ehcsim_trace_test.ehct";
  save_trace(three_records(), path.string());
  CHECK(load_trace(path.string()) == three_records());
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_trace(path.string()), TraceError);
}

TEST_CASE("loop generator sweeps cyclically") {
  const Trace t = gen_synthetic({GeneratorKind::Loop, 3, 6, 1.0, 7});
  REQUIRE(t.size() == 6);
  const std::uint64_t expect[] = {0, 1, 2, 0, 1, 2};
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(t.records[i].addr / kBlockBytes == expect[i]);
    CHECK(t.records[i].seq == i);
    CHECK(t.records[i].kind == AccessKind::Read);
  }
}

TEST_CASE("stream generator never repeats a block") {
  const Trace t = gen_synthetic({GeneratorKind::Stream, 500, 500, 1.0, 1});
  for (std::size_t i = 1; i < t.size(); ++i) CHECK(t.records[i].addr > t.records[i - 1].addr);
  RunOptions o;
  o.geom = {16, 4, 6};
  for (const auto& p : policy_names()) {
    const SimResult r = run_policy(t, p, o);
    CHECK(r.stats.hits == 0);
    CHECK(r.stats.misses == 500);
  }
}

TEST_CASE("zipf top two frequencies follow the mass function") {
  const Trace t = gen_synthetic({GeneratorKind::Zipf, 1000, 100000, 1.0, 1});
  std::map<std::uint64_t, std::uint64_t> freq;
  for (const auto& r : t.records) ++freq[r.addr];
  std::vector<std::uint64_t> counts;
  for (const auto& [a, c] : freq) counts.push_back(c);
  std::sort(counts.rbegin(), counts.rend());
  // p(1)/p(2) = 2 for alpha = 1
  const double ratio = static_cast<double>(counts[0]) / static_cast<double>(counts[1]);
  CHECK(ratio == doctest::Approx(2.0).epsilon(0.2));
  // block 0 is the most popular one
  CHECK(freq[0] == counts[0]);
}

TEST_CASE("generators are deterministic per seed") {
  for (auto kind : {GeneratorKind::Stream, GeneratorKind::Loop, GeneratorKind::Zipf, GeneratorKind::RegionCorrelated,
                    GeneratorKind::Mixed}) {
    GeneratorSpec s{kind, 300, 5000, 0.8, 11};
    CHECK(write_trace(gen_synthetic(s)) == write_trace(gen_synthetic(s)));
    GeneratorSpec other = s;
    other.seed = 12;
    if (kind == GeneratorKind::Zipf || kind == GeneratorKind::RegionCorrelated)
      CHECK(write_trace(gen_synthetic(other)) != write_trace(gen_synthetic(s)));
  }
}

TEST_CASE("generator rejects empty specs") {
  CHECK_THROWS_AS(gen_synthetic({GeneratorKind::Loop, 0, 10, 1.0, 1}), TraceError);
  CHECK_THROWS_AS(gen_synthetic({GeneratorKind::Loop, 10, 0, 1.0, 1}), TraceError);
  CHECK_THROWS_AS(parse_generator_kind("bogus"), TraceError);
  CHECK(parse_generator_kind("region") == GeneratorKind::RegionCorrelated);
}

TEST_CASE("region generator keeps regions class-pure") {
  const Trace t = gen_synthetic({GeneratorKind::RegionCorrelated, 2048, 400000, 1.0, 5});
  // The touched-once class has its own PC pool; the reused classes share one.
  const std::uint64_t never_pc = 0x400100;
  std::map<std::uint64_t, std::uint64_t> touches;
  std::map<std::uint64_t, std::set<bool>> region_is_never;
  for (const auto& r : t.records) {
    const std::uint64_t block = r.addr / kBlockBytes;
    ++touches[block];
    region_is_never[block / kBlocksPerRegion].insert((r.pc & ~std::uint64_t{0x1f}) == never_pc);
  }
  std::map<std::uint64_t, std::uint64_t> region_max;
  for (const auto& [block, n] : touches) {
    CHECK(n <= 8);
    auto& m = region_max[block / kBlocksPerRegion];
    m = std::max(m, n);
  }
  int never_regions = 0, short_regions = 0, medium_regions = 0;
  for (const auto& [region, kinds] : region_is_never) {
    CHECK(kinds.size() == 1);
    if (*kinds.begin()) {
      ++never_regions;
      CHECK(region_max[region] == 1);
    } else {
      ++(region_max[region] > 3 ? short_regions : medium_regions);
    }
  }
  CHECK(never_regions > 0);
  CHECK(short_regions > 0);
  CHECK(medium_regions > 0);
}

TEST_CASE("mixed generator uses disjoint windows and distinct PCs per phase") {
  const Trace t = gen_synthetic({GeneratorKind::Mixed, 64, 4000, 1.0, 2});
  REQUIRE(t.size() == 4000);
  for (std::size_t p = 0; p < 4; ++p) {
    const auto& r = t.records[p * 1000];
    CHECK((r.addr >> 28) == p);
  }
  CHECK(t.records[0].pc != t.records[1000].pc);
  CHECK(t.instruction_count == 3999);
}

TEST_CASE("interleave single input") {
  Trace t = three_records();
  for (auto& r : t.records) r.core = 9;
  const Trace out = interleave(std::vector<Trace>{t});
  REQUIRE(out.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(out.records[i].core == 0);
    CHECK(out.records[i].addr == t.records[i].addr);
  }
}

TEST_CASE("interleave merges on seq and separates address spaces") {
  Trace a = Trace::from_records({{0, 0, 1, 0x40, AccessKind::Read}, {2, 0, 1, 0x40, AccessKind::Read}});
  Trace b = Trace::from_records({{1, 0, 2, 0x40, AccessKind::Read}, {3, 0, 2, 0x40, AccessKind::Read}});
  const Trace out = interleave(std::vector<Trace>{a, b});
  REQUIRE(out.size() == 4);
  for (std::uint64_t i = 0; i < 4; ++i) CHECK(out.records[i].seq == i);
  CHECK(out.records[0].addr == 0x40);
  CHECK(out.records[1].addr == 0x100000040ull);
  CHECK(out.records[1].core == 1);
  CHECK(out.instruction_count == 3);
  CacheGeometry g;
  CHECK(g.block_number(out.records[0].addr) != g.block_number(out.records[1].addr));
}

TEST_CASE("interleave preserves per-core order and count") {
  std::mt19937_64 rng(8);
  std::vector<Trace> inputs;
  for (int c = 0; c < 4; ++c) {
    std::vector<AccessRecord> recs;
    std::uint64_t seq = 0;
    for (int i = 0; i < 100; ++i) {
      seq += rng() % 3;
      recs.push_back({seq, 0, static_cast<std::uint64_t>(c), rng() % 4096, AccessKind::Read});
    }
    inputs.push_back(Trace::from_records(recs));
  }
  const Trace out = interleave(inputs);
  CHECK(out.size() == 400);
  std::vector<std::size_t> next(4, 0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto& r = out.records[i];
    const auto& src = inputs[r.core].records[next[r.core]++];
    CHECK(r.seq == src.seq);
    CHECK(r.addr == src.addr + (std::uint64_t{r.core} << 32));
    if (i > 0) CHECK(out.records[i - 1].seq <= r.seq);
  }
  for (const auto& r : out.records) CHECK(r.seq <= out.instruction_count);
}

TEST_CASE("interleave rejects more cores than the record can name") {
  std::vector<Trace> many(256, three_records());
  CHECK_THROWS_AS(interleave(many), TraceError);
}
