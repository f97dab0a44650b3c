#include "ehc/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <future>

#include "ehc/baseline_policies.hpp"
#include "ehc/min_oracle.hpp"

namespace ehc {

const std::vector<std::string>& policy_names() {
  static const std::vector<std::string> names = {"lru", "srrip", "brrip", "drrip", "ship", "hawkeye", "ehc"};
  return names;
}

bool is_belady_policy(std::string_view name) { return name == "hawkeye" || name == "ehc"; }

std::unique_ptr<ReplacementPolicy> make_policy(std::string_view name, const CacheGeometry& geom,
                                               const PolicyOptions& options) {
  if (name == "lru") return std::make_unique<LruPolicy>();
  if (name == "srrip") return std::make_unique<RripPolicy>(RripPolicy::Mode::Srrip, options.seed);
  if (name == "brrip") return std::make_unique<RripPolicy>(RripPolicy::Mode::Brrip, options.seed);
  if (name == "drrip") return std::make_unique<RripPolicy>(RripPolicy::Mode::Drrip, options.seed);
  if (name == "ship") return std::make_unique<ShipPolicy>(geom);
  if (name == "hawkeye") return std::make_unique<HawkeyePolicy>(geom, options.hawkeye);
  if (name == "ehc") return std::make_unique<EhcPolicy>(geom, options.hawkeye);
  throw UnknownPolicy(name);
}

double mpki(const SimStats& stats, std::uint64_t instruction_count) {
  if (instruction_count == 0) throw ZeroInstructions();
  return static_cast<double>(stats.misses) * 1000.0 / static_cast<double>(instruction_count);
}

double mpki_reduction(double policy_mpki, double baseline_mpki) {
  if (baseline_mpki == 0.0) return 0.0;
  return 1.0 - policy_mpki / baseline_mpki;
}

double no_averse_fraction(const SimStats& stats) {
  if (stats.replacements_total == 0) return 0.0;
  return static_cast<double>(stats.replacements_no_averse) / static_cast<double>(stats.replacements_total);
}

SimResult run_policy(const Trace& trace, std::string_view policy, const RunOptions& options) {
  auto p = make_policy(policy, options.geom, options.policy);
  return simulate(trace, *p, options.geom, SimOptions{options.record_events});
}

namespace {

std::vector<std::pair<std::string, std::string>> provenance(const Trace& trace, const RunOptions& options) {
  return {{"seed", std::to_string(options.policy.seed)},
          {"sets", std::to_string(options.geom.num_sets)},
          {"ways", std::to_string(options.geom.associativity)},
          {"block_bits", std::to_string(options.geom.block_offset_bits)},
          {"records", std::to_string(trace.size())},
          {"instructions", std::to_string(trace.instruction_count)}};
}

double as_double(std::uint64_t v) { return static_cast<double>(v); }

}  // namespace

Report compare(const Trace& trace, std::span<const std::string> policies, const RunOptions& options) {
  options.geom.validate();
  for (const auto& name : policies)
    if (std::find(policy_names().begin(), policy_names().end(), name) == policy_names().end())
      throw UnknownPolicy(name);

  std::vector<std::string> jobs(policies.begin(), policies.end());
  const bool need_baseline = std::find(jobs.begin(), jobs.end(), "lru") == jobs.end();
  if (need_baseline) jobs.push_back("lru");

  struct Outcome {
    SimStats stats;
    double mean_rank = std::nan("");
  };
  std::vector<std::future<Outcome>> futures;
  futures.reserve(jobs.size());
  for (const auto& name : jobs) {
    futures.push_back(std::async(std::launch::async, [&trace, &options, name] {
      RunOptions ro = options;
      Outcome o;
      SimResult r = run_policy(trace, name, ro);
      if (options.record_events) o.mean_rank = victim_quality(r.events, trace, options.geom).mean_rank();
      o.stats = std::move(r.stats);
      return o;
    }));
  }
  std::vector<Outcome> outcomes;
  for (auto& f : futures) outcomes.push_back(f.get());

  const std::size_t lru_at = static_cast<std::size_t>(std::find(jobs.begin(), jobs.end(), "lru") - jobs.begin());
  const double lru_mpki = mpki(outcomes[lru_at].stats, trace.instruction_count);

  Report report;
  report.meta = provenance(trace, options);
  Table t;
  t.name = "compare";
  t.label_column = "policy";
  t.columns = {"hits", "misses", "mpki", "mpki_reduction_vs_lru", "no_averse_fraction", "vq_mean_rank"};
  for (std::size_t i = 0; i < policies.size(); ++i) {
    const SimStats& s = outcomes[i].stats;
    const double m = mpki(s, trace.instruction_count);
    t.add_row(policies[i], {as_double(s.hits), as_double(s.misses), m, mpki_reduction(m, lru_mpki),
                            is_belady_policy(policies[i]) ? no_averse_fraction(s) : std::nan(""),
                            outcomes[i].mean_rank});
  }
  report.tables.push_back(std::move(t));
  return report;
}

Report run_report(const Trace& trace, std::string_view policy, const SimResult& result, const RunOptions& options) {
  const SimStats& s = result.stats;
  Report report;
  report.meta = provenance(trace, options);
  report.meta.emplace_back("policy", std::string(policy));

  Table t;
  t.name = "run";
  t.label_column = "policy";
  t.columns = {"accesses", "hits", "misses", "evictions", "replacements_total", "replacements_no_averse",
               "mpki", "no_averse_fraction"};
  t.add_row(std::string(policy),
            {as_double(s.accesses), as_double(s.hits), as_double(s.misses), as_double(s.evictions),
             as_double(s.replacements_total), as_double(s.replacements_no_averse),
             mpki(s, trace.instruction_count), no_averse_fraction(s)});
  report.tables.push_back(std::move(t));

  Table c;
  c.name = "counters";
  c.label_column = "counter";
  c.columns = {"value"};
  for (const auto& [k, v] : s.per_policy) c.add_row(k, {as_double(v)});
  report.tables.push_back(std::move(c));
  return report;
}

AnalysisKind parse_analysis_kind(const std::string& name) {
  if (name == "no-averse") return AnalysisKind::NoAverse;
  if (name == "hitcount-block") return AnalysisKind::HitcountBlock;
  if (name == "hitcount-region") return AnalysisKind::HitcountRegion;
  if (name == "victim-quality") return AnalysisKind::VictimQuality;
  if (name == "min-gap") return AnalysisKind::MinGap;
  throw std::invalid_argument("unknown report '" + name + "'");
}

namespace {

Table histogram_table(const std::string& name, const ErrorHistogram& h) {
  static const char* kLabels[] = {"0", "1", "2", "3", ">=4"};
  Table t;
  t.name = name;
  t.label_column = "abs_error";
  t.columns = {"count", "fraction"};
  for (std::size_t b = 0; b < h.buckets.size(); ++b) t.add_row(kLabels[b], {as_double(h.buckets[b]), h.fraction(b)});
  return t;
}

}  // namespace

Report analyze(const Trace& trace, AnalysisKind kind, std::string_view policy, const RunOptions& options) {
  options.geom.validate();
  Report report;
  report.meta = provenance(trace, options);

  switch (kind) {
    case AnalysisKind::NoAverse: {
      report.meta.emplace_back("policy", std::string(policy));
      const SimResult r = run_policy(trace, policy, options);
      Table t;
      t.name = "no_averse";
      t.label_column = "policy";
      t.columns = {"replacements_total", "replacements_no_averse", "replacements_averse_present", "fraction"};
      const SimStats& s = r.stats;
      t.add_row(std::string(policy), {as_double(s.replacements_total), as_double(s.replacements_no_averse),
                                      as_double(s.replacements_total - s.replacements_no_averse),
                                      no_averse_fraction(s)});
      report.tables.push_back(std::move(t));
      break;
    }
    case AnalysisKind::HitcountBlock:
    case AnalysisKind::HitcountRegion: {
      const MinResult m = simulate_min(trace, options.geom, true);
      if (kind == AnalysisKind::HitcountBlock)
        report.tables.push_back(histogram_table("hitcount_block", per_block_prediction_error(m.residencies)));
      else
        report.tables.push_back(histogram_table("hitcount_region", per_region_prediction_error(m.residencies)));
      break;
    }
    case AnalysisKind::VictimQuality: {
      report.meta.emplace_back("policy", std::string(policy));
      RunOptions ro = options;
      ro.record_events = true;
      const SimResult r = run_policy(trace, policy, ro);
      const VictimQuality q = victim_quality(r.events, trace, options.geom);
      Table t;
      t.name = "victim_quality";
      t.label_column = "rank";
      t.columns = {"count", "fraction"};
      const double n = as_double(q.decisions());
      for (std::size_t rank = 0; rank < q.rank_histogram.size(); ++rank)
        t.add_row(std::to_string(rank),
                  {as_double(q.rank_histogram[rank]), n == 0 ? 0.0 : as_double(q.rank_histogram[rank]) / n});
      report.tables.push_back(std::move(t));
      Table s;
      s.name = "victim_quality_summary";
      s.label_column = "policy";
      s.columns = {"decisions", "mean_rank"};
      s.add_row(std::string(policy), {n, q.mean_rank()});
      report.tables.push_back(std::move(s));
      break;
    }
    case AnalysisKind::MinGap: {
      report.meta.emplace_back("policy", std::string(policy));
      const SimResult r = run_policy(trace, policy, options);
      const MinResult with_bypass = simulate_min(trace, options.geom, true);
      const MinResult without_bypass = simulate_min(trace, options.geom, false);
      Table t;
      t.name = "min_gap";
      t.label_column = "policy";
      t.columns = {"hits", "misses", "mpki", "hits_below_min"};
      auto row = [&](const std::string& label, const SimStats& s) {
        t.add_row(label, {as_double(s.hits), as_double(s.misses), mpki(s, trace.instruction_count),
                          as_double(with_bypass.stats.hits) - as_double(s.hits)});
      };
      row(std::string(policy), r.stats);
      row("min", with_bypass.stats);
      row("min_nobypass", without_bypass.stats);
      report.tables.push_back(std::move(t));
      break;
    }
  }
  return report;
}

void write_events(std::ostream& out, const EventLog& events) {
  out << "position,set,incoming_block,victim_way,no_averse,residents\n";
  for (const auto& e : events) {
    out << e.position << ',' << e.set << ',' << e.incoming_block << ','
        << (e.victim_way == VictimChoice::kBypass ? std::string("bypass") : std::to_string(e.victim_way)) << ','
        << (e.no_averse ? 1 : 0) << ',';
    for (std::size_t i = 0; i < e.residents.size(); ++i) out << (i ? " " : "") << e.residents[i];
    out << '\n';
  }
}

}  // namespace ehc
