#pragma once

#include <cstdint>
#include <memory>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ehc/belady_policies.hpp"
#include "ehc/cache.hpp"
#include "ehc/report.hpp"
#include "ehc/trace.hpp"

namespace ehc {

class UnknownPolicy : public std::invalid_argument {
 public:
  explicit UnknownPolicy(std::string_view name)
      : std::invalid_argument("unknown policy '" + std::string(name) + "'") {}
};

class ZeroInstructions : public std::domain_error {
 public:
  ZeroInstructions() : std::domain_error("MPKI needs a nonzero instruction count") {}
};

struct PolicyOptions {
  std::uint64_t seed = 42;
  HawkeyeOptions hawkeye;
};

/// lru, srrip, brrip, drrip, ship, hawkeye, ehc.
const std::vector<std::string>& policy_names();
bool is_belady_policy(std::string_view name);

std::unique_ptr<ReplacementPolicy> make_policy(std::string_view name, const CacheGeometry& geom,
                                               const PolicyOptions& options = {});

double mpki(const SimStats& stats, std::uint64_t instruction_count);
/// 1 - policy/baseline; 0 when the baseline has no misses.
double mpki_reduction(double policy_mpki, double baseline_mpki);
/// replacements_no_averse / replacements_total, or 0 without replacements.
double no_averse_fraction(const SimStats& stats);

struct RunOptions {
  CacheGeometry geom;
  PolicyOptions policy;
  bool record_events = false;
};

SimResult run_policy(const Trace& trace, std::string_view policy, const RunOptions& options);

/// One row per policy in input order, plus provenance metadata. Simulations
/// run concurrently; results do not depend on scheduling.
Report compare(const Trace& trace, std::span<const std::string> policies, const RunOptions& options);

Report run_report(const Trace& trace, std::string_view policy, const SimResult& result, const RunOptions& options);

enum class AnalysisKind { NoAverse, HitcountBlock, HitcountRegion, VictimQuality, MinGap };

AnalysisKind parse_analysis_kind(const std::string& name);

Report analyze(const Trace& trace, AnalysisKind kind, std::string_view policy, const RunOptions& options);

/// CSV dump of an event log, one replacement per line.
void write_events(std::ostream& out, const EventLog& events);

}  // namespace ehc
