#include "ehc/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <optional>

#include "ehc/analysis.hpp"
#include "ehc/trace.hpp"

namespace ehc {

namespace {

struct GeometryFlags {
  std::uint32_t sets = 2048;
  std::uint32_t ways = 16;
  std::uint32_t block_bits = 6;
  std::uint64_t seed = 42;

  void attach(CLI::App* cmd) {
    cmd->add_option("--sets", sets, "number of sets (power of two)")->capture_default_str();
    cmd->add_option("--ways", ways, "associativity")->capture_default_str();
    cmd->add_option("--block-bits", block_bits, "log2 of the block size")->capture_default_str();
    cmd->add_option("--seed", seed, "seed for randomized policies")->capture_default_str();
  }

  RunOptions options() const {
    RunOptions o;
    o.geom = CacheGeometry{sets, ways, block_bits};
    o.geom.validate();
    o.policy.seed = seed;
    return o;
  }
};

void write_text(const std::string& path, const std::string& text, std::ostream& out) {
  if (path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw TraceError(TraceError::Kind::Io, "cannot open " + path + " for writing");
  f << text;
  if (!f) throw TraceError(TraceError::Kind::Io, "write failed: " + path);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Trace-driven LLC replacement simulator", "ehcsim"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "generate a synthetic trace");
  std::string gen_kind;
  GeneratorSpec spec;
  std::string gen_out;
  gen->add_option("--kind", gen_kind, "stream|loop|zipf|region|mixed")
      ->required()
      ->check(CLI::IsMember({"stream", "loop", "zipf", "region", "mixed"}));
  gen->add_option("--blocks", spec.block_count)->required();
  gen->add_option("--length", spec.length)->required();
  gen->add_option("--alpha", spec.alpha)->capture_default_str();
  gen->add_option("--seed", spec.seed)->required();
  gen->add_option("-o", gen_out, "output trace")->required();

  // run
  auto* run = app.add_subcommand("run", "simulate one policy");
  std::string trace_path, policy = "hawkeye", csv_path, events_path;
  std::optional<std::uint32_t> fixed_init;
  bool no_aging = false;
  GeometryFlags run_geom;
  run->add_option("--trace", trace_path)->required();
  run->add_option("--policy", policy)->required();
  run_geom.attach(run);
  run->add_option("--events", events_path, "write the replacement event log");
  run->add_option("--ehc-fixed-init", fixed_init, "constant initial expected-further-hits")
      ->check(CLI::Range(0, 7));
  run->add_flag("--no-aging", no_aging, "disable friendly-block aging");
  run->add_option("--csv", csv_path)->required();

  // compare
  auto* cmp = app.add_subcommand("compare", "simulate several policies");
  std::string policy_list;
  bool cmp_vq = false;
  GeometryFlags cmp_geom;
  cmp->add_option("--trace", trace_path)->required();
  cmp->add_option("--policies", policy_list, "comma separated")->required();
  cmp_geom.attach(cmp);
  cmp->add_option("--ehc-fixed-init", fixed_init)->check(CLI::Range(0, 7));
  cmp->add_flag("--no-aging", no_aging);
  cmp->add_flag("--victim-quality", cmp_vq, "also rank every victim against MIN");
  cmp->add_option("--csv", csv_path)->required();

  // analyze
  auto* ana = app.add_subcommand("analyze", "run one analysis report");
  std::string report_name;
  std::string ana_policy = "hawkeye";
  GeometryFlags ana_geom;
  ana->add_option("--trace", trace_path)->required();
  ana->add_option("--report", report_name)
      ->required()
      ->check(CLI::IsMember({"no-averse", "hitcount-block", "hitcount-region", "victim-quality", "min-gap"}));
  ana->add_option("--policy", ana_policy)->capture_default_str();
  ana_geom.attach(ana);
  ana->add_option("--ehc-fixed-init", fixed_init)->check(CLI::Range(0, 7));
  ana->add_flag("--no-aging", no_aging);
  ana->add_option("--csv", csv_path)->required();

  // interleave
  auto* ilv = app.add_subcommand("interleave", "merge traces into one multi-core trace");
  std::string ilv_out;
  std::vector<std::string> ilv_inputs;
  ilv->add_option("-o", ilv_out)->required();
  ilv->add_option("inputs", ilv_inputs)->required();

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  auto with_belady_options = [&](RunOptions o) {
    if (fixed_init) o.policy.hawkeye.ehc_fixed_init = static_cast<std::uint8_t>(*fixed_init);
    o.policy.hawkeye.aging = !no_aging;
    return o;
  };

  try {
    if (*gen) {
      spec.kind = parse_generator_kind(gen_kind);
      save_trace(gen_synthetic(spec), gen_out);
    } else if (*run) {
      RunOptions o = with_belady_options(run_geom.options());
      o.record_events = !events_path.empty();
      make_policy(policy, o.geom, o.policy);
      const Trace trace = load_trace(trace_path);
      const SimResult r = run_policy(trace, policy, o);
      if (r.events) {
        std::ofstream ev(events_path, std::ios::binary);
        if (!ev) throw TraceError(TraceError::Kind::Io, "cannot open " + events_path + " for writing");
        write_events(ev, *r.events);
      }
      write_text(csv_path, run_report(trace, policy, r, o).to_csv(), out);
    } else if (*cmp) {
      RunOptions o = with_belady_options(cmp_geom.options());
      o.record_events = cmp_vq;
      const auto names = split_list(policy_list);
      if (names.empty()) throw UnknownPolicy("");
      for (const auto& n : names) make_policy(n, o.geom, o.policy);
      const Trace trace = load_trace(trace_path);
      write_text(csv_path, compare(trace, names, o).to_csv(), out);
    } else if (*ana) {
      RunOptions o = with_belady_options(ana_geom.options());
      make_policy(ana_policy, o.geom, o.policy);
      const Trace trace = load_trace(trace_path);
      write_text(csv_path, analyze(trace, parse_analysis_kind(report_name), ana_policy, o).to_csv(), out);
    } else if (*ilv) {
      std::vector<Trace> traces;
      for (const auto& p : ilv_inputs) traces.push_back(load_trace(p));
      save_trace(interleave(traces), ilv_out);
    }
  } catch (const UnknownPolicy& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const TraceError& e) {
    err << "error: " << e.what() << '\n';
    return e.kind() == TraceError::Kind::InvalidSpec ? kExitUsage : kExitData;
  } catch (const ZeroInstructions& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::logic_error& e) {
    // invalid_argument from geometry validation is a usage problem; anything
    // else derived from logic_error is a broken internal invariant.
    if (dynamic_cast<const std::invalid_argument*>(&e)) {
      err << "error: " << e.what() << '\n';
      return kExitUsage;
    }
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitOk;
}

}  // namespace ehc
