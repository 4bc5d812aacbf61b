#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "config.h"
#include "report.h"

namespace {

using namespace dramdse;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitCapacity = 3;

struct CommonOptions {
  std::string network_path;
  std::vector<std::string> dram_paths;
  std::vector<std::string> profile_paths;
  bool allow_unordered_profile = false;
  std::string format = "csv";
  std::string output_path;
  int workers = 0;
  std::string buffers = "65536,65536,65536";
};

void AddCommon(CLI::App* cmd, CommonOptions& opt) {
  cmd->add_option("--network", opt.network_path, "network description file")
      ->required();
  cmd->add_option("--dram", opt.dram_paths,
                  "geometry/architecture file (repeatable)")
      ->required();
  cmd->add_option("--profile", opt.profile_paths,
                  "cost profile file (repeatable)")
      ->required();
  cmd->add_flag("--allow-unordered-profile", opt.allow_unordered_profile,
                "skip the cost ordering sanity check");
  cmd->add_option("--format", opt.format, "csv, json or table")
      ->check(CLI::IsMember({"csv", "json", "table"}));
  cmd->add_option("-o,--output", opt.output_path,
                  "output file (default: stdout)");
  cmd->add_option("--workers", opt.workers,
                  "evaluation threads (default: DRAMDSE_WORKERS or all cores)");
  cmd->add_option("--buffers", opt.buffers,
                  "on-chip buffer bytes as ib,wb,ob");
}

std::vector<uint64_t> SplitUints(const std::string& s, size_t n,
                                 const std::string& what) {
  std::vector<uint64_t> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      out.push_back(std::stoull(tok));
    } catch (const std::exception&) {
      throw ConfigError(what + ": expected integers, got '" + s + "'");
    }
  }
  if (out.size() != n) {
    throw ConfigError(what + ": expected " + std::to_string(n) +
                      " comma-separated values, got '" + s + "'");
  }
  return out;
}

BufferConfig ParseBuffers(const std::string& s) {
  const auto v = SplitUints(s, 3, "--buffers");
  return BufferConfig{v[0], v[1], v[2]};
}

ScheduleScheme ParseSchedule(const std::string& name) {
  std::string n;
  for (char c : name) n.push_back(char(std::tolower(c)));
  if (n == "ifms" || n == "ifms-reuse") return ScheduleScheme::kIfmsReuse;
  if (n == "wghs" || n == "wghs-reuse") return ScheduleScheme::kWghsReuse;
  if (n == "ofms" || n == "ofms-reuse") return ScheduleScheme::kOfmsReuse;
  if (n == "adaptive" || n == "adaptive-reuse")
    return ScheduleScheme::kAdaptiveReuse;
  throw ConfigError("unknown schedule '" + name +
                    "' (ifms, wghs, ofms, adaptive)");
}

std::vector<ScheduleScheme> ParseSchedules(
    const std::vector<std::string>& names) {
  std::vector<ScheduleScheme> out;
  for (const std::string& name : names) {
    if (name == "all") {
      out.insert(out.end(), {ScheduleScheme::kIfmsReuse,
                             ScheduleScheme::kWghsReuse,
                             ScheduleScheme::kOfmsReuse,
                             ScheduleScheme::kAdaptiveReuse});
    } else {
      out.push_back(ParseSchedule(name));
    }
  }
  return out;
}

std::vector<MappingPolicy> ParsePolicies(const std::string& s) {
  std::vector<MappingPolicy> out;
  if (s == "all") {
    const auto& all = MappingPolicy::AllPresets();
    return {all.begin(), all.end()};
  }
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    out.push_back(MappingPolicy::Preset(int(std::stoll(tok))));
  }
  if (out.empty()) throw ConfigError("--policies: empty selection");
  return out;
}

PartitionGranularity ParseGranularity(const std::string& s) {
  if (s == "divisors") return PartitionGranularity::kDivisors;
  if (s == "pow2") return PartitionGranularity::kPow2Divisors;
  throw ConfigError("unknown granularity '" + s + "' (divisors, pow2)");
}

int EffectiveWorkers(int flag_value) {
  if (flag_value > 0) return flag_value;
  if (const char* env = std::getenv("DRAMDSE_WORKERS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 0;  // engine default: hardware concurrency
}

struct LoadedConfig {
  std::vector<LayerShape> network;
  std::vector<ArchConfig> archs;
};

LoadedConfig LoadAll(const CommonOptions& opt) {
  LoadedConfig loaded;
  loaded.network = LoadNetwork(opt.network_path);
  std::vector<GeometryConfig> geometries;
  for (const std::string& path : opt.dram_paths) {
    geometries.push_back(LoadGeometry(path));
  }
  std::vector<CostProfile> profiles;
  for (const std::string& path : opt.profile_paths) {
    profiles.push_back(LoadProfile(path, opt.allow_unordered_profile));
  }
  loaded.archs = BuildArchConfigs(geometries, profiles);
  return loaded;
}

ReportFormat FormatOf(const std::string& name) {
  if (name == "json") return ReportFormat::kJson;
  if (name == "table") return ReportFormat::kTable;
  return ReportFormat::kCsv;
}

void Emit(const Report& report, const CommonOptions& opt) {
  if (opt.output_path.empty()) {
    Write(report, FormatOf(opt.format), std::cout);
    return;
  }
  std::ofstream out(opt.output_path);
  if (!out) throw ConfigError("cannot write output: " + opt.output_path);
  Write(report, FormatOf(opt.format), out);
}

int RunEvaluate(const CommonOptions& opt, const std::string& tiling_arg,
                const std::string& schedule_arg, int mapping_id) {
  const LoadedConfig loaded = LoadAll(opt);
  const auto t = SplitUints(tiling_arg, 4, "--tiling");
  const ScheduleScheme schedule = ParseSchedule(schedule_arg);
  const MappingPolicy mapping = MappingPolicy::Preset(mapping_id);
  const BufferConfig buffers = ParseBuffers(opt.buffers);

  std::vector<EvaluateRecord> records;
  for (const ArchConfig& arch : loaded.archs) {
    for (const LayerShape& layer : loaded.network) {
      TilingConfig tiling{int(std::min<uint64_t>(t[0], layer.m_out)),
                          int(std::min<uint64_t>(t[1], layer.c_in)),
                          int(std::min<uint64_t>(t[2], layer.h_out)),
                          int(std::min<uint64_t>(t[3], layer.w_out))};
      const TileSizes sizes = TileByteSizes(layer, tiling);
      if (!TilingFits(layer, tiling, buffers)) {
        std::ostringstream msg;
        msg << "layer '" << layer.name << "': tiling " << tiling.t_m << ","
            << tiling.t_c << "," << tiling.t_h << "," << tiling.t_w
            << " overflows";
        if (sizes.ifm_bytes > buffers.ib_bytes)
          msg << " iB (" << sizes.ifm_bytes << " > " << buffers.ib_bytes
              << "B)";
        if (sizes.wgh_bytes > buffers.wb_bytes)
          msg << " wB (" << sizes.wgh_bytes << " > " << buffers.wb_bytes
              << "B)";
        if (sizes.ofm_bytes > buffers.ob_bytes)
          msg << " oB (" << sizes.ofm_bytes << " > " << buffers.ob_bytes
              << "B)";
        throw EmptyPartitionSpace(msg.str());
      }
      ScheduleScheme concrete = schedule;
      if (concrete == ScheduleScheme::kAdaptiveReuse) {
        concrete = SelectAdaptiveSchedule(
            layer, tiling, arch.geometry.effective_access_unit_bytes());
      }
      const PointEval eval =
          EvaluatePoint(layer, tiling, concrete, mapping, arch);
      records.push_back(EvaluateRecord{layer.name,
                                       ToString(arch.variant.kind), mapping.id,
                                       concrete, tiling, eval.counts,
                                       eval.edp});
    }
  }
  Emit(EvaluateReport(records), opt);
  return kExitOk;
}

int RunExplore(const CommonOptions& opt,
               const std::vector<std::string>& schedule_args,
               const std::string& policies_arg,
               const std::string& granularity_arg, bool keep_full_sweep,
               bool skip_infeasible) {
  const LoadedConfig loaded = LoadAll(opt);
  ExploreOptions options;
  options.buffers = ParseBuffers(opt.buffers);
  options.granularity = ParseGranularity(granularity_arg);
  options.schedules = ParseSchedules(schedule_args);
  options.policies = ParsePolicies(policies_arg);
  options.keep_full_sweep = keep_full_sweep;
  options.skip_infeasible_layers = skip_infeasible;
  options.workers = EffectiveWorkers(opt.workers);

  const DseResult result = Explore(loaded.network, loaded.archs, options);
  for (int l : result.skipped_layers) {
    std::cerr << "warning: layer '" << loaded.network[l].name
              << "' skipped (no feasible partition)\n";
  }
  if (keep_full_sweep) {
    Emit(ExploreSweepReport(result, loaded.network, loaded.archs), opt);
  } else {
    Emit(ExploreWinnersReport(result, loaded.network, loaded.archs), opt);
  }
  return kExitOk;
}

int RunCompare(const CommonOptions& opt, const std::string& schedule_arg,
               const std::string& policies_arg,
               const std::string& granularity_arg, bool skip_infeasible) {
  const LoadedConfig loaded = LoadAll(opt);
  ExploreOptions options;
  options.buffers = ParseBuffers(opt.buffers);
  options.granularity = ParseGranularity(granularity_arg);
  options.policies = ParsePolicies(policies_arg);
  options.skip_infeasible_layers = skip_infeasible;
  options.workers = EffectiveWorkers(opt.workers);

  const std::vector<CompareCell> cells = ComparePolicies(
      loaded.network, loaded.archs, ParseSchedule(schedule_arg), options);
  Emit(CompareReport(cells, loaded.network, loaded.archs), opt);
  return kExitOk;
}

int RunProfilesValidate(const std::vector<std::string>& paths,
                        bool allow_unordered) {
  for (const std::string& path : paths) {
    const CostProfile profile = LoadProfile(path, allow_unordered);
    std::cout << path << ": ok (" << ToString(profile.arch) << ")\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trace-driven DRAM access-cost explorer for tiled CNN "
               "workloads"};
  app.require_subcommand(1);

  CommonOptions eval_opt;
  std::string eval_tiling = "1,1,1,1";
  std::string eval_schedule = "ifms";
  int eval_mapping = 3;
  CLI::App* evaluate =
      app.add_subcommand("evaluate", "cost one design point per layer");
  AddCommon(evaluate, eval_opt);
  evaluate->add_option("--tiling", eval_tiling,
                       "tile steps t_m,t_c,t_h,t_w (clamped per layer)");
  evaluate->add_option("--schedule", eval_schedule,
                       "ifms, wghs, ofms or adaptive");
  evaluate->add_option("--mapping", eval_mapping, "mapping policy preset 1..6")
      ->check(CLI::Range(1, 6));

  CommonOptions explore_opt;
  std::vector<std::string> explore_schedules = {"all"};
  std::string explore_policies = "all";
  std::string explore_granularity = "divisors";
  bool explore_keep_sweep = false;
  bool explore_skip_infeasible = false;
  CLI::App* explore = app.add_subcommand(
      "explore", "exhaustive partition x schedule x mapping search");
  AddCommon(explore, explore_opt);
  explore->add_option("--schedules", explore_schedules,
                      "schedules to sweep (ifms wghs ofms adaptive all)");
  explore->add_option("--policies", explore_policies,
                      "mapping presets, e.g. 1,3,5 or all");
  explore->add_option("--granularity", explore_granularity,
                      "partition lattice: divisors or pow2");
  explore->add_flag("--keep-full-sweep", explore_keep_sweep,
                    "emit every evaluated point instead of winners");
  explore->add_flag("--skip-infeasible-layers", explore_skip_infeasible,
                    "skip layers with no feasible partition");

  CommonOptions compare_opt;
  std::string compare_schedule = "adaptive";
  std::string compare_policies = "all";
  std::string compare_granularity = "divisors";
  bool compare_skip = false;
  CLI::App* compare = app.add_subcommand(
      "compare", "per-layer EDP of each mapping policy (plot-ready)");
  AddCommon(compare, compare_opt);
  compare->add_option("--schedule", compare_schedule,
                      "ifms, wghs, ofms or adaptive");
  compare->add_option("--policies", compare_policies,
                      "mapping presets, e.g. 1,3,5 or all");
  compare->add_option("--granularity", compare_granularity,
                      "partition lattice: divisors or pow2");
  compare->add_flag("--skip-infeasible-layers", compare_skip,
                    "skip layers with no feasible partition");

  CLI::App* profiles = app.add_subcommand("profiles", "profile utilities");
  profiles->require_subcommand(1);
  std::vector<std::string> validate_paths;
  bool validate_allow_unordered = false;
  CLI::App* validate =
      profiles->add_subcommand("validate", "check cost profile files");
  validate->add_option("files", validate_paths, "profile files")->required();
  validate->add_flag("--allow-unordered-profile", validate_allow_unordered,
                     "skip the cost ordering sanity check");

  CLI11_PARSE(app, argc, argv);

  try {
    if (evaluate->parsed()) {
      return RunEvaluate(eval_opt, eval_tiling, eval_schedule, eval_mapping);
    }
    if (explore->parsed()) {
      return RunExplore(explore_opt, explore_schedules, explore_policies,
                        explore_granularity, explore_keep_sweep,
                        explore_skip_infeasible);
    }
    if (compare->parsed()) {
      return RunCompare(compare_opt, compare_schedule, compare_policies,
                        compare_granularity, compare_skip);
    }
    if (validate->parsed()) {
      return RunProfilesValidate(validate_paths, validate_allow_unordered);
    }
  } catch (const EmptyPartitionSpace& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const CapacityExceeded& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitCapacity;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
