// orgmap: AS-to-organization mapping pipeline driver.
//
//   orgmap run all        --config cfg.json --out out/
//   orgmap run infer      --config cfg.json --out out/ --force
//   orgmap ingest|harvest|filter|index|infer|cluster --config cfg.json --out out/
//   orgmap compare --ours out/families.jsonl --baseline base.jsonl --format ca2o
//   orgmap label-asn 8069 --config cfg.json
//
// Exit codes: 0 success, 2 configuration error, 3 stage-order violation,
// 4 completed with partially-inferred targets, 1 anything else.
#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "orgmap/compare.hpp"
#include "orgmap/pipeline.hpp"

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  bool force = false;
  bool verbose = false;
  // optional overrides; applied to the raw config so idempotence hashing
  // tracks the effective configuration
  int top_k = -1;
  long long min_interval_ms = -1;
  double jaccard = -1.0;
  std::string fixtures;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool needs_out = true) {
  cmd->add_option("--config", o.config_path, "pipeline config (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  auto* out = cmd->add_option("--out", o.out_dir, "output directory");
  if (needs_out) out->required();
  cmd->add_flag("--force", o.force, "re-run even when up to date");
  cmd->add_flag("-v,--verbose", o.verbose, "debug logging");
  cmd->add_option("--top-k", o.top_k, "search results per query");
  cmd->add_option("--min-interval-ms", o.min_interval_ms, "per-host politeness interval");
  cmd->add_option("--jaccard-threshold", o.jaccard, "name-similarity threshold");
  cmd->add_option("--offline-fixtures", o.fixtures, "fixture directory for offline harvest");
}

orgmap::PipelineConfig load_with_overrides(const CommonOpts& o) {
  orgmap::json raw;
  try {
    raw = orgmap::json::parse(orgmap::read_file(o.config_path));
  } catch (const orgmap::json::exception& e) {
    throw orgmap::ConfigError("cannot parse config " + o.config_path + ": " + e.what());
  }
  if (o.top_k >= 0) raw["harvest"]["top_k"] = o.top_k;
  if (o.min_interval_ms >= 0) raw["harvest"]["min_interval_ms"] = o.min_interval_ms;
  if (!o.fixtures.empty()) raw["harvest"]["fixture_dir"] = o.fixtures;
  if (o.jaccard >= 0.0) raw["cluster"]["jaccard_threshold"] = o.jaccard;
  orgmap::PipelineConfig cfg = orgmap::parse_pipeline_config(raw);
  orgmap::validate_config(cfg);
  return cfg;
}

int run_stages(const CommonOpts& o, std::vector<std::string> stages) {
  if (o.verbose) orgmap::log_threshold() = orgmap::LogLevel::debug;
  orgmap::Pipeline pipeline(load_with_overrides(o), o.out_dir, o.force);
  int rc = pipeline.run(std::move(stages));
  for (auto& [name, value] : pipeline.manifest().counters)
    std::printf("%s: %lld\n", name.c_str(), static_cast<long long>(value));
  if (!pipeline.compare_table().empty()) std::printf("%s", pipeline.compare_table().c_str());
  if (rc == 4) orgmap::log_warn("some targets are only partially inferred");
  return rc;
}

orgmap::GroupingDataset load_side(const std::string& path, const std::string& format,
                                  const std::string& name) {
  if (format == "ca2o") return orgmap::load_grouping_ca2o(path, name);
  if (format == "csv") return orgmap::load_grouping_csv(path, name);
  if (format == "families") return orgmap::load_grouping_families(path, name);
  throw orgmap::ConfigError("unknown dataset format '" + format + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"AS-to-organization mapping pipeline"};
  app.require_subcommand(1);

  CommonOpts opts;
  std::vector<std::string> run_stage_names;

  auto* run_cmd = app.add_subcommand("run", "run pipeline stages in order");
  run_cmd->add_option("stages", run_stage_names, "stage names or 'all'")->required();
  add_common(run_cmd, opts);

  for (auto& stage : orgmap::stage_order()) {
    if (stage == "compare") continue;  // compare has its own subcommand below
    add_common(app.add_subcommand(stage, "run the " + stage + " stage"), opts);
  }

  std::string ours_path, baseline_path, baseline_format = "ca2o", ours_format = "families";
  std::string report_out;
  auto* cmp = app.add_subcommand("compare", "compare two ASN groupings");
  cmp->add_option("--ours", ours_path, "our families.jsonl (standalone mode)");
  cmp->add_option("--ours-format", ours_format, "ours format: families|ca2o|csv");
  cmp->add_option("--baseline", baseline_path, "baseline dataset (standalone mode)");
  cmp->add_option("--format", baseline_format, "baseline format: ca2o|csv|families");
  cmp->add_option("--json-out", report_out, "also write the JSON report here");
  CommonOpts cmp_opts;
  cmp->add_option("--config", cmp_opts.config_path, "pipeline config (pipeline mode)")
      ->check(CLI::ExistingFile);
  cmp->add_option("--out", cmp_opts.out_dir, "output directory (pipeline mode)");
  cmp->add_flag("--force", cmp_opts.force, "re-run even when up to date");
  cmp->add_flag("-v,--verbose", cmp_opts.verbose, "debug logging");

  uint32_t asn_value = 0;
  auto* label = app.add_subcommand("label-asn", "print the record owning one ASN");
  label->add_option("asn", asn_value, "autonomous system number")->required();
  CommonOpts label_opts;
  label->add_option("--config", label_opts.config_path, "pipeline config (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  label->add_flag("-v,--verbose", label_opts.verbose, "debug logging");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) return run_stages(opts, run_stage_names);

    for (auto& stage : orgmap::stage_order()) {
      if (stage == "compare") continue;
      if (app.get_subcommand(stage)->parsed()) return run_stages(opts, {stage});
    }

    if (cmp->parsed()) {
      if (cmp_opts.verbose) orgmap::log_threshold() = orgmap::LogLevel::debug;
      if (!ours_path.empty() || !baseline_path.empty()) {
        if (ours_path.empty() || baseline_path.empty())
          throw orgmap::ConfigError("compare standalone mode needs both --ours and --baseline");
        auto rep = orgmap::compare_groupings(load_side(ours_path, ours_format, "ours"),
                                             load_side(baseline_path, baseline_format, "baseline"));
        if (!report_out.empty())
          orgmap::write_file_atomic(report_out, orgmap::to_json(rep).dump(2) + "\n");
        std::printf("%s", orgmap::render_compare_table(rep).c_str());
        return 0;
      }
      if (cmp_opts.config_path.empty() || cmp_opts.out_dir.empty())
        throw orgmap::ConfigError(
            "compare needs either --ours/--baseline or --config/--out");
      return run_stages(cmp_opts, {"compare"});
    }

    if (label->parsed()) {
      if (label_opts.verbose) orgmap::log_threshold() = orgmap::LogLevel::debug;
      orgmap::PipelineConfig cfg = load_with_overrides(label_opts);
      orgmap::IngestInputs in;
      for (auto& w : cfg.whois) {
        std::ifstream f(w.path);
        if (!f) throw orgmap::IngestError("cannot open whois dump " + w.path);
        in.whois.push_back(orgmap::parse_whois_dump(f, w.registry_id()));
      }
      if (!cfg.ca2o_path.empty()) in.ca2o = orgmap::load_ca2o(cfg.ca2o_path);
      if (!cfg.peeringdb_path.empty()) in.pdb = orgmap::load_peeringdb(cfg.peeringdb_path);
      orgmap::OrgRecord rec = orgmap::label_asn(asn_value, in);
      std::printf("%s\n", rec.to_json().dump(2).c_str());
      return 0;
    }
  } catch (const orgmap::ConfigError& e) {
    orgmap::log_error("%s", e.what());
    return 2;
  } catch (const orgmap::StageOrderError& e) {
    orgmap::log_error("%s", e.what());
    return 3;
  } catch (const std::exception& e) {
    orgmap::log_error("%s", e.what());
    return 1;
  }
  return 0;
}
