// Pipeline orchestration: a JSON config drives seven ordered stages
//   ingest -> harvest -> filter -> index -> infer -> cluster -> compare
// over one output directory. Every stage records its config hash in
// run_manifest.json; re-running with an unchanged config is a no-op that
// rewrites nothing, so repeated runs leave byte-identical outputs. --force
// re-runs a stage and invalidates everything downstream of it.
#pragma once

#include <csignal>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include "orgmap/chunk.hpp"
#include "orgmap/chunk_index.hpp"
#include "orgmap/compare.hpp"
#include "orgmap/corpus_filter.hpp"
#include "orgmap/entity_extract.hpp"
#include "orgmap/family_builder.hpp"
#include "orgmap/harvest.hpp"
#include "orgmap/http_adapters.hpp"
#include "orgmap/inference.hpp"
#include "orgmap/jsonl.hpp"
#include "orgmap/llm_backend.hpp"
#include "orgmap/registry_ingest.hpp"

namespace orgmap {

inline const std::vector<std::string>& stage_order() {
  static const std::vector<std::string> order = {"ingest", "harvest", "filter",  "index",
                                                 "infer",  "cluster", "compare"};
  return order;
}

struct WhoisInput {
  std::string path;
  std::string registry;  // validated and parsed at ingest time

  RegistryId registry_id() const { return RegistryId::parse(registry); }
};

struct PipelineConfig {
  // inputs
  std::vector<WhoisInput> whois;
  std::string ca2o_path;
  std::string peeringdb_path;
  std::string baseline_path;
  std::string baseline_format = "ca2o";  // ca2o | csv | families

  // harvest
  int top_k = 5;
  PolitenessPolicy politeness;
  std::vector<std::string> query_templates;  // empty -> built-in defaults
  std::string fixture_dir;                   // offline mode when non-empty
  HttpSearchConfig search;                   // online mode otherwise

  // filter
  ChunkParams chunk;
  std::vector<std::string> extractor_plugin;  // argv; empty -> dictionary matcher

  // inference
  std::string backend = "mock";  // mock | http
  std::string mock_script;
  HttpBackendConfig llm;
  InferOptions infer;
  std::vector<std::string> ranker_plugin;  // argv; empty -> positional order

  // clustering
  double jaccard_threshold = 0.5;
  bool custom_stop_tokens = false;
  std::set<std::string> stop_tokens;

  json raw;  // parsed config document; hashed for idempotence

  Normalizer normalizer() const {
    return custom_stop_tokens ? Normalizer(stop_tokens) : Normalizer();
  }
  std::string config_hash() const { return hex64(fnv1a64(raw.dump())); }
};

inline PipelineConfig parse_pipeline_config(const json& j) {
  if (!j.is_object()) throw ConfigError("config root must be a JSON object");
  PipelineConfig cfg;
  cfg.raw = j;
  for (auto& w : j.value("whois", json::array())) {
    WhoisInput in;
    in.path = w.value("path", "");
    in.registry = w.value("registry", "");
    cfg.whois.push_back(std::move(in));
  }
  cfg.ca2o_path = j.value("ca2o", "");
  cfg.peeringdb_path = j.value("peeringdb", "");
  if (j.contains("baseline")) {
    cfg.baseline_path = j.at("baseline").value("path", "");
    cfg.baseline_format = j.at("baseline").value("format", "ca2o");
  }
  if (j.contains("harvest")) {
    const json& h = j.at("harvest");
    cfg.top_k = h.value("top_k", cfg.top_k);
    cfg.politeness.per_host_min_interval_ms =
        h.value("min_interval_ms", cfg.politeness.per_host_min_interval_ms);
    cfg.politeness.max_concurrent_hosts =
        h.value("max_concurrent_hosts", cfg.politeness.max_concurrent_hosts);
    cfg.politeness.user_agent = h.value("user_agent", cfg.politeness.user_agent);
    cfg.politeness.obey_robots = h.value("obey_robots", cfg.politeness.obey_robots);
    for (auto& t : h.value("query_templates", json::array()))
      cfg.query_templates.push_back(t.get<std::string>());
    cfg.fixture_dir = h.value("fixture_dir", "");
    if (h.contains("search")) {
      const json& s = h.at("search");
      cfg.search.endpoint_template = s.value("endpoint", "");
      cfg.search.auth_env = s.value("auth_env", "");
      cfg.search.results_pointer = s.value("results_pointer", cfg.search.results_pointer);
      cfg.search.url_field = s.value("url_field", cfg.search.url_field);
    }
  }
  if (j.contains("filter")) {
    const json& f = j.at("filter");
    cfg.chunk.max_chunk_chars = f.value("max_chunk_chars", cfg.chunk.max_chunk_chars);
    cfg.chunk.overlap_chars = f.value("overlap_chars", cfg.chunk.overlap_chars);
    for (auto& a : f.value("extractor_plugin", json::array()))
      cfg.extractor_plugin.push_back(a.get<std::string>());
  }
  if (j.contains("inference")) {
    const json& i = j.at("inference");
    cfg.backend = i.value("backend", cfg.backend);
    cfg.mock_script = i.value("mock_script", "");
    cfg.infer.context_chunks = i.value("context_chunks", cfg.infer.context_chunks);
    cfg.infer.max_retries = i.value("max_retries", cfg.infer.max_retries);
    for (auto& a : i.value("ranker_plugin", json::array()))
      cfg.ranker_plugin.push_back(a.get<std::string>());
    if (i.contains("http")) {
      const json& h = i.at("http");
      cfg.llm.endpoint = h.value("endpoint", "");
      cfg.llm.auth_env = h.value("auth_env", "");
      cfg.llm.model = h.value("model", "");
      cfg.llm.temperature = h.value("temperature", 0.0);
      cfg.llm.text_pointer = h.value("text_pointer", cfg.llm.text_pointer);
      cfg.llm.min_request_interval_ms = h.value("min_interval_ms", int64_t{0});
    }
  }
  if (j.contains("cluster")) {
    const json& c = j.at("cluster");
    cfg.jaccard_threshold = c.value("jaccard_threshold", cfg.jaccard_threshold);
    if (c.contains("stop_tokens")) {
      cfg.custom_stop_tokens = true;
      for (auto& t : c.at("stop_tokens")) cfg.stop_tokens.insert(t.get<std::string>());
    }
  }
  return cfg;
}

// Collects every violation before failing, so one round of fixes suffices.
inline void validate_config(const PipelineConfig& cfg) {
  std::vector<std::string> problems;
  auto file_exists = [](const std::string& p) {
    std::error_code ec;
    return std::filesystem::is_regular_file(p, ec);
  };

  if (cfg.whois.empty() && cfg.ca2o_path.empty() && cfg.peeringdb_path.empty())
    problems.push_back("no inputs: provide at least one of whois/ca2o/peeringdb");
  for (size_t i = 0; i < cfg.whois.size(); ++i) {
    const auto& w = cfg.whois[i];
    std::string where = "whois[" + std::to_string(i) + "]";
    if (w.path.empty())
      problems.push_back(where + ": missing path");
    else if (!file_exists(w.path))
      problems.push_back(where + ": file not found: " + w.path);
    try {
      (void)RegistryId::parse(w.registry);
    } catch (const ConfigError&) {
      problems.push_back(where + ": unknown registry '" + w.registry + "'");
    }
  }
  if (!cfg.ca2o_path.empty() && !file_exists(cfg.ca2o_path))
    problems.push_back("ca2o: file not found: " + cfg.ca2o_path);
  if (!cfg.peeringdb_path.empty() && !file_exists(cfg.peeringdb_path))
    problems.push_back("peeringdb: file not found: " + cfg.peeringdb_path);
  if (!cfg.baseline_path.empty() && !file_exists(cfg.baseline_path))
    problems.push_back("baseline: file not found: " + cfg.baseline_path);
  if (cfg.baseline_format != "ca2o" && cfg.baseline_format != "csv" &&
      cfg.baseline_format != "families")
    problems.push_back("baseline.format must be ca2o, csv, or families");

  if (cfg.top_k < 1) problems.push_back("harvest.top_k must be >= 1");
  if (cfg.politeness.per_host_min_interval_ms < 0)
    problems.push_back("harvest.min_interval_ms must be >= 0");
  if (cfg.politeness.max_concurrent_hosts < 1)
    problems.push_back("harvest.max_concurrent_hosts must be >= 1");
  if (!cfg.fixture_dir.empty()) {
    std::error_code ec;
    if (!std::filesystem::is_directory(cfg.fixture_dir, ec))
      problems.push_back("harvest.fixture_dir not found: " + cfg.fixture_dir);
  }
  for (auto& t : cfg.query_templates)
    if (t.find("{name}") == std::string::npos)
      problems.push_back("harvest.query_templates: template lacks {name}: '" + t + "'");

  if (cfg.chunk.max_chunk_chars == 0)
    problems.push_back("filter.max_chunk_chars must be > 0");
  else if (cfg.chunk.overlap_chars * 2 >= cfg.chunk.max_chunk_chars)
    problems.push_back("filter.overlap_chars must be < max_chunk_chars/2");

  if (cfg.backend != "mock" && cfg.backend != "http")
    problems.push_back("inference.backend must be mock or http");
  if (cfg.backend == "mock") {
    if (cfg.mock_script.empty())
      problems.push_back("inference.mock_script required for the mock backend");
    else if (!file_exists(cfg.mock_script))
      problems.push_back("inference.mock_script: file not found: " + cfg.mock_script);
  }
  if (cfg.backend == "http" && cfg.llm.endpoint.empty())
    problems.push_back("inference.http.endpoint required for the http backend");
  if (cfg.infer.context_chunks < 1)
    problems.push_back("inference.context_chunks must be >= 1");

  if (!(cfg.jaccard_threshold > 0.0 && cfg.jaccard_threshold <= 1.0))
    problems.push_back("cluster.jaccard_threshold must be in (0, 1]");

  if (!problems.empty()) {
    std::string msg = "invalid config:";
    for (auto& p : problems) msg += "\n  - " + p;
    throw ConfigError(msg);
  }
}

inline PipelineConfig load_pipeline_config(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw ConfigError("cannot parse config " + path.string() + ": " + e.what());
  }
  PipelineConfig cfg = parse_pipeline_config(j);
  validate_config(cfg);
  return cfg;
}

struct StageState {
  bool done = false;
  std::string config_hash;
};

struct RunManifest {
  std::string run_id;
  std::string config_hash;
  bool partial = false;
  std::map<std::string, StageState> stages;
  std::map<std::string, int64_t> counters;

  json to_json() const {
    json j;
    j["run_id"] = run_id;
    j["config_hash"] = config_hash;
    j["partial"] = partial;
    json st = json::object();
    for (auto& [name, s] : stages)
      st[name] = json{{"done", s.done}, {"config_hash", s.config_hash}};
    j["stages"] = st;
    j["counters"] = counters;
    return j;
  }

  static RunManifest from_json(const json& j) {
    RunManifest m;
    m.run_id = j.value("run_id", "");
    m.config_hash = j.value("config_hash", "");
    m.partial = j.value("partial", false);
    if (j.contains("stages"))
      for (auto& [name, s] : j.at("stages").items())
        m.stages[name] = StageState{s.value("done", false), s.value("config_hash", "")};
    if (j.contains("counters"))
      for (auto& [name, v] : j.at("counters").items())
        m.counters[name] = v.get<int64_t>();
    return m;
  }
};

// Advisory per-directory lock holding the owner pid; stale locks (dead pid)
// are taken over.
class RunLock {
 public:
  explicit RunLock(const std::filesystem::path& dir) : path_(dir / ".orgmap.lock") {
    for (int attempt = 0; attempt < 2; ++attempt) {
      int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
      if (fd >= 0) {
        std::string pid = std::to_string(::getpid()) + "\n";
        (void)!::write(fd, pid.data(), pid.size());
        ::close(fd);
        held_ = true;
        return;
      }
      // lock exists: stale if its pid is gone
      pid_t owner = 0;
      try {
        owner = static_cast<pid_t>(std::stol(trim(read_file(path_))));
      } catch (...) {
      }
      if (owner > 0 && owner != ::getpid() && ::kill(owner, 0) == 0)
        throw ConfigError("output directory is locked by running pid " + std::to_string(owner) +
                          " (" + path_.string() + ")");
      log_warn("removing stale lock %s (pid %d)", path_.c_str(), int(owner));
      std::filesystem::remove(path_);
    }
    throw ConfigError("cannot acquire lock " + path_.string());
  }
  ~RunLock() {
    if (held_) std::filesystem::remove(path_);
  }
  RunLock(const RunLock&) = delete;
  RunLock& operator=(const RunLock&) = delete;

 private:
  std::filesystem::path path_;
  bool held_ = false;
};

class Pipeline {
 public:
  Pipeline(PipelineConfig cfg, std::filesystem::path out_dir, bool force = false)
      : cfg_(std::move(cfg)), out_(std::move(out_dir)), force_(force) {
    validate_config(cfg_);
    std::filesystem::create_directories(out_);
  }

  std::filesystem::path records_path() const { return out_ / "org_records.jsonl"; }
  std::filesystem::path harvest_dir() const { return out_ / "harvest"; }
  std::filesystem::path harvest_manifest_path() const {
    return harvest_dir() / "harvest_manifest.jsonl";
  }
  std::filesystem::path chunks_path() const { return out_ / "chunks.jsonl"; }
  std::filesystem::path candidates_path() const { return out_ / "candidates.jsonl"; }
  std::filesystem::path index_path() const { return out_ / "chunk_index.jsonl"; }
  std::filesystem::path verdicts_path() const { return out_ / "verdicts.jsonl"; }
  std::filesystem::path inferred_path() const { return out_ / "org_records_inferred.jsonl"; }
  std::filesystem::path families_path() const { return out_ / "families.jsonl"; }
  std::filesystem::path dropped_edges_path() const { return out_ / "dropped_edges.jsonl"; }
  std::filesystem::path report_path() const { return out_ / "compare_report.json"; }
  std::filesystem::path manifest_path() const { return out_ / "run_manifest.json"; }
  std::filesystem::path snapshot_path() const { return out_ / "config_snapshot.json"; }

  const RunManifest& manifest() const { return manifest_; }
  const std::string& compare_table() const { return compare_table_; }

  // Runs the requested stages (canonical order); "all" = every stage, where
  // compare is included only when a baseline is configured. Returns 0, or 4
  // when inference had to give up on some target (partial results).
  int run(std::vector<std::string> stages) {
    RunLock lock(out_);
    expand_stages(stages);
    load_state();
    maybe_snapshot_config();

    for (auto& name : stage_order()) {
      if (std::find(stages.begin(), stages.end(), name) == stages.end()) continue;
      check_prerequisites(name);
      if (!force_ && stage_fresh(name)) {
        log_info("stage %s: up to date, skipping", name.c_str());
        continue;
      }
      log_info("stage %s: running", name.c_str());
      run_stage(name);
      manifest_.stages[name] = StageState{true, cfg_.config_hash()};
      invalidate_downstream(name);
      save_manifest();
    }
    return manifest_.partial ? 4 : 0;
  }

 private:
  void expand_stages(std::vector<std::string>& stages) const {
    if (stages.size() == 1 && stages[0] == "all") {
      stages = stage_order();
      if (cfg_.baseline_path.empty()) stages.pop_back();  // no baseline, no compare
      return;
    }
    for (auto& s : stages)
      if (std::find(stage_order().begin(), stage_order().end(), s) == stage_order().end())
        throw ConfigError("unknown stage '" + s + "'");
  }

  void load_state() {
    std::error_code ec;
    if (std::filesystem::is_regular_file(manifest_path(), ec)) {
      try {
        manifest_ = RunManifest::from_json(json::parse(read_file(manifest_path())));
      } catch (const std::exception& e) {
        log_warn("ignoring unreadable run manifest: %s", e.what());
        manifest_ = RunManifest{};
      }
    }
    manifest_.run_id = "run-" + cfg_.config_hash();
    manifest_.config_hash = cfg_.config_hash();
  }

  void maybe_snapshot_config() {
    std::string next = cfg_.raw.dump(2) + "\n";
    std::error_code ec;
    if (std::filesystem::is_regular_file(snapshot_path(), ec)) {
      std::string prev = read_file(snapshot_path());
      if (prev == next) return;
      try {
        json old = json::parse(prev);
        std::set<std::string> keys;
        for (auto& [k, _] : old.items()) keys.insert(k);
        for (auto& [k, _] : cfg_.raw.items()) keys.insert(k);
        for (auto& k : keys) {
          const bool in_old = old.contains(k), in_new = cfg_.raw.contains(k);
          if (!in_old)
            log_info("config changed: +%s", k.c_str());
          else if (!in_new)
            log_info("config changed: -%s", k.c_str());
          else if (old.at(k) != cfg_.raw.at(k))
            log_info("config changed: %s", k.c_str());
        }
      } catch (const json::exception&) {
        log_info("config changed (previous snapshot unreadable)");
      }
    }
    write_file_atomic(snapshot_path(), next);
  }

  void save_manifest() { write_file_atomic(manifest_path(), manifest_.to_json().dump(2) + "\n"); }

  bool output_exists(const std::filesystem::path& p) const {
    std::error_code ec;
    return std::filesystem::exists(p, ec);
  }

  std::vector<std::filesystem::path> stage_outputs(const std::string& name) const {
    if (name == "ingest") return {records_path()};
    if (name == "harvest") return {harvest_manifest_path()};
    if (name == "filter") return {chunks_path(), candidates_path()};
    if (name == "index") return {index_path()};
    if (name == "infer") return {verdicts_path(), inferred_path()};
    if (name == "cluster") return {families_path()};
    if (name == "compare") return {report_path()};
    return {};
  }

  bool stage_fresh(const std::string& name) const {
    auto it = manifest_.stages.find(name);
    if (it == manifest_.stages.end() || !it->second.done) return false;
    if (it->second.config_hash != cfg_.config_hash()) return false;
    for (auto& p : stage_outputs(name))
      if (!output_exists(p)) return false;
    return true;
  }

  void invalidate_downstream(const std::string& name) {
    bool after = false;
    for (auto& s : stage_order()) {
      if (after) {
        auto it = manifest_.stages.find(s);
        if (it != manifest_.stages.end()) it->second.done = false;
      }
      if (s == name) after = true;
    }
  }

  void check_prerequisites(const std::string& name) const {
    auto need = [&](const std::filesystem::path& p, const std::string& producer) {
      if (!output_exists(p))
        throw StageOrderError("stage '" + name + "' needs " + p.filename().string() +
                              " from stage '" + producer + "'; run that stage first");
    };
    if (name == "harvest") need(records_path(), "ingest");
    if (name == "filter") {
      need(records_path(), "ingest");
      need(harvest_manifest_path(), "harvest");
    }
    if (name == "index") need(chunks_path(), "filter");
    if (name == "infer") {
      need(records_path(), "ingest");
      need(candidates_path(), "filter");
      need(index_path(), "index");
    }
    if (name == "cluster") need(inferred_path(), "infer");
    if (name == "compare") {
      need(families_path(), "cluster");
      if (cfg_.baseline_path.empty())
        throw ConfigError("stage 'compare' needs a baseline entry in the config");
    }
  }

  void run_stage(const std::string& name) {
    if (name == "ingest") run_ingest();
    else if (name == "harvest") run_harvest();
    else if (name == "filter") run_filter();
    else if (name == "index") run_index();
    else if (name == "infer") run_infer();
    else if (name == "cluster") run_cluster();
    else if (name == "compare") run_compare();
  }

  void run_ingest() {
    IngestInputs in;
    for (auto& w : cfg_.whois) {
      std::ifstream f(w.path);
      if (!f) throw IngestError("cannot open whois dump " + w.path);
      in.whois.push_back(parse_whois_dump(f, w.registry_id()));
    }
    if (!cfg_.ca2o_path.empty()) in.ca2o = load_ca2o(cfg_.ca2o_path);
    if (!cfg_.peeringdb_path.empty()) in.pdb = load_peeringdb(cfg_.peeringdb_path);
    IngestStats stats;
    OrgRecordSet records = build_org_records(in, &stats);
    records.save(records_path());
    manifest_.counters["organizations"] = static_cast<int64_t>(records.records.size());
    manifest_.counters["ingest_asns"] = static_cast<int64_t>(stats.asns);
    manifest_.counters["ingest_whois_labeled"] = static_cast<int64_t>(stats.whois_labeled);
    manifest_.counters["ingest_ca2o_labeled"] = static_cast<int64_t>(stats.ca2o_labeled);
    manifest_.counters["ingest_pdb_labeled"] = static_cast<int64_t>(stats.pdb_labeled);
    manifest_.counters["ingest_descr_labeled"] = static_cast<int64_t>(stats.descr_labeled);
    manifest_.counters["ingest_name_conflicts"] = static_cast<int64_t>(stats.name_conflicts);
    manifest_.counters["ingest_unlabeled"] = static_cast<int64_t>(stats.unlabeled);
  }

  void run_harvest() {
    OrgRecordSet records = OrgRecordSet::load(records_path());
    DocumentStore store(harvest_dir());
    SteadyClock clock;

    std::unique_ptr<SearchProvider> provider;
    std::unique_ptr<Fetcher> fetcher;
    if (!cfg_.fixture_dir.empty()) {
      std::filesystem::path dir = cfg_.fixture_dir;
      provider = std::make_unique<FixtureSearchProvider>(dir / "search_results.json");
      fetcher = std::make_unique<FixtureFetcher>(dir);
    } else {
      if (cfg_.search.endpoint_template.empty())
        throw ConfigError("stage 'harvest' needs harvest.fixture_dir or harvest.search.endpoint");
      provider = std::make_unique<HttpSearchProvider>(cfg_.search);
      fetcher = std::make_unique<HttpFetcher>(cfg_.politeness.user_agent);
    }
    std::vector<std::string> templates =
        cfg_.query_templates.empty() ? default_query_templates() : cfg_.query_templates;
    Harvester harvester(*provider, *fetcher, store, clock, cfg_.politeness, templates);
    int64_t crawled = 0;
    for (auto& org : records.records)
      for (auto& doc : harvester.harvest(org, cfg_.top_k))
        if (doc.status == DocStatus::ok) ++crawled;
    manifest_.counters["crawled_urls"] = crawled;
  }

  void run_filter() {
    OrgRecordSet records = OrgRecordSet::load(records_path());
    Normalizer norm = cfg_.normalizer();
    GlobalNameList names = GlobalNameList::build(records, norm);
    std::unique_ptr<EntityExtractor> extractor;
    if (cfg_.extractor_plugin.empty())
      extractor = std::make_unique<DictionaryExtractor>(names, norm);
    else
      extractor = std::make_unique<ProcessExtractor>(cfg_.extractor_plugin);

    auto docs = DocumentStore::load(harvest_dir());
    int64_t total_chunks = 0;
    int64_t retained = 0;
    JsonlWriter chunk_out(chunks_path());
    std::map<std::string, std::set<std::string>> candidates_by_record;
    for (auto& rec : records.records) candidates_by_record[rec.record_id];  // keep empties
    for (auto& doc : docs) {
      if (doc.status != DocStatus::ok) continue;
      auto chunks = split_chunks(doc, cfg_.chunk);
      total_chunks += static_cast<int64_t>(chunks.size());
      for (auto& c : chunks) {
        auto mentions = extract_entities(c.text, names, *extractor, norm);
        c.entity_mentions.assign(mentions.begin(), mentions.end());
      }
      const OrgRecord* target = records.find(doc.org_record_id);
      if (!target) {
        log_warn("document %s references unknown record %s; skipped", doc.doc_id.c_str(),
                 doc.org_record_id.c_str());
        continue;
      }
      FilterResult res = filter_relevant(chunks, *target, norm);
      retained += static_cast<int64_t>(res.retained.size());
      for (auto& c : res.retained) chunk_out.write(c.to_json());
      candidates_by_record[doc.org_record_id].insert(res.candidate_orgs.begin(),
                                                     res.candidate_orgs.end());
    }
    chunk_out.close();
    JsonlWriter cand_out(candidates_path());
    for (auto& [rid, cands] : candidates_by_record)
      cand_out.write(json{{"record_id", rid}, {"candidate_orgs", cands}});
    cand_out.close();
    manifest_.counters["crawled_chunks"] = total_chunks;
    manifest_.counters["filtered_chunks"] = retained;
  }

  void run_index() {
    std::vector<TextChunk> chunks;
    for_each_jsonl(chunks_path(), [&](const json& j) { chunks.push_back(TextChunk::from_json(j)); });
    ChunkIndex index(cfg_.normalizer());
    index.index_chunks(chunks);
    index.save(index_path());
  }

  void run_infer() {
    OrgRecordSet records = OrgRecordSet::load(records_path());
    for_each_jsonl(candidates_path(), [&](const json& j) {
      OrgRecord* rec = records.find(j.at("record_id").get<std::string>());
      if (!rec) return;
      for (auto& c : j.at("candidate_orgs")) rec->candidate_orgs.push_back(c.get<std::string>());
    });
    ChunkIndex index = ChunkIndex::load(index_path(), cfg_.normalizer());

    std::unique_ptr<LlmBackend> backend;
    if (cfg_.backend == "mock")
      backend = std::make_unique<MockBackend>(cfg_.mock_script);
    else
      backend = std::make_unique<HttpBackend>(cfg_.llm);
    std::unique_ptr<RankerPlugin> ranker;
    if (!cfg_.ranker_plugin.empty()) ranker = std::make_unique<RankerPlugin>(cfg_.ranker_plugin);

    JsonlWriter verdict_out(verdicts_path());
    int64_t queries = 0;
    bool partial = false;
    for (auto& rec : records.records) {
      InferOutcome outcome = infer_relations(rec, index, *backend, cfg_.infer, ranker.get());
      queries += static_cast<int64_t>(outcome.queries);
      partial = partial || outcome.partial;
      for (auto& v : outcome.verdicts) verdict_out.write(v.to_json());
    }
    verdict_out.close();
    records.save(inferred_path());
    manifest_.counters["llm_queries"] = queries;
    manifest_.partial = partial;
  }

  void run_cluster() {
    OrgRecordSet records = OrgRecordSet::load(inferred_path());
    Normalizer norm = cfg_.normalizer();
    propagate_child_annotations(records, norm);
    Stage1Result s1 = stage1(records, cfg_.jaccard_threshold, norm);
    auto sets = stage2(s1, cfg_.jaccard_threshold, norm);
    Stage3Result s3 = stage3(sets, records, cfg_.jaccard_threshold, norm);
    save_families(s3.families, families_path());
    JsonlWriter dropped(dropped_edges_path());
    for (auto& d : s3.dropped_edges)
      dropped.write(json{{"child", d.child},
                         {"parent", d.parent},
                         {"support", d.support},
                         {"reason", d.reason}});
    dropped.close();
    manifest_.counters["families"] = static_cast<int64_t>(s3.families.size());
  }

  void run_compare() {
    GroupingDataset ours = load_grouping_families(families_path(), "ours");
    GroupingDataset base;
    if (cfg_.baseline_format == "ca2o")
      base = load_grouping_ca2o(cfg_.baseline_path, "baseline");
    else if (cfg_.baseline_format == "csv")
      base = load_grouping_csv(cfg_.baseline_path, "baseline");
    else
      base = load_grouping_families(cfg_.baseline_path, "baseline");
    CompareReport rep = compare_groupings(ours, base);
    write_file_atomic(report_path(), to_json(rep).dump(2) + "\n");
    compare_table_ = render_compare_table(rep);
  }

  PipelineConfig cfg_;
  std::filesystem::path out_;
  bool force_ = false;
  RunManifest manifest_;
  std::string compare_table_;
};

}  // namespace orgmap
