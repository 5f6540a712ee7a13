// Web-evidence harvester: search queries per organization, polite fetching
// (per-host min interval, robots.txt), and a content-addressed document store
// with a JSON-lines manifest.
#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "orgmap/jsonl.hpp"
#include "orgmap/org_record.hpp"
#include "orgmap/robots.hpp"
#include "orgmap/url.hpp"
#include "orgmap/util.hpp"

namespace orgmap {

enum class DocStatus { ok, robots_denied, fetch_error, non_html };

inline std::string doc_status_str(DocStatus s) {
  switch (s) {
    case DocStatus::ok: return "ok";
    case DocStatus::robots_denied: return "robots_denied";
    case DocStatus::fetch_error: return "fetch_error";
    case DocStatus::non_html: return "non_html";
  }
  return "?";
}

inline DocStatus doc_status_parse(const std::string& s) {
  if (s == "ok") return DocStatus::ok;
  if (s == "robots_denied") return DocStatus::robots_denied;
  if (s == "fetch_error") return DocStatus::fetch_error;
  if (s == "non_html") return DocStatus::non_html;
  throw ConfigError("unknown doc status: " + s);
}

struct HarvestDocument {
  std::string doc_id;         // hash of (org_record_id, url)
  std::string org_record_id;
  std::string url;
  DocStatus status = DocStatus::fetch_error;
  int64_t fetched_at_ms = 0;
  std::string body;  // non-empty iff status == ok
};

struct FetchResponse {
  bool transport_error = false;
  int http_status = 0;
  std::string content_type;
  std::string body;
  std::string error;
};

class Fetcher {
 public:
  virtual ~Fetcher() = default;
  virtual FetchResponse fetch(const std::string& url) = 0;
};

class SearchProvider {
 public:
  virtual ~SearchProvider() = default;
  // May throw HarvestError; the error must name the failing query.
  virtual std::vector<std::string> search(const std::string& query, int top_k) = 0;
};

class Clock {
 public:
  virtual ~Clock() = default;
  virtual int64_t now_ms() = 0;
  virtual void sleep_ms(int64_t ms) = 0;
};

class SteadyClock : public Clock {
 public:
  int64_t now_ms() override {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
  }
  void sleep_ms(int64_t ms) override {
    if (ms > 0) std::this_thread::sleep_for(std::chrono::milliseconds(ms));
  }
};

// Virtual clock: never sleeps, advances instantly. Fixture runs use it so
// re-runs are reproducible and fast.
class SimulatedClock : public Clock {
 public:
  int64_t now_ms() override { return t_; }
  void sleep_ms(int64_t ms) override {
    if (ms > 0) t_ += ms;
  }

 private:
  int64_t t_ = 0;
};

struct PolitenessPolicy {
  int64_t per_host_min_interval_ms = 2000;
  int max_concurrent_hosts = 4;  // upper bound; the shipped executor is serial
  std::string user_agent = "orgmap-harvester/0.1";
  bool obey_robots = true;
};

// Serializes requests per host: consecutive requests to one host are spaced
// at least per_host_min_interval_ms apart.
class PoliteScheduler {
 public:
  PoliteScheduler(const PolitenessPolicy& policy, Clock& clock)
      : policy_(policy), clock_(clock) {}

  // Blocks until the host may be contacted again; returns the request time.
  int64_t acquire(const std::string& host) {
    int64_t now = clock_.now_ms();
    auto it = last_.find(host);
    if (it != last_.end()) {
      int64_t earliest = it->second + policy_.per_host_min_interval_ms;
      if (now < earliest) {
        clock_.sleep_ms(earliest - now);
        now = clock_.now_ms();
        if (now < earliest) now = earliest;  // simulated clocks land exactly
      }
    }
    last_[host] = now;
    return now;
  }

 private:
  const PolitenessPolicy& policy_;
  Clock& clock_;
  std::map<std::string, int64_t> last_;
};

// Content-addressed body files under <dir>/docs plus harvest_manifest.jsonl.
// The manifest carries no timestamps so identical fixture runs produce
// byte-identical stores; request times go to fetch_trace.jsonl instead.
class DocumentStore {
 public:
  explicit DocumentStore(const std::filesystem::path& dir, bool truncate = true) : dir_(dir) {
    std::filesystem::create_directories(dir_ / "docs");
    auto mode = truncate ? std::ios::trunc : std::ios::app;
    manifest_.open(dir_ / "harvest_manifest.jsonl", mode);
    trace_.open(dir_ / "fetch_trace.jsonl", mode);
    if (!manifest_ || !trace_) throw HarvestError("cannot open document store at " + dir_.string());
  }

  void append(const HarvestDocument& doc) {
    json j;
    j["doc_id"] = doc.doc_id;
    j["org_record_id"] = doc.org_record_id;
    j["url"] = doc.url;
    j["status"] = doc_status_str(doc.status);
    if (doc.status == DocStatus::ok) {
      std::string file = "docs/" + hex64(fnv1a64(doc.body)) + ".bin";
      std::filesystem::path p = dir_ / file;
      if (!std::filesystem::exists(p)) write_file(p, doc.body);
      j["body_file"] = file;
      j["body_bytes"] = doc.body.size();
    }
    manifest_ << j.dump() << '\n';
    manifest_.flush();
  }

  void trace(const std::string& host, const std::string& url, const std::string& kind,
             int64_t t_ms) {
    json j;
    j["host"] = host;
    j["url"] = url;
    j["kind"] = kind;  // "robots" or "page"
    j["t_ms"] = t_ms;
    trace_ << j.dump() << '\n';
    trace_.flush();
  }

  const std::filesystem::path& dir() const { return dir_; }

  // Load all manifest entries, resolving body files.
  static std::vector<HarvestDocument> load(const std::filesystem::path& dir) {
    std::vector<HarvestDocument> out;
    for_each_jsonl(dir / "harvest_manifest.jsonl", [&](const json& j) {
      HarvestDocument d;
      d.doc_id = j.at("doc_id").get<std::string>();
      d.org_record_id = j.at("org_record_id").get<std::string>();
      d.url = j.at("url").get<std::string>();
      d.status = doc_status_parse(j.at("status").get<std::string>());
      if (j.contains("body_file"))
        d.body = read_file(dir / j.at("body_file").get<std::string>());
      out.push_back(std::move(d));
    });
    return out;
  }

 private:
  std::filesystem::path dir_;
  std::ofstream manifest_;
  std::ofstream trace_;
};

inline const std::vector<std::string>& default_query_templates() {
  static const std::vector<std::string> kTemplates = {
      "{name} acquired by", "{name} parent company", "{name} Wikipedia",
      "{name} subsidiary", "{name} rebrand"};
  return kTemplates;
}

// Fill the query templates for one organization name. The name is inserted
// verbatim — suffixes like "LLP" stay, they disambiguate the search.
inline std::vector<std::string> build_search_queries(
    const std::string& org_name,
    const std::vector<std::string>& templates = default_query_templates()) {
  if (trim(org_name).empty())
    throw std::invalid_argument("build_search_queries: empty organization name");
  std::vector<std::string> out;
  for (auto& t : templates) {
    std::string q = t;
    size_t pos = q.find("{name}");
    if (pos == std::string::npos) throw ConfigError("query template missing {name}: " + t);
    while (pos != std::string::npos) {
      q.replace(pos, 6, org_name);
      pos = q.find("{name}", pos + org_name.size());
    }
    out.push_back(std::move(q));
  }
  return out;
}

// Drives search + fetch for organizations. Single-threaded: per-host
// politeness and manifest determinism hold by construction.
class Harvester {
 public:
  Harvester(SearchProvider& provider, Fetcher& fetcher, DocumentStore& store, Clock& clock,
            PolitenessPolicy policy,
            std::vector<std::string> templates = default_query_templates())
      : provider_(provider),
        fetcher_(fetcher),
        store_(store),
        clock_(clock),
        policy_(std::move(policy)),
        scheduler_(policy_, clock_),
        templates_(std::move(templates)) {}

  // Harvest one organization: its listed websites plus up to top_k results
  // per query, deduplicated. Every document is persisted before return.
  std::vector<HarvestDocument> harvest(const OrgRecord& org, int top_k) {
    std::vector<std::string> urls;
    std::set<std::string> seen;
    auto push = [&](const std::string& u) {
      if (!seen.insert(u).second) return;
      urls.push_back(u);
    };
    for (auto& w : org.websites)
      if (is_valid_http_url(w)) push(trim(w));
    for (auto& q : build_search_queries(org.canonical_name, templates_)) {
      std::vector<std::string> results;
      try {
        results = provider_.search(q, top_k);
      } catch (const std::exception& e) {
        throw HarvestError("search failed for query '" + q + "': " + e.what());
      }
      int taken = 0;
      for (auto& u : results) {
        if (taken >= top_k) break;
        if (!is_valid_http_url(u)) continue;
        push(trim(u));
        ++taken;
      }
    }

    std::vector<HarvestDocument> docs;
    for (auto& u : urls) {
      HarvestDocument doc = fetch_one(org.record_id, u);
      store_.append(doc);
      docs.push_back(std::move(doc));
    }
    return docs;
  }

  size_t page_fetches() const { return page_fetches_; }

 private:
  const RobotsRules& robots_for(const Url& u) {
    auto it = robots_cache_.find(u.origin());
    if (it != robots_cache_.end()) return it->second;
    RobotsRules rules;
    if (policy_.obey_robots) {
      std::string robots_url = u.origin() + "/robots.txt";
      int64_t t = scheduler_.acquire(u.host);
      store_.trace(u.host, robots_url, "robots", t);
      FetchResponse resp = fetcher_.fetch(robots_url);
      if (!resp.transport_error && resp.http_status == 200)
        rules = RobotsRules::parse(resp.body, policy_.user_agent);
      // unreachable or missing robots.txt: everything allowed
    }
    return robots_cache_.emplace(u.origin(), std::move(rules)).first->second;
  }

  HarvestDocument fetch_one(const std::string& record_id, const std::string& url) {
    HarvestDocument doc;
    doc.doc_id = "d" + hex64(fnv1a64(record_id + "|" + url));
    doc.org_record_id = record_id;
    doc.url = url;
    auto parsed = parse_url(url);
    if (!parsed) {
      doc.status = DocStatus::fetch_error;
      return doc;
    }
    const RobotsRules& rules = robots_for(*parsed);
    if (!rules.allowed(parsed->path)) {
      doc.status = DocStatus::robots_denied;
      doc.fetched_at_ms = clock_.now_ms();
      return doc;  // denied before any body read
    }
    int64_t t = scheduler_.acquire(parsed->host);
    store_.trace(parsed->host, url, "page", t);
    doc.fetched_at_ms = t;
    ++page_fetches_;
    FetchResponse resp = fetcher_.fetch(url);
    if (resp.transport_error || resp.http_status != 200) {
      doc.status = DocStatus::fetch_error;
      log_debug("fetch_error %s: %s", url.c_str(),
                resp.transport_error ? resp.error.c_str() : std::to_string(resp.http_status).c_str());
      return doc;
    }
    std::string ct = to_lower(resp.content_type);
    bool html = ct.empty() || ct.find("text/html") != std::string::npos ||
                ct.find("application/xhtml") != std::string::npos ||
                ct.find("text/plain") != std::string::npos;
    if (!html) {
      doc.status = DocStatus::non_html;
      return doc;
    }
    doc.status = DocStatus::ok;
    doc.body = std::move(resp.body);
    return doc;
  }

  SearchProvider& provider_;
  Fetcher& fetcher_;
  DocumentStore& store_;
  Clock& clock_;
  PolitenessPolicy policy_;
  PoliteScheduler scheduler_;
  std::vector<std::string> templates_;
  std::map<std::string, RobotsRules> robots_cache_;
  size_t page_fetches_ = 0;
};

// --- offline fixtures -------------------------------------------------------

// search_results.json: {"<query>": ["url", ...], ...}; unknown query -> [].
class FixtureSearchProvider : public SearchProvider {
 public:
  explicit FixtureSearchProvider(const std::filesystem::path& file) {
    json j = json::parse(read_file(file));
    for (auto& [q, urls] : j.items())
      for (auto& u : urls) results_[q].push_back(u.get<std::string>());
  }
  std::vector<std::string> search(const std::string& query, int top_k) override {
    auto it = results_.find(query);
    if (it == results_.end()) return {};
    std::vector<std::string> out = it->second;
    if (static_cast<int>(out.size()) > top_k) out.resize(top_k);
    return out;
  }

 private:
  std::map<std::string, std::vector<std::string>> results_;
};

// pages.json: {"<url>": {"path": "rel/file"} | {"body": "..."}} with optional
// "content_type" (default text/html) and "http_status" (default 200).
// URLs absent from the map fetch as transport errors.
class FixtureFetcher : public Fetcher {
 public:
  explicit FixtureFetcher(const std::filesystem::path& dir) : dir_(dir) {
    pages_ = json::parse(read_file(dir / "pages.json"));
  }
  FetchResponse fetch(const std::string& url) override {
    FetchResponse r;
    if (!pages_.contains(url)) {
      r.transport_error = true;
      r.error = "no fixture for " + url;
      return r;
    }
    const json& e = pages_.at(url);
    r.http_status = e.value("http_status", 200);
    r.content_type = e.value("content_type", "text/html");
    if (e.contains("path"))
      r.body = read_file(dir_ / e.at("path").get<std::string>());
    else
      r.body = e.value("body", "");
    return r;
  }

 private:
  std::filesystem::path dir_;
  json pages_;
};

}  // namespace orgmap
