// Model backends for relation inference. The deterministic mock backend
// replays verdicts from a scripted fixture; the HTTP backend adapts any
// JSON-speaking endpoint (request body templated, reply text extracted by
// JSON pointer). Secrets come from the environment, never from config values.
#pragma once

#include <cstdlib>
#include <map>
#include <string>
#include <vector>

#include "orgmap/jsonl.hpp"
#include "orgmap/util.hpp"

namespace orgmap {

class LlmBackend {
 public:
  virtual ~LlmBackend() = default;
  virtual std::string submit(const std::string& prompt) = 0;
  virtual std::string identity() const = 0;
};

// Scripted verdicts keyed by (base, candidate). The script file is a JSON
// array of objects:
//   {"base": ..., "candidate": ..., "relationship": "Alias" | "Parent/Subsidiary"
//    | "No_relation", "parent": "base"|"candidate", "parent_name": ...,
//    "reasoning_alias": ..., "reasoning_parent": ...}
// Pairs missing from the script come back as No_relation. The reply is
// rendered in the prompt's mandatory output format, so responses flow through
// the same parser as live model output. Pure function of the prompt.
class MockBackend : public LlmBackend {
 public:
  explicit MockBackend(const std::filesystem::path& script_file) {
    json root = json::parse(read_file(script_file));
    for (auto& e : root) {
      Entry entry;
      entry.relationship = e.value("relationship", "No_relation");
      entry.parent = e.value("parent", "");
      entry.parent_name = e.value("parent_name", "");
      entry.reasoning_alias = e.value("reasoning_alias", "");
      entry.reasoning_parent = e.value("reasoning_parent", "");
      script_[{e.at("base").get<std::string>(), e.at("candidate").get<std::string>()}] = entry;
    }
  }

  std::string submit(const std::string& prompt) override {
    std::string base = extract_line_value(prompt, "\"base_organization\": ");
    json candidates = json::parse(extract_line_value(prompt, "\"candidate_organizations\": "));
    json out = json::array();
    for (auto& c : candidates) {
      std::string cand = c.get<std::string>();
      json obj;
      obj["base_org_name"] = base;
      obj["candidate_org_name"] = cand;
      auto it = script_.find({base, cand});
      if (it == script_.end()) {
        obj["reasoning for Alias"] = "No evidence in the provided context.";
        obj["reasoning for Parent/Subsidiary"] = "No evidence in the provided context.";
        obj["relationship"] = "No_relation";
        obj["parent"] = "";
        obj["parent name"] = "";
      } else {
        obj["reasoning for Alias"] = it->second.reasoning_alias;
        obj["reasoning for Parent/Subsidiary"] = it->second.reasoning_parent;
        obj["relationship"] = it->second.relationship;
        obj["parent"] = it->second.parent;
        obj["parent name"] = it->second.parent_name;
      }
      out.push_back(obj);
    }
    return out.dump(2);
  }

  std::string identity() const override { return "mock"; }

 private:
  struct Entry {
    std::string relationship;
    std::string parent;
    std::string parent_name;
    std::string reasoning_alias;
    std::string reasoning_parent;
  };

  static std::string extract_line_value(const std::string& prompt, const std::string& key) {
    // the Input section is the last occurrence of each key
    size_t pos = prompt.rfind(key);
    if (pos == std::string::npos)
      throw VerdictParseError("mock backend: prompt lacks key " + key);
    size_t start = pos + key.size();
    size_t end = prompt.find('\n', start);
    if (end == std::string::npos) end = prompt.size();
    return trim(prompt.substr(start, end - start));
  }

  std::map<std::pair<std::string, std::string>, Entry> script_;
};

struct HttpBackendConfig {
  std::string endpoint;        // e.g. http://host:port/v1/chat/completions
  std::string auth_env;        // env var holding the bearer token ("" = none)
  std::string model;           // passed through in the request body
  double temperature = 0.0;
  std::string text_pointer = "/choices/0/message/content";  // reply extraction
  int64_t min_request_interval_ms = 0;  // global request throttle
};

}  // namespace orgmap
