// robots.txt exclusion rules: user-agent group selection plus
// longest-prefix-match Allow/Disallow evaluation.
#pragma once

#include <string>
#include <vector>

#include "orgmap/util.hpp"

namespace orgmap {

class RobotsRules {
 public:
  // Parse the rules that apply to `agent` (product token, case-insensitive).
  // The most specific matching user-agent group wins; '*' is the fallback.
  static RobotsRules parse(const std::string& body, const std::string& agent) {
    struct Group {
      std::vector<std::string> agents;
      std::vector<std::pair<std::string, bool>> rules;  // (prefix, is_allow)
    };
    std::vector<Group> groups;
    bool in_agent_run = false;
    for (auto& raw : split_lines(body)) {
      std::string line = raw;
      size_t hash = line.find('#');
      if (hash != std::string::npos) line = line.substr(0, hash);
      line = trim(line);
      if (line.empty()) continue;
      size_t colon = line.find(':');
      if (colon == std::string::npos) continue;
      std::string key = to_lower(trim(line.substr(0, colon)));
      std::string value = trim(line.substr(colon + 1));
      if (key == "user-agent") {
        if (!in_agent_run) groups.push_back({});
        in_agent_run = true;
        groups.back().agents.push_back(to_lower(value));
      } else if (key == "disallow" || key == "allow") {
        in_agent_run = false;
        if (groups.empty()) continue;  // rules before any user-agent line
        groups.back().rules.push_back({value, key == "allow"});
      } else {
        in_agent_run = false;  // crawl-delay, sitemap, ...
      }
    }

    std::string want = to_lower(agent);
    // strip a "/version" suffix from the product token
    size_t slash = want.find('/');
    if (slash != std::string::npos) want = want.substr(0, slash);

    const Group* exact = nullptr;
    const Group* wildcard = nullptr;
    size_t best_len = 0;
    for (auto& g : groups) {
      for (auto& a : g.agents) {
        if (a == "*") {
          if (!wildcard) wildcard = &g;
        } else if (!want.empty() && want.find(a) != std::string::npos && a.size() > best_len) {
          exact = &g;
          best_len = a.size();
        }
      }
    }
    RobotsRules r;
    const Group* chosen = exact ? exact : wildcard;
    if (chosen) r.rules_ = chosen->rules;
    return r;
  }

  // Longest-match rule decides; ties prefer allow. No matching rule: allowed.
  bool allowed(const std::string& path) const {
    std::string p = path.empty() ? "/" : path;
    size_t best_len = 0;
    bool best_allow = true;
    bool matched = false;
    for (auto& [prefix, is_allow] : rules_) {
      if (prefix.empty()) {
        // "Disallow:" with empty value allows everything; weakest match
        if (!matched && !is_allow) {
          best_allow = true;
          matched = true;
        }
        continue;
      }
      if (p.rfind(prefix, 0) == 0) {
        if (prefix.size() > best_len || (prefix.size() == best_len && is_allow)) {
          best_len = prefix.size();
          best_allow = is_allow;
          matched = true;
        }
      }
    }
    return matched ? best_allow : true;
  }

  bool empty() const { return rules_.empty(); }

 private:
  std::vector<std::pair<std::string, bool>> rules_;
};

}  // namespace orgmap
