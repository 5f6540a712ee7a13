// Relevance filter: keep chunks that mention the harvested organization
// (canonical or aka name) together with at least one other global-list name;
// those other names become the record's candidate organizations.
#pragma once

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "orgmap/chunk.hpp"
#include "orgmap/entity_extract.hpp"

namespace orgmap {

namespace detail {

// Whole-token containment of one name in raw text (same matching rules as the
// dictionary extractor, including the short-name exact-case guard).
inline bool contains_name(const std::string& text, const std::string& name,
                          const Normalizer& norm) {
  std::string form = norm.form(name);
  if (form.empty()) return exact_case_word_match(text, name);
  std::vector<std::string> seq = Normalizer::raw_tokens(form);
  std::vector<std::string> toks = norm.tokens(text);
  bool found = false;
  for (size_t i = 0; !found && i + seq.size() <= toks.size(); ++i) {
    bool match = true;
    for (size_t k = 0; k < seq.size(); ++k)
      if (toks[i + k] != seq[k]) {
        match = false;
        break;
      }
    found = match;
  }
  if (!found) return false;
  if (is_ambiguous_short_form(form)) return exact_case_word_match(text, name);
  return true;
}

}  // namespace detail

struct FilterResult {
  std::vector<TextChunk> retained;
  std::vector<std::string> candidate_orgs;  // sorted, deduplicated
};

// chunks must already carry entity_mentions. The target's own names (by
// normalized canonical form) never count as candidates.
inline FilterResult filter_relevant(const std::vector<TextChunk>& chunks, const OrgRecord& target,
                                    const Normalizer& norm) {
  FilterResult res;
  std::string target_form = norm.form(target.canonical_name);
  std::vector<std::string> target_names;
  target_names.push_back(target.canonical_name);
  for (auto& a : target.aka) target_names.push_back(a);

  std::set<std::string> candidates;
  for (auto& chunk : chunks) {
    bool target_hit = false;
    for (auto& name : target_names)
      if (detail::contains_name(chunk.text, name, norm)) {
        target_hit = true;
        break;
      }
    if (!target_hit) continue;
    std::vector<std::string> others;
    for (auto& m : chunk.entity_mentions)
      if (norm.form(m) != target_form) others.push_back(m);
    if (others.empty()) continue;
    res.retained.push_back(chunk);
    candidates.insert(others.begin(), others.end());
  }
  res.candidate_orgs.assign(candidates.begin(), candidates.end());
  return res;
}

}  // namespace orgmap
