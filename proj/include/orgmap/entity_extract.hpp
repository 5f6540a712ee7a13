// Entity extraction over chunk text. The shipped extractor is a dictionary
// matcher over the global canonical-name list (normalized whole-token
// matching); external model processes can be attached through the JSON-lines
// plugin contract: {"text": ...} -> {"spans": [...]}.
#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "orgmap/normalize.hpp"
#include "orgmap/org_record.hpp"
#include "orgmap/process_plugin.hpp"

namespace orgmap {

struct GlobalNameList {
  std::set<std::string> names;  // canonical names, each exactly once
  std::map<std::string, std::vector<std::string>> normalized_index;  // form -> canonicals

  static GlobalNameList build(const OrgRecordSet& records, const Normalizer& norm) {
    GlobalNameList list;
    for (auto& r : records.records) {
      if (r.canonical_name.empty()) continue;
      if (!list.names.insert(r.canonical_name).second) continue;  // duplicate canonical
      list.normalized_index[norm.form(r.canonical_name)].push_back(r.canonical_name);
    }
    return list;
  }
};

namespace detail {

// True when `name` appears in `text` as a whole word, case-sensitively.
inline bool exact_case_word_match(const std::string& text, const std::string& name) {
  std::string needle = trim(name);
  if (needle.empty()) return false;
  auto is_word = [](unsigned char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c >= 0x80;
  };
  size_t pos = 0;
  while ((pos = text.find(needle, pos)) != std::string::npos) {
    bool left_ok = pos == 0 || !is_word(text[pos - 1]);
    size_t end = pos + needle.size();
    bool right_ok = end >= text.size() || !is_word(text[end]);
    if (left_ok && right_ok) return true;
    pos += 1;
  }
  return false;
}

// A single stop-token-free token of <= 3 chars is too ambiguous for
// case-insensitive matching.
inline bool is_ambiguous_short_form(const std::string& form) {
  return !form.empty() && form.size() <= 3 && form.find(' ') == std::string::npos;
}

}  // namespace detail

class EntityExtractor {
 public:
  virtual ~EntityExtractor() = default;
  // Candidate organization-name spans found in the text.
  virtual std::vector<std::string> extract(const std::string& text) = 0;
};

// Normalized whole-token dictionary matcher: a name matches where its
// normalized token sequence appears contiguously in the text's normalized
// token sequence.
class DictionaryExtractor : public EntityExtractor {
 public:
  DictionaryExtractor(const GlobalNameList& list, const Normalizer& norm)
      : norm_(norm) {
    for (auto& [form, canonicals] : list.normalized_index) {
      if (form.empty()) continue;
      std::vector<std::string> seq = Normalizer::raw_tokens(form);
      by_first_[seq.front()].push_back({seq, canonicals});
    }
  }

  std::vector<std::string> extract(const std::string& text) override {
    std::vector<std::string> out;
    std::set<std::string> seen;
    std::vector<std::string> toks = norm_.tokens(text);
    for (size_t i = 0; i < toks.size(); ++i) {
      auto it = by_first_.find(toks[i]);
      if (it == by_first_.end()) continue;
      for (auto& entry : it->second) {
        const auto& seq = entry.seq;
        if (i + seq.size() > toks.size()) continue;
        bool match = true;
        for (size_t k = 1; k < seq.size(); ++k)
          if (toks[i + k] != seq[k]) {
            match = false;
            break;
          }
        if (!match) continue;
        for (auto& canonical : entry.canonicals)
          if (seen.insert(canonical).second) out.push_back(canonical);
      }
    }
    return out;
  }

 private:
  struct Entry {
    std::vector<std::string> seq;
    std::vector<std::string> canonicals;
  };
  const Normalizer& norm_;
  std::map<std::string, std::vector<Entry>> by_first_;
};

// External extractor process speaking the JSON-lines contract.
class ProcessExtractor : public EntityExtractor {
 public:
  explicit ProcessExtractor(const std::vector<std::string>& argv)
      : client_(std::make_unique<ProcessLineClient>(argv)) {}
  std::vector<std::string> extract(const std::string& text) override {
    json reply = client_->call(json{{"text", text}});
    std::vector<std::string> out;
    for (auto& s : reply.value("spans", json::array())) out.push_back(s.get<std::string>());
    return out;
  }

 private:
  std::unique_ptr<ProcessLineClient> client_;
};

// Run the extractor and keep only outputs whose normalized form matches the
// global list; ambiguous short names additionally need an exact-case word hit
// in the raw text. Returns canonical global-list names.
inline std::set<std::string> extract_entities(const std::string& text, const GlobalNameList& list,
                                              EntityExtractor& extractor, const Normalizer& norm) {
  std::set<std::string> mentions;
  for (auto& span : extractor.extract(text)) {
    auto it = list.normalized_index.find(norm.form(span));
    if (it == list.normalized_index.end()) continue;
    for (auto& canonical : it->second) {
      if (detail::is_ambiguous_short_form(norm.form(canonical)) &&
          !detail::exact_case_word_match(text, canonical))
        continue;
      mentions.insert(canonical);
    }
  }
  return mentions;
}

}  // namespace orgmap
