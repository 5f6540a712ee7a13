// Organization-name normalization shared by the corpus filter and the
// clustering stages: lowercase, strip punctuation, collapse whitespace, and
// drop a configurable legal-suffix stop-token set.
#pragma once

#include <set>
#include <string>
#include <vector>

namespace orgmap {

inline const std::set<std::string>& default_suffix_stop_tokens() {
  static const std::set<std::string> kTokens = {
      "inc", "llc", "ltd", "llp", "corp", "co", "sa", "ag", "gmbh", "pvt", "plc"};
  return kTokens;
}

class Normalizer {
 public:
  Normalizer() : stop_tokens_(default_suffix_stop_tokens()) {}
  explicit Normalizer(std::set<std::string> stop_tokens)
      : stop_tokens_(std::move(stop_tokens)) {}

  // Raw token split: lowercase ASCII letters, keep digits and non-ASCII bytes
  // (so multi-byte UTF-8 stays inside one token), everything else separates.
  // No stop-token removal.
  static std::vector<std::string> raw_tokens(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (unsigned char c : s) {
      bool word = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                  (c >= '0' && c <= '9') || c >= 0x80;
      if (word) {
        cur.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a')
                                           : static_cast<char>(c));
      } else if (!cur.empty()) {
        out.push_back(std::move(cur));
        cur.clear();
      }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
  }

  // Normalized token sequence: raw tokens minus legal-suffix stop tokens.
  std::vector<std::string> tokens(const std::string& s) const {
    std::vector<std::string> out;
    for (auto& t : raw_tokens(s))
      if (!stop_tokens_.count(t)) out.push_back(t);
    return out;
  }

  std::set<std::string> token_set(const std::string& s) const {
    auto ts = tokens(s);
    return std::set<std::string>(ts.begin(), ts.end());
  }

  // Canonical normalized form: tokens joined by single spaces.
  std::string form(const std::string& s) const {
    std::string out;
    for (auto& t : tokens(s)) {
      if (!out.empty()) out.push_back(' ');
      out += t;
    }
    return out;
  }

  const std::set<std::string>& stop_tokens() const { return stop_tokens_; }

 private:
  std::set<std::string> stop_tokens_;
};

// Jaccard similarity over normalized token sets, in [0,1]. When both token
// sets are empty (all-punctuation or all-stop-token names) the names carry no
// token signal: equal raw strings count as identical, anything else as
// unrelated.
inline double jaccard(const std::string& a, const std::string& b,
                      const Normalizer& norm = Normalizer()) {
  auto ta = norm.token_set(a);
  auto tb = norm.token_set(b);
  if (ta.empty() && tb.empty()) return a == b ? 1.0 : 0.0;
  size_t inter = 0;
  for (auto& t : ta) inter += tb.count(t);
  size_t uni = ta.size() + tb.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace orgmap
