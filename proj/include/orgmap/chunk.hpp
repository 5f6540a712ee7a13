// Text chunks: fixed-size overlapping windows over extracted document text,
// preferring paragraph/sentence/word boundaries inside the size budget.
#pragma once

#include <string>
#include <vector>

#include "orgmap/harvest.hpp"
#include "orgmap/html_text.hpp"
#include "orgmap/jsonl.hpp"

namespace orgmap {

struct TextChunk {
  std::string chunk_id;  // "<doc_id>:<start>"
  std::string doc_id;
  std::string org_record_id;
  std::string url;  // provenance
  size_t span_start = 0;
  size_t span_end = 0;  // [start, end) into the extracted text
  std::string text;
  std::vector<std::string> entity_mentions;  // canonical global-list names

  json to_json() const {
    json j;
    j["chunk_id"] = chunk_id;
    j["doc_id"] = doc_id;
    j["org_record_id"] = org_record_id;
    j["url"] = url;
    j["char_span"] = json::array({span_start, span_end});
    j["text"] = text;
    j["entity_mentions"] = entity_mentions;
    return j;
  }

  static TextChunk from_json(const json& j) {
    TextChunk c;
    c.chunk_id = j.at("chunk_id").get<std::string>();
    c.doc_id = j.at("doc_id").get<std::string>();
    c.org_record_id = j.at("org_record_id").get<std::string>();
    c.url = j.value("url", "");
    c.span_start = j.at("char_span").at(0).get<size_t>();
    c.span_end = j.at("char_span").at(1).get<size_t>();
    c.text = j.at("text").get<std::string>();
    for (auto& m : j.value("entity_mentions", json::array()))
      c.entity_mentions.push_back(m.get<std::string>());
    return c;
  }
};

struct ChunkParams {
  size_t max_chunk_chars = 1000;
  size_t overlap_chars = 100;
};

namespace detail {

// Best split point in (lo, hi]: prefer a paragraph break, then a sentence
// end, then whitespace; hi when the window has none.
inline size_t pick_break(const std::string& text, size_t lo, size_t hi) {
  size_t para = std::string::npos, sentence = std::string::npos, space = std::string::npos;
  for (size_t i = hi; i > lo; --i) {
    char c = text[i - 1];
    if (c == '\n') {
      if (para == std::string::npos && i >= 2 && text[i - 2] == '\n') para = i;
      if (sentence == std::string::npos) sentence = i;
    } else if ((c == ' ' || c == '\t') && i >= 2) {
      char prev = text[i - 2];
      if (sentence == std::string::npos && (prev == '.' || prev == '!' || prev == '?'))
        sentence = i;
      if (space == std::string::npos) space = i;
    }
    if (para != std::string::npos) break;
  }
  if (para != std::string::npos) return para;
  if (sentence != std::string::npos) return sentence;
  if (space != std::string::npos) return space;
  return hi;
}

}  // namespace detail

// Split plain text into chunks of at most max_chunk_chars, consecutive chunks
// overlapping by exactly overlap_chars.
inline std::vector<std::pair<size_t, size_t>> split_spans(const std::string& text,
                                                          const ChunkParams& params) {
  std::vector<std::pair<size_t, size_t>> spans;
  const size_t n = text.size();
  if (n == 0) return spans;
  if (params.max_chunk_chars == 0 || params.overlap_chars >= params.max_chunk_chars / 2)
    throw ConfigError("chunk params: need 0 < overlap < max/2");
  size_t pos = 0;
  while (true) {
    size_t raw_end = std::min(pos + params.max_chunk_chars, n);
    size_t end = raw_end;
    if (raw_end < n)
      end = detail::pick_break(text, pos + params.max_chunk_chars / 2, raw_end);
    spans.push_back({pos, end});
    if (end >= n) break;
    pos = end - params.overlap_chars;
  }
  return spans;
}

inline std::vector<TextChunk> split_text(const std::string& doc_id, const std::string& record_id,
                                         const std::string& url, const std::string& text,
                                         const ChunkParams& params) {
  std::vector<TextChunk> out;
  for (auto [s, e] : split_spans(text, params)) {
    TextChunk c;
    c.doc_id = doc_id;
    c.org_record_id = record_id;
    c.url = url;
    c.span_start = s;
    c.span_end = e;
    c.chunk_id = doc_id + ":" + std::to_string(s);
    c.text = text.substr(s, e - s);
    out.push_back(std::move(c));
  }
  return out;
}

// Extract text from an ok document and split it.
inline std::vector<TextChunk> split_chunks(const HarvestDocument& doc, const ChunkParams& params) {
  if (doc.status != DocStatus::ok) return {};
  std::string text = html_to_text(doc.body);
  return split_text(doc.doc_id, doc.org_record_id, doc.url, text, params);
}

}  // namespace orgmap
