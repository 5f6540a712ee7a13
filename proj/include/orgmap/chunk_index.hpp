// Pair-constrained exact inverted index over filtered chunks: postings by
// owning organization and by (organization, normalized candidate name).
// Retrieval returns up to k chunks in a deterministic order, optionally
// re-ranked by an external plugin.
#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "orgmap/chunk.hpp"
#include "orgmap/normalize.hpp"
#include "orgmap/process_plugin.hpp"

namespace orgmap {

// Ranker plugin contract (JSON-lines):
//   {"target": ..., "candidate": ..., "chunks": ["text", ...]}
//   -> {"scores": [float, ...]}  (same length/order as chunks)
class RankerPlugin {
 public:
  explicit RankerPlugin(const std::vector<std::string>& argv)
      : client_(std::make_unique<ProcessLineClient>(argv)) {}

  std::vector<double> score(const std::string& target, const std::string& candidate,
                            const std::vector<const TextChunk*>& chunks) {
    json req;
    req["target"] = target;
    req["candidate"] = candidate;
    json texts = json::array();
    for (auto* c : chunks) texts.push_back(c->text);
    req["chunks"] = texts;
    json reply = client_->call(req);
    std::vector<double> out;
    for (auto& s : reply.at("scores")) out.push_back(s.get<double>());
    if (out.size() != chunks.size())
      throw PluginError("ranker returned " + std::to_string(out.size()) + " scores for " +
                        std::to_string(chunks.size()) + " chunks");
    return out;
  }

 private:
  std::unique_ptr<ProcessLineClient> client_;
};

class ChunkIndex {
 public:
  explicit ChunkIndex(Normalizer norm = Normalizer()) : norm_(std::move(norm)) {}

  // Index retained chunks for their owning organization. Re-indexing the same
  // chunks is a no-op (set semantics throughout).
  void index_chunks(const std::vector<TextChunk>& chunks) {
    for (auto& c : chunks) {
      chunks_.emplace(c.chunk_id, c);
      by_org_[c.org_record_id].insert(c.chunk_id);
      for (auto& m : c.entity_mentions)
        by_pair_[{c.org_record_id, norm_.form(m)}].insert(c.chunk_id);
    }
  }

  // Up to k chunks that co-mention the candidate within the organization's
  // corpus. Without a ranker: ordered by (doc_id, char_span). With one:
  // descending score, canonical order breaking ties.
  std::vector<TextChunk> retrieve_pair_context(const std::string& org_record_id,
                                               const std::string& candidate, size_t k,
                                               RankerPlugin* ranker = nullptr) const {
    auto it = by_pair_.find({org_record_id, norm_.form(candidate)});
    if (it == by_pair_.end()) return {};
    std::vector<const TextChunk*> hits;
    for (auto& id : it->second) hits.push_back(&chunks_.at(id));
    std::sort(hits.begin(), hits.end(), [](const TextChunk* a, const TextChunk* b) {
      if (a->doc_id != b->doc_id) return a->doc_id < b->doc_id;
      if (a->span_start != b->span_start) return a->span_start < b->span_start;
      return a->chunk_id < b->chunk_id;
    });
    if (ranker && !hits.empty()) {
      std::vector<double> scores = const_cast<RankerPlugin*>(ranker)->score(
          org_record_id, candidate, hits);
      std::vector<size_t> order(hits.size());
      for (size_t i = 0; i < order.size(); ++i) order[i] = i;
      std::stable_sort(order.begin(), order.end(),
                       [&](size_t a, size_t b) { return scores[a] > scores[b]; });
      std::vector<const TextChunk*> ranked;
      for (size_t i : order) ranked.push_back(hits[i]);
      hits = std::move(ranked);
    }
    if (hits.size() > k) hits.resize(k);
    std::vector<TextChunk> out;
    for (auto* h : hits) out.push_back(*h);
    return out;
  }

  std::vector<TextChunk> org_chunks(const std::string& org_record_id) const {
    std::vector<TextChunk> out;
    auto it = by_org_.find(org_record_id);
    if (it == by_org_.end()) return out;
    for (auto& id : it->second) out.push_back(chunks_.at(id));
    return out;
  }

  size_t size() const { return chunks_.size(); }

  // Snapshot: chunk rows plus posting rows, reloadable without recomputation.
  void save(const std::filesystem::path& p) const {
    JsonlWriter w(p);
    for (auto& [id, c] : chunks_) {
      json j = c.to_json();
      j["kind"] = "chunk";
      w.write(j);
    }
    for (auto& [org, ids] : by_org_) {
      json j;
      j["kind"] = "org";
      j["org_record_id"] = org;
      j["chunk_ids"] = ids;
      w.write(j);
    }
    for (auto& [key, ids] : by_pair_) {
      json j;
      j["kind"] = "pair";
      j["org_record_id"] = key.first;
      j["candidate_form"] = key.second;
      j["chunk_ids"] = ids;
      w.write(j);
    }
    w.close();
  }

  static ChunkIndex load(const std::filesystem::path& p, Normalizer norm = Normalizer()) {
    ChunkIndex idx(std::move(norm));
    for_each_jsonl(p, [&](const json& j) {
      std::string kind = j.value("kind", "chunk");
      if (kind == "chunk") {
        TextChunk c = TextChunk::from_json(j);
        idx.chunks_.emplace(c.chunk_id, std::move(c));
      } else if (kind == "org") {
        auto& set = idx.by_org_[j.at("org_record_id").get<std::string>()];
        for (auto& id : j.at("chunk_ids")) set.insert(id.get<std::string>());
      } else if (kind == "pair") {
        auto& set = idx.by_pair_[{j.at("org_record_id").get<std::string>(),
                                  j.at("candidate_form").get<std::string>()}];
        for (auto& id : j.at("chunk_ids")) set.insert(id.get<std::string>());
      }
    });
    return idx;
  }

  const Normalizer& normalizer() const { return norm_; }

 private:
  Normalizer norm_;
  std::map<std::string, TextChunk> chunks_;
  std::map<std::string, std::set<std::string>> by_org_;
  std::map<std::pair<std::string, std::string>, std::set<std::string>> by_pair_;
};

}  // namespace orgmap
