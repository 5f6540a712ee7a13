// Relation inference driver: retrieve pair context for every candidate of a
// target record, issue one prompt covering the candidates that have evidence,
// parse and validate the verdicts, and fold them back into the record.
#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "orgmap/chunk_index.hpp"
#include "orgmap/llm_backend.hpp"
#include "orgmap/prompt.hpp"
#include "orgmap/verdict.hpp"

namespace orgmap {

struct InferOptions {
  size_t context_chunks = 8;  // k chunks per (target, candidate) pair
  int max_retries = 2;        // extra attempts after a malformed response
};

struct InferOutcome {
  size_t queries = 0;  // backend calls that produced a parsed response
  std::vector<RelationVerdict> verdicts;
  std::vector<std::string> rejected;  // validation failures, for the log
  bool partial = false;               // true when retries were exhausted
};

// Run inference for one target record. Candidates without any pair context
// are skipped; when nothing has context the backend is never called.
inline InferOutcome infer_relations(OrgRecord& target, const ChunkIndex& index,
                                    LlmBackend& backend, const InferOptions& opts,
                                    RankerPlugin* ranker = nullptr) {
  InferOutcome out;

  std::vector<std::string> candidates = target.candidate_orgs;
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  std::vector<std::string> with_context;
  std::map<std::string, std::vector<std::string>> evidence;  // candidate -> chunk ids
  std::vector<TextChunk> context;
  std::set<std::string> context_ids;
  for (auto& cand : candidates) {
    auto chunks = index.retrieve_pair_context(target.record_id, cand, opts.context_chunks, ranker);
    if (chunks.empty()) continue;
    with_context.push_back(cand);
    for (auto& c : chunks) {
      evidence[cand].push_back(c.chunk_id);
      if (context_ids.insert(c.chunk_id).second) context.push_back(c);
    }
  }
  if (with_context.empty()) return out;

  // combined context in canonical order
  std::sort(context.begin(), context.end(), [](const TextChunk& a, const TextChunk& b) {
    if (a.doc_id != b.doc_id) return a.doc_id < b.doc_id;
    return a.span_start < b.span_start;
  });

  std::string prompt = build_prompt(target.canonical_name, with_context, context);

  VerdictParseResult parsed;
  bool ok = false;
  for (int attempt = 0; attempt <= opts.max_retries; ++attempt) {
    std::string raw = backend.submit(prompt);
    ++out.queries;
    try {
      parsed = parse_verdicts(raw, target.canonical_name, with_context);
      ok = true;
      break;
    } catch (const VerdictParseError& e) {
      log_warn("verdict parse failure for '%s' (attempt %d): %s", target.canonical_name.c_str(),
               attempt + 1, e.what());
    }
  }
  if (!ok) {
    target.partially_inferred = true;
    out.partial = true;
    return out;
  }

  for (auto& reason : parsed.rejected)
    log_warn("verdict dropped for '%s': %s", target.canonical_name.c_str(), reason.c_str());
  out.rejected = parsed.rejected;

  auto add_unique = [](std::vector<std::string>& v, const std::string& s) {
    for (auto& x : v)
      if (x == s) return false;
    v.push_back(s);
    return true;
  };

  for (auto& v : parsed.verdicts) {
    v.backend = backend.identity();
    v.evidence_chunk_ids = evidence[v.candidate_org_name];
    bool applied = false;
    switch (v.relationship) {
      case Relation::alias:
        if (v.candidate_org_name != target.canonical_name)
          applied = add_unique(target.alias, v.candidate_org_name);
        break;
      case Relation::parent_subsidiary:
        if (v.parent_side == ParentSide::candidate) {
          if (v.parent_name != target.canonical_name)
            applied = add_unique(target.parents, v.parent_name);
        } else {
          // the target is the parent: annotate the child edge; the family
          // builder converts it to a parents entry on the child record
          applied = add_unique(target.child_orgs, v.candidate_org_name);
        }
        break;
      case Relation::no_relation:
        break;
    }
    if (applied) add_unique(target.provenance, v.verdict_id);
    out.verdicts.push_back(v);
  }
  return out;
}

}  // namespace orgmap
