// Relation verdicts: the parsed, validated form of one model judgment about
// a (base, candidate) organization pair.
#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "orgmap/jsonl.hpp"
#include "orgmap/util.hpp"

namespace orgmap {

enum class Relation { alias, parent_subsidiary, no_relation };
enum class ParentSide { none, base, candidate };

inline std::string relation_str(Relation r) {
  switch (r) {
    case Relation::alias: return "Alias";
    case Relation::parent_subsidiary: return "Parent/Subsidiary";
    case Relation::no_relation: return "No_relation";
  }
  return "?";
}

struct RelationVerdict {
  std::string verdict_id;
  std::string base_org_name;
  std::string candidate_org_name;
  Relation relationship = Relation::no_relation;
  ParentSide parent_side = ParentSide::none;
  std::string parent_name;  // equals base or candidate name verbatim when set
  std::string reasoning_alias;
  std::string reasoning_parent;
  std::vector<std::string> evidence_chunk_ids;
  std::string backend;

  json to_json() const {
    json j;
    j["verdict_id"] = verdict_id;
    j["base_org_name"] = base_org_name;
    j["candidate_org_name"] = candidate_org_name;
    j["relationship"] = relation_str(relationship);
    j["parent"] = parent_side == ParentSide::none ? ""
                  : parent_side == ParentSide::base ? "base"
                                                    : "candidate";
    j["parent_name"] = parent_name;
    j["reasoning_alias"] = reasoning_alias;
    j["reasoning_parent"] = reasoning_parent;
    j["evidence_chunk_ids"] = evidence_chunk_ids;
    j["backend"] = backend;
    return j;
  }
};

struct VerdictParseResult {
  std::vector<RelationVerdict> verdicts;
  std::vector<std::string> rejected;  // one reason per dropped object
};

// Parse a raw model response for (base, candidates). The response must be a
// JSON array of verdict objects; anything else throws VerdictParseError (the
// caller's retry policy handles it). Individual objects failing validation
// are dropped and logged, never fatal.
inline VerdictParseResult parse_verdicts(const std::string& raw, const std::string& base,
                                         const std::vector<std::string>& candidates) {
  json root = json::parse(trim(raw), nullptr, false);
  if (root.is_discarded()) throw VerdictParseError("response is not valid JSON");
  if (root.is_object()) root = json::array({root});  // single-object replies
  if (!root.is_array()) throw VerdictParseError("response is not a JSON array");

  std::set<std::string> cand_set(candidates.begin(), candidates.end());
  VerdictParseResult res;
  for (auto& obj : root) {
    if (!obj.is_object()) {
      res.rejected.push_back("non-object array element");
      continue;
    }
    RelationVerdict v;
    v.base_org_name = trim(obj.value("base_org_name", ""));
    v.candidate_org_name = trim(obj.value("candidate_org_name", ""));
    if (v.base_org_name != trim(base)) {
      res.rejected.push_back("base_org_name '" + v.base_org_name + "' does not match query base");
      continue;
    }
    if (!cand_set.count(v.candidate_org_name)) {
      res.rejected.push_back("candidate_org_name '" + v.candidate_org_name +
                             "' not in the query candidate list");
      continue;
    }
    std::string rel = trim(obj.value("relationship", ""));
    if (rel == "Alias")
      v.relationship = Relation::alias;
    else if (rel == "Parent/Subsidiary")
      v.relationship = Relation::parent_subsidiary;
    else if (rel == "No_relation")
      v.relationship = Relation::no_relation;
    else {
      res.rejected.push_back("unknown relationship '" + rel + "' for candidate '" +
                             v.candidate_org_name + "'");
      continue;
    }
    v.reasoning_alias = obj.value("reasoning for Alias", "");
    v.reasoning_parent = obj.value("reasoning for Parent/Subsidiary", "");
    std::string parent = trim(obj.value("parent", ""));
    std::string parent_name = trim(obj.value("parent name", ""));

    if (v.relationship == Relation::parent_subsidiary) {
      if (parent != "base" && parent != "candidate") {
        res.rejected.push_back("Parent/Subsidiary without parent side for candidate '" +
                               v.candidate_org_name + "'");
        continue;
      }
      v.parent_side = parent == "base" ? ParentSide::base : ParentSide::candidate;
      const std::string& expected =
          v.parent_side == ParentSide::base ? v.base_org_name : v.candidate_org_name;
      if (parent_name != expected) {
        res.rejected.push_back("parent name '" + parent_name +
                               "' does not match the named side ('" + expected + "')");
        continue;
      }
      v.parent_name = parent_name;
    } else {
      if (!parent.empty() || !parent_name.empty()) {
        res.rejected.push_back("non-empty parent fields on a " + rel + " verdict for candidate '" +
                               v.candidate_org_name + "'");
        continue;
      }
    }
    v.verdict_id = "v" + hex64(fnv1a64(v.base_org_name + "\x1f" + v.candidate_org_name + "\x1f" +
                                       relation_str(v.relationship)));
    res.verdicts.push_back(std::move(v));
  }
  return res;
}

}  // namespace orgmap
