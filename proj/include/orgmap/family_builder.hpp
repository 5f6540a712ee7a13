// Organization-family construction in three stages:
//   1. per-record alias clustering; records sharing a primary alias merge
//      into alias-org-sets,
//   2. majority-voted promotion of secondary aliases (rebrands), then set
//      merging on shared alias strings to a fixpoint,
//   3. majority-voted parent references, child->parent edges between sets,
//      cycle resolution, and weakly-connected components as families.
// Pure, single-threaded, deterministic; inputs are never mutated.
#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "orgmap/jsonl.hpp"
#include "orgmap/normalize.hpp"
#include "orgmap/org_record.hpp"
#include "orgmap/union_find.hpp"

namespace orgmap {

enum class AliasKind { primary, secondary };

struct AliasSet {
  std::set<std::string> members;  // always >= 2 strings
  AliasKind kind = AliasKind::secondary;
};

struct AliasOrgSet {
  std::string set_id;  // "set-" + smallest member record_id
  std::set<std::string> member_records;
  std::set<std::string> set_alias;    // canonicals + primary aliases + promoted clusters
  std::set<std::string> set_parents;  // filled in stage 3
};

namespace detail {

// Key for "normalized string equality" that keeps token-less names apart:
// names with an empty normalized form compare by raw string (mirrors the
// jaccard empty/empty rule).
inline std::string name_key(const std::string& name, const Normalizer& norm) {
  std::string form = norm.form(name);
  return form.empty() ? "raw:" + name : "form:" + form;
}

}  // namespace detail

// Single-link clustering: names land in one cluster when connected by a
// chain of pairwise jaccard >= threshold. Deterministic output: each
// cluster's members are sorted and clusters are ordered by smallest member.
inline std::vector<std::set<std::string>> cluster_names(const std::vector<std::string>& names,
                                                        double threshold,
                                                        const Normalizer& norm = Normalizer()) {
  std::vector<std::string> uniq(names.begin(), names.end());
  std::sort(uniq.begin(), uniq.end());
  uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
  UnionFind uf(uniq.size());
  for (size_t i = 0; i < uniq.size(); ++i)
    for (size_t j = i + 1; j < uniq.size(); ++j)
      if (jaccard(uniq[i], uniq[j], norm) >= threshold) uf.unite(i, j);
  std::map<size_t, std::set<std::string>> groups;
  for (size_t i = 0; i < uniq.size(); ++i) groups[uf.find(i)].insert(uniq[i]);
  std::vector<std::set<std::string>> out;
  for (auto& [_, g] : groups) out.push_back(g);
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return *a.begin() < *b.begin();
  });
  return out;
}

// Cluster one record's names (aliases plus the canonical name). Single-string
// clusters are noise and never become AliasSets; the cluster holding the
// record's canonical name is its primary-alias set.
inline std::vector<AliasSet> build_record_alias_sets(const OrgRecord& record, double threshold,
                                                     const Normalizer& norm) {
  std::vector<std::string> names = record.alias;
  names.push_back(record.canonical_name);
  std::vector<AliasSet> out;
  for (auto& cluster : cluster_names(names, threshold, norm)) {
    if (cluster.size() < 2) continue;
    AliasSet as;
    as.members = cluster;
    as.kind = cluster.count(record.canonical_name) ? AliasKind::primary : AliasKind::secondary;
    out.push_back(std::move(as));
  }
  return out;
}

struct Stage1Result {
  std::vector<AliasOrgSet> sets;  // ordered by set_id
  std::map<std::string, std::vector<AliasSet>> record_alias_sets;
};

// Stage 1: merge records whose primary-alias sets share a name.
inline Stage1Result stage1(const OrgRecordSet& records, double threshold,
                           const Normalizer& norm = Normalizer()) {
  Stage1Result res;
  const auto& recs = records.records;
  std::vector<std::set<std::string>> primary_keys(recs.size());
  for (size_t i = 0; i < recs.size(); ++i) {
    auto alias_sets = build_record_alias_sets(recs[i], threshold, norm);
    for (auto& as : alias_sets)
      if (as.kind == AliasKind::primary)
        for (auto& name : as.members) primary_keys[i].insert(detail::name_key(name, norm));
    res.record_alias_sets[recs[i].record_id] = std::move(alias_sets);
  }

  UnionFind uf(recs.size());
  std::map<std::string, size_t> first_owner;
  for (size_t i = 0; i < recs.size(); ++i)
    for (auto& key : primary_keys[i]) {
      auto [it, inserted] = first_owner.emplace(key, i);
      if (!inserted) uf.unite(it->second, i);
    }

  std::map<size_t, AliasOrgSet> by_root;
  for (size_t i = 0; i < recs.size(); ++i) {
    AliasOrgSet& set = by_root[uf.find(i)];
    set.member_records.insert(recs[i].record_id);
    set.set_alias.insert(recs[i].canonical_name);
    for (auto& as : res.record_alias_sets[recs[i].record_id])
      if (as.kind == AliasKind::primary)
        set.set_alias.insert(as.members.begin(), as.members.end());
  }
  for (auto& [_, set] : by_root) {
    set.set_id = "set-" + *set.member_records.begin();
    res.sets.push_back(std::move(set));
  }
  std::sort(res.sets.begin(), res.sets.end(),
            [](const AliasOrgSet& a, const AliasOrgSet& b) { return a.set_id < b.set_id; });
  return res;
}

// Stage 2: within each set, cluster the member records' secondary aliases and
// keep clusters used by at least half of the records; survivors join
// set_alias. Sets sharing any (normalized) set_alias string then merge, to a
// fixpoint, without re-voting.
inline std::vector<AliasOrgSet> stage2(const Stage1Result& s1, double threshold,
                                       const Normalizer& norm = Normalizer()) {
  std::vector<AliasOrgSet> sets = s1.sets;

  for (auto& set : sets) {
    std::vector<std::string> strings;
    std::map<std::string, std::set<std::string>> contributors;  // string -> records
    for (auto& rid : set.member_records) {
      auto it = s1.record_alias_sets.find(rid);
      if (it == s1.record_alias_sets.end()) continue;
      for (auto& as : it->second) {
        if (as.kind != AliasKind::secondary) continue;
        for (auto& name : as.members) {
          strings.push_back(name);
          contributors[name].insert(rid);
        }
      }
    }
    if (strings.empty()) continue;
    for (auto& cluster : cluster_names(strings, threshold, norm)) {
      std::set<std::string> users;
      for (auto& name : cluster) {
        auto it = contributors.find(name);
        if (it != contributors.end()) users.insert(it->second.begin(), it->second.end());
      }
      // majority vote: strictly less than half of the member records -> noise
      if (2 * users.size() < set.member_records.size()) continue;
      set.set_alias.insert(cluster.begin(), cluster.end());
    }
  }

  // merge sets sharing an alias string (by normalized key), transitively
  UnionFind uf(sets.size());
  std::map<std::string, size_t> first_owner;
  for (size_t i = 0; i < sets.size(); ++i)
    for (auto& name : sets[i].set_alias) {
      auto [it, inserted] = first_owner.emplace(detail::name_key(name, norm), i);
      if (!inserted) uf.unite(it->second, i);
    }
  std::map<size_t, AliasOrgSet> by_root;
  for (size_t i = 0; i < sets.size(); ++i) {
    AliasOrgSet& merged = by_root[uf.find(i)];
    merged.member_records.insert(sets[i].member_records.begin(), sets[i].member_records.end());
    merged.set_alias.insert(sets[i].set_alias.begin(), sets[i].set_alias.end());
  }
  std::vector<AliasOrgSet> out;
  for (auto& [_, set] : by_root) {
    set.set_id = "set-" + *set.member_records.begin();
    out.push_back(std::move(set));
  }
  std::sort(out.begin(), out.end(),
            [](const AliasOrgSet& a, const AliasOrgSet& b) { return a.set_id < b.set_id; });
  return out;
}

struct OrgFamily {
  std::string family_id;  // "fam-" + smallest member set_id
  std::string display_name;
  std::vector<AliasOrgSet> member_sets;                    // ordered by set_id
  std::vector<std::pair<std::string, std::string>> edges;  // (child set, parent set)
  std::set<uint32_t> asns;
  std::set<std::string> provenance;  // verdict ids across member records
};

struct DroppedEdge {
  std::string child;
  std::string parent;
  size_t support = 0;
  std::string reason;
};

struct Stage3Result {
  std::vector<OrgFamily> families;  // ordered by family_id
  std::vector<DroppedEdge> dropped_edges;
  std::vector<std::string> ambiguous_matches;  // log lines
};

// Convert parent_side==base annotations (child_orgs on the parent record)
// into parents entries on the matching child records. Runs before stage 3.
inline void propagate_child_annotations(OrgRecordSet& records,
                                        const Normalizer& norm = Normalizer()) {
  std::map<std::string, std::vector<size_t>> by_key;
  for (size_t i = 0; i < records.records.size(); ++i)
    by_key[detail::name_key(records.records[i].canonical_name, norm)].push_back(i);
  for (auto& rec : records.records) {
    for (auto& child_name : rec.child_orgs) {
      auto it = by_key.find(detail::name_key(child_name, norm));
      if (it == by_key.end()) {
        log_warn("child annotation '%s' on record %s matches no record; dropped",
                 child_name.c_str(), rec.record_id.c_str());
        continue;
      }
      for (size_t idx : it->second) {
        OrgRecord& child = records.records[idx];
        if (child.record_id == rec.record_id) continue;
        if (rec.canonical_name == child.canonical_name) continue;
        bool dup = false;
        for (auto& p : child.parents) dup = dup || p == rec.canonical_name;
        if (!dup) child.parents.push_back(rec.canonical_name);
      }
    }
  }
}

namespace detail {

struct EdgeInfo {
  std::set<std::string> supporters;  // child-set records backing the edge
};

// One pass of cycle detection: returns some directed cycle as a list of
// (child, parent) edges, or empty when the graph is acyclic.
inline std::vector<std::pair<std::string, std::string>> find_cycle(
    const std::map<std::string, std::set<std::string>>& adj) {
  std::map<std::string, int> color;  // 0 new, 1 on stack, 2 done
  std::vector<std::string> stack;
  std::vector<std::pair<std::string, std::string>> cycle;

  std::function<bool(const std::string&)> dfs = [&](const std::string& u) -> bool {
    color[u] = 1;
    stack.push_back(u);
    auto it = adj.find(u);
    if (it != adj.end()) {
      for (auto& v : it->second) {
        if (color[v] == 1) {
          auto pos = std::find(stack.begin(), stack.end(), v);
          for (auto p = pos; p + 1 != stack.end(); ++p) cycle.push_back({*p, *(p + 1)});
          cycle.push_back({stack.back(), v});
          // orient as recorded: edges go child -> parent along the stack
          return true;
        }
        if (color[v] == 0 && dfs(v)) return true;
      }
    }
    stack.pop_back();
    color[u] = 2;
    return false;
  };
  for (auto& [u, _] : adj)
    if (color[u] == 0 && dfs(u)) return cycle;
  return {};
}

}  // namespace detail

// Stage 3: majority-voted parent references per set, child->parent edges at
// jaccard >= threshold against other sets' aliases, deterministic cycle
// resolution, and weakly-connected components as organization families.
inline Stage3Result stage3(const std::vector<AliasOrgSet>& sets_in, const OrgRecordSet& records,
                           double threshold, const Normalizer& norm = Normalizer()) {
  Stage3Result res;
  std::vector<AliasOrgSet> sets = sets_in;

  std::map<std::string, const OrgRecord*> by_id;
  for (auto& r : records.records) by_id[r.record_id] = &r;

  // parent references with majority vote
  std::map<std::string, std::map<std::string, std::set<std::string>>> contributors_by_set;
  for (auto& set : sets) {
    std::vector<std::string> strings;
    auto& contributors = contributors_by_set[set.set_id];
    for (auto& rid : set.member_records) {
      auto it = by_id.find(rid);
      if (it == by_id.end()) continue;
      for (auto& p : it->second->parents) {
        strings.push_back(p);
        contributors[p].insert(rid);
      }
    }
    if (strings.empty()) continue;
    for (auto& cluster : cluster_names(strings, threshold, norm)) {
      std::set<std::string> users;
      for (auto& name : cluster) {
        auto it = contributors.find(name);
        if (it != contributors.end()) users.insert(it->second.begin(), it->second.end());
      }
      if (2 * users.size() < set.member_records.size()) continue;
      set.set_parents.insert(cluster.begin(), cluster.end());
    }
  }

  // edges: each surviving parent name points at the best-matching other set
  std::map<std::pair<std::string, std::string>, detail::EdgeInfo> edges;
  for (auto& child : sets) {
    for (auto& pname : child.set_parents) {
      const AliasOrgSet* best = nullptr;
      double best_score = 0.0;
      size_t matches = 0;
      for (auto& parent : sets) {
        if (parent.set_id == child.set_id) continue;
        double score = 0.0;
        for (auto& alias : parent.set_alias)
          score = std::max(score, jaccard(pname, alias, norm));
        if (score < threshold) continue;
        ++matches;
        bool better = false;
        if (!best)
          better = true;
        else if (score != best_score)
          better = score > best_score;
        else if (parent.member_records.size() != best->member_records.size())
          better = parent.member_records.size() > best->member_records.size();
        else
          better = parent.set_id < best->set_id;
        if (better) {
          best = &parent;
          best_score = score;
        }
      }
      if (!best) continue;
      if (matches > 1) {
        res.ambiguous_matches.push_back("parent '" + pname + "' of " + child.set_id + " matched " +
                                        std::to_string(matches) + " sets; kept " + best->set_id);
        log_warn("%s", res.ambiguous_matches.back().c_str());
      }
      auto& info = edges[{child.set_id, best->set_id}];
      auto cit = contributors_by_set[child.set_id].find(pname);
      if (cit != contributors_by_set[child.set_id].end())
        info.supporters.insert(cit->second.begin(), cit->second.end());
    }
  }

  // deterministic cycle resolution: drop the weakest edge of each cycle
  std::map<std::string, const AliasOrgSet*> set_by_id;
  for (auto& s : sets) set_by_id[s.set_id] = &s;
  auto build_adj = [&]() {
    std::map<std::string, std::set<std::string>> adj;
    for (auto& s : sets) adj[s.set_id];  // ensure every node exists
    for (auto& [key, _] : edges) adj[key.first].insert(key.second);
    return adj;
  };
  while (true) {
    auto cycle = detail::find_cycle(build_adj());
    if (cycle.empty()) break;
    const std::pair<std::string, std::string>* victim = nullptr;
    size_t victim_support = 0;
    for (auto& e : cycle) {
      size_t support = edges[e].supporters.size();
      bool worse = false;
      if (!victim)
        worse = true;
      else if (support != victim_support)
        worse = support < victim_support;
      else {
        size_t child_sz = set_by_id[e.first]->member_records.size();
        size_t vchild_sz = set_by_id[victim->first]->member_records.size();
        if (child_sz != vchild_sz)
          worse = child_sz > vchild_sz;  // bigger child set loses its claim
        else
          worse = e < *victim;
      }
      if (worse) {
        victim = &e;
        victim_support = support;
      }
    }
    DroppedEdge dropped;
    dropped.child = victim->first;
    dropped.parent = victim->second;
    dropped.support = victim_support;
    dropped.reason = "cycle";
    log_warn("dropping cycle edge %s -> %s (support %zu)", dropped.child.c_str(),
             dropped.parent.c_str(), dropped.support);
    edges.erase(*victim);
    res.dropped_edges.push_back(std::move(dropped));
  }

  // weakly-connected components over remaining edges
  std::map<std::string, size_t> index_of;
  for (size_t i = 0; i < sets.size(); ++i) index_of[sets[i].set_id] = i;
  UnionFind uf(sets.size());
  for (auto& [key, _] : edges) uf.unite(index_of[key.first], index_of[key.second]);

  std::map<size_t, std::vector<size_t>> components;
  for (size_t i = 0; i < sets.size(); ++i) components[uf.find(i)].push_back(i);

  for (auto& [_, members] : components) {
    OrgFamily fam;
    std::set<std::string> outgoing;  // member sets that have a parent edge
    for (size_t i : members) fam.member_sets.push_back(sets[i]);
    std::sort(fam.member_sets.begin(), fam.member_sets.end(),
              [](const AliasOrgSet& a, const AliasOrgSet& b) { return a.set_id < b.set_id; });
    for (auto& [key, _info] : edges)
      if (uf.find(index_of[key.first]) == uf.find(members[0])) {
        fam.edges.push_back(key);
        outgoing.insert(key.first);
      }
    std::sort(fam.edges.begin(), fam.edges.end());

    auto set_display = [&](const AliasOrgSet& s) {
      const OrgRecord* best = nullptr;
      for (auto& rid : s.member_records) {
        auto it = by_id.find(rid);
        if (it == by_id.end()) continue;
        if (!best || it->second->asns.size() > best->asns.size() ||
            (it->second->asns.size() == best->asns.size() && it->second->record_id < best->record_id))
          best = it->second;
      }
      return best ? best->canonical_name : s.set_id;
    };

    for (auto& s : fam.member_sets) {
      for (auto& rid : s.member_records) {
        auto it = by_id.find(rid);
        if (it == by_id.end()) continue;
        fam.asns.insert(it->second->asns.begin(), it->second->asns.end());
        fam.provenance.insert(it->second->provenance.begin(), it->second->provenance.end());
      }
    }

    // display name: the unique DAG root when there is one, else the set with
    // the most ASNs
    std::vector<const AliasOrgSet*> roots;
    for (auto& s : fam.member_sets)
      if (!outgoing.count(s.set_id)) roots.push_back(&s);
    const AliasOrgSet* name_set = nullptr;
    if (roots.size() == 1) {
      name_set = roots[0];
    } else {
      size_t best_asns = 0;
      for (auto& s : fam.member_sets) {
        size_t asn_count = 0;
        for (auto& rid : s.member_records) {
          auto it = by_id.find(rid);
          if (it != by_id.end()) asn_count += it->second->asns.size();
        }
        if (!name_set || asn_count > best_asns) {
          name_set = &s;
          best_asns = asn_count;
        }
      }
    }
    fam.display_name = name_set ? set_display(*name_set) : "";
    fam.family_id = "fam-" + fam.member_sets.front().set_id;
    res.families.push_back(std::move(fam));
  }
  std::sort(res.families.begin(), res.families.end(),
            [](const OrgFamily& a, const OrgFamily& b) { return a.family_id < b.family_id; });
  return res;
}

inline json to_json(const AliasOrgSet& s) {
  json j;
  j["set_id"] = s.set_id;
  j["member_records"] = s.member_records;
  j["set_alias"] = s.set_alias;
  j["set_parents"] = s.set_parents;
  return j;
}

inline AliasOrgSet alias_org_set_from_json(const json& j) {
  AliasOrgSet s;
  s.set_id = j.at("set_id").get<std::string>();
  s.member_records = j.at("member_records").get<std::set<std::string>>();
  s.set_alias = j.at("set_alias").get<std::set<std::string>>();
  s.set_parents = j.value("set_parents", std::set<std::string>{});
  return s;
}

inline json to_json(const OrgFamily& f) {
  json j;
  j["family_id"] = f.family_id;
  j["display_name"] = f.display_name;
  j["member_sets"] = json::array();
  for (auto& s : f.member_sets) j["member_sets"].push_back(to_json(s));
  j["edges"] = json::array();
  for (auto& [child, parent] : f.edges) j["edges"].push_back(json::array({child, parent}));
  j["asns"] = f.asns;
  j["provenance"] = f.provenance;
  return j;
}

inline OrgFamily org_family_from_json(const json& j) {
  OrgFamily f;
  f.family_id = j.at("family_id").get<std::string>();
  f.display_name = j.value("display_name", "");
  for (auto& sj : j.at("member_sets")) f.member_sets.push_back(alias_org_set_from_json(sj));
  for (auto& ej : j.value("edges", json::array()))
    f.edges.emplace_back(ej.at(0).get<std::string>(), ej.at(1).get<std::string>());
  f.asns = j.value("asns", std::set<uint32_t>{});
  f.provenance = j.value("provenance", std::set<std::string>{});
  return f;
}

inline void save_families(const std::vector<OrgFamily>& families, const std::string& path) {
  std::vector<json> rows;
  for (auto& f : families) rows.push_back(to_json(f));
  write_jsonl(path, rows);
}

inline std::vector<OrgFamily> load_families(const std::string& path) {
  std::vector<OrgFamily> out;
  for_each_jsonl(path, [&](const json& j) { out.push_back(org_family_from_json(j)); });
  return out;
}

}  // namespace orgmap
