// Comparison of two ASN-grouping datasets (ours vs a baseline). Both sides
// are first restricted to their common ASNs; each group is then classified as
//   identical  : exact ASN-set match with a group on the other side,
//   container  : exact disjoint union of >= 2 groups on the other side,
//   member     : wholly contained in an opposite container,
//   residual   : anything else.
// Every group lands in exactly one class, so per-side counts always sum to
// the side's group total.
#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "orgmap/family_builder.hpp"
#include "orgmap/jsonl.hpp"
#include "orgmap/registry_ingest.hpp"

namespace orgmap {

struct GroupingDataset {
  std::string name;
  std::map<std::string, std::set<uint32_t>> groups;  // group id -> asns

  std::map<uint32_t, std::string> asn_index() const {
    std::map<uint32_t, std::string> idx;
    for (auto& [gid, asns] : groups)
      for (uint32_t asn : asns) {
        auto [it, inserted] = idx.emplace(asn, gid);
        if (!inserted)
          log_warn("dataset %s: AS%u in both %s and %s; keeping %s", name.c_str(), asn,
                   it->second.c_str(), gid.c_str(), it->second.c_str());
      }
    return idx;
  }

  std::set<uint32_t> asn_universe() const {
    std::set<uint32_t> out;
    for (auto& [_, asns] : groups) out.insert(asns.begin(), asns.end());
    return out;
  }
};

inline GroupingDataset dataset_from_families(const std::vector<OrgFamily>& families,
                                             const std::string& name) {
  GroupingDataset ds;
  ds.name = name;
  std::map<uint32_t, std::string> seen;
  for (auto& f : families) {
    auto& g = ds.groups[f.family_id];
    for (uint32_t asn : f.asns) {
      auto [it, inserted] = seen.emplace(asn, f.family_id);
      if (!inserted) {
        log_warn("families: AS%u in both %s and %s; keeping %s", asn, it->second.c_str(),
                 f.family_id.c_str(), it->second.c_str());
        continue;
      }
      g.insert(asn);
    }
    if (g.empty()) ds.groups.erase(f.family_id);
  }
  return ds;
}

inline GroupingDataset load_grouping_families(const std::string& path, const std::string& name) {
  return dataset_from_families(load_families(path), name);
}

// Baseline in the same JSONL shape as the org-id mapping input.
inline GroupingDataset load_grouping_ca2o(const std::string& path, const std::string& name) {
  GroupingDataset ds;
  ds.name = name;
  for (auto& e : load_ca2o(path)) ds.groups[e.org_id].insert(e.asn);
  return ds;
}

// Two-column CSV: asn,group. A header line and '#' comments are skipped.
inline GroupingDataset load_grouping_csv(const std::string& path, const std::string& name) {
  GroupingDataset ds;
  ds.name = name;
  size_t lineno = 0;
  for (auto& line : split_lines(read_file(path))) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    auto comma = t.find(',');
    if (comma == std::string::npos)
      throw IngestError(path + ":" + std::to_string(lineno) + ": expected asn,group");
    std::string asn_field = trim(t.substr(0, comma));
    std::string group = trim(t.substr(comma + 1));
    auto asn = detail::parse_asn(asn_field);
    if (!asn) {
      if (lineno == 1) continue;  // header
      throw IngestError(path + ":" + std::to_string(lineno) + ": bad ASN '" + asn_field + "'");
    }
    if (group.empty())
      throw IngestError(path + ":" + std::to_string(lineno) + ": empty group id");
    ds.groups[group].insert(*asn);
  }
  return ds;
}

// Restrict both datasets to the ASNs they share; drops groups that end up
// empty. Classification below assumes aligned inputs.
inline std::pair<GroupingDataset, GroupingDataset> align_common(const GroupingDataset& a,
                                                                const GroupingDataset& b) {
  std::set<uint32_t> ua = a.asn_universe(), ub = b.asn_universe(), common;
  std::set_intersection(ua.begin(), ua.end(), ub.begin(), ub.end(),
                        std::inserter(common, common.begin()));
  auto restrict_ds = [&](const GroupingDataset& ds) {
    GroupingDataset out;
    out.name = ds.name;
    for (auto& [gid, asns] : ds.groups) {
      std::set<uint32_t> kept;
      std::set_intersection(asns.begin(), asns.end(), common.begin(), common.end(),
                            std::inserter(kept, kept.begin()));
      if (!kept.empty()) out.groups[gid] = std::move(kept);
    }
    return out;
  };
  return {restrict_ds(a), restrict_ds(b)};
}

enum class GroupClass { identical, container, member, residual };

inline const char* group_class_str(GroupClass c) {
  switch (c) {
    case GroupClass::identical: return "identical";
    case GroupClass::container: return "container";
    case GroupClass::member: return "member";
    case GroupClass::residual: return "residual";
  }
  return "residual";
}

struct Aggregation {
  std::string container_side;  // name of the dataset holding the container
  std::string container_id;
  std::vector<std::string> member_ids;  // opposite-side groups, sorted
};

struct CompareSide {
  std::string name;
  size_t total_groups = 0;
  size_t identical = 0;
  size_t containers = 0;
  size_t members = 0;
  size_t residual = 0;
  std::map<std::string, GroupClass> classes;

  bool accounting_ok() const {
    return identical + containers + members + residual == total_groups;
  }
};

struct CompareReport {
  size_t common_asns = 0;
  CompareSide a, b;
  std::vector<std::pair<std::string, std::string>> identical_pairs;  // (a group, b group)
  std::vector<Aggregation> aggregations;
};

namespace detail {

// Groups on the opposite side that intersect `asns`, with full-containment
// checks. Aligned inputs partition the same universe, so an opposite group
// either sits inside `asns` or crosses its boundary.
struct Overlap {
  std::vector<std::string> inside;  // fully contained opposite groups, sorted
  bool crossed = false;
  size_t covered = 0;  // ASNs of `asns` covered by the inside groups
};

inline Overlap overlap_of(const std::set<uint32_t>& asns, const GroupingDataset& other,
                          const std::map<uint32_t, std::string>& other_index) {
  Overlap ov;
  std::set<std::string> touched;
  for (uint32_t asn : asns) {
    auto it = other_index.find(asn);
    if (it != other_index.end()) touched.insert(it->second);
  }
  for (auto& gid : touched) {
    const auto& og = other.groups.at(gid);
    bool contained = std::includes(asns.begin(), asns.end(), og.begin(), og.end());
    if (contained) {
      ov.inside.push_back(gid);
      ov.covered += og.size();
    } else {
      ov.crossed = true;
    }
  }
  return ov;
}

}  // namespace detail

inline CompareReport compare_groupings(const GroupingDataset& a_in, const GroupingDataset& b_in) {
  auto [a, b] = align_common(a_in, b_in);
  CompareReport rep;
  rep.common_asns = a.asn_universe().size();
  rep.a.name = a.name;
  rep.b.name = b.name;
  rep.a.total_groups = a.groups.size();
  rep.b.total_groups = b.groups.size();

  auto a_index = a.asn_index();
  auto b_index = b.asn_index();

  // container/member discovery, both directions
  std::map<std::string, GroupClass>& ca = rep.a.classes;
  std::map<std::string, GroupClass>& cb = rep.b.classes;

  auto classify_side = [&](const GroupingDataset& self, const GroupingDataset& other,
                           const std::map<uint32_t, std::string>& other_index,
                           std::map<std::string, GroupClass>& self_classes,
                           std::map<std::string, GroupClass>& other_classes, bool is_a) {
    for (auto& [gid, asns] : self.groups) {
      if (self_classes.count(gid)) continue;  // already classified (identical/member)
      auto ov = detail::overlap_of(asns, other, other_index);
      if (!ov.crossed && ov.inside.size() == 1 && ov.covered == asns.size()) {
        self_classes[gid] = GroupClass::identical;
        other_classes[ov.inside[0]] = GroupClass::identical;
        if (is_a)
          rep.identical_pairs.emplace_back(gid, ov.inside[0]);
        else
          rep.identical_pairs.emplace_back(ov.inside[0], gid);
      } else if (!ov.crossed && ov.inside.size() >= 2 && ov.covered == asns.size()) {
        self_classes[gid] = GroupClass::container;
        Aggregation agg;
        agg.container_side = self.name;
        agg.container_id = gid;
        agg.member_ids = ov.inside;
        for (auto& mid : ov.inside) other_classes[mid] = GroupClass::member;
        rep.aggregations.push_back(std::move(agg));
      }
    }
  };
  classify_side(a, b, b_index, ca, cb, true);
  classify_side(b, a, a_index, cb, ca, false);

  for (auto& [gid, _] : a.groups)
    if (!ca.count(gid)) ca[gid] = GroupClass::residual;
  for (auto& [gid, _] : b.groups)
    if (!cb.count(gid)) cb[gid] = GroupClass::residual;

  auto tally = [](CompareSide& side) {
    for (auto& [_, c] : side.classes) {
      switch (c) {
        case GroupClass::identical: ++side.identical; break;
        case GroupClass::container: ++side.containers; break;
        case GroupClass::member: ++side.members; break;
        case GroupClass::residual: ++side.residual; break;
      }
    }
  };
  tally(rep.a);
  tally(rep.b);
  std::sort(rep.identical_pairs.begin(), rep.identical_pairs.end());
  std::sort(rep.aggregations.begin(), rep.aggregations.end(), [](const auto& x, const auto& y) {
    return std::tie(x.container_side, x.container_id) < std::tie(y.container_side, y.container_id);
  });
  return rep;
}

inline json to_json(const CompareReport& rep) {
  auto side_json = [](const CompareSide& s) {
    json j;
    j["name"] = s.name;
    j["total_groups"] = s.total_groups;
    j["identical"] = s.identical;
    j["containers"] = s.containers;
    j["members"] = s.members;
    j["residual"] = s.residual;
    j["accounting_ok"] = s.accounting_ok();
    json classes = json::object();
    for (auto& [gid, c] : s.classes) classes[gid] = group_class_str(c);
    j["classes"] = classes;
    return j;
  };
  json j;
  j["common_asns"] = rep.common_asns;
  j["a"] = side_json(rep.a);
  j["b"] = side_json(rep.b);
  j["identical_pairs"] = json::array();
  for (auto& [x, y] : rep.identical_pairs) j["identical_pairs"].push_back(json::array({x, y}));
  j["aggregations"] = json::array();
  for (auto& agg : rep.aggregations) {
    json aj;
    aj["container_side"] = agg.container_side;
    aj["container_id"] = agg.container_id;
    aj["member_ids"] = agg.member_ids;
    j["aggregations"].push_back(aj);
  }
  return j;
}

inline std::string render_compare_table(const CompareReport& rep) {
  std::ostringstream os;
  os << "common ASNs: " << rep.common_asns << "\n";
  auto row = [&](const CompareSide& s) {
    os << s.name << ": groups=" << s.total_groups << " identical=" << s.identical
       << " containers=" << s.containers << " members=" << s.members
       << " residual=" << s.residual << (s.accounting_ok() ? "" : "  [accounting mismatch]")
       << "\n";
  };
  row(rep.a);
  row(rep.b);
  for (auto& agg : rep.aggregations) {
    os << "  " << agg.container_side << "/" << agg.container_id << " = ";
    for (size_t i = 0; i < agg.member_ids.size(); ++i)
      os << (i ? " + " : "") << agg.member_ids[i];
    os << "\n";
  }
  return os.str();
}

}  // namespace orgmap
