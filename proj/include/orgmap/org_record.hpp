// OrgRecord: the unit of identity flowing through the whole pipeline —
// one provisional organization with its ASNs, names, and inferred relations.
#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "orgmap/jsonl.hpp"
#include "orgmap/util.hpp"

namespace orgmap {

enum class OrgSource { whois_orgid, ca2o, peeringdb, descr_fallback };

inline std::string org_source_str(OrgSource s) {
  switch (s) {
    case OrgSource::whois_orgid: return "whois_orgid";
    case OrgSource::ca2o: return "ca2o";
    case OrgSource::peeringdb: return "peeringdb";
    case OrgSource::descr_fallback: return "descr_fallback";
  }
  return "?";
}

inline OrgSource org_source_parse(const std::string& s) {
  if (s == "whois_orgid") return OrgSource::whois_orgid;
  if (s == "ca2o") return OrgSource::ca2o;
  if (s == "peeringdb") return OrgSource::peeringdb;
  if (s == "descr_fallback") return OrgSource::descr_fallback;
  throw ConfigError("unknown org source: " + s);
}

struct OrgRecord {
  std::string record_id;
  std::string canonical_name;
  OrgSource source = OrgSource::descr_fallback;
  std::set<std::string> registries;  // registry strings that contributed
  std::set<uint32_t> asns;
  std::vector<std::string> websites;
  std::vector<std::string> aka;      // PeeringDB aka + flagged name conflicts
  std::vector<std::string> alias;    // validated aliases (relation inference)
  std::vector<std::string> parents;  // validated parent names
  std::vector<std::string> candidate_orgs;
  std::vector<std::string> child_orgs;  // parent_side==base annotations
  std::vector<std::string> provenance;  // verdict ids that touched this record
  bool partially_inferred = false;

  json to_json() const {
    json j;
    j["record_id"] = record_id;
    j["canonical_name"] = canonical_name;
    j["source"] = org_source_str(source);
    j["registries"] = registries;
    j["asns"] = asns;
    j["websites"] = websites;
    j["aka"] = aka;
    j["alias"] = alias;
    j["parents"] = parents;
    j["candidate_orgs"] = candidate_orgs;
    j["child_orgs"] = child_orgs;
    j["provenance"] = provenance;
    j["partially_inferred"] = partially_inferred;
    return j;
  }

  static OrgRecord from_json(const json& j) {
    OrgRecord r;
    r.record_id = j.at("record_id").get<std::string>();
    r.canonical_name = j.at("canonical_name").get<std::string>();
    r.source = org_source_parse(j.at("source").get<std::string>());
    for (auto& x : j.value("registries", json::array())) r.registries.insert(x.get<std::string>());
    for (auto& x : j.value("asns", json::array())) r.asns.insert(x.get<uint32_t>());
    for (auto& x : j.value("websites", json::array())) r.websites.push_back(x.get<std::string>());
    for (auto& x : j.value("aka", json::array())) r.aka.push_back(x.get<std::string>());
    for (auto& x : j.value("alias", json::array())) r.alias.push_back(x.get<std::string>());
    for (auto& x : j.value("parents", json::array())) r.parents.push_back(x.get<std::string>());
    for (auto& x : j.value("candidate_orgs", json::array()))
      r.candidate_orgs.push_back(x.get<std::string>());
    for (auto& x : j.value("child_orgs", json::array())) r.child_orgs.push_back(x.get<std::string>());
    for (auto& x : j.value("provenance", json::array())) r.provenance.push_back(x.get<std::string>());
    r.partially_inferred = j.value("partially_inferred", false);
    return r;
  }
};

// Record collection with id/asn lookups. Records are kept sorted by record_id
// so serialized output is independent of input arrival order.
struct OrgRecordSet {
  std::vector<OrgRecord> records;

  void sort_by_id() {
    std::sort(records.begin(), records.end(),
              [](const OrgRecord& a, const OrgRecord& b) { return a.record_id < b.record_id; });
  }

  OrgRecord* find(const std::string& record_id) {
    for (auto& r : records)
      if (r.record_id == record_id) return &r;
    return nullptr;
  }
  const OrgRecord* find(const std::string& record_id) const {
    return const_cast<OrgRecordSet*>(this)->find(record_id);
  }

  std::map<uint32_t, const OrgRecord*> asn_index() const {
    std::map<uint32_t, const OrgRecord*> idx;
    for (auto& r : records)
      for (uint32_t a : r.asns) idx[a] = &r;
    return idx;
  }

  void save(const std::filesystem::path& p) const {
    JsonlWriter w(p);
    for (auto& r : records) w.write(r.to_json());
    w.close();
  }

  static OrgRecordSet load(const std::filesystem::path& p) {
    OrgRecordSet set;
    for_each_jsonl(p, [&](const json& j) { set.records.push_back(OrgRecord::from_json(j)); });
    return set;
  }
};

}  // namespace orgmap
