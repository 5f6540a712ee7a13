// Registry ingest: merge WHOIS dumps, the AS-to-org baseline file, and a
// PeeringDB snapshot into the OrgRecord universe. Labeling priority per ASN:
// explicit WHOIS org handle, then baseline org, then PeeringDB org, then the
// WHOIS descr fallback.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "orgmap/jsonl.hpp"
#include "orgmap/org_record.hpp"
#include "orgmap/rpsl.hpp"

namespace orgmap {

struct Ca2oEntry {
  uint32_t asn = 0;
  std::string org_id;
  std::string name;
};

// JSON-lines with `aut`, `org_id`, `name` fields.
inline std::vector<Ca2oEntry> load_ca2o(const std::filesystem::path& p) {
  std::vector<Ca2oEntry> out;
  for_each_jsonl(p, [&](const json& j) {
    Ca2oEntry e;
    if (j.at("aut").is_string()) {
      auto asn = detail::parse_asn(j.at("aut").get<std::string>());
      if (!asn) throw IngestError("bad aut value in " + p.string());
      e.asn = *asn;
    } else {
      e.asn = j.at("aut").get<uint32_t>();
    }
    e.org_id = j.at("org_id").get<std::string>();
    e.name = j.value("name", "");
    out.push_back(std::move(e));
  });
  return out;
}

struct PdbNet {
  uint32_t asn = 0;
  std::string name;
  std::string website;
  std::vector<std::string> aka;
  std::string org_id;
};

struct PdbOrg {
  std::string id;
  std::string name;
  std::string website;
};

struct PdbSnapshot {
  std::vector<PdbNet> nets;
  std::vector<PdbOrg> orgs;

  const PdbOrg* find_org(const std::string& id) const {
    for (auto& o : orgs)
      if (o.id == id) return &o;
    return nullptr;
  }
};

inline std::string json_id_str(const json& j) {
  return j.is_string() ? j.get<std::string>() : std::to_string(j.get<int64_t>());
}

// Local PeeringDB JSON export with `net` and `org` object arrays; the arrays
// may be bare or wrapped in the API's {"data": [...]} envelope.
inline PdbSnapshot load_peeringdb(const std::filesystem::path& p) {
  json root = json::parse(read_file(p));
  auto array_of = [&](const char* key) -> json {
    if (!root.contains(key)) return json::array();
    const json& v = root.at(key);
    if (v.is_array()) return v;
    if (v.is_object() && v.contains("data")) return v.at("data");
    throw IngestError(std::string("peeringdb: unexpected shape for '") + key + "'");
  };
  PdbSnapshot snap;
  for (auto& n : array_of("net")) {
    PdbNet net;
    net.asn = n.at("asn").get<uint32_t>();
    net.name = n.value("name", "");
    net.website = n.value("website", "");
    if (n.contains("aka")) {
      if (n["aka"].is_array())
        for (auto& a : n["aka"]) net.aka.push_back(a.get<std::string>());
      else if (n["aka"].is_string() && !n["aka"].get<std::string>().empty())
        net.aka.push_back(n["aka"].get<std::string>());
    }
    if (n.contains("org_id")) net.org_id = json_id_str(n["org_id"]);
    snap.nets.push_back(std::move(net));
  }
  for (auto& o : array_of("org")) {
    PdbOrg org;
    org.id = json_id_str(o.at("id"));
    org.name = o.value("name", "");
    org.website = o.value("website", "");
    snap.orgs.push_back(std::move(org));
  }
  return snap;
}

// Pick the authoritative registry for an ASN claimed by several dumps: a
// unique covering as-block decides; otherwise fall back to the fixed
// precedence order (ARIN > RIPE > APNIC > LACNIC > AFRINIC > NIRs).
inline RegistryId resolve_asn_registry(uint32_t asn, const std::vector<RegistryId>& claims,
                                       const std::vector<AsBlock>& blocks) {
  if (claims.empty()) throw IngestError("resolve_asn_registry: no claims for AS" + std::to_string(asn));
  if (claims.size() == 1) return claims.front();

  std::set<RegistryId> covering;
  for (auto& b : blocks)
    if (b.start_asn <= asn && asn <= b.end_asn) covering.insert(b.registry);
  std::vector<RegistryId> covered_claims;
  for (auto& c : claims)
    if (covering.count(c)) covered_claims.push_back(c);
  if (covered_claims.size() == 1) return covered_claims.front();

  const std::vector<RegistryId>& pool = covered_claims.empty() ? claims : covered_claims;
  RegistryId best = pool.front();
  for (auto& c : pool) {
    if (c.precedence_rank() < best.precedence_rank() ||
        (c.precedence_rank() == best.precedence_rank() && c.nir_name < best.nir_name))
      best = c;
  }
  return best;
}

struct IngestInputs {
  // one parse result per dump, already tagged with its registry
  std::vector<WhoisParseResult> whois;
  std::vector<Ca2oEntry> ca2o;
  PdbSnapshot pdb;
};

struct IngestStats {
  size_t asns = 0;
  size_t records = 0;
  size_t whois_labeled = 0;
  size_t ca2o_labeled = 0;
  size_t pdb_labeled = 0;
  size_t descr_labeled = 0;
  size_t name_conflicts = 0;
  size_t unlabeled = 0;
};

namespace detail {

struct AsnClaims {
  std::vector<const AsnRecord*> records;  // one per claiming registry
};

}  // namespace detail

// Build the OrgRecord universe. Every ASN seen in any source lands in exactly
// one record; records are keyed so identical inputs yield identical ids.
inline OrgRecordSet build_org_records(const IngestInputs& in, IngestStats* stats = nullptr) {
  // collect claims per ASN and the block lists
  std::map<uint32_t, detail::AsnClaims> claims;
  std::vector<AsBlock> blocks;
  for (auto& dump : in.whois) {
    for (auto& rec : dump.asn_records) claims[rec.asn].records.push_back(&rec);
    blocks.insert(blocks.end(), dump.as_blocks.begin(), dump.as_blocks.end());
  }

  // org handle lookup keyed by (handle, registry); first occurrence wins
  std::map<std::pair<std::string, std::string>, const OrgHandle*> handles;
  for (auto& dump : in.whois)
    for (auto& oh : dump.org_handles)
      handles.emplace(std::make_pair(oh.handle, oh.registry.str()), &oh);

  std::map<uint32_t, const Ca2oEntry*> ca2o_by_asn;
  std::map<std::string, const Ca2oEntry*> ca2o_by_org;
  for (auto& e : in.ca2o) {
    ca2o_by_asn.emplace(e.asn, &e);
    if (!e.org_id.empty()) ca2o_by_org.emplace(e.org_id, &e);
  }

  std::map<uint32_t, const PdbNet*> pdb_by_asn;
  for (auto& n : in.pdb.nets) pdb_by_asn.emplace(n.asn, &n);

  // ASN universe
  std::set<uint32_t> universe;
  for (auto& [asn, _] : claims) universe.insert(asn);
  for (auto& [asn, _] : ca2o_by_asn) universe.insert(asn);
  for (auto& [asn, _] : pdb_by_asn) universe.insert(asn);

  OrgRecordSet set;
  std::map<std::string, size_t> by_id;  // record_id -> index in set.records
  IngestStats st;
  st.asns = universe.size();

  auto get_record = [&](const std::string& id) -> OrgRecord& {
    auto it = by_id.find(id);
    if (it != by_id.end()) return set.records[it->second];
    set.records.emplace_back();
    set.records.back().record_id = id;
    by_id[id] = set.records.size() - 1;
    return set.records.back();
  };

  for (uint32_t asn : universe) {
    const AsnRecord* authoritative = nullptr;
    auto cit = claims.find(asn);
    if (cit != claims.end()) {
      std::vector<RegistryId> regs;
      for (auto* r : cit->second.records) regs.push_back(r->registry);
      RegistryId reg = resolve_asn_registry(asn, regs, blocks);
      for (auto* r : cit->second.records)
        if (r->registry == reg) {
          authoritative = r;
          break;
        }
    }

    if (authoritative && !authoritative->org_handle.empty()) {
      // priority 1: explicit WHOIS org reference
      const std::string& h = authoritative->org_handle;
      std::string reg = authoritative->registry.str();
      std::string id = "whois:" + reg + ":" + h;
      OrgRecord& rec = get_record(id);
      if (rec.canonical_name.empty()) {
        rec.source = OrgSource::whois_orgid;
        auto hit = handles.find(std::make_pair(h, reg));
        rec.canonical_name = (hit != handles.end() && !hit->second->name.empty())
                                 ? hit->second->name
                                 : h;
        // name conflict against the baseline file for the same org id:
        // keep the WHOIS name, keep the other as a flagged provisional alias
        auto cc = ca2o_by_org.find(h);
        if (cc != ca2o_by_org.end() && !cc->second->name.empty() &&
            cc->second->name != rec.canonical_name) {
          rec.aka.push_back(cc->second->name);
          ++st.name_conflicts;
          log_warn("name conflict for handle %s: whois '%s' vs baseline '%s' (kept whois)",
                   h.c_str(), rec.canonical_name.c_str(), cc->second->name.c_str());
        }
      }
      rec.asns.insert(asn);
      rec.registries.insert(reg);
      ++st.whois_labeled;
      continue;
    }

    auto ca = ca2o_by_asn.find(asn);
    if (ca != ca2o_by_asn.end() && !ca->second->org_id.empty()) {
      // priority 2: baseline org
      OrgRecord& rec = get_record("ca2o:" + ca->second->org_id);
      if (rec.canonical_name.empty()) {
        rec.source = OrgSource::ca2o;
        rec.canonical_name = !ca->second->name.empty() ? ca->second->name : ca->second->org_id;
      }
      rec.asns.insert(asn);
      if (authoritative) rec.registries.insert(authoritative->registry.str());
      ++st.ca2o_labeled;
      continue;
    }

    auto pn = pdb_by_asn.find(asn);
    if (pn != pdb_by_asn.end()) {
      // priority 3: PeeringDB org
      const PdbNet* net = pn->second;
      const PdbOrg* org = net->org_id.empty() ? nullptr : in.pdb.find_org(net->org_id);
      std::string id = org ? "pdb:org:" + org->id : "pdb:net:" + std::to_string(net->asn);
      OrgRecord& rec = get_record(id);
      if (rec.canonical_name.empty()) {
        rec.source = OrgSource::peeringdb;
        rec.canonical_name = org && !org->name.empty() ? org->name : net->name;
        if (rec.canonical_name.empty()) rec.canonical_name = id;
      }
      rec.asns.insert(asn);
      if (authoritative) rec.registries.insert(authoritative->registry.str());
      ++st.pdb_labeled;
      continue;
    }

    if (authoritative && !trim(authoritative->descr).empty()) {
      // priority 4: descr fallback, one record per ASN
      std::string reg = authoritative->registry.str();
      OrgRecord& rec = get_record("descr:" + reg + ":" + std::to_string(asn));
      rec.source = OrgSource::descr_fallback;
      rec.canonical_name = trim(authoritative->descr);
      rec.asns.insert(asn);
      rec.registries.insert(reg);
      ++st.descr_labeled;
      continue;
    }

    // claimed by a dump but carries neither org reference nor descr text and
    // appears in no other source: drop from the universe, keep the run going
    ++st.unlabeled;
    log_warn("AS%u cannot be labeled (no org handle, baseline entry, peeringdb net, or descr); skipped",
             asn);
  }

  // attach PeeringDB metadata (websites, aka) to whichever record owns the ASN
  auto add_unique = [](std::vector<std::string>& v, const std::string& s) {
    if (s.empty()) return;
    for (auto& x : v)
      if (x == s) return;
    v.push_back(s);
  };
  for (auto& rec : set.records) {
    for (uint32_t asn : rec.asns) {
      auto pn = pdb_by_asn.find(asn);
      if (pn == pdb_by_asn.end()) continue;
      add_unique(rec.websites, pn->second->website);
      for (auto& a : pn->second->aka)
        if (a != rec.canonical_name) add_unique(rec.aka, a);
      if (!pn->second->org_id.empty()) {
        const PdbOrg* org = in.pdb.find_org(pn->second->org_id);
        if (org) add_unique(rec.websites, org->website);
      }
    }
  }

  set.sort_by_id();
  st.records = set.records.size();
  if (stats) *stats = st;
  return set;
}

// Label a single ASN: which record does it land in under the priority chain?
// Convenience wrapper over build_org_records for lookups and tests.
inline OrgRecord label_asn(uint32_t asn, const IngestInputs& in) {
  OrgRecordSet set = build_org_records(in);
  for (auto& r : set.records)
    if (r.asns.count(asn)) return r;
  throw IngestError("AS" + std::to_string(asn) + " not present in any source");
}

}  // namespace orgmap
