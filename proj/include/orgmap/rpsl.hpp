// WHOIS bulk-dump parser. Handles the RPSL paragraph format used by RIPE,
// APNIC, AFRINIC, LACNIC and the NIRs (aut-num / organisation / as-block
// objects) plus the ARIN bulk schema (ASNumber/ASHandle + OrgID/OrgName
// objects). Records are blank-line separated key:value paragraphs with
// whitespace continuation lines; '%' and '#' start comments.
#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "orgmap/registry.hpp"
#include "orgmap/util.hpp"

namespace orgmap {

struct AsnRecord {
  uint32_t asn = 0;
  RegistryId registry;
  std::string descr;       // first descr line only
  std::string org_handle;  // empty when the object carries no org reference
  std::pair<size_t, size_t> source_line_span{0, 0};  // [first,last] 1-based
};

struct OrgHandle {
  std::string handle;
  RegistryId registry;
  std::string name;
  std::vector<std::string> emails;
  std::string address;
};

struct AsBlock {
  uint32_t start_asn = 0;
  uint32_t end_asn = 0;
  RegistryId registry;
};

struct WhoisParseResult {
  std::vector<AsnRecord> asn_records;
  std::vector<OrgHandle> org_handles;
  std::vector<AsBlock> as_blocks;
  size_t malformed_skipped = 0;
};

namespace detail {

struct Attr {
  std::string key;  // lowercased
  std::string value;
};

struct Paragraph {
  std::vector<Attr> attrs;
  size_t first_line = 0;
  size_t last_line = 0;

  const std::string* find(const std::string& key) const {
    for (auto& a : attrs)
      if (a.key == key) return &a.value;
    return nullptr;
  }
};

// Parse "AS123" or "123"; full 32-bit range, zero rejected.
inline std::optional<uint32_t> parse_asn(const std::string& raw) {
  std::string v = trim(raw);
  if (starts_with_ci(v, "as")) v = v.substr(2);
  if (v.empty() || v.size() > 10) return std::nullopt;
  uint64_t n = 0;
  for (char c : v) {
    if (c < '0' || c > '9') return std::nullopt;
    n = n * 10 + (c - '0');
    if (n > 0xFFFFFFFFull) return std::nullopt;
  }
  if (n == 0) return std::nullopt;
  return static_cast<uint32_t>(n);
}

inline std::optional<std::pair<uint32_t, uint32_t>> parse_asn_range(const std::string& raw) {
  std::string v = trim(raw);
  size_t dash = v.find('-');
  if (dash == std::string::npos) return std::nullopt;
  auto lo = parse_asn(v.substr(0, dash));
  auto hi = parse_asn(v.substr(dash + 1));
  if (!lo || !hi || *lo > *hi) return std::nullopt;
  return std::make_pair(*lo, *hi);
}

inline std::vector<Paragraph> split_paragraphs(std::istream& in, bool strip_inline_hash) {
  std::vector<Paragraph> out;
  Paragraph cur;
  std::string line;
  size_t lineno = 0;
  auto flush = [&]() {
    if (!cur.attrs.empty()) out.push_back(std::move(cur));
    cur = Paragraph{};
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty() && (line[0] == '%' || line[0] == '#')) continue;
    if (trim(line).empty()) {
      flush();
      continue;
    }
    if ((line[0] == ' ' || line[0] == '\t' || line[0] == '+') && !cur.attrs.empty()) {
      // continuation of the previous attribute value
      std::string cont = trim(line[0] == '+' ? line.substr(1) : line);
      if (!cont.empty()) {
        auto& v = cur.attrs.back().value;
        if (!v.empty()) v.push_back(' ');
        v += cont;
      }
      cur.last_line = lineno;
      continue;
    }
    size_t colon = line.find(':');
    if (colon == std::string::npos) continue;  // not an attribute line
    std::string key = to_lower(trim(line.substr(0, colon)));
    std::string value = line.substr(colon + 1);
    if (strip_inline_hash) {
      size_t hash = value.find('#');
      if (hash != std::string::npos) value = value.substr(0, hash);
    }
    value = trim(value);
    if (cur.attrs.empty()) cur.first_line = lineno;
    cur.last_line = lineno;
    cur.attrs.push_back({std::move(key), std::move(value)});
  }
  if (in.bad()) throw IngestError("whois dump stream read failure near line " + std::to_string(lineno));
  flush();
  return out;
}

}  // namespace detail

// Parse one registry dump. The registry argument selects the schema variant:
// ARIN uses ASNumber/ASHandle/OrgID/OrgName keys, everything else RPSL keys.
inline WhoisParseResult parse_whois_dump(std::istream& in, const RegistryId& registry) {
  WhoisParseResult res;
  bool arin = registry.kind == Rir::arin;
  auto paragraphs = detail::split_paragraphs(in, /*strip_inline_hash=*/!arin);

  for (auto& p : paragraphs) {
    if (arin) {
      // ARIN ASN object: ASHandle: AS123 / ASNumber: 123 (+ OrgID, ASName).
      const std::string* asnum = p.find("asnumber");
      const std::string* ashandle = p.find("ashandle");
      if (asnum || ashandle) {
        auto asn = detail::parse_asn(asnum ? *asnum : *ashandle);
        if (!asn) {
          ++res.malformed_skipped;
          continue;
        }
        AsnRecord rec;
        rec.asn = *asn;
        rec.registry = registry;
        if (auto* d = p.find("asname")) rec.descr = *d;
        if (auto* o = p.find("orgid")) rec.org_handle = *o;
        rec.source_line_span = {p.first_line, p.last_line};
        res.asn_records.push_back(std::move(rec));
        continue;
      }
      const std::string* orgid = p.find("orgid");
      if (orgid && p.find("orgname")) {
        OrgHandle oh;
        oh.handle = *orgid;
        oh.registry = registry;
        oh.name = *p.find("orgname");
        if (auto* e = p.find("orgtechemail")) oh.emails.push_back(*e);
        if (auto* e = p.find("orgabuseemail")) oh.emails.push_back(*e);
        if (auto* a = p.find("address")) oh.address = *a;
        res.org_handles.push_back(std::move(oh));
      }
      continue;
    }

    // RPSL object: first attribute determines the class.
    const std::string& cls = p.attrs.front().key;
    if (cls == "aut-num") {
      auto asn = detail::parse_asn(p.attrs.front().value);
      if (!asn) {
        ++res.malformed_skipped;
        continue;
      }
      AsnRecord rec;
      rec.asn = *asn;
      rec.registry = registry;
      if (auto* d = p.find("descr")) rec.descr = *d;  // find() returns first
      if (auto* o = p.find("org")) rec.org_handle = *o;
      else if (auto* ow = p.find("ownerid")) rec.org_handle = *ow;  // LACNIC style
      rec.source_line_span = {p.first_line, p.last_line};
      res.asn_records.push_back(std::move(rec));
    } else if (cls == "organisation" || cls == "organization") {
      OrgHandle oh;
      oh.handle = trim(p.attrs.front().value);
      if (oh.handle.empty()) {
        ++res.malformed_skipped;
        continue;
      }
      oh.registry = registry;
      if (auto* n = p.find("org-name")) oh.name = *n;
      for (auto& a : p.attrs)
        if (a.key == "e-mail") oh.emails.push_back(a.value);
      if (auto* ad = p.find("address")) oh.address = *ad;
      res.org_handles.push_back(std::move(oh));
    } else if (cls == "as-block") {
      auto range = detail::parse_asn_range(p.attrs.front().value);
      if (!range) {
        ++res.malformed_skipped;
        continue;
      }
      res.as_blocks.push_back({range->first, range->second, registry});
    }
    // other RPSL classes (route, inetnum, person, ...) are not our concern
  }
  return res;
}

}  // namespace orgmap
