// Registry identifiers and precedence for multi-registry ASN resolution.
#pragma once

#include <compare>
#include <stdexcept>
#include <string>

#include "orgmap/util.hpp"

namespace orgmap {

enum class Rir { arin, ripe, apnic, lacnic, afrinic, nir };

// A registry is either one of the five RIRs or a named NIR (e.g. "nir:jpnic").
struct RegistryId {
  Rir kind = Rir::ripe;
  std::string nir_name;  // set only when kind == nir

  static RegistryId parse(const std::string& s) {
    std::string v = to_lower(trim(s));
    if (v == "arin") return {Rir::arin, ""};
    if (v == "ripe") return {Rir::ripe, ""};
    if (v == "apnic") return {Rir::apnic, ""};
    if (v == "lacnic") return {Rir::lacnic, ""};
    if (v == "afrinic") return {Rir::afrinic, ""};
    if (v.rfind("nir:", 0) == 0 && v.size() > 4) return {Rir::nir, v.substr(4)};
    throw ConfigError("unknown registry: " + s);
  }

  std::string str() const {
    switch (kind) {
      case Rir::arin: return "arin";
      case Rir::ripe: return "ripe";
      case Rir::apnic: return "apnic";
      case Rir::lacnic: return "lacnic";
      case Rir::afrinic: return "afrinic";
      case Rir::nir: return "nir:" + nir_name;
    }
    return "?";
  }

  // Precedence used when as-block lookup is inconclusive: ARIN > RIPE > APNIC
  // > LACNIC > AFRINIC > NIRs (NIRs tie-broken by name).
  int precedence_rank() const { return static_cast<int>(kind); }

  friend bool operator==(const RegistryId& a, const RegistryId& b) {
    return a.kind == b.kind && a.nir_name == b.nir_name;
  }
  friend auto operator<=>(const RegistryId& a, const RegistryId& b) {
    if (auto c = a.kind <=> b.kind; c != 0) return c;
    return a.nir_name <=> b.nir_name;
  }
};

}  // namespace orgmap
