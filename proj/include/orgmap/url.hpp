// Minimal absolute-URL splitter: scheme://host[:port]/path?query#fragment.
#pragma once

#include <optional>
#include <string>

#include "orgmap/util.hpp"

namespace orgmap {

struct Url {
  std::string scheme;
  std::string host;
  int port = 0;  // 0 = scheme default
  std::string path;  // includes query, starts with '/'

  std::string origin() const {
    std::string o = scheme + "://" + host;
    if (port) o += ":" + std::to_string(port);
    return o;
  }
};

inline std::optional<Url> parse_url(const std::string& raw) {
  std::string s = trim(raw);
  size_t scheme_end = s.find("://");
  if (scheme_end == std::string::npos || scheme_end == 0) return std::nullopt;
  Url u;
  u.scheme = to_lower(s.substr(0, scheme_end));
  if (u.scheme != "http" && u.scheme != "https") return std::nullopt;
  size_t host_start = scheme_end + 3;
  size_t path_start = s.find('/', host_start);
  std::string authority =
      path_start == std::string::npos ? s.substr(host_start) : s.substr(host_start, path_start - host_start);
  size_t frag = authority.find('#');
  if (frag != std::string::npos) authority = authority.substr(0, frag);
  size_t colon = authority.rfind(':');
  if (colon != std::string::npos && colon + 1 < authority.size() &&
      authority.find_first_not_of("0123456789", colon + 1) == std::string::npos) {
    u.port = std::stoi(authority.substr(colon + 1));
    authority = authority.substr(0, colon);
  }
  u.host = to_lower(authority);
  if (u.host.empty()) return std::nullopt;
  u.path = path_start == std::string::npos ? "/" : s.substr(path_start);
  size_t pfrag = u.path.find('#');
  if (pfrag != std::string::npos) u.path = u.path.substr(0, pfrag);
  if (u.path.empty()) u.path = "/";
  return u;
}

inline bool is_valid_http_url(const std::string& raw) { return parse_url(raw).has_value(); }

}  // namespace orgmap
