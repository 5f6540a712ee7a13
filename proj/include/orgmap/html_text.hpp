// HTML → plain text: drop script/style/comments, turn block-level tags into
// newlines, decode common entities, collapse whitespace. Invalid UTF-8 bytes
// are replaced, never fatal.
#pragma once

#include <map>
#include <set>
#include <string>

#include "orgmap/util.hpp"

namespace orgmap {

namespace detail {

inline bool is_block_tag(const std::string& tag) {
  static const std::set<std::string> kBlocks = {
      "p",  "div",  "br",   "li",    "ul",    "ol",    "tr",     "td",   "th",    "table",
      "h1", "h2",   "h3",   "h4",    "h5",    "h6",    "header", "footer", "section",
      "article", "aside", "nav", "blockquote", "pre", "hr", "form", "title"};
  return kBlocks.count(tag) > 0;
}

inline std::string decode_entities(const std::string& s) {
  static const std::map<std::string, std::string> kEntities = {
      {"amp", "&"},  {"lt", "<"},    {"gt", ">"},    {"quot", "\""},
      {"apos", "'"}, {"nbsp", " "},  {"mdash", "—"}, {"ndash", "–"},
      {"copy", "©"}, {"reg", "®"},   {"trade", "™"}, {"hellip", "…"},
      {"rsquo", "'"}, {"lsquo", "'"}, {"rdquo", "\""}, {"ldquo", "\""}};
  std::string out;
  out.reserve(s.size());
  size_t i = 0;
  while (i < s.size()) {
    if (s[i] != '&') {
      out.push_back(s[i++]);
      continue;
    }
    size_t semi = s.find(';', i + 1);
    if (semi == std::string::npos || semi - i > 10) {
      out.push_back(s[i++]);
      continue;
    }
    std::string name = s.substr(i + 1, semi - i - 1);
    if (!name.empty() && name[0] == '#') {
      // numeric reference; keep ASCII, replace the rest
      long code = 0;
      try {
        code = name[1] == 'x' || name[1] == 'X' ? std::stol(name.substr(2), nullptr, 16)
                                                : std::stol(name.substr(1));
      } catch (...) {
        code = -1;
      }
      if (code >= 32 && code < 127)
        out.push_back(static_cast<char>(code));
      else if (code >= 0)
        out.push_back(' ');
      else {
        out.push_back(s[i]);
        ++i;
        continue;
      }
      i = semi + 1;
      continue;
    }
    auto it = kEntities.find(to_lower(name));
    if (it != kEntities.end()) {
      out += it->second;
      i = semi + 1;
    } else {
      out.push_back(s[i++]);
    }
  }
  return out;
}

// Replace bytes that cannot start/continue a valid UTF-8 sequence.
inline std::string scrub_utf8(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  size_t i = 0;
  while (i < s.size()) {
    unsigned char c = s[i];
    size_t len = c < 0x80 ? 1 : (c >> 5) == 0x6 ? 2 : (c >> 4) == 0xE ? 3 : (c >> 3) == 0x1E ? 4 : 0;
    if (len == 0) {
      out += "\xEF\xBF\xBD";  // U+FFFD
      ++i;
      continue;
    }
    bool ok = i + len <= s.size();
    for (size_t k = 1; ok && k < len; ++k)
      ok = (static_cast<unsigned char>(s[i + k]) & 0xC0) == 0x80;
    if (ok) {
      out.append(s, i, len);
      i += len;
    } else {
      out += "\xEF\xBF\xBD";
      ++i;
    }
  }
  return out;
}

}  // namespace detail

inline std::string html_to_text(const std::string& html) {
  std::string text;
  text.reserve(html.size());
  size_t i = 0;
  const size_t n = html.size();
  auto skip_until = [&](const std::string& needle) {
    size_t pos = html.find(needle, i);
    i = pos == std::string::npos ? n : pos + needle.size();
  };
  while (i < n) {
    char c = html[i];
    if (c != '<') {
      text.push_back(c);
      ++i;
      continue;
    }
    if (html.compare(i, 4, "<!--") == 0) {
      skip_until("-->");
      continue;
    }
    size_t close = html.find('>', i);
    if (close == std::string::npos) break;
    std::string inside = html.substr(i + 1, close - i - 1);
    i = close + 1;
    bool closing = !inside.empty() && inside[0] == '/';
    std::string tag = to_lower(trim(closing ? inside.substr(1) : inside));
    size_t sp = tag.find_first_of(" \t\r\n/");
    if (sp != std::string::npos) tag = tag.substr(0, sp);
    if (!closing && (tag == "script" || tag == "style")) {
      skip_until("</" + tag);
      skip_until(">");
      continue;
    }
    if (detail::is_block_tag(tag)) text.push_back('\n');
  }

  text = detail::decode_entities(text);
  text = detail::scrub_utf8(text);

  // collapse runs of spaces/tabs; keep single newlines as soft breaks and
  // double newlines as paragraph breaks
  std::string out;
  out.reserve(text.size());
  int pending_newlines = 0;
  bool pending_space = false;
  for (char c : text) {
    if (c == '\n') {
      ++pending_newlines;
      continue;
    }
    if (c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v') {
      pending_space = true;
      continue;
    }
    if (pending_newlines > 0) {
      if (!out.empty()) out += pending_newlines > 1 ? "\n\n" : "\n";
      pending_newlines = 0;
      pending_space = false;
    } else if (pending_space) {
      if (!out.empty()) out.push_back(' ');
      pending_space = false;
    }
    out.push_back(c);
  }
  return out;
}

}  // namespace orgmap
