// Small shared helpers: errors, hashing, logging, file IO.
#pragma once

#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace orgmap {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IngestError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct HarvestError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct StageOrderError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct VerdictParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct PluginError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// FNV-1a 64-bit. Used for content addressing and config hashes; collision
// resistance beyond accidental is not required here.
inline uint64_t fnv1a64(const void* data, size_t len) {
  const unsigned char* p = static_cast<const unsigned char*>(data);
  uint64_t h = 0xcbf29ce484222325ull;
  for (size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}
inline uint64_t fnv1a64(const std::string& s) { return fnv1a64(s.data(), s.size()); }

inline std::string hex64(uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return std::string(buf);
}

enum class LogLevel { debug = 0, info = 1, warn = 2, error = 3 };

inline LogLevel& log_threshold() {
  static LogLevel lvl = LogLevel::info;
  return lvl;
}

inline void vlog(LogLevel lvl, const char* fmt, va_list ap) {
  if (lvl < log_threshold()) return;
  static const char* names[] = {"DEBUG", "INFO", "WARN", "ERROR"};
  std::fprintf(stderr, "[%s] ", names[static_cast<int>(lvl)]);
  std::vfprintf(stderr, fmt, ap);
  std::fputc('\n', stderr);
}

inline void log_debug(const char* fmt, ...) {
  va_list ap;
  va_start(ap, fmt);
  vlog(LogLevel::debug, fmt, ap);
  va_end(ap);
}
inline void log_info(const char* fmt, ...) {
  va_list ap;
  va_start(ap, fmt);
  vlog(LogLevel::info, fmt, ap);
  va_end(ap);
}
inline void log_warn(const char* fmt, ...) {
  va_list ap;
  va_start(ap, fmt);
  vlog(LogLevel::warn, fmt, ap);
  va_end(ap);
}
inline void log_error(const char* fmt, ...) {
  va_list ap;
  va_start(ap, fmt);
  vlog(LogLevel::error, fmt, ap);
  va_end(ap);
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << content;
  if (!out) throw std::runtime_error("short write to " + p.string());
}

// Write-then-rename so readers never observe a partially written file.
inline void write_file_atomic(const std::filesystem::path& p, const std::string& content) {
  std::filesystem::path tmp = p;
  tmp += ".tmp";
  write_file(tmp, content);
  std::filesystem::rename(tmp, p);
}

inline std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> out;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t nl = text.find('\n', pos);
    if (nl == std::string::npos) {
      out.push_back(text.substr(pos));
      break;
    }
    std::string line = text.substr(pos, nl - pos);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    out.push_back(std::move(line));
    pos = nl + 1;
  }
  if (!out.empty() && out.back().empty()) out.pop_back();
  return out;
}

inline bool starts_with_ci(const std::string& s, const std::string& prefix) {
  if (s.size() < prefix.size()) return false;
  for (size_t i = 0; i < prefix.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(s[i])) !=
        std::tolower(static_cast<unsigned char>(prefix[i])))
      return false;
  }
  return true;
}

inline std::string to_lower(const std::string& s) {
  std::string out = s;
  for (char& c : out)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return out;
}

}  // namespace orgmap
