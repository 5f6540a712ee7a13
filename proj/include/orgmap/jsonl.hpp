// JSON-lines file helpers on top of nlohmann/json.
#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"
#include "orgmap/util.hpp"

namespace orgmap {

using json = nlohmann::json;

inline void for_each_jsonl(const std::filesystem::path& p,
                           const std::function<void(const json&)>& fn) {
  std::ifstream in(p);
  if (!in) throw std::runtime_error("cannot open " + p.string());
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty()) continue;
    json j = json::parse(t, nullptr, false);
    if (j.is_discarded())
      throw std::runtime_error(p.string() + ":" + std::to_string(lineno) + ": invalid JSON line");
    fn(j);
  }
}

inline std::vector<json> read_jsonl(const std::filesystem::path& p) {
  std::vector<json> out;
  for_each_jsonl(p, [&](const json& j) { out.push_back(j); });
  return out;
}

class JsonlWriter {
 public:
  explicit JsonlWriter(const std::filesystem::path& p) : path_(p), out_(p, std::ios::trunc) {
    if (!out_) throw std::runtime_error("cannot write " + p.string());
  }
  void write(const json& j) { out_ << j.dump() << '\n'; }
  void close() {
    out_.close();
    if (out_.fail()) throw std::runtime_error("short write to " + path_.string());
  }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

inline void write_jsonl(const std::filesystem::path& p, const std::vector<json>& rows) {
  JsonlWriter w(p);
  for (auto& r : rows) w.write(r);
  w.close();
}

}  // namespace orgmap
