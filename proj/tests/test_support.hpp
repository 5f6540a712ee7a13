// Shared helpers for the test binaries.
#pragma once

#include <cstdlib>
#include <filesystem>
#include <string>

#include "orgmap/jsonl.hpp"
#include "orgmap/util.hpp"

namespace testsup {

inline std::filesystem::path fixture_dir() { return ORGMAP_FIXTURE_DIR; }

// Fresh unique directory under the system temp dir; removed on destruction.
struct TempDir {
  std::filesystem::path path;

  TempDir() {
    std::string tmpl = (std::filesystem::temp_directory_path() / "orgmap_test_XXXXXX").string();
    path = mkdtemp(tmpl.data());
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::filesystem::path operator/(const std::string& sub) const { return path / sub; }
};

// Pipeline config JSON for the msft fixture, offline fixtures + mock backend.
inline orgmap::json msft_config() {
  auto fx = fixture_dir() / "msft";
  orgmap::json cfg;
  cfg["whois"] = orgmap::json::array({
      orgmap::json{{"path", (fx / "whois_arin.txt").string()}, {"registry", "arin"}},
      orgmap::json{{"path", (fx / "whois_ripe.txt").string()}, {"registry", "ripe"}},
  });
  cfg["ca2o"] = (fx / "ca2o.jsonl").string();
  cfg["peeringdb"] = (fx / "peeringdb.json").string();
  cfg["harvest"] = orgmap::json{{"top_k", 5},
                                {"min_interval_ms", 0},
                                {"fixture_dir", (fx / "web").string()}};
  cfg["inference"] = orgmap::json{{"backend", "mock"},
                                  {"mock_script", (fx / "verdicts.json").string()}};
  cfg["cluster"] = orgmap::json{{"jaccard_threshold", 0.5}};
  return cfg;
}

}  // namespace testsup
