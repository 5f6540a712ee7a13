#include <catch2/catch_amalgamated.hpp>

#include <filesystem>

#include "orgmap/pipeline.hpp"
#include "test_support.hpp"

using namespace orgmap;

TEST_CASE("config validation reports every problem at once") {
  json bad;
  bad["harvest"] = json{{"top_k", 0}};
  bad["inference"] = json{{"backend", "banana"}};
  bad["cluster"] = json{{"jaccard_threshold", 1.5}};
  auto cfg = parse_pipeline_config(bad);
  try {
    validate_config(cfg);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    std::string msg = e.what();
    CHECK(msg.find("no inputs") != std::string::npos);
    CHECK(msg.find("top_k") != std::string::npos);
    CHECK(msg.find("backend") != std::string::npos);
    CHECK(msg.find("jaccard_threshold") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_pipeline_config(json::array()), ConfigError);
}

TEST_CASE("config file that is not JSON is a config error") {
  testsup::TempDir tmp;
  write_file(tmp / "cfg.json", "not json {{{");
  CHECK_THROWS_AS(load_pipeline_config(tmp / "cfg.json"), ConfigError);
}

TEST_CASE("stages demand their prerequisites") {
  testsup::TempDir tmp;
  auto cfg = parse_pipeline_config(testsup::msft_config());
  Pipeline p(cfg, tmp / "out");
  CHECK_THROWS_AS(p.run({"harvest"}), StageOrderError);
  CHECK_THROWS_AS(p.run({"cluster"}), StageOrderError);
  CHECK_THROWS_AS(p.run({"bogus"}), ConfigError);
}

TEST_CASE("full offline run produces the expected counters and is idempotent") {
  testsup::TempDir tmp;
  auto cfg = parse_pipeline_config(testsup::msft_config());
  Pipeline p(cfg, tmp / "out");
  REQUIRE(p.run({"all"}) == 0);

  const auto& counters = p.manifest().counters;
  CHECK(counters.at("organizations") == 10);
  CHECK(counters.at("ingest_asns") == 10);
  CHECK(counters.at("ingest_whois_labeled") == 7);
  CHECK(counters.at("ingest_ca2o_labeled") == 1);
  CHECK(counters.at("ingest_pdb_labeled") == 1);
  CHECK(counters.at("ingest_descr_labeled") == 1);
  CHECK(counters.at("ingest_unlabeled") == 0);
  CHECK(counters.at("crawled_urls") == 8);
  CHECK(counters.at("crawled_chunks") == 8);
  CHECK(counters.at("filtered_chunks") == 7);
  CHECK(counters.at("llm_queries") == 7);
  CHECK(counters.at("families") == 4);
  CHECK_FALSE(p.manifest().partial);

  auto families = load_families((tmp / "out" / "families.jsonl").string());
  REQUIRE(families.size() == 4);
  const OrgFamily* big = nullptr;
  for (auto& f : families)
    if (f.member_sets.size() > 1) {
      REQUIRE(big == nullptr);
      big = &f;
    }
  REQUIRE(big);
  CHECK(big->display_name == "Microsoft");
  CHECK(big->member_sets.size() == 5);
  CHECK(big->edges.size() == 4);
  CHECK(big->asns ==
        std::set<uint32_t>{8069, 40066, 54947, 202167, 14588, 10793, 60229});

  // re-running with the same config rewrites nothing
  std::string manifest1 = read_file(tmp / "out" / "run_manifest.json");
  std::string families1 = read_file(tmp / "out" / "families.jsonl");
  auto mtime1 = std::filesystem::last_write_time(tmp / "out" / "families.jsonl");
  Pipeline p2(cfg, tmp / "out");
  REQUIRE(p2.run({"all"}) == 0);
  CHECK(read_file(tmp / "out" / "run_manifest.json") == manifest1);
  CHECK(read_file(tmp / "out" / "families.jsonl") == families1);
  CHECK(std::filesystem::last_write_time(tmp / "out" / "families.jsonl") == mtime1);

  // a forced stage re-runs and invalidates downstream, then rebuilding
  // converges to identical outputs
  Pipeline p3(cfg, tmp / "out", /*force=*/true);
  REQUIRE(p3.run({"ingest"}) == 0);
  {
    auto m = RunManifest::from_json(json::parse(read_file(tmp / "out" / "run_manifest.json")));
    CHECK(m.stages.at("ingest").done);
    CHECK_FALSE(m.stages.at("harvest").done);
    CHECK_FALSE(m.stages.at("cluster").done);
  }
  Pipeline p4(cfg, tmp / "out");
  REQUIRE(p4.run({"all"}) == 0);
  CHECK(read_file(tmp / "out" / "run_manifest.json") == manifest1);
  CHECK(read_file(tmp / "out" / "families.jsonl") == families1);
}

TEST_CASE("separate runs of the same config are byte-identical") {
  auto cfg = parse_pipeline_config(testsup::msft_config());
  testsup::TempDir tmp;
  Pipeline p1(cfg, tmp / "one");
  Pipeline p2(cfg, tmp / "two");
  REQUIRE(p1.run({"all"}) == 0);
  REQUIRE(p2.run({"all"}) == 0);
  for (std::string f : {"org_records.jsonl", "chunks.jsonl", "candidates.jsonl",
                        "verdicts.jsonl", "org_records_inferred.jsonl", "families.jsonl",
                        "run_manifest.json"}) {
    INFO(f);
    CHECK(read_file(tmp / "one" / f) == read_file(tmp / "two" / f));
  }
  CHECK(read_file(tmp / "one" / "harvest" / "harvest_manifest.jsonl") ==
        read_file(tmp / "two" / "harvest" / "harvest_manifest.jsonl"));
}

TEST_CASE("comparison stage writes a report against the baseline") {
  testsup::TempDir tmp;
  json raw = testsup::msft_config();
  raw["baseline"] =
      json{{"path", (testsup::fixture_dir() / "msft" / "ca2o.jsonl").string()},
           {"format", "ca2o"}};
  auto cfg = parse_pipeline_config(raw);
  validate_config(cfg);
  Pipeline p(cfg, tmp / "out");
  REQUIRE(p.run({"all"}) == 0);
  REQUIRE(std::filesystem::exists(tmp / "out" / "compare_report.json"));
  json rep = json::parse(read_file(tmp / "out" / "compare_report.json"));
  CHECK(rep.at("common_asns") == 1);  // only the baseline's AS65001 is shared
  CHECK(rep.at("a").at("identical") == 1);
  CHECK(rep.at("b").at("identical") == 1);
  CHECK(rep.at("a").at("accounting_ok") == true);
  CHECK(p.compare_table().find("common ASNs: 1") != std::string::npos);
}

TEST_CASE("compare without a configured baseline is a config error") {
  testsup::TempDir tmp;
  auto cfg = parse_pipeline_config(testsup::msft_config());
  Pipeline p(cfg, tmp / "out");
  REQUIRE(p.run({"all"}) == 0);  // "all" without baseline stops at cluster
  CHECK_FALSE(std::filesystem::exists(tmp / "out" / "compare_report.json"));
  CHECK_THROWS_AS(p.run({"compare"}), ConfigError);
}

TEST_CASE("run lock blocks live owners and evicts dead ones") {
  testsup::TempDir tmp;
  auto cfg = parse_pipeline_config(testsup::msft_config());
  std::filesystem::create_directories(tmp / "out");

  SECTION("live pid holds the lock") {
    write_file(tmp / "out" / ".orgmap.lock", "1\n");  // pid 1 is always alive
    Pipeline p(cfg, tmp / "out");
    CHECK_THROWS_AS(p.run({"ingest"}), ConfigError);
    std::filesystem::remove(tmp / "out" / ".orgmap.lock");
  }
  SECTION("stale lock is taken over and released") {
    write_file(tmp / "out" / ".orgmap.lock", "999999\n");
    Pipeline p(cfg, tmp / "out");
    CHECK(p.run({"ingest"}) == 0);
    CHECK_FALSE(std::filesystem::exists(tmp / "out" / ".orgmap.lock"));
  }
}

TEST_CASE("pipeline honors a custom extractor plugin") {
  testsup::TempDir tmp;
  json raw = testsup::msft_config();
  raw["filter"] = json{{"extractor_plugin",
                        json::array({"python3", (testsup::fixture_dir() / "plugins" /
                                                 "extractor.py")
                                                    .string()})}};
  auto cfg = parse_pipeline_config(raw);
  Pipeline p(cfg, tmp / "out");
  REQUIRE(p.run({"all"}) == 0);
  // the fixture plugin finds the same capitalized names as the dictionary
  CHECK(p.manifest().counters.at("filtered_chunks") == 7);
  CHECK(p.manifest().counters.at("families") == 4);
}
