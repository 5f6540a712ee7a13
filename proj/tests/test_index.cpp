#include <catch2/catch_amalgamated.hpp>

#include "orgmap/chunk_index.hpp"
#include "test_support.hpp"

using namespace orgmap;

namespace {

TextChunk mk(const std::string& doc, size_t start, const std::string& org,
             const std::string& text, std::vector<std::string> mentions) {
  TextChunk c;
  c.doc_id = doc;
  c.span_start = start;
  c.span_end = start + text.size();
  c.chunk_id = doc + ":" + std::to_string(start);
  c.org_record_id = org;
  c.text = text;
  c.entity_mentions = std::move(mentions);
  return c;
}

std::vector<TextChunk> sample_chunks() {
  return {
      mk("db", 0, "org1", "beta text one", {"Beta Corp"}),
      mk("da", 500, "org1", "alpha later", {"Beta Corp", "Gamma"}),
      mk("da", 0, "org1", "alpha early", {"Beta Corp"}),
      mk("da", 100, "org2", "other org", {"Beta Corp"}),
  };
}

}  // namespace

TEST_CASE("pair retrieval is exact, ordered, and capped") {
  ChunkIndex idx;
  idx.index_chunks(sample_chunks());
  CHECK(idx.size() == 4);

  SECTION("postings are per organization") {
    auto hits = idx.retrieve_pair_context("org1", "Beta Corp", 10);
    REQUIRE(hits.size() == 3);
    // (doc_id, span_start) order
    CHECK(hits[0].chunk_id == "da:0");
    CHECK(hits[1].chunk_id == "da:500");
    CHECK(hits[2].chunk_id == "db:0");
    CHECK(idx.retrieve_pair_context("org2", "Beta Corp", 10).size() == 1);
  }
  SECTION("candidate lookup goes through the normalized form") {
    CHECK(idx.retrieve_pair_context("org1", "beta CORP inc", 10).size() == 3);
    CHECK(idx.retrieve_pair_context("org1", "Gamma", 10).size() == 1);
    CHECK(idx.retrieve_pair_context("org1", "Delta", 10).empty());
  }
  SECTION("k caps the result") {
    auto hits = idx.retrieve_pair_context("org1", "Beta Corp", 2);
    REQUIRE(hits.size() == 2);
    CHECK(hits[0].chunk_id == "da:0");
    CHECK(hits[1].chunk_id == "da:500");
  }
  SECTION("re-indexing the same chunks changes nothing") {
    idx.index_chunks(sample_chunks());
    CHECK(idx.size() == 4);
    CHECK(idx.retrieve_pair_context("org1", "Beta Corp", 10).size() == 3);
  }
  SECTION("org_chunks returns the organization's corpus") {
    CHECK(idx.org_chunks("org1").size() == 3);
    CHECK(idx.org_chunks("org2").size() == 1);
    CHECK(idx.org_chunks("nosuch").empty());
  }
}

TEST_CASE("index save/load round trip preserves retrieval") {
  testsup::TempDir tmp;
  ChunkIndex idx;
  idx.index_chunks(sample_chunks());
  idx.save(tmp / "index.jsonl");

  ChunkIndex back = ChunkIndex::load(tmp / "index.jsonl");
  CHECK(back.size() == idx.size());
  auto a = idx.retrieve_pair_context("org1", "Beta Corp", 10);
  auto b = back.retrieve_pair_context("org1", "Beta Corp", 10);
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].chunk_id == b[i].chunk_id);
    CHECK(a[i].text == b[i].text);
  }
  // saving the reloaded index reproduces the same bytes
  back.save(tmp / "index2.jsonl");
  CHECK(read_file(tmp / "index.jsonl") == read_file(tmp / "index2.jsonl"));
}

TEST_CASE("ranker plugin reorders retrieved context") {
  ChunkIndex idx;
  idx.index_chunks(sample_chunks());
  RankerPlugin ranker(
      {"python3", (testsup::fixture_dir() / "plugins" / "ranker.py").string()});
  // the fixture ranker scores by position ascending, so descending sort
  // reverses the canonical order
  auto hits = idx.retrieve_pair_context("org1", "Beta Corp", 10, &ranker);
  REQUIRE(hits.size() == 3);
  CHECK(hits[0].chunk_id == "db:0");
  CHECK(hits[1].chunk_id == "da:500");
  CHECK(hits[2].chunk_id == "da:0");
  // cap applies after ranking
  auto top = idx.retrieve_pair_context("org1", "Beta Corp", 1, &ranker);
  REQUIRE(top.size() == 1);
  CHECK(top[0].chunk_id == "db:0");
}
