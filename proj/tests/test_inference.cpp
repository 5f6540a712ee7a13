#include <catch2/catch_amalgamated.hpp>

#include "orgmap/inference.hpp"
#include "orgmap/llm_backend.hpp"
#include "orgmap/prompt.hpp"
#include "orgmap/verdict.hpp"
#include "test_support.hpp"

using namespace orgmap;

namespace {

TextChunk mk_chunk(const std::string& doc, size_t start, const std::string& org,
                   const std::string& url, const std::string& text,
                   std::vector<std::string> mentions) {
  TextChunk c;
  c.doc_id = doc;
  c.span_start = start;
  c.span_end = start + text.size();
  c.chunk_id = doc + ":" + std::to_string(start);
  c.org_record_id = org;
  c.url = url;
  c.text = text;
  c.entity_mentions = std::move(mentions);
  return c;
}

// Backend replaying a fixed list of responses, for retry-path tests.
class ScriptedBackend : public LlmBackend {
 public:
  explicit ScriptedBackend(std::vector<std::string> responses)
      : responses_(std::move(responses)) {}
  std::string submit(const std::string&) override {
    if (calls_ >= responses_.size()) return responses_.back();
    return responses_[calls_++];
  }
  std::string identity() const override { return "scripted"; }
  size_t calls() const { return calls_; }

 private:
  std::vector<std::string> responses_;
  size_t calls_ = 0;
};

std::string valid_reply(const std::string& base, const std::string& cand,
                        const std::string& rel = "No_relation") {
  json obj;
  obj["base_org_name"] = base;
  obj["candidate_org_name"] = cand;
  obj["reasoning for Alias"] = "r1";
  obj["reasoning for Parent/Subsidiary"] = "r2";
  obj["relationship"] = rel;
  obj["parent"] = "";
  obj["parent name"] = "";
  return json::array({obj}).dump();
}

}  // namespace

TEST_CASE("prompt interpolation") {
  auto chunks = std::vector<TextChunk>{
      mk_chunk("d1", 0, "t", "http://a/", "first evidence", {}),
      mk_chunk("d2", 0, "t", "http://b/", "second evidence", {}),
  };
  std::string p = build_prompt("Edgio", {"Limelight", "Other Co"}, chunks);
  CHECK(p.find("{base_org}") == std::string::npos);
  CHECK(p.find("{target_org}") == std::string::npos);
  CHECK(p.find("{context}") == std::string::npos);
  CHECK(p.find("\"base_organization\": Edgio") != std::string::npos);
  CHECK(p.find("[\"Limelight\",\"Other Co\"]") != std::string::npos);
  CHECK(p.find("[Source: http://a/]\nfirst evidence") != std::string::npos);
  CHECK(p.find("[Source: http://b/]\nsecond evidence") != std::string::npos);
  CHECK(p.find("Mandatory JSON Output Format") != std::string::npos);
  CHECK(p.find("No_relation") != std::string::npos);
  // context order preserved
  CHECK(p.find("first evidence") < p.find("second evidence"));
}

TEST_CASE("verdict parsing accepts well-formed arrays and single objects") {
  std::string raw = R"([
    {"base_org_name": "Base", "candidate_org_name": "CandA",
     "reasoning for Alias": "same entity", "reasoning for Parent/Subsidiary": "n/a",
     "relationship": "Alias", "parent": "", "parent name": ""},
    {"base_org_name": "Base", "candidate_org_name": "CandB",
     "reasoning for Alias": "n/a", "reasoning for Parent/Subsidiary": "acquired 2020",
     "relationship": "Parent/Subsidiary", "parent": "candidate", "parent name": "CandB"}
  ])";
  auto res = parse_verdicts(raw, "Base", {"CandA", "CandB"});
  REQUIRE(res.verdicts.size() == 2);
  CHECK(res.rejected.empty());
  CHECK(res.verdicts[0].relationship == Relation::alias);
  CHECK(res.verdicts[0].parent_side == ParentSide::none);
  CHECK(res.verdicts[1].relationship == Relation::parent_subsidiary);
  CHECK(res.verdicts[1].parent_side == ParentSide::candidate);
  CHECK(res.verdicts[1].parent_name == "CandB");
  // verdict ids: stable format, deterministic, relation-sensitive
  for (auto& v : res.verdicts) {
    REQUIRE(v.verdict_id.size() == 17);
    CHECK(v.verdict_id[0] == 'v');
    CHECK(v.verdict_id.find_first_not_of("0123456789abcdef", 1) == std::string::npos);
  }
  auto again = parse_verdicts(raw, "Base", {"CandA", "CandB"});
  CHECK(again.verdicts[0].verdict_id == res.verdicts[0].verdict_id);
  CHECK(res.verdicts[0].verdict_id != res.verdicts[1].verdict_id);

  // a single bare object counts as a one-element array
  std::string solo = R"({"base_org_name": "Base", "candidate_org_name": "CandA",
    "relationship": "No_relation", "parent": "", "parent name": ""})";
  CHECK(parse_verdicts(solo, "Base", {"CandA"}).verdicts.size() == 1);
}

TEST_CASE("verdict parsing failure modes") {
  SECTION("whole-response failures throw") {
    CHECK_THROWS_AS(parse_verdicts("Sure! Here are the relations...", "B", {"C"}),
                    VerdictParseError);
    CHECK_THROWS_AS(parse_verdicts("\"just a string\"", "B", {"C"}), VerdictParseError);
    CHECK_THROWS_AS(parse_verdicts("42", "B", {"C"}), VerdictParseError);
  }
  SECTION("per-object failures reject the object and keep the rest") {
    json good;
    good["base_org_name"] = "B";
    good["candidate_org_name"] = "C";
    good["relationship"] = "Alias";
    good["parent"] = "";
    good["parent name"] = "";

    auto run1 = [&](json bad) {
      auto res = parse_verdicts(json::array({bad, good}).dump(), "B", {"C"});
      CHECK(res.verdicts.size() == 1);
      REQUIRE(res.rejected.size() == 1);
      return res.rejected[0];
    };

    json wrong_base = good;
    wrong_base["base_org_name"] = "Someone Else";
    CHECK(run1(wrong_base).find("does not match query base") != std::string::npos);

    json unknown_cand = good;
    unknown_cand["candidate_org_name"] = "Stranger";
    CHECK(run1(unknown_cand).find("not in the query candidate list") != std::string::npos);

    json bad_rel = good;
    bad_rel["relationship"] = "Sibling";
    CHECK(run1(bad_rel).find("unknown relationship") != std::string::npos);

    json ps_no_side = good;
    ps_no_side["relationship"] = "Parent/Subsidiary";
    CHECK(run1(ps_no_side).find("without parent side") != std::string::npos);

    json ps_wrong_name = good;
    ps_wrong_name["relationship"] = "Parent/Subsidiary";
    ps_wrong_name["parent"] = "base";
    ps_wrong_name["parent name"] = "C";  // must name the base side, "B"
    CHECK(run1(ps_wrong_name).find("does not match the named side") != std::string::npos);

    json alias_with_parent = good;
    alias_with_parent["parent"] = "base";
    alias_with_parent["parent name"] = "B";
    CHECK(run1(alias_with_parent).find("non-empty parent fields") != std::string::npos);

    CHECK(run1(json(7)).find("non-object") != std::string::npos);
  }
}

TEST_CASE("mock backend renders the scripted verdicts through the real parser") {
  MockBackend backend(testsup::fixture_dir() / "msft" / "verdicts.json");
  std::vector<std::string> candidates = {"ZeniMax", "Microsoft Corporation", "Unscripted Org"};
  std::string prompt = build_prompt("Microsoft", candidates, {});
  std::string raw = backend.submit(prompt);
  auto res = parse_verdicts(raw, "Microsoft", candidates);
  REQUIRE(res.verdicts.size() == 3);
  CHECK(res.rejected.empty());
  std::map<std::string, const RelationVerdict*> by_cand;
  for (auto& v : res.verdicts) by_cand[v.candidate_org_name] = &v;
  CHECK(by_cand.at("ZeniMax")->relationship == Relation::parent_subsidiary);
  CHECK(by_cand.at("ZeniMax")->parent_side == ParentSide::base);
  CHECK(by_cand.at("ZeniMax")->parent_name == "Microsoft");
  CHECK(by_cand.at("Microsoft Corporation")->relationship == Relation::alias);
  CHECK(by_cand.at("Unscripted Org")->relationship == Relation::no_relation);
}

TEST_CASE("inference applies verdicts to the target record") {
  testsup::TempDir tmp;
  json script = json::array({
      json{{"base", "Edgio"}, {"candidate", "Limelight Networks"}, {"relationship", "Alias"},
           {"reasoning_alias", "rebrand"}},
      json{{"base", "Edgio"}, {"candidate", "Parent Holdings"},
           {"relationship", "Parent/Subsidiary"}, {"parent", "candidate"},
           {"parent_name", "Parent Holdings"}},
      json{{"base", "Edgio"}, {"candidate", "Child Unit"},
           {"relationship", "Parent/Subsidiary"}, {"parent", "base"},
           {"parent_name", "Edgio"}},
  });
  write_file(tmp / "script.json", script.dump());
  MockBackend backend(tmp / "script.json");

  ChunkIndex index;
  index.index_chunks({
      mk_chunk("d1", 0, "t1", "http://u/", "Edgio was Limelight Networks",
               {"Limelight Networks"}),
      mk_chunk("d1", 900, "t1", "http://u/", "Parent Holdings owns Edgio; Child Unit is run by Edgio",
               {"Parent Holdings", "Child Unit"}),
  });

  OrgRecord target;
  target.record_id = "t1";
  target.canonical_name = "Edgio";
  target.candidate_orgs = {"Limelight Networks", "Parent Holdings", "Child Unit",
                           "No Context Org", "Child Unit"};  // dup + uncovered

  auto out = infer_relations(target, index, backend, InferOptions{});
  CHECK(out.queries == 1);  // one call covers every candidate with context
  CHECK_FALSE(out.partial);
  REQUIRE(out.verdicts.size() == 3);
  CHECK(out.rejected.empty());
  CHECK(target.alias == std::vector<std::string>{"Limelight Networks"});
  CHECK(target.parents == std::vector<std::string>{"Parent Holdings"});
  CHECK(target.child_orgs == std::vector<std::string>{"Child Unit"});
  CHECK(target.provenance.size() == 3);
  CHECK_FALSE(target.partially_inferred);
  for (auto& v : out.verdicts) {
    CHECK(v.backend == "mock");
    CHECK_FALSE(v.evidence_chunk_ids.empty());
  }
}

TEST_CASE("inference skips records with no contextual evidence") {
  ChunkIndex index;  // empty
  testsup::TempDir tmp;
  write_file(tmp / "script.json", "[]");
  MockBackend backend(tmp / "script.json");
  OrgRecord target;
  target.record_id = "t1";
  target.canonical_name = "Edgio";
  target.candidate_orgs = {"Limelight Networks"};
  auto out = infer_relations(target, index, backend, InferOptions{});
  CHECK(out.queries == 0);
  CHECK(out.verdicts.empty());
  CHECK_FALSE(out.partial);
}

TEST_CASE("inference retries malformed responses") {
  ChunkIndex index;
  index.index_chunks({mk_chunk("d1", 0, "t1", "http://u/", "A mentions B", {"B Org"})});
  OrgRecord target;
  target.record_id = "t1";
  target.canonical_name = "A Org";
  target.candidate_orgs = {"B Org"};

  SECTION("recovers within the retry budget") {
    ScriptedBackend backend({"garbage", "more garbage", valid_reply("A Org", "B Org")});
    auto out = infer_relations(target, index, backend, InferOptions{});
    CHECK(backend.calls() == 3);
    CHECK(out.queries == 3);
    CHECK_FALSE(out.partial);
    REQUIRE(out.verdicts.size() == 1);
    CHECK(out.verdicts[0].relationship == Relation::no_relation);
    CHECK(out.verdicts[0].backend == "scripted");
  }
  SECTION("exhausted retries mark the record partial") {
    ScriptedBackend backend({"nope", "nope", "nope"});
    auto out = infer_relations(target, index, backend, InferOptions{});
    CHECK(out.queries == 3);  // initial + max_retries
    CHECK(out.partial);
    CHECK(out.verdicts.empty());
    CHECK(target.partially_inferred);
  }
  SECTION("zero retries allowed") {
    ScriptedBackend backend({"nope", valid_reply("A Org", "B Org")});
    InferOptions opts;
    opts.max_retries = 0;
    auto out = infer_relations(target, index, backend, opts);
    CHECK(out.queries == 1);
    CHECK(out.partial);
  }
}

TEST_CASE("inference surfaces rejected verdicts without applying them") {
  testsup::TempDir tmp;
  json script = json::array({json{{"base", "A Org"},
                                  {"candidate", "B Org"},
                                  {"relationship", "Cousin"}}});
  write_file(tmp / "script.json", script.dump());
  MockBackend backend(tmp / "script.json");
  ChunkIndex index;
  index.index_chunks({mk_chunk("d1", 0, "t1", "http://u/", "A mentions B", {"B Org"})});
  OrgRecord target;
  target.record_id = "t1";
  target.canonical_name = "A Org";
  target.candidate_orgs = {"B Org"};
  auto out = infer_relations(target, index, backend, InferOptions{});
  CHECK(out.queries == 1);
  CHECK(out.verdicts.empty());
  REQUIRE(out.rejected.size() == 1);
  CHECK(out.rejected[0].find("unknown relationship") != std::string::npos);
  CHECK(target.alias.empty());
  CHECK(target.parents.empty());
  CHECK(target.provenance.empty());
}
