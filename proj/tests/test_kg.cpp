#include <doctest.h>

#include <random>

#include "hopsearch/errors.hpp"
#include "hopsearch/kg.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"
#include "support/temp_dir.hpp"

using namespace hopsearch;
using hopsearch::testing::TempDir;

namespace {

kg::KnowledgeStore load_small(const TempDir& dir) {
  testing::SmallKgFiles files = testing::write_small_kg(dir);
  return kg::KnowledgeStore::load({files.triples}, files.entity_aliases, files.relation_aliases);
}

}  // namespace

TEST_CASE("load reports fixture counts") {
  TempDir dir;
  kg::KnowledgeStore store = load_small(dir);
  CHECK(store.triple_count() == 12);
  CHECK(store.entity_count() == 8);
  CHECK(store.relation_count() == 4);
}

TEST_CASE("load deduplicates across files") {
  TempDir dir;
  testing::SmallKgFiles files = testing::write_small_kg(dir);
  auto duplicate = dir.write("dup.tsv", "E1\tR1\tE2\n");
  kg::KnowledgeStore store = kg::KnowledgeStore::load({files.triples, duplicate},
                                                      files.entity_aliases,
                                                      files.relation_aliases);
  CHECK(store.triple_count() == 12);
}

TEST_CASE("loading twice gives identical stores") {
  TempDir dir;
  testing::SmallKgFiles files = testing::write_small_kg(dir);
  kg::KnowledgeStore a =
      kg::KnowledgeStore::load({files.triples}, files.entity_aliases, files.relation_aliases);
  kg::KnowledgeStore b =
      kg::KnowledgeStore::load({files.triples}, files.entity_aliases, files.relation_aliases);
  CHECK(a.triples() == b.triples());
  CHECK(a.entity_count() == b.entity_count());
  CHECK(a.search({{"Avatar"}, {"director"}}) == b.search({{"Avatar"}, {"director"}}));
}

TEST_CASE("empty triple file loads an empty store") {
  TempDir dir;
  testing::SmallKgFiles files = testing::write_small_kg(dir);
  auto empty = dir.write("empty.tsv", "");
  kg::KnowledgeStore store =
      kg::KnowledgeStore::load({empty}, files.entity_aliases, files.relation_aliases);
  CHECK(store.triple_count() == 0);
  CHECK(store.search({{"Avatar"}, {}}).empty());
}

TEST_CASE("malformed triple line names file and line") {
  TempDir dir;
  testing::SmallKgFiles files = testing::write_small_kg(dir);
  auto bad = dir.write("bad.tsv", "E1\tR1\tE2\nE1\tR1\n");
  CHECK_THROWS_WITH_AS(
      kg::KnowledgeStore::load({bad}, files.entity_aliases, files.relation_aliases),
      doctest::Contains("bad.tsv:2"), LoadError);
}

TEST_CASE("unknown ids are rejected by default and retained on request") {
  TempDir dir;
  testing::SmallKgFiles files = testing::write_small_kg(dir);
  auto unknown = dir.write("unknown.tsv", "E1\tR1\tE99\n");
  CHECK_THROWS_AS(
      kg::KnowledgeStore::load({unknown}, files.entity_aliases, files.relation_aliases),
      LoadError);

  kg::KnowledgeStore store = kg::KnowledgeStore::load(
      {unknown}, files.entity_aliases, files.relation_aliases, {.reject_unknown_ids = false});
  CHECK(store.triple_count() == 1);
  CHECK(store.entity_name("E99") == "E99");
}

TEST_CASE("match_entities tiers") {
  TempDir dir;
  kg::KnowledgeStore store = load_small(dir);

  SUBCASE("exact normalized match") {
    CHECK(store.match_entities("avatar") == std::vector<kg::EntityId>{"E1"});
    CHECK(store.match_entities("AVATAR!") == std::vector<kg::EntityId>{"E1"});
  }
  SUBCASE("containment when no exact alias exists") {
    CHECK(store.match_entities("Postcolonial Love Poem") == std::vector<kg::EntityId>{"E3"});
  }
  SUBCASE("token overlap as the last resort") {
    CHECK(store.match_entities("Diaz poetry") == std::vector<kg::EntityId>{"E8"});
  }
  SUBCASE("no overlap anywhere") {
    CHECK(store.match_entities("zzzz").empty());
  }
  SUBCASE("limit caps the result") {
    CHECK(store.match_entities("Canada", 0).empty());
  }
}

TEST_CASE("subgraph collects both edge directions once") {
  TempDir dir;
  kg::KnowledgeStore store = load_small(dir);

  std::vector<kg::Triple> around_cameron = store.subgraph({"E2"});
  CHECK(around_cameron.size() == 5);  // 3 outgoing + 2 incoming

  CHECK(store.subgraph({"E99"}).empty());

  // E1 and E2 share the (E1, R1, E2) edge; it must appear once.
  std::vector<kg::Triple> merged = store.subgraph({"E1", "E2"});
  CHECK(std::count(merged.begin(), merged.end(), kg::Triple{"E1", "R1", "E2"}) == 1);
  CHECK(std::is_sorted(merged.begin(), merged.end()));
}

TEST_CASE("rank_triples counts distinct shared tokens") {
  TempDir dir;
  kg::KnowledgeStore store = load_small(dir);

  std::vector<kg::Triple> candidates = store.subgraph({"E1"});
  std::vector<kg::ScoredTriple> ranked =
      store.rank_triples({{"Avatar"}, {"director"}}, candidates);
  REQUIRE(ranked.size() == 2);
  CHECK(ranked[0].triple == kg::Triple{"E1", "R1", "E2"});
  CHECK(ranked[0].rendered == "Avatar | director | James Cameron");
  CHECK(ranked[0].score == 2);
  CHECK(ranked[1].triple == kg::Triple{"E1", "R3", "E5"});
  CHECK(ranked[1].score == 1);

  SUBCASE("empty relation list scores from entity tokens alone") {
    std::vector<kg::ScoredTriple> entity_only = store.rank_triples({{"Avatar"}, {}}, candidates);
    CHECK(entity_only[0].score == 1);
    CHECK(entity_only[1].score == 1);
  }
  SUBCASE("zero scores preserve id-order tie-break") {
    std::vector<kg::ScoredTriple> zeros = store.rank_triples({{"zzzz"}, {}}, candidates);
    REQUIRE(zeros.size() == 2);
    CHECK(zeros[0].score == 0);
    CHECK(zeros[0].triple < zeros[1].triple);
  }
}

TEST_CASE("search truncates by triple count and token budget") {
  TempDir dir;
  testing::SmallKgFiles files = testing::write_small_kg(dir);

  // 150 triples hanging off one hub entity.
  std::string triples;
  std::string entities = "H1\thub\n";
  for (int i = 0; i < 150; ++i) {
    triples += "H1\tR1\tX" + std::to_string(i) + "\n";
    entities += "X" + std::to_string(i) + "\tleaf " + std::to_string(i) + "\n";
  }
  auto triple_file = dir.write("hub_triples.tsv", triples);
  auto entity_file = dir.write("hub_entities.tsv", entities);
  kg::KnowledgeStore store =
      kg::KnowledgeStore::load({triple_file}, entity_file, files.relation_aliases);

  SUBCASE("triple cap") {
    std::vector<kg::ScoredTriple> results = store.search({{"hub"}, {}});
    CHECK(results.size() == 100);
  }
  SUBCASE("no matched entity") {
    CHECK(store.search({{"nothing here"}, {}}).empty());
  }
  SUBCASE("token budget drops whole triples") {
    // Each rendered triple costs 6 whitespace tokens ("hub | director | leaf N");
    // 1024 / 6 = 170 -> capped at 100 first, then by tokens when tiny.
    std::vector<kg::ScoredTriple> tight = store.search({{"hub"}, {}}, 100, 30);
    CHECK(tight.size() == 5);  // 5 * 6 = 30 fits exactly, a 6th would cross
    std::vector<kg::ScoredTriple> tighter = store.search({{"hub"}, {}}, 100, 29);
    CHECK(tighter.size() == 4);
  }
}

TEST_CASE("default token budget keeps five 200-token renderings") {
  TempDir dir;
  auto words = [](const std::string& prefix, int count) {
    std::string out;
    for (int i = 0; i < count; ++i) out += (i ? " " : "") + prefix + std::to_string(i);
    return out;
  };
  // rendered = 98 head words + pipe + 2 relation words + pipe + 98 tail words = 200 tokens
  std::string entities = "H1\t" + words("h", 98) + "\n";
  std::string triples;
  for (int i = 0; i < 8; ++i) {
    std::string id = "X" + std::to_string(i);
    entities += id + "\t" + words(id, 98) + "\n";
    triples += "H1\tRR\t" + id + "\n";
  }
  kg::KnowledgeStore store = kg::KnowledgeStore::load(
      {dir.write("wide_t.tsv", triples)}, dir.write("wide_e.tsv", entities),
      dir.write("wide_r.tsv", "RR\tlinked to\n"));

  std::vector<kg::ScoredTriple> results = store.search({{"h0"}, {}}, 100, 1024);
  REQUIRE(!results.empty());
  CHECK(hopsearch::text::whitespace_token_count(results[0].rendered) == 200);
  CHECK(results.size() == 5);  // 5 * 200 = 1000 <= 1024 < 1200
}

TEST_CASE("search equals the naive full scan on a random store") {
  std::mt19937_64 rng(7);
  TempDir dir;
  for (int round = 0; round < 5; ++round) {
    testing::oracle::RawKg raw = testing::oracle::random_kg(rng, 800);

    std::string triples;
    for (const auto& triple : raw.triples) {
      triples += triple[0] + "\t" + triple[1] + "\t" + triple[2] + "\n";
    }
    std::string entities;
    for (const auto& [id, aliases] : raw.entities) {
      entities += id;
      for (const std::string& alias : aliases) entities += "\t" + alias;
      entities += "\n";
    }
    std::string relations;
    for (const auto& [id, aliases] : raw.relations) {
      relations += id;
      for (const std::string& alias : aliases) relations += "\t" + alias;
      relations += "\n";
    }
    std::string tag = std::to_string(round);
    kg::KnowledgeStore store = kg::KnowledgeStore::load(
        {dir.write("t" + tag + ".tsv", triples)}, dir.write("e" + tag + ".tsv", entities),
        dir.write("r" + tag + ".tsv", relations));

    for (int q = 0; q < 10; ++q) {
      std::vector<std::string> entity_queries = testing::oracle::random_entity_queries(rng, raw);
      std::vector<std::string> relation_queries =
          testing::oracle::random_relation_queries(rng, raw);
      std::vector<kg::ScoredTriple> got = store.search({entity_queries, relation_queries});
      std::vector<testing::oracle::NaiveScored> want =
          testing::oracle::naive_kg_search(raw, entity_queries, relation_queries);
      REQUIRE(got.size() == want.size());
      for (std::size_t i = 0; i < got.size(); ++i) {
        CHECK(got[i].triple.head == want[i].triple[0]);
        CHECK(got[i].triple.relation == want[i].triple[1]);
        CHECK(got[i].triple.tail == want[i].triple[2]);
        CHECK(got[i].rendered == want[i].rendered);
        CHECK(got[i].score == want[i].score);
      }
    }
  }
}

TEST_CASE("planting an exact alias guarantees a tier-1 hit") {
  std::mt19937_64 rng(11);
  TempDir dir;
  testing::oracle::RawKg raw = testing::oracle::random_kg(rng, 200);
  raw.entities.push_back({"QX", {"Very Specific Planted Alias"}});
  raw.triples.push_back({"QX", raw.relations[0].first, raw.entities[0].first});

  std::string triples;
  for (const auto& triple : raw.triples) {
    triples += triple[0] + "\t" + triple[1] + "\t" + triple[2] + "\n";
  }
  std::string entities;
  for (const auto& [id, aliases] : raw.entities) {
    entities += id;
    for (const std::string& alias : aliases) entities += "\t" + alias;
    entities += "\n";
  }
  std::string relations;
  for (const auto& [id, aliases] : raw.relations) {
    relations += id;
    for (const std::string& alias : aliases) relations += "\t" + alias;
    relations += "\n";
  }
  kg::KnowledgeStore store = kg::KnowledgeStore::load({dir.write("t.tsv", triples)},
                                                      dir.write("e.tsv", entities),
                                                      dir.write("r.tsv", relations));
  std::vector<kg::EntityId> matched = store.match_entities("very specific PLANTED alias");
  CHECK(std::find(matched.begin(), matched.end(), "QX") != matched.end());
}
