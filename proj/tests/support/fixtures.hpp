#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "hopsearch/docs.hpp"
#include "hopsearch/kg.hpp"
#include "hopsearch/rewards.hpp"
#include "support/temp_dir.hpp"

namespace hopsearch::testing {

// --- small deterministic KG: 12 triples, 8 entities, 4 relations ------------

struct SmallKgFiles {
  std::filesystem::path triples;
  std::filesystem::path entity_aliases;
  std::filesystem::path relation_aliases;
};

SmallKgFiles write_small_kg(const TempDir& dir);

// --- three-hop case study ----------------------------------------------------
// Scripted rollout answering a question that chains poet -> fellowship year ->
// playwright -> play, ending in "Skeleton Crew" after exactly three searches.

struct ThreeHopFixture {
  std::string question;
  std::vector<docs::Document> corpus;
  std::vector<std::string> script;  // one generation chunk per turn
  rewards::GoldRecord gold;

  std::filesystem::path kg_triples;
  std::filesystem::path kg_entity_aliases;
  std::filesystem::path kg_relation_aliases;
  std::filesystem::path corpus_jsonl;
};

ThreeHopFixture make_three_hop_fixture(const TempDir& dir);

// Serialized trajectory text matching the scripted rollout above
// (4 think, 3 search, 3 result, 1 answer).
std::string three_hop_trajectory_text();

}  // namespace hopsearch::testing
