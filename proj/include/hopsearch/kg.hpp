#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

#include "hopsearch/text.hpp"

namespace hopsearch::kg {

using EntityId = std::string;    // Wikidata-style, e.g. "Q123"
using RelationId = std::string;  // e.g. "P57"

struct Triple {
  EntityId head;
  RelationId relation;
  EntityId tail;

  friend bool operator==(const Triple&, const Triple&) = default;
  friend auto operator<=>(const Triple&, const Triple&) = default;
};

struct KgQuery {
  std::vector<std::string> entities;   // surface strings; at least one expected
  std::vector<std::string> relations;  // may be empty
};

struct ScoredTriple {
  Triple triple;
  std::string rendered;  // "head_name | relation_name | tail_name", canonical aliases
  std::size_t score = 0;  // distinct shared normalized tokens with the query

  friend bool operator==(const ScoredTriple&, const ScoredTriple&) = default;
};

/// Immutable triple store over Wikidata5M-format dumps: deduplicated triples,
/// entity/relation alias tables (first alias is canonical), and a normalized
/// token index used for fuzzy matching. All queries are const and safe to run
/// concurrently.
class KnowledgeStore {
 public:
  struct LoadOptions {
    // A triple referencing an id absent from the alias files fails the load
    // by default; with false, the raw id becomes its own surface form.
    bool reject_unknown_ids = true;
  };

  static KnowledgeStore load(const std::vector<std::filesystem::path>& triple_files,
                             const std::filesystem::path& entity_alias_file,
                             const std::filesystem::path& relation_alias_file,
                             const LoadOptions& options = {});

  std::size_t triple_count() const { return triples_.size(); }
  std::size_t entity_count() const { return entity_aliases_.size(); }
  std::size_t relation_count() const { return relation_aliases_.size(); }

  const std::vector<Triple>& triples() const { return triples_; }

  // Canonical (first-listed) surface form; falls back to the id itself.
  const std::string& entity_name(const EntityId& id) const;
  const std::string& relation_name(const RelationId& id) const;

  const std::vector<std::string>* entity_aliases(const EntityId& id) const;
  const std::vector<std::string>* relation_aliases(const RelationId& id) const;

  // Tiered fuzzy matching over normalized aliases:
  //   1. exact normalized-alias equality,
  //   2. contiguous token-subsequence containment either way,
  //   3. >=1 shared token, ranked by shared-token count.
  // Lower tiers run only when every higher tier is empty. Ties break by
  // ascending id; the result is capped at `limit`.
  std::vector<EntityId> match_entities(const std::string& name, std::size_t limit = 16) const;

  // All triples incident (head or tail) to any listed entity, deduplicated,
  // ordered by (head, relation, tail).
  std::vector<Triple> subgraph(const std::vector<EntityId>& entities) const;

  // Scores each candidate by the number of distinct normalized tokens shared
  // between the query strings and the triple's rendered form; sorts by score
  // descending, ties by (head, relation, tail).
  std::vector<ScoredTriple> rank_triples(const KgQuery& query,
                                         const std::vector<Triple>& candidates) const;

  // match_entities -> subgraph -> rank_triples, truncated to max_triples and
  // then to a cumulative rendered-token budget. A triple that would cross the
  // budget is dropped along with everything after it, so the output is always
  // a prefix of the ranked list. The counter defaults to whitespace tokens.
  std::vector<ScoredTriple> search(const KgQuery& query, std::size_t max_triples = 100,
                                   std::size_t max_tokens = 1024,
                                   const text::TokenCounter& counter = {}) const;

  std::string render(const Triple& triple) const;

 private:
  std::vector<Triple> triples_;  // sorted by (head, relation, tail)
  std::unordered_map<EntityId, std::vector<std::string>> entity_aliases_;
  std::unordered_map<RelationId, std::vector<std::string>> relation_aliases_;
  std::unordered_map<std::string, std::vector<EntityId>> exact_alias_index_;
  std::unordered_map<std::string, std::vector<EntityId>> token_index_;
  std::unordered_map<EntityId, std::vector<std::size_t>> incident_;  // entity -> triple indexes

  void build_indexes();
};

}  // namespace hopsearch::kg
