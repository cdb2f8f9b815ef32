#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace hopsearch::testing::oracle {

// Reference reward formulas, written independently of the library (long
// double arithmetic, iterated multiplication for the integer power).

long double penalty(long long t, long long i, long double gamma, long double beta);
long double gain(long double recall, long double penalty, long double alpha);
long double accuracy(bool format_ok, long double r_ans);
long double overall(long double r_acc, long double r_gain);

std::vector<std::string> answer_tokens(const std::string& text);
long double f1(const std::string& pred, const std::string& gold);
int cem(const std::string& pred, const std::string& gold);
int em(const std::string& pred, const std::string& gold);
long double answer_reward(const std::string& pred, const std::vector<std::string>& golds,
                          std::size_t n);

// --- naive knowledge-graph search over raw fixture data ---------------------

struct RawKg {
  // parallel id/alias lists, file order preserved
  std::vector<std::pair<std::string, std::vector<std::string>>> entities;
  std::vector<std::pair<std::string, std::vector<std::string>>> relations;
  std::vector<std::array<std::string, 3>> triples;  // may contain duplicates
};

struct NaiveScored {
  std::array<std::string, 3> triple;
  std::string rendered;
  std::size_t score = 0;
};

// Full-scan mirror of the tiered match -> subgraph -> rank -> truncate
// pipeline, no indexes.
std::vector<NaiveScored> naive_kg_search(const RawKg& kg,
                                         const std::vector<std::string>& entity_queries,
                                         const std::vector<std::string>& relation_queries,
                                         std::size_t match_limit = 16,
                                         std::size_t max_triples = 100,
                                         std::size_t max_tokens = 1024);

// Random store + query generator shared by the equivalence suites.
RawKg random_kg(std::mt19937_64& rng, std::size_t max_triples);
std::vector<std::string> random_entity_queries(std::mt19937_64& rng, const RawKg& kg);
std::vector<std::string> random_relation_queries(std::mt19937_64& rng, const RawKg& kg);

}  // namespace hopsearch::testing::oracle
