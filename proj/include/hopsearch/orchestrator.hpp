#pragma once

#include <chrono>
#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "hopsearch/docs.hpp"
#include "hopsearch/kg.hpp"
#include "hopsearch/llm.hpp"
#include "hopsearch/protocol.hpp"
#include "hopsearch/rewards.hpp"

namespace hopsearch::agent {

struct AgentConfig {
  std::size_t max_search_calls = 8;
  std::size_t max_response_units = 8192;  // generation budget, whitespace-token approximation
  double temperature = 1.0;
  double top_p = 0.95;
  std::size_t doc_top_k = 5;
  std::size_t kg_filter_limit = 5;
  std::vector<std::string> stop_sequences{"</search>", "</answer>"};
};

// Optional relevance filters applied inside execute_search. The model client
// is shared by the document and KG filters; without one, both fall back to
// their deterministic rules.
struct Filters {
  llm::Client* client = nullptr;
  bool docs_enabled = false;
};

enum class Termination { Answered, BudgetExhausted, ProtocolError, LlmError };

std::string to_string(Termination termination);

struct RolloutResult {
  protocol::Trajectory trajectory;
  std::string trajectory_text;
  rewards::RetrievalLog retrieval_log;  // one entry per Search segment
  Termination termination = Termination::ProtocolError;
  std::chrono::duration<double> wall_time{0};
  std::size_t rollout_index = 0;
  std::string error;  // diagnostic for error terminations
};

// The instruction block prepended to every rollout conversation.
const std::string& system_prompt();

// Keeps up to `limit` of the scored triples. With a model client the
// candidates are shown together with the queried entity/relation strings,
// the current subquery, and the original question, and the model's selection
// comes back in candidate order; without one (or on an unparsable reply,
// with a warning) the top `limit` by existing score are kept.
std::vector<kg::ScoredTriple> kg_filter(const std::vector<kg::ScoredTriple>& candidates,
                                        const protocol::SearchRequest& request,
                                        const std::string& question, llm::Client* client,
                                        std::size_t limit);

// Runs both tools for one search request and renders the injected result
// text: a "Documents:" section followed by a "Knowledge graph:" section,
// empty sections omitted, "No results found." when both are empty. A failing
// tool contributes a single-line diagnostic instead of its section. Retrieved
// document titles (post-filter) are appended to `retrieved_titles` when given.
std::string execute_search(const protocol::SearchRequest& request,
                           const docs::DocProvider* doc_provider,
                           const kg::KnowledgeStore* store, const Filters& filters,
                           const AgentConfig& config, const std::string& question,
                           std::vector<std::string>* retrieved_titles = nullptr);

// Drives the iterative loop: generation stops at "</search>" trigger both
// tools and resume with the injected result block; "</answer>" ends the
// rollout. After max_search_calls executed searches a forced-answer turn is
// issued; a further search request is left unexecuted (with an empty
// retrieval-log entry) and the rollout ends as BudgetExhausted. A malformed
// search payload gets an error notice inside the result block and one retry;
// the second failure ends the rollout as ProtocolError.
RolloutResult run_rollout(const std::string& question, llm::Client& client,
                          const docs::DocProvider* doc_provider,
                          const kg::KnowledgeStore* store, const AgentConfig& config = {},
                          const Filters& filters = {});

using ClientFactory = std::function<std::unique_ptr<llm::Client>(std::size_t rollout_index)>;

// G independent rollouts with bounded parallelism, returned in completion
// order and annotated with their rollout index. Individual failures are
// recorded per result and never abort siblings.
std::vector<RolloutResult> run_group(const std::string& question, std::size_t group_size,
                                     const ClientFactory& make_client,
                                     const docs::DocProvider* doc_provider,
                                     const kg::KnowledgeStore* store,
                                     const AgentConfig& config = {}, const Filters& filters = {},
                                     std::size_t parallelism = 4);

}  // namespace hopsearch::agent
