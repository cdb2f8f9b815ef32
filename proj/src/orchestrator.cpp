#include "hopsearch/orchestrator.hpp"

#include <atomic>
#include <mutex>
#include <thread>

#include "hopsearch/errors.hpp"
#include "hopsearch/log.hpp"
#include "hopsearch/text.hpp"

namespace hopsearch::agent {
namespace {

constexpr const char* kForcedAnswerInstruction =
    "You have reached the maximum number of searches. Do not search again; provide your "
    "final answer now within <answer> </answer> tags, with the exact answer in \\boxed{}.";

std::string strip_trailing_ws(std::string s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  return s;
}

// Which stop sequence must have fired, judged from the pending open tag.
std::optional<std::string> infer_stop(const std::string& text) {
  auto pending = [&](const char* open, const char* close) {
    std::size_t o = text.rfind(open);
    if (o == std::string::npos) return false;
    std::size_t c = text.rfind(close);
    return c == std::string::npos || c < o;
  };
  if (pending("<search>", "</search>")) return std::string("</search>");
  if (pending("<answer>", "</answer>")) return std::string("</answer>");
  return std::nullopt;
}

}  // namespace

const std::string& system_prompt() {
  static const std::string prompt = strip_trailing_ws(
#include "system_prompt.inc"
  );
  return prompt;
}

std::string to_string(Termination termination) {
  switch (termination) {
    case Termination::Answered: return "answered";
    case Termination::BudgetExhausted: return "budget_exhausted";
    case Termination::ProtocolError: return "protocol_error";
    case Termination::LlmError: return "llm_error";
  }
  return "unknown";
}

std::vector<kg::ScoredTriple> kg_filter(const std::vector<kg::ScoredTriple>& candidates,
                                        const protocol::SearchRequest& request,
                                        const std::string& question, llm::Client* client,
                                        std::size_t limit) {
  auto top = [&]() {
    std::vector<kg::ScoredTriple> kept = candidates;
    if (kept.size() > limit) kept.resize(limit);
    return kept;
  };
  if (client == nullptr || candidates.size() <= 1) return top();

  std::string prompt =
      "From the knowledge-graph matches below, select up to " + std::to_string(limit) +
      " entity-relation pairs that help answer the question. Respond with a JSON array "
      "of the pair numbers, e.g. [1, 3].\n\nQuestion: " +
      question + "\nCurrent subquery: " + request.query + "\nQueried entities:";
  for (const std::string& e : request.entities) prompt += " " + e + ";";
  prompt += "\nQueried relations:";
  for (const std::string& r : request.relations) prompt += " " + r + ";";
  prompt += "\n\nMatches:\n";
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    prompt += "[" + std::to_string(i + 1) + "] " + candidates[i].rendered + "\n";
  }

  try {
    llm::GenerationRequest gen_request;
    gen_request.messages = {{"user", prompt}};
    gen_request.temperature = 0.0;
    gen_request.max_tokens = 128;
    llm::GenerationResult result = client->generate(gen_request);
    if (auto indices = llm::parse_index_selection(result.text, candidates.size())) {
      std::vector<kg::ScoredTriple> kept;
      for (std::size_t i : *indices) {
        kept.push_back(candidates[i]);
        if (kept.size() == limit) break;
      }
      return kept;
    }
    log::warn("kg filter: unparsable model selection, keeping top-" + std::to_string(limit));
  } catch (const Error& e) {
    log::warn(std::string("kg filter: model call failed (") + e.what() + "), keeping top-" +
              std::to_string(limit));
  }
  return top();
}

std::string execute_search(const protocol::SearchRequest& request,
                           const docs::DocProvider* doc_provider,
                           const kg::KnowledgeStore* store, const Filters& filters,
                           const AgentConfig& config, const std::string& question,
                           std::vector<std::string>* retrieved_titles) {
  std::vector<std::string> sections;

  if (doc_provider != nullptr) {
    try {
      std::vector<docs::DocHit> hits = doc_provider->search(request.query, config.doc_top_k);
      if (filters.docs_enabled) {
        hits = docs::filter_docs(hits, request.query, question, filters.client);
      }
      if (!hits.empty()) {
        std::string section = "Documents:";
        for (std::size_t i = 0; i < hits.size(); ++i) {
          section += "\n[" + std::to_string(i + 1) + "] " + hits[i].doc.title + "\n" +
                     hits[i].doc.text;
          if (retrieved_titles != nullptr) retrieved_titles->push_back(hits[i].doc.title);
        }
        sections.push_back(std::move(section));
      }
    } catch (const Error& e) {
      sections.push_back(std::string("Document search failed: ") + e.what());
    }
  }

  if (store != nullptr && !request.entities.empty()) {
    try {
      std::vector<kg::ScoredTriple> triples =
          store->search({request.entities, request.relations});
      triples = kg_filter(triples, request, question, filters.client, config.kg_filter_limit);
      if (!triples.empty()) {
        std::string section = "Knowledge graph:";
        for (const kg::ScoredTriple& st : triples) section += "\n" + st.rendered;
        sections.push_back(std::move(section));
      }
    } catch (const Error& e) {
      sections.push_back(std::string("Knowledge graph search failed: ") + e.what());
    }
  }

  if (sections.empty()) return "No results found.";
  std::string out = sections.front();
  for (std::size_t i = 1; i < sections.size(); ++i) out += "\n\n" + sections[i];
  return out;
}

RolloutResult run_rollout(const std::string& question, llm::Client& client,
                          const docs::DocProvider* doc_provider,
                          const kg::KnowledgeStore* store, const AgentConfig& config,
                          const Filters& filters) {
  const auto started = std::chrono::steady_clock::now();
  RolloutResult result;

  std::vector<llm::Message> messages{{"system", system_prompt()}, {"user", question}};
  std::string accum;
  std::size_t executed = 0;
  std::size_t malformed = 0;
  std::size_t units_used = 0;
  bool forced_turn = false;
  bool done = false;
  Termination termination = Termination::ProtocolError;
  std::string error;

  auto finish = [&](Termination t, std::string why = {}) {
    termination = t;
    if (!why.empty() && error.empty()) error = std::move(why);
    done = true;
  };

  while (!done) {
    if (units_used >= config.max_response_units) {
      finish(Termination::BudgetExhausted, "generation budget exhausted");
      break;
    }

    llm::GenerationRequest request;
    request.messages = messages;
    if (!accum.empty()) request.messages.push_back({"assistant", accum});
    request.stop = config.stop_sequences;
    request.temperature = config.temperature;
    request.top_p = config.top_p;
    request.max_tokens = config.max_response_units - units_used;

    llm::GenerationResult generation;
    try {
      generation = client.generate(request);
    } catch (const Error& e) {
      finish(Termination::LlmError, e.what());
      break;
    }

    units_used += text::whitespace_token_count(generation.text);
    accum += generation.text;

    std::optional<std::string> stop = generation.stop_hit;
    if (!stop && generation.finish_reason == "stop") stop = infer_stop(accum);

    if (stop && *stop == "</search>") {
      accum += "</search>";
      std::size_t open = accum.rfind("<search>");
      std::size_t payload_end = accum.size() - std::string("</search>").size();

      protocol::SearchRequest parsed;
      std::string parse_failure;
      if (open == std::string::npos || open + std::string("<search>").size() > payload_end) {
        parse_failure = "closing </search> without a matching <search>";
      } else {
        try {
          std::size_t begin = open + std::string("<search>").size();
          parsed = protocol::parse_search_request(accum.substr(begin, payload_end - begin));
        } catch (const RequestError& e) {
          parse_failure = e.what();
        }
      }

      if (!parse_failure.empty()) {
        ++malformed;
        result.retrieval_log.push_back({});
        if (malformed > 1) {
          finish(Termination::ProtocolError, "repeated malformed search payload: " + parse_failure);
        } else {
          accum += "<result>\nSearch request could not be executed: " + parse_failure +
                   ". Send a JSON object with \"query\", \"entity\", \"relation\".\n</result>";
        }
        continue;
      }

      if (executed >= config.max_search_calls) {
        // Search requested during (or after) the forced-answer turn: leave it
        // unexecuted but keep the log aligned with the Search segments.
        result.retrieval_log.push_back({});
        finish(Termination::BudgetExhausted, "search budget exhausted");
        continue;
      }

      std::vector<std::string> titles;
      std::string rendered =
          execute_search(parsed, doc_provider, store, filters, config, question, &titles);
      result.retrieval_log.push_back(std::move(titles));
      ++executed;
      accum += "<result>\n" + rendered + "\n</result>";

      if (executed >= config.max_search_calls && !forced_turn) {
        forced_turn = true;
        messages.push_back({"user", kForcedAnswerInstruction});
      }
      continue;
    }

    if (stop && *stop == "</answer>") {
      accum += "</answer>";
      finish(Termination::Answered);
      continue;
    }

    // Natural end of generation.
    bool has_answer = false;
    try {
      has_answer = protocol::parse_trajectory(accum).answer() != nullptr;
    } catch (const ParseError&) {
      has_answer = false;
    }
    if (has_answer) {
      finish(Termination::Answered);
    } else if (forced_turn) {
      finish(Termination::BudgetExhausted, "no answer after the forced-answer turn");
    } else {
      finish(Termination::ProtocolError, "generation ended without an answer block");
    }
  }

  result.trajectory_text = accum;
  try {
    result.trajectory = protocol::parse_trajectory(accum);
    if (termination == Termination::Answered && result.trajectory.answer() == nullptr) {
      termination = Termination::ProtocolError;
      if (error.empty()) error = "stop fired but the trajectory has no answer block";
    }
  } catch (const ParseError& e) {
    if (termination == Termination::Answered || termination == Termination::BudgetExhausted) {
      termination = Termination::ProtocolError;
    }
    if (error.empty()) error = e.what();
    result.trajectory = protocol::Trajectory{};
    result.trajectory.text_length = accum.size();
    if (!accum.empty()) {
      result.trajectory.stray.push_back({accum, {0, accum.size()}, false});
    }
  }
  result.termination = termination;
  result.error = error;
  result.wall_time = std::chrono::steady_clock::now() - started;
  return result;
}

std::vector<RolloutResult> run_group(const std::string& question, std::size_t group_size,
                                     const ClientFactory& make_client,
                                     const docs::DocProvider* doc_provider,
                                     const kg::KnowledgeStore* store, const AgentConfig& config,
                                     const Filters& filters, std::size_t parallelism) {
  std::vector<RolloutResult> results;
  results.reserve(group_size);
  std::mutex results_mutex;
  std::atomic<std::size_t> next{0};

  auto worker = [&]() {
    while (true) {
      std::size_t index = next.fetch_add(1);
      if (index >= group_size) break;
      RolloutResult result;
      try {
        std::unique_ptr<llm::Client> client = make_client(index);
        if (!client) throw LlmError("client factory returned null");
        result = run_rollout(question, *client, doc_provider, store, config, filters);
      } catch (const std::exception& e) {
        result.termination = Termination::LlmError;
        result.error = e.what();
      }
      result.rollout_index = index;
      std::lock_guard<std::mutex> lock(results_mutex);
      results.push_back(std::move(result));
    }
  };

  std::size_t workers = std::max<std::size_t>(1, std::min(parallelism, group_size));
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t i = 0; i < workers; ++i) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
  return results;
}

}  // namespace hopsearch::agent
