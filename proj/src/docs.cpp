#include "hopsearch/docs.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_set>

#include <json.hpp>

#include "hopsearch/errors.hpp"
#include "hopsearch/llm.hpp"
#include "hopsearch/log.hpp"
#include "hopsearch/text.hpp"

namespace hopsearch::docs {

namespace {
constexpr double kBm25K1 = 1.2;
constexpr double kBm25B = 0.75;
}  // namespace

std::string to_string(ProviderKind kind) {
  switch (kind) {
    case ProviderKind::LocalLexical: return "local-lexical";
    case ProviderKind::RemoteDense: return "remote-dense";
    case ProviderKind::Web: return "web";
  }
  return "unknown";
}

LexicalIndex LexicalIndex::build(const std::vector<Document>& documents) {
  LexicalIndex index;
  index.docs_ = documents;
  std::sort(index.docs_.begin(), index.docs_.end(),
            [](const Document& a, const Document& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < index.docs_.size(); ++i) {
    if (index.docs_[i].id == index.docs_[i - 1].id) {
      throw IndexError("duplicate doc id: " + index.docs_[i].id);
    }
  }

  std::size_t total_length = 0;
  index.lengths_.resize(index.docs_.size());
  for (std::size_t i = 0; i < index.docs_.size(); ++i) {
    std::vector<std::string> tokens =
        text::surface_tokens(index.docs_[i].title + " " + index.docs_[i].text);
    index.lengths_[i] = tokens.size();
    total_length += tokens.size();

    std::unordered_map<std::string, std::size_t> tf;
    for (std::string& token : tokens) ++tf[std::move(token)];
    for (auto& [term, count] : tf) index.postings_[term].push_back({i, count});
  }
  index.avg_length_ =
      index.docs_.empty() ? 0.0 : static_cast<double>(total_length) / index.docs_.size();
  return index;
}

std::vector<DocHit> LexicalIndex::search(const std::string& query, std::size_t k) const {
  if (docs_.empty() || k == 0) return {};

  std::vector<std::string> query_tokens = text::surface_tokens(query);
  std::unordered_set<std::string> distinct(query_tokens.begin(), query_tokens.end());

  std::vector<double> scores(docs_.size(), 0.0);
  const double n = static_cast<double>(docs_.size());
  for (const std::string& term : distinct) {
    auto it = postings_.find(term);
    if (it == postings_.end()) continue;
    const double df = static_cast<double>(it->second.size());
    const double idf = std::log(1.0 + (n - df + 0.5) / (df + 0.5));
    for (const Posting& posting : it->second) {
      const double tf = static_cast<double>(posting.tf);
      const double norm =
          kBm25K1 * (1.0 - kBm25B + kBm25B * static_cast<double>(lengths_[posting.doc]) /
                                        (avg_length_ > 0.0 ? avg_length_ : 1.0));
      scores[posting.doc] += idf * tf * (kBm25K1 + 1.0) / (tf + norm);
    }
  }

  std::vector<std::size_t> matched;
  for (std::size_t i = 0; i < docs_.size(); ++i) {
    if (scores[i] > 0.0) matched.push_back(i);
  }
  // docs_ is id-sorted, so equal scores fall back to ascending doc id.
  std::stable_sort(matched.begin(), matched.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  if (matched.size() > k) matched.resize(k);

  std::vector<DocHit> hits;
  hits.reserve(matched.size());
  for (std::size_t i : matched) hits.push_back({docs_[i], scores[i]});
  return hits;
}

std::vector<Document> load_corpus_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open corpus file: " + path.string());
  std::vector<Document> docs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json json = nlohmann::json::parse(line, nullptr, false);
    if (json.is_discarded() || !json.is_object()) {
      throw LoadError(path.string() + ":" + std::to_string(line_no) + ": invalid JSON");
    }
    Document doc;
    doc.id = json.value("id", "");
    doc.title = json.value("title", "");
    doc.text = json.value("text", "");
    if (doc.id.empty() || doc.title.empty()) {
      throw LoadError(path.string() + ":" + std::to_string(line_no) +
                      ": documents need a non-empty id and title");
    }
    docs.push_back(std::move(doc));
  }
  return docs;
}

namespace {

std::vector<DocHit> shared_token_fallback(const std::vector<DocHit>& hits,
                                          const std::string& subquery) {
  std::vector<std::string> tokens = text::surface_tokens(subquery);
  std::unordered_set<std::string> wanted(tokens.begin(), tokens.end());
  std::vector<DocHit> kept;
  for (const DocHit& hit : hits) {
    bool overlap = false;
    for (const std::string& token : text::surface_tokens(hit.doc.title)) {
      if (wanted.count(token)) {
        overlap = true;
        break;
      }
    }
    if (!overlap) {
      for (const std::string& token : text::surface_tokens(hit.doc.text)) {
        if (wanted.count(token)) {
          overlap = true;
          break;
        }
      }
    }
    if (overlap) kept.push_back(hit);
  }
  return kept;
}

}  // namespace

std::vector<DocHit> filter_docs(const std::vector<DocHit>& hits, const std::string& subquery,
                                const std::string& question, llm::Client* client) {
  if (hits.empty()) return {};
  if (client == nullptr) return shared_token_fallback(hits, subquery);

  std::string prompt =
      "Select the documents that help answer the question. Respond with a JSON "
      "array of the document numbers to keep, e.g. [1, 3].\n\nQuestion: " +
      question + "\nCurrent subquery: " + subquery + "\n\nDocuments:\n";
  for (std::size_t i = 0; i < hits.size(); ++i) {
    prompt += "[" + std::to_string(i + 1) + "] " + hits[i].doc.title + ": " +
              hits[i].doc.text.substr(0, 400) + "\n";
  }

  try {
    llm::GenerationRequest request;
    request.messages = {{"user", prompt}};
    request.temperature = 0.0;
    request.max_tokens = 256;
    llm::GenerationResult result = client->generate(request);
    if (auto indices = llm::parse_index_selection(result.text, hits.size())) {
      std::vector<DocHit> kept;
      for (std::size_t i : *indices) kept.push_back(hits[i]);
      return kept;
    }
    log::warn("doc filter: unparsable model selection, using token-overlap fallback");
  } catch (const Error& e) {
    log::warn(std::string("doc filter: model call failed (") + e.what() +
              "), using token-overlap fallback");
  }
  return shared_token_fallback(hits, subquery);
}

}  // namespace hopsearch::docs
