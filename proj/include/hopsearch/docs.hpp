#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace hopsearch::llm {
class Client;
}

namespace hopsearch::docs {

struct Document {
  std::string id;
  std::string title;
  std::string text;

  friend bool operator==(const Document&, const Document&) = default;
};

struct DocHit {
  Document doc;
  double score = 0.0;

  friend bool operator==(const DocHit&, const DocHit&) = default;
};

enum class ProviderKind { LocalLexical, RemoteDense, Web };

std::string to_string(ProviderKind kind);

struct ProviderConfig {
  ProviderKind kind = ProviderKind::LocalLexical;
  std::optional<std::string> endpoint;  // required for remote kinds
  std::optional<std::string> api_key;   // web falls back to WEB_SEARCH_API_KEY
  std::size_t top_k = 5;
  std::chrono::milliseconds timeout{30000};
  std::size_t max_concurrent = 8;
};

/// In-process BM25 (k1=1.2, b=0.75) inverted index over normalized tokens of
/// title + text. idf = ln(1 + (N - df + 0.5)/(df + 0.5)), so a document
/// sharing no term with the query scores exactly 0 and is never returned.
/// Immutable after build; queries are const and thread-safe.
class LexicalIndex {
 public:
  static LexicalIndex build(const std::vector<Document>& documents);

  // At most k hits, score non-increasing, ties by doc id ascending.
  std::vector<DocHit> search(const std::string& query, std::size_t k) const;

  std::size_t size() const { return docs_.size(); }

 private:
  struct Posting {
    std::size_t doc = 0;  // index into docs_
    std::size_t tf = 0;
  };

  std::vector<Document> docs_;  // sorted by id
  std::vector<std::size_t> lengths_;
  double avg_length_ = 0.0;
  std::unordered_map<std::string, std::vector<Posting>> postings_;
};

class DocProvider {
 public:
  virtual ~DocProvider() = default;

  // Throws RetrievalError on remote failure.
  virtual std::vector<DocHit> search(const std::string& query, std::size_t k) const = 0;
  virtual ProviderKind kind() const = 0;
};

class LocalLexicalProvider final : public DocProvider {
 public:
  explicit LocalLexicalProvider(LexicalIndex index) : index_(std::move(index)) {}

  std::vector<DocHit> search(const std::string& query, std::size_t k) const override {
    return index_.search(query, k);
  }
  ProviderKind kind() const override { return ProviderKind::LocalLexical; }

  const LexicalIndex& index() const { return index_; }

 private:
  LexicalIndex index_;
};

// POST {endpoint}/search with {"query", "top_k"}; expects
// {"hits": [{"id", "title", "text", "score"}]}.
std::unique_ptr<DocProvider> make_remote_dense_provider(const ProviderConfig& config);

// Tavily-style POST with {"query", "max_results"} and bearer auth; result
// objects (title/url/content) map onto Document with the url as doc id.
std::unique_ptr<DocProvider> make_web_provider(const ProviderConfig& config);

// JSONL corpus, one {"id", "title", "text"} object per line.
std::vector<Document> load_corpus_jsonl(const std::filesystem::path& path);

// Keeps the hits an LLM judges relevant to (subquery, question), order
// preserved. Without a client (or when the client fails, with a warning) a
// deterministic rule keeps hits whose title or text shares >=1 normalized
// token with the subquery. Output is always a subsequence of the input.
std::vector<DocHit> filter_docs(const std::vector<DocHit>& hits, const std::string& subquery,
                                const std::string& question, llm::Client* client = nullptr);

}  // namespace hopsearch::docs
