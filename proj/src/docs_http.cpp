#include <cstdlib>
#include <mutex>
#include <semaphore>

#include <json.hpp>

#include "hopsearch/docs.hpp"
#include "hopsearch/errors.hpp"
#include "http_util.hpp"

namespace hopsearch::docs {
namespace {

constexpr std::ptrdiff_t kMaxInFlight = 256;

class ConcurrencyGate {
 public:
  explicit ConcurrencyGate(std::size_t limit)
      : semaphore_(static_cast<std::ptrdiff_t>(
            std::min<std::size_t>(limit == 0 ? 1 : limit, kMaxInFlight))) {}

  class Pass {
   public:
    explicit Pass(std::counting_semaphore<kMaxInFlight>& s) : semaphore_(s) { semaphore_.acquire(); }
    ~Pass() { semaphore_.release(); }
    Pass(const Pass&) = delete;
    Pass& operator=(const Pass&) = delete;

   private:
    std::counting_semaphore<kMaxInFlight>& semaphore_;
  };

  Pass enter() { return Pass(semaphore_); }

 private:
  std::counting_semaphore<kMaxInFlight> semaphore_;
};

class RemoteDenseProvider final : public DocProvider {
 public:
  explicit RemoteDenseProvider(ProviderConfig config)
      : config_(std::move(config)), gate_(config_.max_concurrent) {
    if (!config_.endpoint) throw ConfigError("remote-dense provider needs an endpoint");
  }

  std::vector<DocHit> search(const std::string& query, std::size_t k) const override {
    auto pass = gate_.enter();
    nlohmann::json body{{"query", query}, {"top_k", k}};
    http::Response response;
    try {
      response = http::post_json(*config_.endpoint, body.dump(), {}, config_.timeout);
    } catch (const Error& e) {
      throw RetrievalError(to_string(kind()), e.what());
    }
    if (response.status < 200 || response.status >= 300) {
      throw RetrievalError(to_string(kind()), "HTTP " + std::to_string(response.status));
    }
    nlohmann::json json = nlohmann::json::parse(response.body, nullptr, false);
    if (json.is_discarded() || !json.contains("hits") || !json["hits"].is_array()) {
      throw RetrievalError(to_string(kind()), "malformed response body");
    }
    std::vector<DocHit> hits;
    for (const nlohmann::json& item : json["hits"]) {
      DocHit hit;
      hit.doc.id = item.value("id", "");
      hit.doc.title = item.value("title", "");
      hit.doc.text = item.value("text", "");
      hit.score = item.value("score", 0.0);
      hits.push_back(std::move(hit));
      if (hits.size() == k) break;
    }
    return hits;
  }

  ProviderKind kind() const override { return ProviderKind::RemoteDense; }

 private:
  ProviderConfig config_;
  mutable ConcurrencyGate gate_;
};

class WebSearchProvider final : public DocProvider {
 public:
  explicit WebSearchProvider(ProviderConfig config)
      : config_(std::move(config)), gate_(config_.max_concurrent) {
    if (!config_.endpoint) config_.endpoint = "https://api.tavily.com/search";
    if (!config_.api_key) {
      if (const char* env = std::getenv("WEB_SEARCH_API_KEY")) config_.api_key = env;
    }
  }

  std::vector<DocHit> search(const std::string& query, std::size_t k) const override {
    auto pass = gate_.enter();
    nlohmann::json body{{"query", query}, {"max_results", k}};
    std::map<std::string, std::string> headers;
    if (config_.api_key) headers["Authorization"] = "Bearer " + *config_.api_key;
    http::Response response;
    try {
      response = http::post_json(*config_.endpoint, body.dump(), headers, config_.timeout);
    } catch (const Error& e) {
      throw RetrievalError(to_string(kind()), e.what());
    }
    if (response.status < 200 || response.status >= 300) {
      throw RetrievalError(to_string(kind()), "HTTP " + std::to_string(response.status));
    }
    nlohmann::json json = nlohmann::json::parse(response.body, nullptr, false);
    if (json.is_discarded() || !json.contains("results") || !json["results"].is_array()) {
      throw RetrievalError(to_string(kind()), "malformed response body");
    }
    std::vector<DocHit> hits;
    for (const nlohmann::json& item : json["results"]) {
      DocHit hit;
      hit.doc.id = item.value("url", "");
      hit.doc.title = item.value("title", "");
      hit.doc.text = item.value("content", "");
      hit.score = item.value("score", 0.0);
      hits.push_back(std::move(hit));
      if (hits.size() == k) break;
    }
    return hits;
  }

  ProviderKind kind() const override { return ProviderKind::Web; }

 private:
  ProviderConfig config_;
  mutable ConcurrencyGate gate_;
};

}  // namespace

std::unique_ptr<DocProvider> make_remote_dense_provider(const ProviderConfig& config) {
  return std::make_unique<RemoteDenseProvider>(config);
}

std::unique_ptr<DocProvider> make_web_provider(const ProviderConfig& config) {
  return std::make_unique<WebSearchProvider>(config);
}

}  // namespace hopsearch::docs
