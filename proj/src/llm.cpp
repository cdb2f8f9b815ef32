#include "hopsearch/llm.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>

#include <json.hpp>

#include "hopsearch/errors.hpp"
#include "hopsearch/log.hpp"
#include "http_util.hpp"

namespace hopsearch::llm {

GenerationResult ScriptedClient::generate(const GenerationRequest& request) {
  if (next_ >= chunks_.size()) throw LlmError("script exhausted");
  const std::string& chunk = chunks_[next_++];

  std::size_t best_pos = std::string::npos;
  const std::string* best_stop = nullptr;
  for (const std::string& stop : request.stop) {
    if (stop.empty()) continue;
    std::size_t pos = chunk.find(stop);
    if (pos != std::string::npos && (best_stop == nullptr || pos < best_pos)) {
      best_pos = pos;
      best_stop = &stop;
    }
  }
  if (best_stop != nullptr) {
    return GenerationResult{chunk.substr(0, best_pos), *best_stop, "stop"};
  }
  return GenerationResult{chunk, std::nullopt, "end"};
}

namespace {

class HttpClient final : public Client {
 public:
  explicit HttpClient(EndpointConfig config) : config_(std::move(config)) {
    if (!config_.api_key) {
      if (const char* env = std::getenv("LLM_API_KEY")) config_.api_key = env;
    }
  }

  GenerationResult generate(const GenerationRequest& request) override {
    nlohmann::json body;
    body["model"] = config_.model;
    nlohmann::json messages = nlohmann::json::array();
    for (const Message& m : request.messages) {
      messages.push_back({{"role", m.role}, {"content", m.content}});
    }
    body["messages"] = std::move(messages);
    if (!request.stop.empty()) body["stop"] = request.stop;
    body["temperature"] = request.temperature;
    body["top_p"] = request.top_p;
    body["max_tokens"] = request.max_tokens;
    if (!request.messages.empty() && request.messages.back().role == "assistant") {
      // vLLM-style continuation of the trailing assistant message.
      body["continue_final_message"] = true;
      body["add_generation_prompt"] = false;
    }

    std::map<std::string, std::string> headers;
    if (config_.api_key) headers["Authorization"] = "Bearer " + *config_.api_key;

    std::string payload = body.dump();
    std::string last_error;
    std::chrono::milliseconds backoff = config_.retry.initial_backoff;
    for (std::size_t attempt = 0; attempt <= config_.retry.max_retries; ++attempt) {
      if (attempt > 0) {
        std::this_thread::sleep_for(backoff);
        backoff *= 2;
      }
      try {
        http::Response response =
            http::post_json(config_.endpoint, payload, headers, config_.timeout);
        if (response.status == 429 || response.status >= 500) {
          last_error = "HTTP " + std::to_string(response.status);
          continue;
        }
        if (response.status < 200 || response.status >= 300) {
          throw LlmError("LLM endpoint returned HTTP " + std::to_string(response.status) + ": " +
                         response.body.substr(0, 200));
        }
        return parse_response(response.body, request);
      } catch (const LlmError&) {
        throw;
      } catch (const Error& e) {
        last_error = e.what();
      }
    }
    throw LlmError("LLM request failed after retries: " + last_error);
  }

 private:
  static GenerationResult parse_response(const std::string& body,
                                         const GenerationRequest& request) {
    nlohmann::json json = nlohmann::json::parse(body, nullptr, false);
    if (json.is_discarded() || !json.contains("choices") || json["choices"].empty()) {
      throw LlmError("unexpected LLM response body");
    }
    const nlohmann::json& choice = json["choices"][0];
    GenerationResult result;
    if (choice.contains("message") && choice["message"].contains("content")) {
      result.text = choice["message"]["content"].get<std::string>();
    } else if (choice.contains("text")) {
      result.text = choice["text"].get<std::string>();
    }
    result.finish_reason = choice.value("finish_reason", "");

    // Some servers echo the matched stop sequence; strip it so the caller
    // sees the same shape the scripted client produces.
    for (const std::string& stop : request.stop) {
      if (stop.empty()) continue;
      std::size_t pos = result.text.find(stop);
      if (pos != std::string::npos) {
        result.text.resize(pos);
        result.stop_hit = stop;
        break;
      }
    }
    if (!result.stop_hit && choice.contains("stop_reason") && choice["stop_reason"].is_string()) {
      std::string reason = choice["stop_reason"].get<std::string>();
      if (std::find(request.stop.begin(), request.stop.end(), reason) != request.stop.end()) {
        result.stop_hit = reason;
      }
    }
    return result;
  }

  EndpointConfig config_;
};

}  // namespace

std::unique_ptr<Client> make_http_client(const EndpointConfig& config) {
  return std::make_unique<HttpClient>(config);
}

std::optional<std::vector<std::size_t>> parse_index_selection(const std::string& text,
                                                              std::size_t count) {
  std::size_t start = text.find('[');
  while (start != std::string::npos) {
    std::size_t end = text.find(']', start);
    if (end == std::string::npos) break;
    nlohmann::json array =
        nlohmann::json::parse(text.substr(start, end - start + 1), nullptr, false);
    if (array.is_array()) {
      std::vector<std::size_t> indices;
      bool numeric = true;
      for (const nlohmann::json& item : array) {
        if (!item.is_number_integer()) {
          numeric = false;
          break;
        }
        long long value = item.get<long long>();
        if (value >= 1 && static_cast<std::size_t>(value) <= count) {
          indices.push_back(static_cast<std::size_t>(value) - 1);
        }
      }
      if (numeric) {
        std::sort(indices.begin(), indices.end());
        indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
        return indices;
      }
    }
    start = text.find('[', start + 1);
  }
  return std::nullopt;
}

}  // namespace hopsearch::llm
