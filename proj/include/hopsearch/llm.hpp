#pragma once

#include <chrono>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace hopsearch::llm {

struct Message {
  std::string role;  // "system" | "user" | "assistant"
  std::string content;
};

struct GenerationRequest {
  std::vector<Message> messages;
  std::vector<std::string> stop;
  double temperature = 1.0;
  double top_p = 0.95;
  std::size_t max_tokens = 8192;
};

struct GenerationResult {
  std::string text;                     // stop sequence excluded
  std::optional<std::string> stop_hit;  // which stop sequence fired, when known
  std::string finish_reason;            // "stop" | "length" | "end" | provider-specific
};

/// Generation client contract: honors stop sequences and continues from a
/// trailing assistant message. Implementations must tolerate concurrent
/// in-flight requests from different rollouts.
class Client {
 public:
  virtual ~Client() = default;

  // Throws LlmError after exhausting any retry budget.
  virtual GenerationResult generate(const GenerationRequest& request) = 0;
};

/// Deterministic test double. Each generate() call consumes the next chunk;
/// a chunk containing a stop sequence is cut at the earliest occurrence and
/// the remainder is discarded. An exhausted script throws LlmError.
class ScriptedClient final : public Client {
 public:
  explicit ScriptedClient(std::vector<std::string> chunks) : chunks_(std::move(chunks)) {}

  GenerationResult generate(const GenerationRequest& request) override;

  std::size_t remaining() const { return chunks_.size() - next_; }

 private:
  std::vector<std::string> chunks_;
  std::size_t next_ = 0;
};

struct RetryPolicy {
  std::size_t max_retries = 2;
  std::chrono::milliseconds initial_backoff{250};  // doubles per attempt
};

struct EndpointConfig {
  std::string endpoint;  // full URL of a chat-completions route
  std::string model;
  std::optional<std::string> api_key;  // falls back to the LLM_API_KEY env var
  std::chrono::milliseconds timeout{60000};
  RetryPolicy retry;
};

// Chat-completions-style HTTP client. Prior assistant text is sent as a
// trailing assistant message with continuation flags the common inference
// servers honor.
std::unique_ptr<Client> make_http_client(const EndpointConfig& config);

// Parses "keep items 2 and 7" style model output into 0-based indices:
// accepts a JSON array of 1-based integers anywhere in the text. Returns
// nullopt when nothing parseable is found; out-of-range entries are dropped.
std::optional<std::vector<std::size_t>> parse_index_selection(const std::string& text,
                                                              std::size_t count);

}  // namespace hopsearch::llm
