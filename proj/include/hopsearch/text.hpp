#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace hopsearch::text {

// Surface-form normalization used by the KG matcher and the lexical index:
// ASCII lower-case, punctuation replaced by spaces, whitespace collapsed,
// trimmed. Non-ASCII bytes pass through unchanged.
std::string normalize_surface(std::string_view text);

// normalize_surface followed by a whitespace split.
std::vector<std::string> surface_tokens(std::string_view text);

// QA-answer normalization: lower-case, punctuation characters deleted,
// articles {a, an, the} dropped, whitespace split. Deleting (rather than
// spacing out) punctuation matches the usual word-level F1 convention,
// so "don't" becomes "dont".
std::vector<std::string> answer_tokens(std::string_view text);

// Number of whitespace-separated fields in the raw string.
std::size_t whitespace_token_count(std::string_view text);

// Pluggable token-counting hook for budgets stated in model tokens.
using TokenCounter = std::function<std::size_t(std::string_view)>;

}  // namespace hopsearch::text
