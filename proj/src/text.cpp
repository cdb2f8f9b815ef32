#include "hopsearch/text.hpp"

#include <cctype>

namespace hopsearch::text {
namespace {

bool is_ascii(unsigned char c) { return c < 0x80; }

bool is_ws(unsigned char c) { return std::isspace(c) != 0; }

bool is_alnum(unsigned char c) { return std::isalnum(c) != 0; }

char lower(unsigned char c) { return static_cast<char>(std::tolower(c)); }

}  // namespace

std::string normalize_surface(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (unsigned char c : text) {
    bool keep = !is_ascii(c) || is_alnum(c);
    if (keep) {
      if (pending_space && !out.empty()) out.push_back(' ');
      pending_space = false;
      out.push_back(is_ascii(c) ? lower(c) : static_cast<char>(c));
    } else {
      pending_space = true;
    }
  }
  return out;
}

std::vector<std::string> surface_tokens(std::string_view text) {
  std::string norm = normalize_surface(text);
  std::vector<std::string> tokens;
  std::size_t pos = 0;
  while (pos < norm.size()) {
    std::size_t space = norm.find(' ', pos);
    if (space == std::string::npos) space = norm.size();
    if (space > pos) tokens.emplace_back(norm.substr(pos, space - pos));
    pos = space + 1;
  }
  return tokens;
}

std::vector<std::string> answer_tokens(std::string_view text) {
  std::string cleaned;
  cleaned.reserve(text.size());
  for (unsigned char c : text) {
    if (is_ascii(c) && !is_alnum(c) && !is_ws(c)) continue;  // delete punctuation
    cleaned.push_back(!is_ascii(c) ? static_cast<char>(c) : is_ws(c) ? ' ' : lower(c));
  }
  std::vector<std::string> tokens;
  std::size_t pos = 0;
  while (pos < cleaned.size()) {
    while (pos < cleaned.size() && cleaned[pos] == ' ') ++pos;
    std::size_t start = pos;
    while (pos < cleaned.size() && cleaned[pos] != ' ') ++pos;
    if (pos > start) {
      std::string tok = cleaned.substr(start, pos - start);
      if (tok != "a" && tok != "an" && tok != "the") tokens.push_back(std::move(tok));
    }
  }
  return tokens;
}

std::size_t whitespace_token_count(std::string_view text) {
  std::size_t count = 0;
  bool in_token = false;
  for (unsigned char c : text) {
    if (is_ascii(c) && is_ws(c)) {
      in_token = false;
    } else if (!in_token) {
      in_token = true;
      ++count;
    }
  }
  return count;
}

}  // namespace hopsearch::text
