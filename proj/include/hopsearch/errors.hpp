#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hopsearch {

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Corpus / KG / dataset file problems. Message carries file and line.
class LoadError : public Error {
 public:
  using Error::Error;
};

// Trajectory text that violates the delimiter grammar.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " (offset " + std::to_string(offset) + ")"), offset_(offset) {}

  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

// Invalid <search> payload.
class RequestError : public Error {
 public:
  using Error::Error;
};

// Missing \boxed group in an answer.
class ExtractionError : public Error {
 public:
  using Error::Error;
};

class IndexError : public Error {
 public:
  using Error::Error;
};

// Remote retrieval failure; carries the provider kind.
class RetrievalError : public Error {
 public:
  RetrievalError(const std::string& provider_kind, const std::string& cause)
      : Error(provider_kind + ": " + cause), provider_kind_(provider_kind) {}

  const std::string& provider_kind() const { return provider_kind_; }

 private:
  std::string provider_kind_;
};

class LlmError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace hopsearch
