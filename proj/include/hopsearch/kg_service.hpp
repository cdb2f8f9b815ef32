#pragma once

#include <string>

#include "hopsearch/kg.hpp"

namespace hopsearch::kg_service {

struct HandlerResult {
  int status = 200;
  std::string body;  // JSON
};

// Handles one POST /kg/search body: {"entity": [...], "relation": [...]} ->
// {"triples": [{"head", "relation", "tail", "rendered", "score"}]}.
// Bad JSON or an empty entity list yields a 400 with {"error": ...}.
HandlerResult handle_search(const kg::KnowledgeStore& store, const std::string& request_body,
                            std::size_t max_triples = 100, std::size_t max_tokens = 1024);

// Blocking HTTP server exposing POST /kg/search (and GET /healthz). Returns
// false when the port cannot be bound.
bool serve(const kg::KnowledgeStore& store, const std::string& host, int port);

}  // namespace hopsearch::kg_service
