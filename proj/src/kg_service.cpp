#include "hopsearch/kg_service.hpp"

#include <httplib.h>

#include <json.hpp>

#include "hopsearch/log.hpp"

namespace hopsearch::kg_service {

HandlerResult handle_search(const kg::KnowledgeStore& store, const std::string& request_body,
                            std::size_t max_triples, std::size_t max_tokens) {
  nlohmann::json request = nlohmann::json::parse(request_body, nullptr, false);
  auto bad = [](const std::string& why) {
    return HandlerResult{400, nlohmann::json{{"error", why}}.dump()};
  };
  if (request.is_discarded() || !request.is_object()) return bad("body must be a JSON object");

  kg::KgQuery query;
  for (const char* key : {"entity", "relation"}) {
    if (!request.contains(key)) continue;
    if (!request[key].is_array()) return bad(std::string("\"") + key + "\" must be an array");
    for (const nlohmann::json& item : request[key]) {
      if (!item.is_string()) return bad(std::string("\"") + key + "\" must hold strings");
      (key[0] == 'e' ? query.entities : query.relations).push_back(item.get<std::string>());
    }
  }
  if (query.entities.empty()) return bad("\"entity\" must hold at least one string");

  nlohmann::json triples = nlohmann::json::array();
  for (const kg::ScoredTriple& st : store.search(query, max_triples, max_tokens)) {
    triples.push_back({{"head", st.triple.head},
                       {"relation", st.triple.relation},
                       {"tail", st.triple.tail},
                       {"rendered", st.rendered},
                       {"score", st.score}});
  }
  return HandlerResult{200, nlohmann::json{{"triples", std::move(triples)}}.dump()};
}

bool serve(const kg::KnowledgeStore& store, const std::string& host, int port) {
  httplib::Server server;
  server.Post("/kg/search", [&store](const httplib::Request& req, httplib::Response& res) {
    HandlerResult result = handle_search(store, req.body);
    res.status = result.status;
    res.set_content(result.body, "application/json");
  });
  server.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
    res.set_content("ok", "text/plain");
  });
  log::info("kg service listening on " + host + ":" + std::to_string(port));
  return server.listen(host, port);
}

}  // namespace hopsearch::kg_service
