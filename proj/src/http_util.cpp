#include "http_util.hpp"

#include <httplib.h>

#include "hopsearch/errors.hpp"

namespace hopsearch::http {

Response post_json(const std::string& url, const std::string& json_body,
                   const std::map<std::string, std::string>& headers,
                   std::chrono::milliseconds timeout) {
  std::size_t scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw Error("malformed endpoint URL: " + url);
  std::size_t path_start = url.find('/', scheme_end + 3);
  std::string base = path_start == std::string::npos ? url : url.substr(0, path_start);
  std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);

  httplib::Client client(base);
  client.set_connection_timeout(std::chrono::duration_cast<std::chrono::seconds>(timeout));
  client.set_read_timeout(std::chrono::duration_cast<std::chrono::seconds>(timeout));
  client.set_write_timeout(std::chrono::duration_cast<std::chrono::seconds>(timeout));

  httplib::Headers hs;
  for (const auto& [k, v] : headers) hs.emplace(k, v);

  httplib::Result result = client.Post(path, hs, json_body, "application/json");
  if (!result) throw Error("request to " + url + " failed: " + httplib::to_string(result.error()));
  return Response{result->status, result->body};
}

}  // namespace hopsearch::http
