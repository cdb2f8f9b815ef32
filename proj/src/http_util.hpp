#pragma once

#include <chrono>
#include <map>
#include <string>

namespace hopsearch::http {

struct Response {
  int status = 0;
  std::string body;
};

// POSTs a JSON body to a full URL. Throws hopsearch::Error when the transport
// fails entirely (connection refused, timeout); HTTP-level failures come back
// as the status code.
Response post_json(const std::string& url, const std::string& json_body,
                   const std::map<std::string, std::string>& headers,
                   std::chrono::milliseconds timeout);

}  // namespace hopsearch::http
