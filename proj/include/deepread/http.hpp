#pragma once

#include <optional>
#include <string>

#include <httplib.h>
#include <json.hpp>

#include "deepread/error.hpp"

namespace deepread {

struct UrlParts {
  std::string base;  // scheme://host[:port]
  std::string path;  // leading slash, "/" if absent
};

inline UrlParts split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos)
    throw Error(ErrorCode::ConfigError, "endpoint URL must include a scheme: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

struct HttpResponse {
  int status = 0;
  std::string body;
};

/// One POST of a JSON body. Returns nullopt on transport failure. A fresh
/// client per call keeps concurrent in-flight requests independent.
inline std::optional<HttpResponse> post_json(const UrlParts& url, const nlohmann::json& body,
                                             const std::string& api_key,
                                             int timeout_seconds = 120) {
  httplib::Client client(url.base);
  client.set_connection_timeout(timeout_seconds, 0);
  client.set_read_timeout(timeout_seconds, 0);
  httplib::Headers headers;
  if (!api_key.empty()) headers.emplace("Authorization", "Bearer " + api_key);
  auto res = client.Post(url.path, headers, body.dump(), "application/json");
  if (!res) return std::nullopt;
  return HttpResponse{res->status, res->body};
}

}  // namespace deepread
