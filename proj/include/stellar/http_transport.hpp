#pragma once

// cpp-httplib backed Transport. Kept out of the umbrella header so programs
// that only use the offline pipeline do not pull in the HTTP client.

#include <httplib.h>

#include <string>

#include "stellar/transport.hpp"

namespace stellar {

class HttplibTransport : public Transport {
 public:
  HttpResponse post(const HttpRequest& request) override {
    const auto [origin, path] = split_url(request.url);
    httplib::Client client(origin);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(request.timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(request.timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());
    httplib::Headers headers;
    for (const auto& [k, v] : request.headers) headers.emplace(k, v);
    auto res = client.Post(path, headers, request.body, "application/json");
    if (!res) {
      if (res.error() == httplib::Error::ConnectionTimeout || res.error() == httplib::Error::Read)
        throw TransportTimeout("request to " + origin + " timed out");
      throw TransportUnavailable("request to " + origin + " failed: " + httplib::to_string(res.error()));
    }
    return {res->status, res->body};
  }

  // "http://host:port/v1/x" -> {"http://host:port", "/v1/x"}
  static std::pair<std::string, std::string> split_url(const std::string& url) {
    const auto scheme = url.find("://");
    const auto host_start = scheme == std::string::npos ? 0 : scheme + 3;
    const auto slash = url.find('/', host_start);
    if (slash == std::string::npos) return {url, "/"};
    return {url.substr(0, slash), url.substr(slash)};
  }
};

}  // namespace stellar
