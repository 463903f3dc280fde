#pragma once

#include <algorithm>
#include <chrono>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "stellar/error.hpp"

namespace stellar {

struct HttpRequest {
  std::string url;
  std::string body;
  std::vector<std::pair<std::string, std::string>> headers;
  std::chrono::milliseconds timeout{30000};
};

struct HttpResponse {
  int status = 0;
  std::string body;
};

// Raised by a transport when no response arrived in time.
class TransportTimeout : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised by a transport for connection-level failures (refused, reset, DNS).
class TransportUnavailable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Transport {
 public:
  virtual ~Transport() = default;
  virtual HttpResponse post(const HttpRequest& request) = 0;
};

struct RetryPolicy {
  int retries = 3;
  std::chrono::milliseconds base_delay{500};
  std::chrono::milliseconds max_delay{8000};
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;

inline Sleeper real_sleeper() {
  return [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

// Enforces a minimum spacing between requests. Zero rate disables it.
class RateLimiter {
 public:
  explicit RateLimiter(double requests_per_second = 0.0) {
    if (requests_per_second > 0.0)
      interval_ = std::chrono::duration_cast<std::chrono::steady_clock::duration>(
          std::chrono::duration<double>(1.0 / requests_per_second));
  }

  void acquire() {
    if (interval_.count() == 0) return;
    std::chrono::steady_clock::time_point slot;
    {
      std::lock_guard lock(mu_);
      const auto now = std::chrono::steady_clock::now();
      slot = std::max(now, next_);
      next_ = slot + interval_;
    }
    std::this_thread::sleep_until(slot);
  }

 private:
  std::mutex mu_;
  std::chrono::steady_clock::duration interval_{0};
  std::chrono::steady_clock::time_point next_{};
};

struct PostOutcome {
  HttpResponse response;
  int retries = 0;
};

inline std::string excerpt(const std::string& body, std::size_t limit = 200) {
  return body.size() <= limit ? body : body.substr(0, limit) + "...";
}

// POSTs with exponential backoff. 429, 5xx, timeouts and connection
// failures are retried; 401/403 and other 4xx are not. At most
// `policy.retries + 1` attempts are made.
inline PostOutcome post_with_retries(Transport& transport, const HttpRequest& request,
                                     const RetryPolicy& policy, const Sleeper& sleep,
                                     RateLimiter* limiter = nullptr) {
  auto delay = policy.base_delay;
  for (int attempt = 0;; ++attempt) {
    const bool last = attempt >= policy.retries;
    if (limiter) limiter->acquire();
    try {
      HttpResponse r = transport.post(request);
      if (r.status >= 200 && r.status < 300) return {std::move(r), attempt};
      if (r.status == 401 || r.status == 403) throw AuthError("provider rejected credentials (status " + std::to_string(r.status) + ")");
      const bool transient = r.status == 429 || r.status >= 500;
      if (!transient) throw ProviderError(r.status, excerpt(r.body));
      if (last) {
        if (r.status == 429) throw RateLimited(attempt + 1);
        throw ProviderError(r.status, excerpt(r.body));
      }
    } catch (const TransportTimeout& e) {
      if (last) throw Timeout(e.what());
    } catch (const TransportUnavailable& e) {
      if (last) throw ProviderError(0, e.what());
    }
    if (sleep) sleep(delay);
    delay = std::min(delay * 2, policy.max_delay);
  }
}

}  // namespace stellar
