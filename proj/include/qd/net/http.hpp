#pragma once

#include "qd/error.hpp"

#include <chrono>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <string>

namespace qd::net {

struct Url {
    std::string scheme;  // "http" or "https"
    std::string host;
    int port = 0;
    std::string target;  // path + query

    /// "scheme://host:port"
    [[nodiscard]] std::string origin() const;
};

/// Throws InputError for anything but http(s)://host[:port][/path].
Url parse_url(const std::string& url);

struct HttpResponse {
    int status = 0;
    std::string body;
    std::map<std::string, std::string> headers;  // lower-cased names

    [[nodiscard]] std::optional<std::string> header(const std::string& lower_name) const;
};

/// Connection-level failure (DNS, refused, TLS, timeout): no HTTP status.
class TransportError : public Error {
public:
    using Error::Error;
};

struct HttpRequest {
    std::string method = "GET";
    std::string url;
    std::map<std::string, std::string> headers;
    std::string body;
    std::string content_type = "application/json";
    std::chrono::seconds timeout{60};
};

HttpResponse send(const HttpRequest& request);

struct RetryPolicy {
    int max_attempts = 5;
    std::chrono::milliseconds base_delay{500};
    std::chrono::milliseconds max_delay{30000};
    double jitter = 0.5;  // fraction of the delay randomized downward
};

/// 429, 5xx gateway/availability codes, and 403 responses that carry an
/// exhausted rate-limit header.
bool is_retryable(const HttpResponse& response);

/// Server-requested wait, from Retry-After (seconds) or X-RateLimit-Reset
/// (epoch seconds) relative to `now`.
std::optional<std::chrono::milliseconds> requested_wait(const HttpResponse& response,
                                                        std::chrono::system_clock::time_point now);

/// Exponential backoff with seeded jitter: delay(n) = min(max, base * 2^(n-1))
/// scaled by a factor in [1 - jitter, 1].
class Backoff {
public:
    explicit Backoff(RetryPolicy policy, std::uint64_t seed = 0) : policy_(policy), rng_(seed) {}

    std::chrono::milliseconds delay(int attempt, std::optional<std::chrono::milliseconds> requested = std::nullopt);
    [[nodiscard]] const RetryPolicy& policy() const noexcept { return policy_; }

private:
    RetryPolicy policy_;
    std::mutex mu_;
    std::mt19937_64 rng_;
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;

Sleeper real_sleeper();

/// Sends with retries on transport errors and retryable statuses. Returns the
/// first non-retryable response. Throws RetryableError (with the attempt
/// count) once attempts are exhausted.
HttpResponse send_with_retry(const HttpRequest& request, Backoff& backoff, const Sleeper& sleep);

/// Thread-safe token bucket: `rate` tokens per second, capacity `burst`.
class TokenBucket {
public:
    TokenBucket(double rate_per_second, double burst);

    /// Blocks until a token is available.
    void acquire();

private:
    std::mutex mu_;
    double rate_;
    double capacity_;
    double tokens_;
    std::chrono::steady_clock::time_point last_;
};

}  // namespace qd::net
