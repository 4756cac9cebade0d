#include "qd/net/http.hpp"

#include <httplib.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <thread>

namespace qd::net {

std::string Url::origin() const { return scheme + "://" + host + ":" + std::to_string(port); }

Url parse_url(const std::string& url) {
    Url u;
    auto sep = url.find("://");
    if (sep == std::string::npos) throw InputError("URL without scheme: " + url);
    u.scheme = url.substr(0, sep);
    if (u.scheme != "http" && u.scheme != "https") throw InputError("unsupported URL scheme: " + u.scheme);
    auto rest = url.substr(sep + 3);
    auto slash = rest.find('/');
    auto authority = rest.substr(0, slash);
    u.target = slash == std::string::npos ? "/" : rest.substr(slash);
    auto colon = authority.rfind(':');
    if (colon != std::string::npos) {
        u.host = authority.substr(0, colon);
        try {
            u.port = std::stoi(authority.substr(colon + 1));
        } catch (const std::exception&) {
            throw InputError("bad port in URL: " + url);
        }
    } else {
        u.host = authority;
        u.port = u.scheme == "https" ? 443 : 80;
    }
    if (u.host.empty()) throw InputError("URL without host: " + url);
    return u;
}

std::optional<std::string> HttpResponse::header(const std::string& lower_name) const {
    auto it = headers.find(lower_name);
    if (it == headers.end()) return std::nullopt;
    return it->second;
}

HttpResponse send(const HttpRequest& request) {
    const auto url = parse_url(request.url);
    httplib::Client client(url.origin());
    client.set_connection_timeout(request.timeout);
    client.set_read_timeout(request.timeout);
    client.set_write_timeout(request.timeout);
    client.enable_server_certificate_verification(true);

    httplib::Headers headers;
    for (const auto& [k, v] : request.headers) headers.emplace(k, v);

    httplib::Result res = request.method == "POST"
                              ? client.Post(url.target, headers, request.body, request.content_type)
                              : client.Get(url.target, headers);
    if (!res) throw TransportError("request to " + url.host + " failed: " + httplib::to_string(res.error()));

    HttpResponse out;
    out.status = res->status;
    out.body = res->body;
    for (const auto& [k, v] : res->headers) {
        std::string key = k;
        std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) { return std::tolower(c); });
        out.headers[key] = v;
    }
    return out;
}

bool is_retryable(const HttpResponse& response) {
    switch (response.status) {
        case 408:
        case 429:
        case 500:
        case 502:
        case 503:
        case 504:
            return true;
        case 403:
            return response.header("x-ratelimit-remaining") == std::optional<std::string>("0") ||
                   response.header("retry-after").has_value();
        default:
            return false;
    }
}

std::optional<std::chrono::milliseconds> requested_wait(const HttpResponse& response,
                                                        std::chrono::system_clock::time_point now) {
    using namespace std::chrono;
    if (auto ra = response.header("retry-after")) {
        try {
            return milliseconds(static_cast<long long>(std::stod(*ra) * 1000));
        } catch (const std::exception&) {
        }
    }
    if (auto reset = response.header("x-ratelimit-reset")) {
        try {
            const auto at = system_clock::time_point(seconds(std::stoll(*reset)));
            if (at > now) return duration_cast<milliseconds>(at - now);
            return milliseconds(0);
        } catch (const std::exception&) {
        }
    }
    return std::nullopt;
}

std::chrono::milliseconds Backoff::delay(int attempt, std::optional<std::chrono::milliseconds> requested) {
    using namespace std::chrono;
    const double exp = std::pow(2.0, std::max(0, attempt - 1));
    double ms = std::min(static_cast<double>(policy_.max_delay.count()), policy_.base_delay.count() * exp);
    {
        std::lock_guard lock(mu_);
        std::uniform_real_distribution<double> dist(1.0 - policy_.jitter, 1.0);
        ms *= dist(rng_);
    }
    auto d = milliseconds(static_cast<long long>(ms));
    if (requested) d = std::max(d, std::min(*requested, policy_.max_delay));
    return d;
}

Sleeper real_sleeper() {
    return [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

HttpResponse send_with_retry(const HttpRequest& request, Backoff& backoff, const Sleeper& sleep) {
    std::string last_failure;
    const int attempts = std::max(1, backoff.policy().max_attempts);
    for (int attempt = 1; attempt <= attempts; ++attempt) {
        std::optional<std::chrono::milliseconds> requested;
        try {
            auto response = send(request);
            if (!is_retryable(response)) return response;
            last_failure = "HTTP " + std::to_string(response.status);
            requested = requested_wait(response, std::chrono::system_clock::now());
        } catch (const TransportError& e) {
            last_failure = e.what();
        }
        if (attempt < attempts) sleep(backoff.delay(attempt, requested));
    }
    throw RetryableError(last_failure, attempts);
}

TokenBucket::TokenBucket(double rate_per_second, double burst)
    : rate_(rate_per_second), capacity_(std::max(1.0, burst)), tokens_(capacity_), last_(std::chrono::steady_clock::now()) {}

void TokenBucket::acquire() {
    using namespace std::chrono;
    while (true) {
        duration<double> wait{};
        {
            std::lock_guard lock(mu_);
            const auto now = steady_clock::now();
            tokens_ = std::min(capacity_, tokens_ + duration<double>(now - last_).count() * rate_);
            last_ = now;
            if (tokens_ >= 1.0) {
                tokens_ -= 1.0;
                return;
            }
            if (rate_ <= 0) throw InputError("token bucket with non-positive rate cannot refill");
            wait = duration<double>((1.0 - tokens_) / rate_);
        }
        std::this_thread::sleep_for(wait);
    }
}

}  // namespace qd::net
