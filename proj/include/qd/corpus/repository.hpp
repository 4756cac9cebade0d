#pragma once

#include "qd/net/http.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace qd::corpus {

struct RepositoryRef {
    std::string full_name;  // owner/name
    std::int64_t stars = 0;
    std::int64_t forks = 0;
    std::string clone_url;

    bool operator==(const RepositoryRef&) const = default;
};

/// Throws InputError unless full_name is "owner/name" and counts are >= 0.
void validate(const RepositoryRef& repo);

struct SearchQuery {
    std::vector<std::string> terms;
    std::int64_t min_stars = 0;
    std::int64_t min_forks = 0;
};

/// One page of candidates from a code-hosting search endpoint.
struct SearchPage {
    std::vector<RepositoryRef> items;
    bool last = true;
};

class RepositorySource {
public:
    virtual ~RepositorySource() = default;
    /// `page` is 1-based.
    virtual SearchPage fetch(const SearchQuery& query, int page, int per_page) = 0;
};

/// Parses a search response body ({"items": [...]}). Throws ParseError
/// naming the offending field ("items[3].stargazers_count").
std::vector<RepositoryRef> parse_search_page(const std::string& body);

/// "video stars:>1000 forks:>1000"
std::string search_expression(const SearchQuery& query);

struct GitHubSearchOptions {
    std::string api_url = "https://api.github.com";
    std::string token;  // empty: unauthenticated
    net::RetryPolicy retry;
    std::uint64_t seed = 0;
};

/// GitHub-style /search/repositories client, sorted by stars descending.
class GitHubSearchSource : public RepositorySource {
public:
    explicit GitHubSearchSource(GitHubSearchOptions options, net::Sleeper sleeper = net::real_sleeper());

    SearchPage fetch(const SearchQuery& query, int page, int per_page) override;

private:
    GitHubSearchOptions options_;
    net::Backoff backoff_;
    net::Sleeper sleeper_;
};

/// Pages through `source` and keeps repositories with stars > min_stars and
/// forks > min_forks, ordered by descending stars (ties by name), at most
/// `limit` of them.
std::vector<RepositoryRef> discover_repositories(RepositorySource& source, std::int64_t min_stars,
                                                 std::int64_t min_forks, const std::vector<std::string>& query_terms,
                                                 std::size_t limit, int max_pages = 10);

}  // namespace qd::corpus
