#include "qd/corpus/repository.hpp"

#include "qd/error.hpp"

#include <httplib.h>
#include <json.hpp>

#include <algorithm>

namespace qd::corpus {

using nlohmann::json;

void validate(const RepositoryRef& repo) {
    if (repo.full_name.empty() || std::count(repo.full_name.begin(), repo.full_name.end(), '/') != 1 ||
        repo.full_name.front() == '/' || repo.full_name.back() == '/')
        throw InputError("repository name must be owner/name: '" + repo.full_name + "'");
    if (repo.stars < 0 || repo.forks < 0) throw InputError("negative star/fork count for " + repo.full_name);
}

namespace {

const json& require(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.is_object() || !obj.contains(key)) throw ParseError("missing field '" + path + key + "'");
    return obj.at(key);
}

std::int64_t require_count(const json& obj, const std::string& key, const std::string& path) {
    const auto& v = require(obj, key, path);
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0)
        throw ParseError("field '" + path + key + "' is not a non-negative integer");
    return v.get<std::int64_t>();
}

std::string require_string(const json& obj, const std::string& key, const std::string& path) {
    const auto& v = require(obj, key, path);
    if (!v.is_string()) throw ParseError("field '" + path + key + "' is not a string");
    return v.get<std::string>();
}

}  // namespace

std::vector<RepositoryRef> parse_search_page(const std::string& body) {
    json doc;
    try {
        doc = json::parse(body);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("search response is not JSON: ") + e.what());
    }
    const auto& items = require(doc, "items", "");
    if (!items.is_array()) throw ParseError("field 'items' is not an array");

    std::vector<RepositoryRef> out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        const auto path = "items[" + std::to_string(i) + "].";
        const auto& it = items[i];
        RepositoryRef r;
        r.full_name = require_string(it, "full_name", path);
        r.stars = require_count(it, "stargazers_count", path);
        r.forks = require_count(it, "forks_count", path);
        r.clone_url = require_string(it, "clone_url", path);
        try {
            validate(r);
        } catch (const InputError&) {
            throw ParseError("field '" + path + "full_name' is not owner/name");
        }
        out.push_back(std::move(r));
    }
    return out;
}

std::string search_expression(const SearchQuery& query) {
    std::string q;
    for (const auto& t : query.terms) {
        if (!q.empty()) q += ' ';
        q += t;
    }
    if (!q.empty()) q += ' ';
    q += "stars:>" + std::to_string(query.min_stars) + " forks:>" + std::to_string(query.min_forks);
    return q;
}

GitHubSearchSource::GitHubSearchSource(GitHubSearchOptions options, net::Sleeper sleeper)
    : options_(std::move(options)), backoff_(options_.retry, options_.seed), sleeper_(std::move(sleeper)) {}

SearchPage GitHubSearchSource::fetch(const SearchQuery& query, int page, int per_page) {
    net::HttpRequest req;
    req.url = options_.api_url + "/search/repositories?q=" + httplib::detail::encode_query_param(search_expression(query)) +
              "&sort=stars&order=desc&per_page=" + std::to_string(per_page) + "&page=" + std::to_string(page);
    req.headers["Accept"] = "application/vnd.github+json";
    req.headers["User-Agent"] = "qd";
    if (!options_.token.empty()) req.headers["Authorization"] = "Bearer " + options_.token;

    const auto res = net::send_with_retry(req, backoff_, sleeper_);
    if (res.status == 401 || res.status == 403)
        throw RetryableError("search API rejected credentials (HTTP " + std::to_string(res.status) + ")", 1);
    // The search API only serves the first 1000 results.
    if (res.status == 422) return {};
    if (res.status != 200) throw Error("search API returned HTTP " + std::to_string(res.status));

    SearchPage out;
    out.items = parse_search_page(res.body);
    out.last = static_cast<int>(out.items.size()) < per_page;
    return out;
}

std::vector<RepositoryRef> discover_repositories(RepositorySource& source, std::int64_t min_stars,
                                                 std::int64_t min_forks, const std::vector<std::string>& query_terms,
                                                 std::size_t limit, int max_pages) {
    if (limit < 1) throw InputError("discovery limit must be at least 1");
    const SearchQuery query{query_terms, min_stars, min_forks};
    const int per_page = static_cast<int>(std::clamp<std::size_t>(limit, 1, 100));

    std::vector<RepositoryRef> kept;
    for (int page = 1; page <= max_pages && kept.size() < limit; ++page) {
        auto batch = source.fetch(query, page, per_page);
        for (auto& r : batch.items) {
            const bool seen = std::any_of(kept.begin(), kept.end(),
                                          [&](const RepositoryRef& k) { return k.full_name == r.full_name; });
            if (!seen && r.stars > min_stars && r.forks > min_forks) kept.push_back(std::move(r));
        }
        if (batch.last) break;
    }
    std::stable_sort(kept.begin(), kept.end(), [](const RepositoryRef& a, const RepositoryRef& b) {
        if (a.stars != b.stars) return a.stars > b.stars;
        return a.full_name < b.full_name;
    });
    if (kept.size() > limit) kept.resize(limit);
    return kept;
}

}  // namespace qd::corpus
