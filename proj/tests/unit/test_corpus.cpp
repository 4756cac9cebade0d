#include "oracles.hpp"

#include "qd/corpus/miner.hpp"
#include "qd/corpus/repository.hpp"
#include "qd/corpus/splitter.hpp"
#include "qd/error.hpp"
#include "qd/java/entity_tree.hpp"
#include "qd/process.hpp"
#include "qd/text.hpp"

#include <doctest.h>
#include <httplib.h>

#include <atomic>
#include <fstream>
#include <map>
#include <thread>

using namespace qd;
using corpus::RepositoryRef;
namespace fs = std::filesystem;

namespace {

class FakeSource : public corpus::RepositorySource {
public:
    explicit FakeSource(std::vector<std::vector<RepositoryRef>> pages) : pages_(std::move(pages)) {}

    corpus::SearchPage fetch(const corpus::SearchQuery& query, int page, int) override {
        last_query = query;
        ++calls;
        if (page > static_cast<int>(pages_.size())) return {};
        return {pages_[static_cast<std::size_t>(page - 1)], page == static_cast<int>(pages_.size())};
    }

    corpus::SearchQuery last_query;
    int calls = 0;

private:
    std::vector<std::vector<RepositoryRef>> pages_;
};

RepositoryRef repo(const std::string& name, std::int64_t stars, std::int64_t forks) {
    return {name, stars, forks, "https://github.com/" + name + ".git"};
}

void git(const fs::path& dir, const std::vector<std::string>& args) {
    std::vector<std::string> argv = {"git", "-C", dir.string(), "-c", "user.name=t", "-c", "user.email=t@example.com",
                                     "-c", "commit.gpgsign=false"};
    argv.insert(argv.end(), args.begin(), args.end());
    const auto r = run_process(argv);
    REQUIRE_MESSAGE(r.exit_code == 0, r.err);
}

void write(const fs::path& p, const std::string& content) {
    fs::create_directories(p.parent_path());
    std::ofstream(p, std::ios::binary) << content;
}

corpus::CommitFileRecord record_of(const std::string& before, const std::string& after) {
    corpus::CommitFileRecord r;
    r.sha = "abc123";
    r.filename = "src/A.java";
    r.commit_message = "change";
    r.code_before = before;
    r.code_after = after;
    r.diff = diff::unified_diff(before, after, r.filename);
    r.repo = repo("o/r", 1, 1);
    return r;
}

}  // namespace

// ---- discovery -----------------------------------------------------------

TEST_CASE("threshold filter keeps repositories strictly above both counts") {
    FakeSource src({{repo("CarGuo/GSYVideoPlayer", 18991, 4086), repo("RameshMF/spring-boot-tutorial", 1452, 1677),
                     repo("small/stars", 1000, 5000), repo("small/forks", 5000, 1000), repo("tiny/one", 10, 2)}});
    const auto got = corpus::discover_repositories(src, 1000, 1000, {"video"}, 10);
    REQUIRE(got.size() == 2);
    CHECK(got[0].full_name == "CarGuo/GSYVideoPlayer");
    CHECK(got[1].full_name == "RameshMF/spring-boot-tutorial");
    CHECK(src.last_query.terms == std::vector<std::string>{"video"});
    for (const auto& r : got) {
        CHECK(r.stars > 1000);
        CHECK(r.forks > 1000);
    }
}

TEST_CASE("zero thresholds pass the first candidates") {
    std::vector<RepositoryRef> page;
    for (int i = 0; i < 8; ++i) page.push_back(repo("o/r" + std::to_string(i), 100 - i, 1));
    FakeSource src({page});
    const auto got = corpus::discover_repositories(src, 0, 0, {}, 5);
    REQUIRE(got.size() == 5);
    for (int i = 0; i < 5; ++i) CHECK(got[static_cast<std::size_t>(i)].full_name == "o/r" + std::to_string(i));
}

TEST_CASE("discovery pages, deduplicates and orders") {
    FakeSource src({{repo("b/x", 50, 50), repo("a/y", 50, 50)}, {repo("b/x", 50, 50), repo("c/z", 90, 90)}});
    const auto got = corpus::discover_repositories(src, 1, 1, {}, 10);
    REQUIRE(got.size() == 3);
    CHECK(got[0].full_name == "c/z");
    CHECK(got[1].full_name == "a/y");
    CHECK(got[2].full_name == "b/x");
    CHECK(src.calls == 2);
    CHECK_THROWS_AS(corpus::discover_repositories(src, 0, 0, {}, 0), InputError);
}

TEST_CASE("search expression") {
    CHECK(corpus::search_expression({{"video"}, 1000, 1000}) == "video stars:>1000 forks:>1000");
    CHECK(corpus::search_expression({{}, 0, 5}) == "stars:>0 forks:>5");
}

TEST_CASE("malformed search payloads name the field") {
    auto message = [](const std::string& body) {
        try {
            corpus::parse_search_page(body);
        } catch (const ParseError& e) {
            return std::string(e.what());
        }
        return std::string("no error");
    };
    const std::string good = R"({"full_name":"a/b","stargazers_count":1,"forks_count":2,"clone_url":"u"})";
    CHECK(message("{}").find("'items'") != std::string::npos);
    CHECK(message(R"({"items":[)" + good + R"(,{"full_name":"c/d","stargazers_count":"many","forks_count":2,"clone_url":"u"}]})")
              .find("items[1].stargazers_count") != std::string::npos);
    CHECK(message(R"({"items":[{"stargazers_count":1,"forks_count":2,"clone_url":"u"}]})").find("items[0].full_name") !=
          std::string::npos);
    CHECK(message("not json").find("not JSON") != std::string::npos);
    const auto ok = corpus::parse_search_page(R"({"items":[)" + good + "]}");
    REQUIRE(ok.size() == 1);
    CHECK(ok[0] == RepositoryRef{"a/b", 1, 2, "u"});
}

TEST_CASE("repository identity validation") {
    CHECK_NOTHROW(corpus::validate(repo("a/b", 0, 0)));
    CHECK_THROWS_AS(corpus::validate(repo("ab", 0, 0)), InputError);
    CHECK_THROWS_AS(corpus::validate(repo("a/b/c", 0, 0)), InputError);
    CHECK_THROWS_AS(corpus::validate(repo("a/b", -1, 0)), InputError);
}

TEST_CASE("search client against a local server: paging, auth and rate limits") {
    httplib::Server server;
    std::atomic<int> hits{0};
    std::string seen_auth, seen_query;
    server.Get("/search/repositories", [&](const httplib::Request& req, httplib::Response& res) {
        const int n = ++hits;
        seen_auth = req.get_header_value("Authorization");
        seen_query = req.get_param_value("q");
        if (n == 1) {
            res.status = 429;
            res.set_header("Retry-After", "0");
            return;
        }
        res.set_content(
            R"({"items":[{"full_name":"CarGuo/GSYVideoPlayer","stargazers_count":18991,"forks_count":4086,"clone_url":"c"}]})",
            "application/json");
    });
    const int port = server.bind_to_any_port("127.0.0.1");
    std::thread th([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    std::vector<std::chrono::milliseconds> sleeps;
    corpus::GitHubSearchOptions opt;
    opt.api_url = "http://127.0.0.1:" + std::to_string(port);
    opt.token = "secret";
    corpus::GitHubSearchSource source(opt, [&](std::chrono::milliseconds d) { sleeps.push_back(d); });
    const auto got = corpus::discover_repositories(source, 1000, 1000, {"video"}, 10);
    server.stop();
    th.join();

    REQUIRE(got.size() == 1);
    CHECK(got[0].stars == 18991);
    CHECK(hits == 2);
    CHECK(sleeps.size() == 1);
    CHECK(seen_auth == "Bearer secret");
    CHECK(seen_query == "video stars:>1000 forks:>1000");
}

TEST_CASE("search client reports rejected credentials and exhausted retries") {
    httplib::Server server;
    std::atomic<int> hits{0};
    std::atomic<int> status{401};
    server.Get("/search/repositories", [&](const httplib::Request&, httplib::Response& res) {
        ++hits;
        res.status = status;
    });
    const int port = server.bind_to_any_port("127.0.0.1");
    std::thread th([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    corpus::GitHubSearchOptions opt;
    opt.api_url = "http://127.0.0.1:" + std::to_string(port);
    opt.retry.max_attempts = 3;
    corpus::GitHubSearchSource source(opt, [](std::chrono::milliseconds) {});
    try {
        source.fetch({{}, 0, 0}, 1, 10);
        FAIL("expected an error");
    } catch (const RetryableError& e) {
        CHECK(e.attempts() == 1);
    }
    status = 503;
    hits = 0;
    try {
        source.fetch({{}, 0, 0}, 1, 10);
        FAIL("expected an error");
    } catch (const RetryableError& e) {
        CHECK(e.attempts() == 3);
    }
    CHECK(hits == 3);
    server.stop();
    th.join();
}

// ---- mining --------------------------------------------------------------

TEST_CASE("three commits touching two source files and one document give two records") {
    const auto dir = testing::temp_dir("qd-mine");
    git(dir, {"init", "-q", "-b", "main"});
    write(dir / "A.java", "class A {}\n");
    git(dir, {"add", "-A"});
    git(dir, {"commit", "-q", "-m", "add A"});
    write(dir / "README.md", "# readme\n");
    git(dir, {"add", "-A"});
    git(dir, {"commit", "-q", "-m", "docs"});
    write(dir / "B.java", "class B {}\n");
    write(dir / "A.java", "class A { int x; }\n");
    git(dir, {"add", "-A"});
    git(dir, {"commit", "-q", "-m", "add B, change A"});
    write(dir / "README.md", "# readme 2\n");
    git(dir, {"add", "-A"});
    git(dir, {"commit", "-q", "-m", "docs 2"});

    corpus::MiningStats stats;
    const auto records = corpus::mine_commits(dir.string(), ".java", corpus::local_repository(dir.string()), &stats);
    REQUIRE(records.size() == 3);
    CHECK(stats.commits_seen == 4);
    CHECK(stats.records_emitted == 3);
    CHECK(records[0].filename == "A.java");
    CHECK(records[0].code_before.empty());
    CHECK(records[0].commit_message == "add A");
    CHECK(records[1].filename == "A.java");
    CHECK(records[1].code_before == "class A {}\n");
    CHECK(records[1].code_after == "class A { int x; }\n");
    CHECK(records[2].filename == "B.java");
    for (const auto& r : records) CHECK(diff::apply_hunks(r.code_before, diff::parse_unified(r.diff)) == r.code_after);
    CHECK(corpus::local_repository(dir.string()).full_name == "local/" + dir.filename().string());
    fs::remove_all(dir);
}

TEST_CASE("empty repository and non-repository") {
    const auto dir = testing::temp_dir("qd-empty");
    git(dir, {"init", "-q"});
    CHECK(corpus::mine_commits(dir.string(), ".java", corpus::local_repository(dir.string())).empty());
    const auto plain = testing::temp_dir("qd-plain");
    CHECK_THROWS_AS(corpus::mine_commits(plain.string(), ".java", corpus::local_repository(plain.string())), InputError);
    fs::remove_all(dir);
    fs::remove_all(plain);
}

TEST_CASE("renames are a delete plus an add; binary and non-UTF-8 files are skipped") {
    const auto dir = testing::temp_dir("qd-rename");
    git(dir, {"init", "-q", "-b", "main"});
    write(dir / "Old.java", "class Old { int a; int b; int c; }\n");
    write(dir / "Bin.java", std::string("class\0Bin", 9));
    write(dir / "Latin.java", "class L { String s = \"caf\xe9\"; }\n");
    git(dir, {"add", "-A"});
    git(dir, {"commit", "-q", "-m", "one"});
    git(dir, {"mv", "Old.java", "New.java"});
    git(dir, {"commit", "-q", "-m", "rename"});

    corpus::MiningStats stats;
    const auto records = corpus::mine_commits(dir.string(), ".java", corpus::local_repository(dir.string()), &stats);
    CHECK(stats.skipped == 2);
    REQUIRE(records.size() == 3);
    CHECK(records[1].filename == "New.java");
    CHECK(records[1].code_before.empty());
    CHECK(records[2].filename == "Old.java");
    CHECK(records[2].code_after.empty());
    fs::remove_all(dir);
}

TEST_CASE("merge commits are diffed against the first parent") {
    const auto dir = testing::temp_dir("qd-merge");
    git(dir, {"init", "-q", "-b", "main"});
    write(dir / "A.java", "class A {}\n");
    git(dir, {"add", "-A"});
    git(dir, {"commit", "-q", "-m", "base"});
    git(dir, {"checkout", "-q", "-b", "side"});
    write(dir / "B.java", "class B {}\n");
    git(dir, {"add", "-A"});
    git(dir, {"commit", "-q", "-m", "side"});
    git(dir, {"checkout", "-q", "main"});
    write(dir / "C.java", "class C {}\n");
    git(dir, {"add", "-A"});
    git(dir, {"commit", "-q", "-m", "main"});
    git(dir, {"merge", "-q", "--no-ff", "-m", "merge", "side"});

    const auto records = corpus::mine_commits(dir.string(), ".java", corpus::local_repository(dir.string()));
    // base A, then side B and main C in some topological order, then the merge brings B to main.
    REQUIRE(records.size() == 4);
    CHECK(records.back().filename == "B.java");
    CHECK(records.back().commit_message == "merge");
    fs::remove_all(dir);
}

TEST_CASE("record count matches the version-control history of the fixture repositories") {
    const auto dest = testing::temp_dir("qd-fixture");
    const auto repos = testing::build_fixture_repos(dest);
    REQUIRE(repos.size() == 3);
    for (const auto& r : repos) {
        CAPTURE(r.string());
        const auto log = run_process({"git", "-C", r.string(), "log", "--no-renames", "--name-only", "--format=@%H"});
        REQUIRE(log.exit_code == 0);
        std::size_t expected = 0;
        for (const auto& line : text::split(log.out, '\n'))
            if (text::ends_with(line, ".java")) ++expected;
        const auto records = corpus::mine_commits(r.string(), ".java", corpus::local_repository(r.string()));
        CHECK(records.size() == expected);
        const auto docs = corpus::mine_commits(r.string(), ".md", corpus::local_repository(r.string()));
        for (const auto& d : docs) CHECK(text::ends_with(d.filename, ".md"));
    }
    fs::remove_all(dest);
}

// ---- splitting -----------------------------------------------------------

TEST_CASE("equal snapshots give no modifications") {
    CHECK(corpus::split_into_modifications(record_of("class A {}\n", "class A {}\n")).empty());
}

TEST_CASE("removing three adjacent imports is one import modification") {
    const std::string before =
        "package app;\n\nimport android.animation.ObjectAnimator;\nimport android.animation.ValueAnimator;\n"
        "import android.animation.AnimatorSet;\nimport android.view.View;\n\nclass Fade {\n    View v;\n}\n";
    const std::string after = "package app;\n\nimport android.view.View;\n\nclass Fade {\n    View v;\n}\n";
    const auto mods = corpus::split_into_modifications(record_of(before, after));
    REQUIRE(mods.size() == 1);
    CHECK(mods[0].region.kind == "import");
    CHECK(mods[0].hunk.removed().size() == 3);
    CHECK(mods[0].hunk.removed()[0] == "import android.animation.ObjectAnimator;\n");
    CHECK(mods[0].isolated_after == after);
    CHECK(mods[0].syntactic);
}

TEST_CASE("access modifier change is a single-line substitution inside the method") {
    const std::string before =
        "class Feed {\n    int n;\n\n    // load\n    private void fetchData(){\n        n++;\n    }\n}\n";
    std::string after = before;
    after.replace(after.find("private"), 7, "public");
    const auto mods = corpus::split_into_modifications(record_of(before, after));
    REQUIRE(mods.size() == 1);
    CHECK(mods[0].hunk.removed() == std::vector<std::string>{"    private void fetchData(){\n"});
    CHECK(mods[0].hunk.added() == std::vector<std::string>{"    public void fetchData(){\n"});
    CHECK(mods[0].hunk.removed_line_numbers() == std::vector<std::size_t>{5});
    CHECK(mods[0].region.kind == "method");
    CHECK(mods[0].region.entity == "Feed.fetchData()");
    CHECK(mods[0].isolated_after == after);
}

TEST_CASE("two hunks give two isolated modifications that replay to the final text") {
    std::vector<std::string> lines = {"class A {\n"};
    for (int i = 1; i <= 12; ++i) lines.push_back("    int f" + std::to_string(i) + ";\n");
    lines.push_back("}\n");
    const auto before = text::join(lines);
    auto after_lines = lines;
    after_lines[2] = "    long f2;\n";
    after_lines.insert(after_lines.begin() + 12, "    int extra;\n");
    const auto after = text::join(after_lines);

    const auto mods = corpus::split_into_modifications(record_of(before, after));
    REQUIRE(mods.size() == 2);

    // Oracle: splice the line arrays directly.
    auto first = lines;
    first[2] = "    long f2;\n";
    CHECK(mods[0].isolated_after == text::join(first));
    auto second = lines;
    second.insert(second.begin() + 12, "    int extra;\n");
    CHECK(mods[1].isolated_after == text::join(second));

    std::string replay = before;
    std::ptrdiff_t offset = 0;
    for (const auto& m : mods) {
        CHECK(diff::apply_hunk(m.isolated_before, m.hunk) == m.isolated_after);
        replay = diff::apply_hunk(replay, m.hunk, offset);
        offset += static_cast<std::ptrdiff_t>(m.hunk.new_len) - static_cast<std::ptrdiff_t>(m.hunk.old_len);
    }
    CHECK(replay == after);
    CHECK(mods[0].id == "abc123:src/A.java:0");
    CHECK(mods[1].id == "abc123:src/A.java:1");
    CHECK(mods[1].region.kind == "type");
}

TEST_CASE("a hunk that breaks the syntax is flagged") {
    const auto mods = corpus::split_into_modifications(
        record_of("class A {\n    void m() {\n    }\n}\n", "class A {\n    void m() {\n    \n}\n"));
    REQUIRE(mods.size() == 1);
    CHECK_FALSE(mods[0].syntactic);
}

TEST_CASE("added files are one modification; splitting is deterministic") {
    const auto rec = record_of("", "class N {\n    int x;\n}\n");
    const auto a = corpus::split_into_modifications(rec);
    const auto b = corpus::split_into_modifications(rec);
    REQUIRE(a.size() == 1);
    CHECK(a[0].region.kind == "file");
    CHECK(a[0].isolated_after == rec.code_after);
    REQUIRE(b.size() == 1);
    CHECK(a[0].id == b[0].id);
    CHECK(a[0].isolated_after == b[0].isolated_after);
    CHECK(a[0].hunk == b[0].hunk);
}

TEST_CASE("malformed record diff is a parse error") {
    auto rec = record_of("class A {}\n", "class B {}\n");
    rec.diff = "@@ -1 +1 @@\n?bad\n";
    CHECK_THROWS_AS(corpus::split_into_modifications(rec), ParseError);
}

TEST_CASE("empty hunk leaves the text unchanged") {
    diff::Hunk h;
    h.old_start = 1;
    h.new_start = 1;
    CHECK(diff::apply_hunk("a\nb\n", h) == "a\nb\n");
}
