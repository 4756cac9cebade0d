#include "qd/diff/unified_diff.hpp"
#include "qd/error.hpp"
#include "qd/text.hpp"

#include <doctest.h>

#include <random>

using namespace qd;

namespace {

std::size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    std::vector<std::vector<std::size_t>> t(a.size() + 1, std::vector<std::size_t>(b.size() + 1, 0));
    for (std::size_t i = 1; i <= a.size(); ++i)
        for (std::size_t j = 1; j <= b.size(); ++j)
            t[i][j] = a[i - 1] == b[j - 1] ? t[i - 1][j - 1] + 1 : std::max(t[i - 1][j], t[i][j - 1]);
    return t[a.size()][b.size()];
}

std::vector<std::string> random_lines(std::mt19937_64& rng, std::size_t max_len) {
    std::uniform_int_distribution<std::size_t> len(0, max_len);
    std::uniform_int_distribution<int> sym(0, 5);
    std::vector<std::string> out(len(rng));
    for (auto& l : out) l = std::string(1, static_cast<char>('a' + sym(rng))) + "\n";
    return out;
}

std::string random_text(std::mt19937_64& rng, std::size_t max_len) {
    auto text = text::join(random_lines(rng, max_len));
    if (!text.empty() && rng() % 4 == 0) text.pop_back();  // no trailing newline
    return text;
}

}  // namespace

TEST_CASE("split_lines keeps terminators and round-trips") {
    CHECK(text::split_lines("").empty());
    CHECK(text::split_lines("a\nb") == std::vector<std::string>{"a\n", "b"});
    CHECK(text::split_lines("a\r\nb\n") == std::vector<std::string>{"a\r\n", "b\n"});
    for (std::string s : {"", "x", "\n", "a\n\nb\n", "tail"}) CHECK(text::join(text::split_lines(s)) == s);
    CHECK(text::strip_eol("a\r\n") == "a");
    CHECK(text::trim("  a b \t") == "a b");
}

TEST_CASE("utf-8 and binary detection") {
    CHECK(text::is_valid_utf8("plain"));
    CHECK(text::is_valid_utf8("caf\xc3\xa9"));
    CHECK_FALSE(text::is_valid_utf8("\xc3"));
    CHECK_FALSE(text::is_valid_utf8("\xff\xfe"));
    CHECK(text::looks_binary(std::string("a\0b", 3)));
    CHECK_FALSE(text::looks_binary("abc"));
}

TEST_CASE("edit script is minimal and valid") {
    std::mt19937_64 rng(11);
    for (int round = 0; round < 300; ++round) {
        const auto a = random_lines(rng, 30);
        const auto b = random_lines(rng, 30);
        const auto edits = diff::diff_lines(a, b);
        std::size_t equal = 0;
        std::vector<std::string> rebuilt;
        std::size_t ai = 0, bi = 0;
        for (const auto& e : edits) {
            switch (e.op) {
                case diff::EditOp::Equal:
                    REQUIRE(e.old_index == ai);
                    REQUIRE(e.new_index == bi);
                    REQUIRE(a[ai] == b[bi]);
                    rebuilt.push_back(a[ai]);
                    ++ai;
                    ++bi;
                    ++equal;
                    break;
                case diff::EditOp::Delete:
                    REQUIRE(e.old_index == ai);
                    ++ai;
                    break;
                case diff::EditOp::Insert:
                    REQUIRE(e.new_index == bi);
                    rebuilt.push_back(b[bi]);
                    ++bi;
                    break;
            }
        }
        CHECK(ai == a.size());
        CHECK(rebuilt == b);
        CHECK(equal == lcs_length(a, b));
    }
}

TEST_CASE("hunks apply back to the new text and survive rendering") {
    std::mt19937_64 rng(12);
    for (int round = 0; round < 300; ++round) {
        const auto before = random_text(rng, 40);
        const auto after = random_text(rng, 40);
        const auto hunks = diff::compute_hunks(before, after);
        CHECK(diff::apply_hunks(before, hunks) == after);
        const auto rendered = diff::render_unified(hunks, "a/F.java", "b/F.java");
        const auto parsed = diff::parse_unified(rendered);
        CHECK(parsed == hunks);
        CHECK(diff::apply_hunks(before, parsed) == after);
    }
}

TEST_CASE("identical texts have no hunks") {
    CHECK(diff::compute_hunks("a\nb\n", "a\nb\n").empty());
    CHECK(diff::unified_diff("a\n", "a\n", "F.java").empty());
}

TEST_CASE("hunk headers and context") {
    const std::string before = "1\n2\n3\n4\n5\n6\n7\n8\n9\n10\n";
    const std::string after = "1\n2\n3\n4\nfive\n6\n7\n8\n9\n10\n";
    const auto hunks = diff::compute_hunks(before, after);
    REQUIRE(hunks.size() == 1);
    CHECK(hunks[0].old_start == 2);
    CHECK(hunks[0].old_len == 7);
    CHECK(hunks[0].new_start == 2);
    CHECK(hunks[0].new_len == 7);
    CHECK(hunks[0].removed() == std::vector<std::string>{"5\n"});
    CHECK(hunks[0].added() == std::vector<std::string>{"five\n"});
    CHECK(hunks[0].removed_line_numbers() == std::vector<std::size_t>{5});
    CHECK(hunks[0].added_line_numbers() == std::vector<std::size_t>{5});

    const auto text = diff::unified_diff(before, after, "N.java");
    CHECK(text.rfind("--- a/N.java\n+++ b/N.java\n@@ -2,7 +2,7 @@\n", 0) == 0);
}

TEST_CASE("distant changes get separate hunks") {
    std::string before, after;
    for (int i = 1; i <= 30; ++i) {
        before += std::to_string(i) + "\n";
        after += (i == 3 || i == 25 ? "x" : std::to_string(i)) + "\n";
    }
    const auto hunks = diff::compute_hunks(before, after);
    CHECK(hunks.size() == 2);
    CHECK(diff::apply_hunks(before, hunks) == after);
}

TEST_CASE("missing trailing newline round-trips") {
    const auto text = diff::unified_diff("a\nb", "a\nc", "F.java");
    CHECK(text.find("\\ No newline at end of file") != std::string::npos);
    const auto hunks = diff::parse_unified(text);
    CHECK(diff::apply_hunks("a\nb", hunks) == "a\nc");
}

TEST_CASE("file creation and deletion use /dev/null") {
    const auto created = diff::unified_diff("", "x\n", "F.java");
    CHECK(created.rfind("--- /dev/null\n+++ b/F.java\n@@ -0,0 +1,1 @@\n", 0) == 0);
    CHECK(diff::apply_hunks("", diff::parse_unified(created)) == "x\n");
    const auto deleted = diff::unified_diff("x\n", "", "F.java");
    CHECK(deleted.rfind("--- a/F.java\n+++ /dev/null\n@@ -1,1 +0,0 @@\n", 0) == 0);
}

TEST_CASE("context mismatch is a patch conflict") {
    const auto hunks = diff::compute_hunks("a\nb\nc\n", "a\nB\nc\n");
    REQUIRE(hunks.size() == 1);
    try {
        diff::apply_hunk("a\nX\nc\n", hunks[0]);
        FAIL("expected a conflict");
    } catch (const PatchConflict& e) {
        CHECK(e.line() == 2);
    }
}

TEST_CASE("malformed diffs are rejected") {
    CHECK_THROWS_AS(diff::parse_unified("@@ -1,2 +1,2 @@\n a\n"), ParseError);
    CHECK_THROWS_AS(diff::parse_unified("@@ -x +1 @@\n+a\n"), ParseError);
    CHECK_THROWS_AS(diff::parse_unified("@@ -1 +1 @@\n?a\n"), ParseError);
    CHECK(diff::parse_unified("").empty());
}
