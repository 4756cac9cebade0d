#include "qd/corpus/miner.hpp"

#include "qd/diff/unified_diff.hpp"
#include "qd/error.hpp"
#include "qd/log.hpp"
#include "qd/process.hpp"
#include "qd/text.hpp"

#include <filesystem>

namespace qd::corpus {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kNullSha = "0000000000000000000000000000000000000000";

std::string git(const std::string& repo, std::vector<std::string> args, int* exit_code = nullptr) {
    args.insert(args.begin(), {"git", "-C", repo, "-c", "core.quotepath=off"});
    auto res = run_process(args);
    if (exit_code) {
        *exit_code = res.exit_code;
    } else if (res.exit_code != 0) {
        throw Error("git " + args[5] + " failed in " + repo + ": " + std::string(text::trim(res.err)));
    }
    return res.out;
}

struct RawEntry {
    std::string old_mode, new_mode, old_sha, new_sha;
    char status = 'M';
    std::string path;
};

// Parses `git diff-tree -r -z --raw` output: ":m1 m2 s1 s2 S\0path\0"...
std::vector<RawEntry> parse_raw(const std::string& out) {
    std::vector<RawEntry> entries;
    std::size_t pos = 0;
    while (pos < out.size()) {
        const auto meta_end = out.find('\0', pos);
        if (meta_end == std::string::npos || out[pos] != ':') throw ParseError("unexpected git diff-tree output");
        const auto fields = text::split(std::string_view(out).substr(pos + 1, meta_end - pos - 1), ' ');
        if (fields.size() < 5) throw ParseError("short git diff-tree entry");
        const auto path_end = out.find('\0', meta_end + 1);
        if (path_end == std::string::npos) throw ParseError("git diff-tree entry without path");
        RawEntry e{fields[0], fields[1], fields[2], fields[3], fields[4].empty() ? 'M' : fields[4][0],
                   out.substr(meta_end + 1, path_end - meta_end - 1)};
        entries.push_back(std::move(e));
        pos = path_end + 1;
    }
    return entries;
}

bool regular_file_mode(const std::string& mode) { return mode == "100644" || mode == "100755" || mode == "000000"; }

}  // namespace

RepositoryRef local_repository(const std::string& path) {
    auto name = fs::weakly_canonical(fs::path(path)).filename().string();
    if (name.empty()) name = "repo";
    return {"local/" + name, 0, 0, "file://" + fs::absolute(path).lexically_normal().string()};
}

MiningStats mine_commits(const std::string& repo_path, const std::string& extension, const RepositoryRef& repo,
                         const RecordSink& sink) {
    if (!fs::is_directory(repo_path)) throw InputError("not a directory: " + repo_path);
    int rc = 0;
    git(repo_path, {"rev-parse", "--git-dir"}, &rc);
    if (rc != 0) throw InputError("not a git repository: " + repo_path);

    MiningStats stats;
    git(repo_path, {"rev-parse", "--verify", "-q", "HEAD"}, &rc);
    if (rc != 0) return stats;  // no commits yet

    const auto shas = text::split(text::trim(git(repo_path, {"rev-list", "--topo-order", "--reverse", "HEAD"})), '\n');
    for (const auto& sha : shas) {
        if (sha.empty()) continue;
        ++stats.commits_seen;
        const auto header = git(repo_path, {"show", "-s", "--format=%P%n%B", sha});
        const auto nl = header.find('\n');
        const auto parents = text::split(text::trim(header.substr(0, nl)), ' ');
        std::string message = nl == std::string::npos ? std::string() : header.substr(nl + 1);
        while (!message.empty() && (message.back() == '\n' || message.back() == '\r')) message.pop_back();

        std::vector<std::string> args = {"diff-tree", "-r", "--raw", "-z", "--no-renames", "--no-commit-id"};
        if (parents.empty() || parents[0].empty()) {
            args.push_back("--root");
            args.push_back(sha);
        } else {
            args.push_back(parents[0]);
            args.push_back(sha);
        }
        for (auto& e : parse_raw(git(repo_path, args))) {
            if (!text::ends_with(e.path, extension)) continue;
            if (!regular_file_mode(e.old_mode) || !regular_file_mode(e.new_mode)) {
                log::warn("skipping non-regular entry " + e.path + " in " + sha.substr(0, 12));
                ++stats.skipped;
                continue;
            }
            auto read_blob = [&](const std::string& blob, std::string& out) {
                if (blob == kNullSha) return true;
                int brc = 0;
                out = git(repo_path, {"cat-file", "blob", blob}, &brc);
                return brc == 0;
            };
            CommitFileRecord rec;
            if (!read_blob(e.old_sha, rec.code_before) || !read_blob(e.new_sha, rec.code_after)) {
                log::warn("unreadable blob for " + e.path + " in " + sha.substr(0, 12));
                ++stats.skipped;
                continue;
            }
            if (text::looks_binary(rec.code_before) || text::looks_binary(rec.code_after) ||
                !text::is_valid_utf8(rec.code_before) || !text::is_valid_utf8(rec.code_after)) {
                log::warn("skipping binary or non-UTF-8 file " + e.path + " in " + sha.substr(0, 12));
                ++stats.skipped;
                continue;
            }
            if (rec.code_before == rec.code_after) continue;  // mode-only change
            rec.sha = sha;
            rec.filename = e.path;
            rec.commit_message = message;
            rec.diff = diff::unified_diff(rec.code_before, rec.code_after, rec.filename);
            rec.repo = repo;
            ++stats.records_emitted;
            sink(std::move(rec));
        }
    }
    return stats;
}

std::vector<CommitFileRecord> mine_commits(const std::string& repo_path, const std::string& extension,
                                           const RepositoryRef& repo, MiningStats* stats) {
    std::vector<CommitFileRecord> out;
    auto s = mine_commits(repo_path, extension, repo, [&](CommitFileRecord&& r) { out.push_back(std::move(r)); });
    if (stats) *stats = s;
    return out;
}

void clone_repository(const RepositoryRef& repo, const std::string& destination) {
    if (fs::exists(fs::path(destination) / ".git")) return;
    fs::create_directories(fs::path(destination).parent_path());
    auto res = run_process({"git", "clone", "--quiet", repo.clone_url, destination});
    if (res.exit_code != 0)
        throw RetryableError("git clone of " + repo.full_name + " failed: " + std::string(text::trim(res.err)), 1);
}

}  // namespace qd::corpus
