#pragma once

#include "qd/corpus/repository.hpp"

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace qd::corpus {

struct CommitFileRecord {
    std::string sha;
    std::string filename;
    std::string commit_message;
    std::string code_before;  // empty for added files
    std::string code_after;   // empty for deleted files
    std::string diff;
    RepositoryRef repo;
};

struct MiningStats {
    std::size_t commits_seen = 0;
    std::size_t records_emitted = 0;
    std::size_t skipped = 0;  // binary, non-UTF-8, symlink/submodule or unreadable entries

    MiningStats& operator+=(const MiningStats& o) {
        commits_seen += o.commits_seen;
        records_emitted += o.records_emitted;
        skipped += o.skipped;
        return *this;
    }
};

/// Repository identity for a local clone: "local/<directory name>".
RepositoryRef local_repository(const std::string& path);

using RecordSink = std::function<void(CommitFileRecord&&)>;

/// Walks the history of `repo_path` in topological order (oldest first) and
/// emits one record per (commit, changed file ending in `extension`). Merge
/// commits are diffed against their first parent; renames appear as a
/// delete plus an add. Throws InputError when the path is not a git
/// repository.
MiningStats mine_commits(const std::string& repo_path, const std::string& extension, const RepositoryRef& repo,
                         const RecordSink& sink);

std::vector<CommitFileRecord> mine_commits(const std::string& repo_path, const std::string& extension,
                                           const RepositoryRef& repo, MiningStats* stats = nullptr);

/// `git clone` into `destination` unless it already holds a repository.
void clone_repository(const RepositoryRef& repo, const std::string& destination);

}  // namespace qd::corpus
