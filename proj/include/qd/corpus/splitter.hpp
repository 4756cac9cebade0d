#pragma once

#include "qd/corpus/miner.hpp"
#include "qd/diff/unified_diff.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace qd::corpus {

/// Declaration region a hunk was expanded to in the before-file.
struct Region {
    std::string kind;    // "import", "method", "field", "type", "file", "unparsed"
    std::string entity;  // qualified name of the enclosing entity, empty for file-level regions
    std::size_t first = 0;
    std::size_t last = 0;

    bool operator==(const Region&) const = default;
};

struct Modification {
    std::string id;  // "<sha>:<filename>:<hunk index>"
    std::string sha;
    std::string filename;
    std::string commit_message;
    std::size_t hunk_index = 0;
    diff::Hunk hunk;  // positions relative to isolated_before / isolated_after
    std::string isolated_before;
    std::string isolated_after;  // isolated_before with only this hunk applied
    RepositoryRef repo;
    Region region;
    bool syntactic = true;  // isolated_after parses without errors
};

std::string modification_id(const std::string& sha, const std::string& filename, std::size_t hunk_index);

/// One modification per hunk of the record's diff. Throws ParseError when the
/// diff is malformed and PatchConflict when it does not apply to code_before.
std::vector<Modification> split_into_modifications(const CommitFileRecord& record);

/// Smallest declaration of `source` that contains every changed line of the
/// hunk (old-file line numbers; pure insertions use the insertion point).
Region enclosing_region(std::string_view source, const diff::Hunk& hunk);

}  // namespace qd::corpus
