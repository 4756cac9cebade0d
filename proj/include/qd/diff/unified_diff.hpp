#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace qd::diff {

/// One line of a hunk body. `text` keeps its '\n' terminator; a line without
/// a terminator is the last line of a file that lacks a trailing newline.
struct HunkLine {
    char op;  // ' ' context, '-' removed, '+' added
    std::string text;

    bool operator==(const HunkLine&) const = default;
};

/// A unified-diff hunk. Positions follow the unified-diff convention: starts
/// are 1-based, and a zero-length side names the line *after which* the
/// change happens (0 = before the first line).
struct Hunk {
    std::size_t old_start = 0;
    std::size_t old_len = 0;
    std::size_t new_start = 0;
    std::size_t new_len = 0;
    std::vector<HunkLine> lines;

    [[nodiscard]] std::vector<std::string> removed() const;
    [[nodiscard]] std::vector<std::string> added() const;

    /// 1-based line numbers (in the old file) of removed lines.
    [[nodiscard]] std::vector<std::size_t> removed_line_numbers() const;
    /// 1-based line numbers (in the new file) of added lines.
    [[nodiscard]] std::vector<std::size_t> added_line_numbers() const;

    [[nodiscard]] bool empty() const noexcept;

    bool operator==(const Hunk&) const = default;
};

enum class EditOp { Equal, Delete, Insert };

struct Edit {
    EditOp op;
    std::size_t old_index;  // 0-based, valid for Equal/Delete
    std::size_t new_index;  // 0-based, valid for Equal/Insert
};

/// Minimal line edit script (Myers, linear space).
std::vector<Edit> diff_lines(const std::vector<std::string>& a, const std::vector<std::string>& b);

/// Hunks between two texts with `context` lines of surrounding context.
/// Change groups separated by at most 2*context equal lines share a hunk.
std::vector<Hunk> compute_hunks(std::string_view before, std::string_view after, std::size_t context = 3);

/// Renders a complete unified diff (file headers + hunks).
std::string render_unified(const std::vector<Hunk>& hunks, std::string_view old_name, std::string_view new_name);

/// Convenience: compute_hunks + render_unified with a/ b/ prefixes
/// (/dev/null for an empty side). Empty when the texts are equal.
std::string unified_diff(std::string_view before, std::string_view after, std::string_view filename,
                         std::size_t context = 3);

/// Parses the hunks of a unified diff. Throws ParseError when malformed.
std::vector<Hunk> parse_unified(std::string_view diff);

/// Applies one hunk to `before`. `line_offset` shifts the hunk's old_start,
/// which is how later hunks of a multi-hunk diff are replayed on text that
/// earlier hunks already changed. Throws PatchConflict on context mismatch.
std::string apply_hunk(std::string_view before, const Hunk& hunk, std::ptrdiff_t line_offset = 0);

std::vector<std::string> apply_hunk_lines(const std::vector<std::string>& before, const Hunk& hunk,
                                          std::ptrdiff_t line_offset = 0);

/// Applies hunks in ascending old_start order, tracking the line offset.
std::string apply_hunks(std::string_view before, const std::vector<Hunk>& hunks);

}  // namespace qd::diff
