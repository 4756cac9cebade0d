#include "qd/corpus/splitter.hpp"

#include "qd/error.hpp"
#include "qd/java/entity_tree.hpp"
#include "qd/text.hpp"

#include <algorithm>
#include <optional>

namespace qd::corpus {

std::string modification_id(const std::string& sha, const std::string& filename, std::size_t hunk_index) {
    return sha + ":" + filename + ":" + std::to_string(hunk_index);
}

namespace {

bool import_only(const diff::Hunk& hunk) {
    bool any = false;
    for (const auto& l : hunk.lines) {
        if (l.op == ' ') continue;
        const auto t = text::trim(text::strip_eol(l.text));
        if (t.empty()) continue;
        if (t.rfind("import ", 0) != 0) return false;
        any = true;
    }
    return any;
}

// Old-file line range touched by the hunk.
java::LineSpan changed_range(const diff::Hunk& hunk, std::size_t line_count) {
    const auto removed = hunk.removed_line_numbers();
    if (!removed.empty()) return {removed.front(), removed.back()};
    std::size_t line = hunk.old_len == 0 ? hunk.old_start + 1 : hunk.old_start;
    for (const auto& l : hunk.lines) {
        if (l.op == '+') break;
        ++line;
    }
    // insertion between line-1 and line
    std::size_t first = line > 1 ? line - 1 : 1;
    std::size_t last = std::min(line, std::max<std::size_t>(line_count, 1));
    return {first, std::max(first, last)};
}

Region locate(const java::EntityTree& tree, const diff::Hunk& hunk) {
    const auto range = changed_range(hunk, tree.line_count);
    std::optional<std::size_t> inner;
    for (std::size_t ci = 0; ci < tree.classes.size(); ++ci)
        if (tree.classes[ci].span.contains(range)) inner = ci;  // pre-order: later = deeper
    if (!inner) return {"file", "", range.first, range.last};

    const auto& cls = tree.classes[*inner];
    for (const auto& m : cls.methods)
        if (m.span.contains(range)) return {"method", cls.method_key(m), m.span.first, m.span.last};
    for (const auto& f : cls.fields)
        if (f.span.contains(range)) return {"field", cls.qualified_name + "." + f.name, f.span.first, f.span.last};
    return {"type", cls.qualified_name, cls.span.first, cls.span.last};
}

std::optional<java::EntityTree> try_parse(std::string_view source) {
    try {
        return java::parse_entities(source);
    } catch (const ParseError&) {
        return std::nullopt;
    }
}

}  // namespace

Region enclosing_region(std::string_view source, const diff::Hunk& hunk) {
    if (import_only(hunk)) {
        const auto r = changed_range(hunk, text::split_lines(source).size());
        return {"import", "", r.first, r.last};
    }
    const auto tree = try_parse(source);
    if (!tree) {
        const auto r = changed_range(hunk, text::split_lines(source).size());
        return {"unparsed", "", r.first, r.last};
    }
    return locate(*tree, hunk);
}

std::vector<Modification> split_into_modifications(const CommitFileRecord& record) {
    auto hunks = diff::parse_unified(record.diff);
    std::stable_sort(hunks.begin(), hunks.end(),
                     [](const diff::Hunk& a, const diff::Hunk& b) { return a.old_start < b.old_start; });

    const auto before_tree = try_parse(record.code_before);
    const auto line_count = text::split_lines(record.code_before).size();

    std::vector<Modification> out;
    std::ptrdiff_t shift = 0;  // line growth of the hunks before this one
    for (std::size_t i = 0; i < hunks.size(); ++i) {
        const auto growth = static_cast<std::ptrdiff_t>(hunks[i].new_len) - static_cast<std::ptrdiff_t>(hunks[i].old_len);
        // The modification's hunk maps isolated_before to isolated_after, so
        // its new-side position ignores the other hunks of the record.
        hunks[i].new_start = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(hunks[i].new_start) - shift);
        shift += growth;
        if (hunks[i].empty()) continue;
        Modification m;
        m.id = modification_id(record.sha, record.filename, i);
        m.sha = record.sha;
        m.filename = record.filename;
        m.commit_message = record.commit_message;
        m.hunk_index = i;
        m.hunk = hunks[i];
        m.isolated_before = record.code_before;
        m.isolated_after = diff::apply_hunk(record.code_before, m.hunk);
        m.repo = record.repo;

        if (import_only(m.hunk)) {
            const auto r = changed_range(m.hunk, line_count);
            m.region = {"import", "", r.first, r.last};
        } else if (before_tree) {
            m.region = locate(*before_tree, m.hunk);
        } else {
            const auto r = changed_range(m.hunk, line_count);
            m.region = {"unparsed", "", r.first, r.last};
        }
        const auto after_tree = try_parse(m.isolated_after);
        m.syntactic = after_tree && after_tree->ok();
        out.push_back(std::move(m));
    }
    return out;
}

}  // namespace qd::corpus
