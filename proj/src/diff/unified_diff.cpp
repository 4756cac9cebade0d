#include "qd/diff/unified_diff.hpp"

#include "qd/error.hpp"
#include "qd/text.hpp"

#include <algorithm>
#include <charconv>
#include <unordered_map>

namespace qd::diff {

std::vector<std::string> Hunk::removed() const {
    std::vector<std::string> out;
    for (const auto& l : lines)
        if (l.op == '-') out.push_back(l.text);
    return out;
}

std::vector<std::string> Hunk::added() const {
    std::vector<std::string> out;
    for (const auto& l : lines)
        if (l.op == '+') out.push_back(l.text);
    return out;
}

std::vector<std::size_t> Hunk::removed_line_numbers() const {
    std::vector<std::size_t> out;
    std::size_t line = old_len == 0 ? old_start + 1 : old_start;
    for (const auto& l : lines) {
        if (l.op == '-') out.push_back(line);
        if (l.op != '+') ++line;
    }
    return out;
}

std::vector<std::size_t> Hunk::added_line_numbers() const {
    std::vector<std::size_t> out;
    std::size_t line = new_len == 0 ? new_start + 1 : new_start;
    for (const auto& l : lines) {
        if (l.op == '+') out.push_back(line);
        if (l.op != '-') ++line;
    }
    return out;
}

bool Hunk::empty() const noexcept {
    return std::none_of(lines.begin(), lines.end(), [](const HunkLine& l) { return l.op != ' '; });
}

namespace {

// Linear-space Myers diff over interned line ids.
class MyersDiff {
public:
    MyersDiff(const std::vector<int>& a, const std::vector<int>& b)
        : a_(a), b_(b), deleted_(a.size(), false), inserted_(b.size(), false) {
        const auto max = a.size() + b.size() + 2;
        forward_.assign(2 * max + 1, 0);
        backward_.assign(2 * max + 1, 0);
        offset_ = static_cast<std::ptrdiff_t>(max);
    }

    void run() { compare(0, a_.size(), 0, b_.size()); }

    const std::vector<bool>& deleted() const { return deleted_; }
    const std::vector<bool>& inserted() const { return inserted_; }

private:
    struct Snake {
        std::size_t x_start, y_start, x_end, y_end;
    };

    void compare(std::size_t a_lo, std::size_t a_hi, std::size_t b_lo, std::size_t b_hi) {
        while (a_lo < a_hi && b_lo < b_hi && a_[a_lo] == b_[b_lo]) {
            ++a_lo;
            ++b_lo;
        }
        while (a_lo < a_hi && b_lo < b_hi && a_[a_hi - 1] == b_[b_hi - 1]) {
            --a_hi;
            --b_hi;
        }
        if (a_lo == a_hi) {
            for (auto j = b_lo; j < b_hi; ++j) inserted_[j] = true;
            return;
        }
        if (b_lo == b_hi) {
            for (auto i = a_lo; i < a_hi; ++i) deleted_[i] = true;
            return;
        }
        const Snake s = middle_snake(a_lo, a_hi, b_lo, b_hi);
        const bool progresses = !(s.x_start == 0 && s.y_start == 0 && s.x_end == a_hi - a_lo && s.y_end == b_hi - b_lo);
        if (!progresses) {
            for (auto i = a_lo; i < a_hi; ++i) deleted_[i] = true;
            for (auto j = b_lo; j < b_hi; ++j) inserted_[j] = true;
            return;
        }
        compare(a_lo, a_lo + s.x_start, b_lo, b_lo + s.y_start);
        compare(a_lo + s.x_end, a_hi, b_lo + s.y_end, b_hi);
    }

    std::ptrdiff_t& fwd(std::ptrdiff_t k) { return forward_[static_cast<std::size_t>(k + offset_)]; }
    std::ptrdiff_t& bwd(std::ptrdiff_t k) { return backward_[static_cast<std::size_t>(k + offset_)]; }

    Snake middle_snake(std::size_t a_lo, std::size_t a_hi, std::size_t b_lo, std::size_t b_hi) {
        const auto n = static_cast<std::ptrdiff_t>(a_hi - a_lo);
        const auto m = static_cast<std::ptrdiff_t>(b_hi - b_lo);
        const auto delta = n - m;
        const bool odd = (delta & 1) != 0;
        const auto max_d = (n + m + 1) / 2;
        fwd(1) = 0;
        bwd(1) = 0;
        for (std::ptrdiff_t d = 0; d <= max_d; ++d) {
            for (auto k = -d; k <= d; k += 2) {
                std::ptrdiff_t x = (k == -d || (k != d && fwd(k - 1) < fwd(k + 1))) ? fwd(k + 1) : fwd(k - 1) + 1;
                std::ptrdiff_t y = x - k;
                const auto x0 = x, y0 = y;
                while (x < n && y < m && a_[a_lo + x] == b_[b_lo + y]) {
                    ++x;
                    ++y;
                }
                fwd(k) = x;
                const auto kb = delta - k;
                if (odd && kb >= -(d - 1) && kb <= d - 1 && fwd(k) + bwd(kb) >= n) {
                    return {static_cast<std::size_t>(x0), static_cast<std::size_t>(y0), static_cast<std::size_t>(x),
                            static_cast<std::size_t>(y)};
                }
            }
            for (auto k = -d; k <= d; k += 2) {
                std::ptrdiff_t x = (k == -d || (k != d && bwd(k - 1) < bwd(k + 1))) ? bwd(k + 1) : bwd(k - 1) + 1;
                std::ptrdiff_t y = x - k;
                const auto x0 = x, y0 = y;
                while (x < n && y < m && a_[a_hi - 1 - x] == b_[b_hi - 1 - y]) {
                    ++x;
                    ++y;
                }
                bwd(k) = x;
                const auto kf = delta - k;
                if (!odd && kf >= -d && kf <= d && bwd(k) + fwd(kf) >= n) {
                    return {static_cast<std::size_t>(n - x), static_cast<std::size_t>(m - y),
                            static_cast<std::size_t>(n - x0), static_cast<std::size_t>(m - y0)};
                }
            }
        }
        return {0, 0, static_cast<std::size_t>(n), static_cast<std::size_t>(m)};
    }

    const std::vector<int>& a_;
    const std::vector<int>& b_;
    std::vector<bool> deleted_;
    std::vector<bool> inserted_;
    std::vector<std::ptrdiff_t> forward_;
    std::vector<std::ptrdiff_t> backward_;
    std::ptrdiff_t offset_ = 0;
};

std::size_t parse_number(std::string_view s, std::string_view what) {
    std::size_t value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size()) throw ParseError("malformed hunk header " + std::string(what));
    return value;
}

// "-12,3" or "+4" -> (start, len)
std::pair<std::size_t, std::size_t> parse_range(std::string_view r, char sign) {
    if (r.empty() || r.front() != sign) throw ParseError("malformed hunk range: " + std::string(r));
    r.remove_prefix(1);
    auto comma = r.find(',');
    if (comma == std::string_view::npos) return {parse_number(r, "start"), 1};
    return {parse_number(r.substr(0, comma), "start"), parse_number(r.substr(comma + 1), "length")};
}

void append_line(std::string& out, char op, const std::string& text) {
    out += op;
    out += text;
    if (text.empty() || text.back() != '\n') out += "\n\\ No newline at end of file\n";
}

}  // namespace

std::vector<Edit> diff_lines(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    std::unordered_map<std::string_view, int> ids;
    auto intern = [&](const std::vector<std::string>& lines) {
        std::vector<int> out;
        out.reserve(lines.size());
        for (const auto& l : lines) out.push_back(ids.try_emplace(l, static_cast<int>(ids.size())).first->second);
        return out;
    };
    const auto ia = intern(a);
    const auto ib = intern(b);
    MyersDiff md(ia, ib);
    md.run();

    std::vector<Edit> edits;
    std::size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        if (i < a.size() && md.deleted()[i]) {
            edits.push_back({EditOp::Delete, i, j});
            ++i;
        } else if (j < b.size() && md.inserted()[j]) {
            edits.push_back({EditOp::Insert, i, j});
            ++j;
        } else {
            edits.push_back({EditOp::Equal, i, j});
            ++i;
            ++j;
        }
    }
    return edits;
}

std::vector<Hunk> compute_hunks(std::string_view before, std::string_view after, std::size_t context) {
    const auto a = text::split_lines(before);
    const auto b = text::split_lines(after);
    const auto edits = diff_lines(a, b);

    std::vector<Hunk> hunks;
    std::size_t pos = 0;
    while (pos < edits.size()) {
        // Find next change.
        while (pos < edits.size() && edits[pos].op == EditOp::Equal) ++pos;
        if (pos == edits.size()) break;
        std::size_t first_change = pos;
        std::size_t last_change = pos;
        // Extend while the gap of equal lines to the next change is small.
        std::size_t scan = pos;
        while (scan < edits.size()) {
            if (edits[scan].op != EditOp::Equal) {
                last_change = scan;
                ++scan;
                continue;
            }
            std::size_t gap_end = scan;
            while (gap_end < edits.size() && edits[gap_end].op == EditOp::Equal) ++gap_end;
            if (gap_end == edits.size() || gap_end - scan > 2 * context) break;
            scan = gap_end;
        }
        const std::size_t begin = first_change >= context ? first_change - context : 0;
        const std::size_t end = std::min(edits.size(), last_change + 1 + context);

        Hunk h;
        std::size_t old_count = 0, new_count = 0;
        for (auto e = begin; e < end; ++e) {
            const auto& ed = edits[e];
            switch (ed.op) {
                case EditOp::Equal:
                    h.lines.push_back({' ', a[ed.old_index]});
                    ++old_count;
                    ++new_count;
                    break;
                case EditOp::Delete:
                    h.lines.push_back({'-', a[ed.old_index]});
                    ++old_count;
                    break;
                case EditOp::Insert:
                    h.lines.push_back({'+', b[ed.new_index]});
                    ++new_count;
                    break;
            }
        }
        h.old_len = old_count;
        h.new_len = new_count;
        // Position of the first line in each file; zero-length sides point at
        // the preceding line.
        h.old_start = edits[begin].old_index + (old_count == 0 ? 0 : 1);
        h.new_start = edits[begin].new_index + (new_count == 0 ? 0 : 1);
        hunks.push_back(std::move(h));
        pos = end;
    }
    return hunks;
}

std::string render_unified(const std::vector<Hunk>& hunks, std::string_view old_name, std::string_view new_name) {
    std::string out;
    out += "--- ";
    out += old_name;
    out += "\n+++ ";
    out += new_name;
    out += "\n";
    for (const auto& h : hunks) {
        out += "@@ -" + std::to_string(h.old_start) + "," + std::to_string(h.old_len) + " +" +
               std::to_string(h.new_start) + "," + std::to_string(h.new_len) + " @@\n";
        for (const auto& l : h.lines) append_line(out, l.op, l.text);
    }
    return out;
}

std::string unified_diff(std::string_view before, std::string_view after, std::string_view filename,
                         std::size_t context) {
    const auto hunks = compute_hunks(before, after, context);
    if (hunks.empty()) return {};
    const std::string old_name = before.empty() ? "/dev/null" : "a/" + std::string(filename);
    const std::string new_name = after.empty() ? "/dev/null" : "b/" + std::string(filename);
    return render_unified(hunks, old_name, new_name);
}

std::vector<Hunk> parse_unified(std::string_view diff) {
    const auto raw = text::split_lines(diff);
    std::vector<Hunk> hunks;
    std::size_t i = 0;
    while (i < raw.size()) {
        const std::string_view line = raw[i];
        if (line.rfind("@@ ", 0) != 0) {
            // File headers ("diff --git", "index", "---", "+++") carry no hunk data.
            ++i;
            continue;
        }
        auto body = text::strip_eol(line);
        auto close = body.find(" @@", 3);
        if (close == std::string_view::npos) throw ParseError("unterminated hunk header: " + std::string(body));
        auto ranges = body.substr(3, close - 3);
        auto space = ranges.find(' ');
        if (space == std::string_view::npos) throw ParseError("malformed hunk header: " + std::string(body));
        Hunk h;
        std::tie(h.old_start, h.old_len) = parse_range(ranges.substr(0, space), '-');
        std::tie(h.new_start, h.new_len) = parse_range(ranges.substr(space + 1), '+');
        ++i;
        std::size_t old_seen = 0, new_seen = 0;
        while (i < raw.size() && (old_seen < h.old_len || new_seen < h.new_len)) {
            std::string_view l = raw[i];
            if (l.empty()) throw ParseError("empty line inside hunk body at line " + std::to_string(i + 1));
            const char op = l[0];
            if (op == '\\') {
                if (h.lines.empty()) throw ParseError("no-newline marker without a preceding line");
                auto& prev = h.lines.back().text;
                if (!prev.empty() && prev.back() == '\n') prev.pop_back();
                ++i;
                continue;
            }
            if (op != ' ' && op != '-' && op != '+')
                throw ParseError("unexpected hunk line prefix '" + std::string(1, op) + "' at line " +
                                 std::to_string(i + 1));
            h.lines.push_back({op, std::string(l.substr(1))});
            if (op != '+') ++old_seen;
            if (op != '-') ++new_seen;
            ++i;
        }
        if (old_seen != h.old_len || new_seen != h.new_len)
            throw ParseError("hunk body shorter than its header counts");
        if (i < raw.size() && raw[i].rfind("\\", 0) == 0) {
            auto& prev = h.lines.back().text;
            if (!prev.empty() && prev.back() == '\n') prev.pop_back();
            ++i;
        }
        hunks.push_back(std::move(h));
    }
    return hunks;
}

std::vector<std::string> apply_hunk_lines(const std::vector<std::string>& before, const Hunk& hunk,
                                          std::ptrdiff_t line_offset) {
    const auto base = static_cast<std::ptrdiff_t>(hunk.old_len == 0 ? hunk.old_start : hunk.old_start - 1);
    const auto start = base + line_offset;
    if (start < 0 || static_cast<std::size_t>(start) + hunk.old_len > before.size())
        throw PatchConflict("hunk range outside file", static_cast<std::size_t>(std::max<std::ptrdiff_t>(start, 0)) + 1);

    std::vector<std::string> out(before.begin(), before.begin() + start);
    auto cursor = static_cast<std::size_t>(start);
    for (const auto& l : hunk.lines) {
        if (l.op == '+') {
            out.push_back(l.text);
            continue;
        }
        if (cursor >= before.size() || before[cursor] != l.text) throw PatchConflict("context mismatch", cursor + 1);
        if (l.op == ' ') out.push_back(l.text);
        ++cursor;
    }
    out.insert(out.end(), before.begin() + static_cast<std::ptrdiff_t>(cursor), before.end());
    return out;
}

std::string apply_hunk(std::string_view before, const Hunk& hunk, std::ptrdiff_t line_offset) {
    return text::join(apply_hunk_lines(text::split_lines(before), hunk, line_offset));
}

std::string apply_hunks(std::string_view before, const std::vector<Hunk>& hunks) {
    std::vector<const Hunk*> ordered;
    for (const auto& h : hunks) ordered.push_back(&h);
    std::stable_sort(ordered.begin(), ordered.end(),
                     [](const Hunk* x, const Hunk* y) { return x->old_start < y->old_start; });
    auto lines = text::split_lines(before);
    std::ptrdiff_t offset = 0;
    for (const auto* h : ordered) {
        lines = apply_hunk_lines(lines, *h, offset);
        offset += static_cast<std::ptrdiff_t>(h->new_len) - static_cast<std::ptrdiff_t>(h->old_len);
    }
    return text::join(lines);
}

}  // namespace qd::diff
