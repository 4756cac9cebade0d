#include "qd/metrics/engine.hpp"

#include "qd/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qd::metrics {

using java::EntityTree;
using java::Token;
using java::TokenKind;
using java::TokenRange;

double EntityMetrics::get(std::string_view metric) const {
    auto idx = metric_index(kind, metric);
    if (!idx) throw InputError("metric " + std::string(metric) + " is not defined at this level");
    return values.at(*idx);
}

int HalsteadCounts::total_operators() const {
    return std::accumulate(operators.begin(), operators.end(), 0, [](int s, const auto& kv) { return s + kv.second; });
}

int HalsteadCounts::total_operands() const {
    return std::accumulate(operands.begin(), operands.end(), 0, [](int s, const auto& kv) { return s + kv.second; });
}

HalsteadCounts halstead_counts(const EntityTree& tree, TokenRange range) {
    HalsteadCounts counts;
    for (auto k = range.begin; k < range.end && k < tree.tokens.size(); ++k) {
        const auto& t = tree.tokens[k];
        switch (t.kind) {
            case TokenKind::Identifier:
            case TokenKind::Literal:
                ++counts.operands[t.text];
                break;
            case TokenKind::Keyword:
            case TokenKind::Operator:
                ++counts.operators[t.text];
                break;
            case TokenKind::Separator:
                // A bracket pair is one operator, counted at its opener.
                if (t.text != ")" && t.text != "]" && t.text != "}") ++counts.operators[t.text];
                break;
            default:
                break;
        }
    }
    return counts;
}

namespace {

double log2_or_zero(double x) { return x > 0 ? std::log2(x) : 0.0; }
double ln_or_zero(double x) { return x > 0 ? std::log(x) : 0.0; }

bool is_primitive(const Token& t) {
    static constexpr std::string_view kPrims[] = {"boolean", "byte", "char", "short", "int",
                                                  "long",    "float", "double", "void"};
    return t.kind == TokenKind::Keyword && std::find(std::begin(kPrims), std::end(kPrims), t.text) != std::end(kPrims);
}

// Index of the matching closer for the opener at k, bounded by `end`.
std::size_t matching(const std::vector<Token>& t, std::size_t k, std::size_t end) {
    int depth = 0;
    for (auto j = k; j < end; ++j) {
        if (t[j].is("(") || t[j].is("[") || t[j].is("{")) ++depth;
        if (t[j].is(")") || t[j].is("]") || t[j].is("}")) {
            if (--depth == 0) return j;
        }
    }
    return end;
}

// Skips "<...>" starting at k; returns the index after it.
std::size_t skip_angles(const std::vector<Token>& t, std::size_t k, std::size_t end) {
    int depth = 0;
    for (auto j = k; j < end; ++j) {
        if (t[j].is("<")) ++depth;
        else if (t[j].is(">")) --depth;
        else if (t[j].is(">>")) depth -= 2;
        else if (t[j].is(">>>")) depth -= 3;
        else if (t[j].is(";") || t[j].is("{") || t[j].is("}") || t[j].is(")")) return j;
        if (depth <= 0) return j + 1;
    }
    return end;
}

// After `new`: skips the created type; returns the index of '(' '[' or '{'.
std::size_t skip_new_type(const std::vector<Token>& t, std::size_t k, std::size_t end) {
    auto j = k + 1;
    while (j < end) {
        if (t[j].is("@")) {
            ++j;
            continue;
        }
        if (t[j].kind == TokenKind::Identifier || t[j].is(".") || is_primitive(t[j])) {
            ++j;
            continue;
        }
        if (t[j].is("<")) {
            j = skip_angles(t, j, end);
            continue;
        }
        break;
    }
    return j;
}

std::size_t count_arguments(const std::vector<Token>& t, std::size_t open, std::size_t close) {
    if (close == open + 1) return 0;
    std::size_t commas = 0;
    int depth = 0;
    for (auto j = open + 1; j < close; ++j) {
        if (t[j].is("new")) {
            j = skip_new_type(t, j, close) - 1;
            continue;
        }
        if (t[j].is(".") && j + 1 < close && t[j + 1].is("<")) {
            j = skip_angles(t, j + 1, close) - 1;
            continue;
        }
        if (t[j].is("(") || t[j].is("[") || t[j].is("{")) ++depth;
        if (t[j].is(")") || t[j].is("]") || t[j].is("}")) --depth;
        if (depth == 0 && t[j].is(",")) ++commas;
    }
    return commas + 1;
}

bool is_ternary(const std::vector<Token>& t, std::size_t k, std::size_t end) {
    if (k + 1 >= end) return true;
    const auto& next = t[k + 1];
    if (next.is(">") || next.is(">>") || next.is(">>>") || next.is(",") || next.is("extends") || next.is("&"))
        return false;
    if (next.is("super")) return k + 2 < end && (t[k + 2].is(".") || t[k + 2].is("::"));
    return true;
}

std::vector<char> line_flags(std::size_t line_count, const std::vector<Token>& tokens,
                             bool (*select)(const Token&)) {
    std::vector<char> flags(line_count + 2, 0);
    for (const auto& t : tokens) {
        if (!select(t)) continue;
        for (auto l = t.line; l <= t.end_line && l < flags.size(); ++l) flags[l] = 1;
    }
    return flags;
}

bool implicitly_public(const java::ClassNode& owner) {
    return owner.kind == java::ClassKind::Interface || owner.kind == java::ClassKind::Annotation;
}

template <typename Member>
bool is_public_member(const java::ClassNode& owner, const Member& m) {
    if (m.has_modifier("public")) return true;
    return implicitly_public(owner) && !m.has_modifier("private");
}

}  // namespace

HalsteadMeasures halstead_measures(int n1, int n2, int total1, int total2) {
    HalsteadMeasures h;
    h.program_length = static_cast<double>(total1 + total2);
    h.vocabulary = static_cast<double>(n1 + n2);
    h.volume = h.vocabulary > 1 ? h.program_length * std::log2(h.vocabulary) : 0.0;
    h.difficulty = n2 > 0 ? (n1 / 2.0) * (static_cast<double>(total2) / n2) : 0.0;
    h.effort = h.difficulty * h.volume;
    h.time_to_program = h.effort / 18.0;
    h.calculated_length = n1 * log2_or_zero(n1) + n2 * log2_or_zero(n2);
    return h;
}

double maintainability_index(double volume, double mccc, double lloc) {
    return 171.0 - 5.2 * ln_or_zero(volume) - 0.23 * mccc - 16.2 * ln_or_zero(lloc);
}

int cyclomatic_complexity(const EntityTree& tree, const java::MethodNode& method) {
    if (!method.body) return 1;
    const auto& t = tree.tokens;
    const auto end = method.body->end;
    int decisions = 0;
    for (auto k = method.body->begin; k < end; ++k) {
        const auto& tk = t[k];
        if (tk.is("if") || tk.is("for") || tk.is("while") || tk.is("case") || tk.is("catch") || tk.is("&&") ||
            tk.is("||")) {
            ++decisions;
        } else if (tk.is("?") && is_ternary(t, k, end)) {
            ++decisions;
        }
    }
    return 1 + decisions;
}

std::vector<Invocation> invocations(const EntityTree& tree, TokenRange range) {
    const auto& t = tree.tokens;
    const auto end = std::min(range.end, t.size());
    std::vector<Invocation> out;
    for (auto k = range.begin; k < end; ++k) {
        if (t[k].is("new")) {
            // Resume at the '(' so arguments are still scanned.
            k = skip_new_type(t, k, end) - 1;
            continue;
        }
        if (t[k].kind != TokenKind::Identifier || k + 1 >= end || !t[k + 1].is("(")) continue;
        const auto close = matching(t, k + 1, end);
        // Local method declaration (anonymous/local class member)?
        if (k > range.begin) {
            const auto& prev = t[k - 1];
            const bool type_before = prev.kind == TokenKind::Identifier || is_primitive(prev) || prev.is(">") ||
                                     prev.is(">>") || prev.is(">>>") || prev.is("]");
            const bool body_after = close + 1 < end && (t[close + 1].is("{") || t[close + 1].is("throws"));
            if (type_before && body_after) continue;
        }
        out.push_back({t[k].text, count_arguments(t, k + 1, close)});
    }
    return out;
}

FileAnalysis::FileAnalysis(const EntityTree& tree) : tree_(tree) {
    code_lines_ = line_flags(tree.line_count, tree.tokens, [](const Token&) { return true; });
    comment_lines_ = line_flags(tree.line_count, tree.comments, [](const Token&) { return true; });
    doc_lines_ = line_flags(tree.line_count, tree.comments,
                            [](const Token& t) { return t.kind == TokenKind::DocComment; });

    // Call graph: resolve invocations against methods declared in this file
    // by name and arity (varargs accept arity >= fixed parameters).
    for (std::size_t ci = 0; ci < tree.classes.size(); ++ci) {
        const auto& cls = tree.classes[ci];
        for (std::size_t mi = 0; mi < cls.methods.size(); ++mi) {
            const auto& m = cls.methods[mi];
            if (!m.body) continue;
            calls_[{ci, mi}] = invocations(tree, *m.body);
        }
    }
    for (const auto& [caller, calls] : calls_) {
        for (const auto& call : calls) {
            for (std::size_t ci = 0; ci < tree.classes.size(); ++ci) {
                const auto& cls = tree.classes[ci];
                for (std::size_t mi = 0; mi < cls.methods.size(); ++mi) {
                    const auto& callee = cls.methods[mi];
                    if (callee.is_constructor || callee.name != call.name) continue;
                    const auto params = callee.parameter_types.size();
                    const bool arity_ok =
                        callee.varargs ? call.arity + 1 >= params : call.arity == params;
                    if (arity_ok) edges_.insert({caller, {ci, mi}});
                }
            }
        }
    }

    // Type references: identifiers naming a class declared in the file or a
    // single-type import, outside nested type declarations.
    std::set<std::string> known_types;
    for (const auto& c : tree.classes) known_types.insert(c.name);
    for (const auto& imp : tree.imports)
        if (!imp.is_static && !imp.wildcard) known_types.insert(imp.simple_name());

    class_refs_.resize(tree.classes.size());
    for (std::size_t ci = 0; ci < tree.classes.size(); ++ci) {
        const auto& cls = tree.classes[ci];
        for (auto k = cls.tokens.begin; k < cls.tokens.end && k < tree.tokens.size(); ++k) {
            bool in_nested = false;
            for (auto ni : cls.nested) {
                const auto& r = tree.classes[ni].tokens;
                if (k >= r.begin && k < r.end) {
                    k = r.end - 1;
                    in_nested = true;
                    break;
                }
            }
            if (in_nested) continue;
            const auto& t = tree.tokens[k];
            if (t.kind == TokenKind::Identifier && t.text != cls.name && known_types.count(t.text))
                class_refs_[ci].insert(t.text);
        }
    }
}

std::size_t FileAnalysis::count_lines(const std::vector<char>& flags, java::LineSpan span) const {
    std::size_t n = 0;
    for (auto l = span.first; l <= span.last && l < flags.size(); ++l) n += flags[l] ? 1 : 0;
    return n;
}

EntityMetrics FileAnalysis::method_metrics(std::size_t class_index, std::size_t method_index) const {
    const auto& cls = tree_.classes.at(class_index);
    const auto& m = cls.methods.at(method_index);
    const MethodId id{class_index, method_index};

    const auto counts = halstead_counts(tree_, m.tokens);
    const auto h = halstead_measures(counts.distinct_operators(), counts.distinct_operands(), counts.total_operators(),
                                     counts.total_operands());
    const auto mccc = static_cast<double>(cyclomatic_complexity(tree_, m));
    const auto nest = method_nesting(tree_, m);

    std::set<MethodId> callers, callees;
    for (const auto& [from, to] : edges_) {
        if (to == id) callers.insert(from);
        if (from == id) callees.insert(to);
    }

    const auto loc = static_cast<double>(m.span.size());
    const auto lloc = static_cast<double>(count_lines(code_lines_, m.span));
    const auto cloc = static_cast<double>(count_lines(comment_lines_, m.span));
    const auto dloc = static_cast<double>(m.doc ? m.doc->size() : 0);
    const double cd = (cloc + lloc) > 0 ? cloc / (cloc + lloc) : 0.0;

    EntityMetrics out;
    out.kind = EntityKind::Method;
    out.key = cls.method_key(m);
    out.values = {
        h.calculated_length,
        h.difficulty,
        h.effort,
        h.program_length,
        h.vocabulary,
        h.time_to_program,
        h.volume,
        maintainability_index(h.volume, mccc, lloc),
        mccc,
        static_cast<double>(nest.nl),
        static_cast<double>(nest.nle),
        static_cast<double>(callers.size()),
        static_cast<double>(callees.size()),
        cd,
        cloc,
        dloc,
        lloc,
        loc,
    };
    return out;
}

EntityMetrics FileAnalysis::class_metrics(std::size_t class_index) const {
    const auto& cls = tree_.classes.at(class_index);

    int nl = 0, nle = 0;
    double wmc = 0;
    std::set<MethodId> callers, callees;
    std::set<std::string> response;
    for (std::size_t mi = 0; mi < cls.methods.size(); ++mi) {
        const auto& m = cls.methods[mi];
        const auto nest = method_nesting(tree_, m);
        nl = std::max(nl, nest.nl);
        nle = std::max(nle, nest.nle);
        wmc += cyclomatic_complexity(tree_, m);
        response.insert(m.name + "/" + std::to_string(m.parameter_types.size()));
        auto it = calls_.find({class_index, mi});
        if (it != calls_.end())
            for (const auto& call : it->second) response.insert(call.name + "/" + std::to_string(call.arity));
        for (const auto& [from, to] : edges_) {
            if (to == MethodId{class_index, mi}) callers.insert(from);
            if (from == MethodId{class_index, mi}) callees.insert(to);
        }
    }

    double cboi = 0;
    for (std::size_t other = 0; other < tree_.classes.size(); ++other)
        if (other != class_index && class_refs_[other].count(cls.name)) ++cboi;

    std::size_t public_members = 0, documented = 0;
    auto tally = [&](bool is_public, bool has_doc) {
        if (!is_public) return;
        ++public_members;
        if (has_doc) ++documented;
    };
    for (const auto& m : cls.methods) tally(is_public_member(cls, m), m.doc.has_value());
    for (const auto& f : cls.fields) tally(is_public_member(cls, f), f.doc.has_value());
    for (auto ni : cls.nested) {
        const auto& n = tree_.classes[ni];
        tally(is_public_member(cls, n), n.doc.has_value());
    }
    const double ad = public_members == 0 ? 1.0 : static_cast<double>(documented) / public_members;

    const auto loc = static_cast<double>(cls.span.size());
    const auto lloc = static_cast<double>(count_lines(code_lines_, cls.span));
    const auto cloc = static_cast<double>(count_lines(comment_lines_, cls.span));
    std::set<std::size_t> doc_lines;
    if (cls.doc)
        for (auto l = cls.doc->first; l <= cls.doc->last; ++l) doc_lines.insert(l);
    for (auto l = cls.span.first; l <= cls.span.last && l < doc_lines_.size(); ++l)
        if (doc_lines_[l]) doc_lines.insert(l);
    const auto dloc = static_cast<double>(doc_lines.size());
    const double cd = (cloc + lloc) > 0 ? cloc / (cloc + lloc) : 0.0;

    EntityMetrics out;
    out.kind = EntityKind::Class;
    out.key = cls.qualified_name;
    out.values = {
        static_cast<double>(nl),
        static_cast<double>(nle),
        wmc,
        static_cast<double>(class_refs_[class_index].size()),
        cboi,
        static_cast<double>(callers.size()),
        static_cast<double>(callees.size()),
        static_cast<double>(response.size()),
        ad,
        cd,
        cloc,
        dloc,
        lloc,
        loc,
    };
    return out;
}

std::vector<EntityMetrics> FileAnalysis::all() const {
    std::vector<EntityMetrics> out;
    for (std::size_t ci = 0; ci < tree_.classes.size(); ++ci) out.push_back(class_metrics(ci));
    for (std::size_t ci = 0; ci < tree_.classes.size(); ++ci)
        for (std::size_t mi = 0; mi < tree_.classes[ci].methods.size(); ++mi) out.push_back(method_metrics(ci, mi));
    return out;
}

EntityMetrics compute_method_metrics(const FileAnalysis& file, std::size_t class_index, std::size_t method_index) {
    return file.method_metrics(class_index, method_index);
}

EntityMetrics compute_class_metrics(const FileAnalysis& file, std::size_t class_index) {
    return file.class_metrics(class_index);
}

}  // namespace qd::metrics
