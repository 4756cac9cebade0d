// Statement walker for nesting depth. A control structure found at depth d
// (if, for, while, do, switch, try/catch/finally) has level d + 1 and its
// bodies are walked at d + 1. An unbraced "else if" continues the ladder at
// the outer if's depth for both NL and NLE. A braced else whose only
// statement is an if ("else { if ... }") nests for NL but is flattened for
// NLE. Lambda bodies, anonymous class bodies and switch expressions found
// inside expressions are walked at the enclosing depth.

#include "qd/metrics/engine.hpp"

#include <algorithm>

namespace qd::metrics {

namespace {

using java::Token;
using java::TokenKind;

struct Depth {
    int nl = 0;
    int nle = 0;
    Depth deeper() const { return {nl + 1, nle + 1}; }
};

class NestingWalker {
public:
    NestingWalker(const std::vector<Token>& toks, std::size_t end) : t_(toks), end_(end) {}

    Nesting walk_body(std::size_t begin) {
        std::size_t k = begin;
        while (k < end_) k = statement(k, {0, 0});
        return result_;
    }

private:
    bool is(std::size_t k, std::string_view s) const { return k < end_ && t_[k].is(s); }

    void record(Depth d) {
        result_.nl = std::max(result_.nl, d.nl + 1);
        result_.nle = std::max(result_.nle, d.nle + 1);
    }

    std::size_t skip_parens(std::size_t k, Depth d) {
        if (!is(k, "(")) return k;
        return expression(k + 1, d, ")") + 1;
    }

    // Walks until the matching `closer` (or ';' at depth 0 when closer is ";").
    // Returns the index of the terminator.
    std::size_t expression(std::size_t k, Depth d, std::string_view closer) {
        int depth = 0;
        while (k < end_) {
            const auto& tk = t_[k];
            if (depth == 0 && tk.is(closer)) return k;
            if (closer == ";" && depth == 0 && tk.is("}")) return k;  // missing ';'
            if (tk.is("->") && is(k + 1, "{")) {
                k = block(k + 1, d);
                continue;
            }
            if (tk.is("switch") && is(k + 1, "(")) {
                k = switch_statement(k, d);
                continue;
            }
            if (tk.is("{")) {
                if (k > 0 && t_[k - 1].is(")")) {
                    k = anonymous_body(k, d);
                } else {
                    k = expression(k + 1, d, "}") + 1;  // array initializer
                }
                continue;
            }
            if (tk.is("(") || tk.is("[")) ++depth;
            if (tk.is(")") || tk.is("]")) --depth;
            ++k;
        }
        return k;
    }

    // Anonymous or local class body: method bodies are walked at depth d.
    std::size_t anonymous_body(std::size_t open, Depth d) {
        std::size_t k = open + 1;
        while (k < end_ && !t_[k].is("}")) {
            if (t_[k].is("{")) {
                k = block(k, d);
            } else if (t_[k].is("(")) {
                k = expression(k + 1, d, ")") + 1;
            } else if (t_[k].is("=")) {
                k = expression(k + 1, d, ";") + 1;
            } else {
                ++k;
            }
        }
        return k + 1;
    }

    std::size_t block(std::size_t open, Depth d) {
        std::size_t k = open + 1;
        while (k < end_ && !t_[k].is("}")) k = statement(k, d);
        return k + 1;
    }

    // Index just past the statement at k, without recording anything.
    std::size_t statement_end(std::size_t k) {
        NestingWalker probe(t_, end_);
        return probe.statement(k, {0, 0});
    }

    std::size_t body(std::size_t k, Depth d) { return statement(k, d); }

    std::size_t if_statement(std::size_t k, Depth d) {
        record(d);
        k = skip_parens(k + 1, d);
        k = body(k, d.deeper());
        if (!is(k, "else")) return k;
        ++k;
        if (is(k, "if")) return if_statement(k, d);  // ladder: same level
        if (is(k, "{") && is(k + 1, "if")) {
            const auto inner_end = statement_end(k + 1);
            if (is(inner_end, "}")) {
                // Braced else-if: nested for NL, flattened for NLE.
                Depth inner{d.nl + 1, d.nle};
                statement(k + 1, inner);
                return inner_end + 1;
            }
        }
        return body(k, d.deeper());
    }

    std::size_t switch_statement(std::size_t k, Depth d) {
        record(d);
        k = skip_parens(k + 1, d);
        if (!is(k, "{")) return k;
        const Depth inner = d.deeper();
        ++k;
        while (k < end_ && !t_[k].is("}")) {
            if (t_[k].is("case") || t_[k].is("default")) {
                // Label up to ':' or '->'.
                ++k;
                while (k < end_ && !t_[k].is(":") && !t_[k].is("->")) {
                    if (t_[k].is("(")) {
                        k = expression(k + 1, inner, ")") + 1;
                        continue;
                    }
                    ++k;
                }
                if (is(k, "->")) {
                    ++k;
                    if (is(k, "{"))
                        k = block(k, inner);
                    else
                        k = statement(k, inner);
                } else {
                    ++k;
                }
                continue;
            }
            k = statement(k, inner);
        }
        return k + 1;
    }

    std::size_t try_statement(std::size_t k, Depth d) {
        record(d);
        ++k;
        if (is(k, "(")) k = expression(k + 1, d, ")") + 1;
        if (is(k, "{")) k = block(k, d.deeper());
        while (is(k, "catch")) {
            k = skip_parens(k + 1, d);
            if (is(k, "{")) k = block(k, d.deeper());
        }
        if (is(k, "finally") && is(k + 1, "{")) k = block(k + 1, d.deeper());
        return k;
    }

public:
    std::size_t statement(std::size_t k, Depth d) {
        if (k >= end_) return end_;
        const auto& tk = t_[k];
        if (tk.is("{")) return block(k, d);
        if (tk.is(";")) return k + 1;
        if (tk.is("}")) return k + 1;  // stray closer: let the caller advance
        if (tk.is("if")) return if_statement(k, d);
        if (tk.is("for") || tk.is("while")) {
            record(d);
            k = skip_parens(k + 1, d);
            return body(k, d.deeper());
        }
        if (tk.is("do")) {
            record(d);
            k = body(k + 1, d.deeper());
            if (is(k, "while")) k = skip_parens(k + 1, d);
            return is(k, ";") ? k + 1 : k;
        }
        if (tk.is("switch")) {
            const auto after = switch_statement(k, d);
            return is(after, ";") ? after + 1 : after;
        }
        if (tk.is("try")) return try_statement(k, d);
        if (tk.is("synchronized") && is(k + 1, "(")) {
            k = skip_parens(k + 1, d);
            return is(k, "{") ? block(k, d) : k;
        }
        if (tk.kind == TokenKind::Identifier && is(k + 1, ":") ) return statement(k + 2, d);  // label
        if (tk.is("class") || tk.is("interface") || tk.is("enum")) {
            while (k < end_ && !t_[k].is("{")) ++k;
            return k < end_ ? anonymous_body(k, d) : k;
        }
        const auto term = expression(k, d, ";");
        return is(term, ";") ? term + 1 : std::max(term, k + 1);
    }

private:
    const std::vector<Token>& t_;
    std::size_t end_;
    Nesting result_;
};

}  // namespace

Nesting method_nesting(const java::EntityTree& tree, const java::MethodNode& method) {
    if (!method.body) return {};
    NestingWalker walker(tree.tokens, method.body->end);
    return walker.walk_body(method.body->begin);
}

}  // namespace qd::metrics
