#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace qd::java {

enum class TokenKind {
    Identifier,
    Keyword,
    Literal,      // numbers, strings, chars, text blocks, true/false/null
    Operator,     // = + - ... -> :: ? :
    Separator,    // ( ) { } [ ] ; , . @ ...
    LineComment,
    BlockComment,
    DocComment,
};

struct Token {
    TokenKind kind;
    std::string text;
    std::size_t line;      // 1-based line of the first character
    std::size_t end_line;  // 1-based line of the last character

    [[nodiscard]] bool is_comment() const noexcept {
        return kind == TokenKind::LineComment || kind == TokenKind::BlockComment || kind == TokenKind::DocComment;
    }
    [[nodiscard]] bool is(std::string_view t) const noexcept {
        return text == t && kind != TokenKind::Literal && !is_comment();
    }
};

/// Tokenizes Java source. Comments are kept as tokens; whitespace is not.
/// Operators are lexed by maximal munch (`>>` is one token even when it
/// closes two type-argument lists). Throws ParseError on an unterminated
/// comment, string, char or text block.
std::vector<Token> tokenize(std::string_view source);

bool is_keyword(std::string_view word);

}  // namespace qd::java
