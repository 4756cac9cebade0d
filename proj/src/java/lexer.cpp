#include "qd/java/lexer.hpp"

#include "qd/error.hpp"

#include <algorithm>
#include <array>

namespace qd::java {

namespace {

constexpr std::array<std::string_view, 50> kKeywords = {
    "abstract", "assert",     "boolean",   "break",     "byte",    "case",      "catch",        "char",
    "class",    "const",      "continue",  "default",   "do",      "double",    "else",         "enum",
    "extends",  "final",      "finally",   "float",     "for",     "goto",      "if",           "implements",
    "import",   "instanceof", "int",       "interface", "long",    "native",    "new",          "package",
    "private",  "protected",  "public",    "return",    "short",   "static",    "strictfp",     "super",
    "switch",   "synchronized", "this",    "throw",     "throws",  "transient", "try",          "void",
    "volatile", "while",
};

// Longest first so a linear scan implements maximal munch.
constexpr std::array<std::string_view, 40> kOperators = {
    ">>>=", "<<=", ">>=", ">>>", "...", "->", "::", "++", "--", "&&", "||", "==", "!=", "<=",
    ">=",   "+=",  "-=",  "*=",  "/=",  "&=", "|=", "^=", "%=", "<<", ">>", "=",  ">",  "<",
    "!",    "~",   "?",   ":",   "+",   "-",  "*",  "/",  "&",  "|",  "^",  "%",
};

bool is_ident_start(unsigned char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' || c == '$' || c >= 0x80;
}

bool is_ident_part(unsigned char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }

bool is_digit(unsigned char c) { return c >= '0' && c <= '9'; }

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run() {
        while (pos_ < src_.size()) {
            const char c = src_[pos_];
            if (c == '\n') {
                ++line_;
                ++pos_;
            } else if (c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v') {
                ++pos_;
            } else if (starts_with("//")) {
                line_comment();
            } else if (starts_with("/*")) {
                block_comment();
            } else if (starts_with("\"\"\"")) {
                text_block();
            } else if (c == '"') {
                quoted('"');
            } else if (c == '\'') {
                quoted('\'');
            } else if (is_digit(static_cast<unsigned char>(c)) ||
                       (c == '.' && pos_ + 1 < src_.size() && is_digit(static_cast<unsigned char>(src_[pos_ + 1])))) {
                number();
            } else if (is_ident_start(static_cast<unsigned char>(c))) {
                identifier();
            } else {
                punctuation();
            }
        }
        return std::move(tokens_);
    }

private:
    bool starts_with(std::string_view s) const { return src_.substr(pos_, s.size()) == s; }

    void emit(TokenKind kind, std::size_t begin, std::size_t start_line) {
        tokens_.push_back({kind, std::string(src_.substr(begin, pos_ - begin)), start_line, line_});
    }

    void line_comment() {
        const auto begin = pos_;
        while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
        // A trailing '\r' belongs to the line ending, not the comment.
        auto end = pos_;
        if (end > begin && src_[end - 1] == '\r') --end;
        tokens_.push_back({TokenKind::LineComment, std::string(src_.substr(begin, end - begin)), line_, line_});
    }

    void block_comment() {
        const auto begin = pos_;
        const auto start_line = line_;
        const bool doc = starts_with("/**") && !starts_with("/**/");
        pos_ += 2;
        while (true) {
            if (pos_ + 1 >= src_.size()) throw ParseError("unterminated block comment starting at line " +
                                                          std::to_string(start_line));
            if (src_[pos_] == '*' && src_[pos_ + 1] == '/') {
                pos_ += 2;
                break;
            }
            if (src_[pos_] == '\n') ++line_;
            ++pos_;
        }
        emit(doc ? TokenKind::DocComment : TokenKind::BlockComment, begin, start_line);
    }

    void text_block() {
        const auto begin = pos_;
        const auto start_line = line_;
        pos_ += 3;
        while (true) {
            if (pos_ >= src_.size()) throw ParseError("unterminated text block starting at line " +
                                                      std::to_string(start_line));
            if (src_[pos_] == '\\') {
                pos_ += 2;
                continue;
            }
            if (starts_with("\"\"\"")) {
                pos_ += 3;
                break;
            }
            if (src_[pos_] == '\n') ++line_;
            ++pos_;
        }
        emit(TokenKind::Literal, begin, start_line);
    }

    void quoted(char quote) {
        const auto begin = pos_;
        ++pos_;
        while (true) {
            if (pos_ >= src_.size() || src_[pos_] == '\n')
                throw ParseError("unterminated literal at line " + std::to_string(line_));
            if (src_[pos_] == '\\') {
                pos_ += 2;
                continue;
            }
            if (src_[pos_] == quote) {
                ++pos_;
                break;
            }
            ++pos_;
        }
        emit(TokenKind::Literal, begin, line_);
    }

    void number() {
        const auto begin = pos_;
        const bool hex = starts_with("0x") || starts_with("0X");
        if (hex) pos_ += 2;
        while (pos_ < src_.size()) {
            const auto c = static_cast<unsigned char>(src_[pos_]);
            const bool exponent = hex ? (c == 'p' || c == 'P') : (c == 'e' || c == 'E');
            if (exponent && pos_ + 1 < src_.size() && (src_[pos_ + 1] == '+' || src_[pos_ + 1] == '-')) {
                pos_ += 2;
                continue;
            }
            if (is_ident_part(c) || c == '.') {
                // "1..." is not a number followed by varargs, but guard against "1.foo" style member access.
                if (c == '.' && pos_ + 1 < src_.size() && is_ident_start(static_cast<unsigned char>(src_[pos_ + 1])) &&
                    !hex && src_[pos_ + 1] != 'e' && src_[pos_ + 1] != 'E' && src_[pos_ + 1] != 'f' &&
                    src_[pos_ + 1] != 'F' && src_[pos_ + 1] != 'd' && src_[pos_ + 1] != 'D')
                    break;
                ++pos_;
                continue;
            }
            break;
        }
        emit(TokenKind::Literal, begin, line_);
    }

    void identifier() {
        const auto begin = pos_;
        while (pos_ < src_.size() && is_ident_part(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        const auto word = src_.substr(begin, pos_ - begin);
        TokenKind kind = TokenKind::Identifier;
        if (word == "true" || word == "false" || word == "null")
            kind = TokenKind::Literal;
        else if (is_keyword(word))
            kind = TokenKind::Keyword;
        emit(kind, begin, line_);
    }

    void punctuation() {
        const auto begin = pos_;
        if (starts_with("...")) {
            pos_ += 3;
            emit(TokenKind::Separator, begin, line_);
            return;
        }
        const char c = src_[pos_];
        if (c == '(' || c == ')' || c == '{' || c == '}' || c == '[' || c == ']' || c == ';' || c == ',' ||
            c == '.' || c == '@') {
            ++pos_;
            emit(TokenKind::Separator, begin, line_);
            return;
        }
        for (auto op : kOperators) {
            if (starts_with(op)) {
                pos_ += op.size();
                emit(TokenKind::Operator, begin, line_);
                return;
            }
        }
        // Stray character (e.g. '#', '\\' outside literals): keep it so the
        // parser can report it, but do not abort lexing.
        ++pos_;
        emit(TokenKind::Operator, begin, line_);
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::vector<Token> tokens_;
};

}  // namespace

bool is_keyword(std::string_view word) {
    return std::find(kKeywords.begin(), kKeywords.end(), word) != kKeywords.end();
}

std::vector<Token> tokenize(std::string_view source) { return Lexer(source).run(); }

}  // namespace qd::java
