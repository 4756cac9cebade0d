#pragma once

#include "qd/java/lexer.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qd::java {

/// Inclusive 1-based line range.
struct LineSpan {
    std::size_t first = 0;
    std::size_t last = 0;

    [[nodiscard]] bool contains(std::size_t line) const noexcept { return line >= first && line <= last; }
    [[nodiscard]] bool contains(const LineSpan& o) const noexcept { return o.first >= first && o.last <= last; }
    [[nodiscard]] std::size_t size() const noexcept { return last >= first ? last - first + 1 : 0; }

    bool operator==(const LineSpan&) const = default;
};

/// Half-open range of indices into EntityTree::tokens.
struct TokenRange {
    std::size_t begin = 0;
    std::size_t end = 0;

    [[nodiscard]] bool empty() const noexcept { return begin >= end; }
};

enum class ClassKind { Class, Interface, Enum, Record, Annotation };

struct MethodNode {
    std::string name;
    std::vector<std::string> parameter_types;
    bool varargs = false;
    bool is_constructor = false;
    std::vector<std::string> modifiers;
    LineSpan span;
    TokenRange tokens;                 // whole declaration, annotations included
    std::optional<TokenRange> body;    // tokens strictly inside the body braces
    std::optional<LineSpan> doc;       // attached doc comment

    /// "name(T1,T2)" -- unique within the owning class.
    [[nodiscard]] std::string signature() const;
    [[nodiscard]] bool has_modifier(std::string_view m) const;
};

struct FieldNode {
    std::string name;  // first declarator
    std::vector<std::string> modifiers;
    LineSpan span;
    std::optional<LineSpan> doc;

    [[nodiscard]] bool has_modifier(std::string_view m) const;
};

struct ClassNode {
    std::string name;
    std::string qualified_name;  // Outer.Inner, file-local (no package)
    ClassKind kind = ClassKind::Class;
    std::vector<std::string> modifiers;
    LineSpan span;
    TokenRange tokens;
    std::optional<LineSpan> doc;
    std::optional<std::size_t> parent;  // index into EntityTree::classes
    std::vector<std::size_t> nested;    // direct nested types
    std::vector<MethodNode> methods;    // direct methods and constructors
    std::vector<FieldNode> fields;

    [[nodiscard]] bool has_modifier(std::string_view m) const;
    /// Qualified method key: "Outer.Inner.name(T1,T2)".
    [[nodiscard]] std::string method_key(const MethodNode& m) const;
};

struct Import {
    std::string name;  // dotted name without trailing ".*"
    bool is_static = false;
    bool wildcard = false;

    /// Simple type name for single-type imports ("java.util.List" -> "List").
    [[nodiscard]] std::string simple_name() const;
};

struct SyntaxError {
    std::size_t line;
    std::string message;
};

/// Classes and methods of one source file, plus the token and line tables
/// the metric calculators need. Classes are stored in pre-order.
struct EntityTree {
    std::string package_name;
    std::vector<Import> imports;
    std::vector<ClassNode> classes;
    std::vector<SyntaxError> errors;

    std::vector<Token> tokens;    // code tokens only
    std::vector<Token> comments;  // comment tokens, source order
    std::size_t line_count = 0;

    [[nodiscard]] bool ok() const noexcept { return errors.empty(); }
    [[nodiscard]] const ClassNode* find_class(std::string_view qualified_name) const;
};

/// Parses Java source into an entity tree. Structural syntax errors are
/// reported in `errors` with the recoverable subtree kept. A lexical failure
/// (unterminated comment or literal) leaves no usable tree and throws
/// ParseError ("entity tree unavailable").
EntityTree parse_entities(std::string_view source);

}  // namespace qd::java
