#include "qd/java/entity_tree.hpp"

#include "qd/error.hpp"

#include <algorithm>
#include <array>

namespace qd::java {

std::string MethodNode::signature() const {
    std::string s = name + "(";
    for (std::size_t i = 0; i < parameter_types.size(); ++i) {
        if (i) s += ",";
        s += parameter_types[i];
    }
    return s + ")";
}

bool MethodNode::has_modifier(std::string_view m) const {
    return std::find(modifiers.begin(), modifiers.end(), m) != modifiers.end();
}

bool FieldNode::has_modifier(std::string_view m) const {
    return std::find(modifiers.begin(), modifiers.end(), m) != modifiers.end();
}

bool ClassNode::has_modifier(std::string_view m) const {
    return std::find(modifiers.begin(), modifiers.end(), m) != modifiers.end();
}

std::string ClassNode::method_key(const MethodNode& m) const { return qualified_name + "." + m.signature(); }

std::string Import::simple_name() const {
    auto dot = name.rfind('.');
    return dot == std::string::npos ? name : name.substr(dot + 1);
}

const ClassNode* EntityTree::find_class(std::string_view qualified_name) const {
    for (const auto& c : classes)
        if (c.qualified_name == qualified_name) return &c;
    return nullptr;
}

namespace {

constexpr std::array<std::string_view, 12> kModifierKeywords = {
    "public", "protected", "private", "static",   "abstract", "final",
    "native", "synchronized", "transient", "volatile", "strictfp", "default",
};

constexpr std::array<std::string_view, 9> kPrimitiveTypes = {
    "boolean", "byte", "char", "short", "int", "long", "float", "double", "void",
};

bool is_open(const Token& t) { return t.is("(") || t.is("[") || t.is("{"); }
bool is_close(const Token& t) { return t.is(")") || t.is("]") || t.is("}"); }

std::string closer_for(const Token& t) {
    if (t.is("(")) return ")";
    if (t.is("[")) return "]";
    return "}";
}

class Parser {
public:
    Parser(std::vector<Token> all, EntityTree& tree) : tree_(tree) {
        for (auto& t : all) {
            if (t.is_comment()) {
                tree_.comments.push_back(std::move(t));
            } else {
                comments_before_.push_back(tree_.comments.size());
                tree_.tokens.push_back(std::move(t));
            }
        }
        comments_before_.push_back(tree_.comments.size());
    }

    void run() {
        const auto& c = tree_.tokens;
        while (i_ < c.size()) {
            const auto& t = c[i_];
            if (t.is("package")) {
                ++i_;
                tree_.package_name = dotted_name();
                expect(";");
            } else if (t.is("import")) {
                parse_import();
            } else if (t.is(";")) {
                ++i_;
            } else {
                const auto start = i_;
                auto mods = parse_modifiers();
                if (at_type_declaration()) {
                    parse_type_declaration(start, std::move(mods), std::nullopt);
                } else {
                    error(line_at(i_), "unexpected token '" + (i_ < c.size() ? c[i_].text : std::string("<eof>")) +
                                           "' at top level");
                    if (i_ == start) ++i_;
                }
            }
        }
    }

private:
    const Token& tok(std::size_t k) const { return tree_.tokens[k]; }
    bool at(std::string_view text) const { return i_ < tree_.tokens.size() && tree_.tokens[i_].is(text); }
    bool at_ident() const { return i_ < tree_.tokens.size() && tree_.tokens[i_].kind == TokenKind::Identifier; }
    bool peek_is(std::size_t ahead, std::string_view text) const {
        return i_ + ahead < tree_.tokens.size() && tree_.tokens[i_ + ahead].is(text);
    }

    std::size_t line_at(std::size_t k) const {
        if (tree_.tokens.empty()) return 1;
        return k < tree_.tokens.size() ? tree_.tokens[k].line : tree_.tokens.back().end_line;
    }

    void error(std::size_t line, std::string message) { tree_.errors.push_back({line, std::move(message)}); }

    void expect(std::string_view text) {
        if (at(text)) {
            ++i_;
            return;
        }
        error(line_at(i_), "expected '" + std::string(text) + "'");
    }

    std::string dotted_name() {
        std::string name;
        while (at_ident()) {
            name += tok(i_).text;
            ++i_;
            if (at(".") && i_ + 1 < tree_.tokens.size() && tok(i_ + 1).kind == TokenKind::Identifier) {
                name += ".";
                ++i_;
            } else {
                break;
            }
        }
        return name;
    }

    void parse_import() {
        ++i_;
        Import imp;
        if (at("static")) {
            imp.is_static = true;
            ++i_;
        }
        imp.name = dotted_name();
        if (at(".") && peek_is(1, "*")) {
            imp.wildcard = true;
            i_ += 2;
        }
        if (imp.name.empty()) error(line_at(i_), "malformed import");
        expect(";");
        tree_.imports.push_back(std::move(imp));
    }

    // Doc comment immediately preceding code token `k` (only comments between).
    std::optional<LineSpan> doc_before(std::size_t k) const {
        const auto lo = k == 0 ? 0 : comments_before_[k - 1];
        for (auto j = comments_before_[k]; j > lo; --j) {
            const auto& cm = tree_.comments[j - 1];
            if (cm.kind == TokenKind::DocComment) return LineSpan{cm.line, cm.end_line};
        }
        return std::nullopt;
    }

    // Index of the token closing the bracket opened at `open`, with full
    // bracket-kind checking. Mismatches are reported and recovered from.
    std::optional<std::size_t> match(std::size_t open) {
        std::vector<std::string> stack{closer_for(tok(open))};
        for (auto k = open + 1; k < tree_.tokens.size(); ++k) {
            const auto& t = tok(k);
            if (is_open(t)) {
                stack.push_back(closer_for(t));
            } else if (is_close(t)) {
                if (t.text == stack.back()) {
                    stack.pop_back();
                    if (stack.empty()) return k;
                    continue;
                }
                auto it = std::find(stack.rbegin(), stack.rend(), t.text);
                error(t.line, "mismatched '" + t.text + "' (expected '" + stack.back() + "')");
                if (it == stack.rend()) continue;
                stack.erase(std::prev(it.base()), stack.end());
                if (stack.empty()) return k;
            }
        }
        error(line_at(tree_.tokens.size()), "unexpected end of input: unclosed '" + tok(open).text + "' from line " +
                                                std::to_string(tok(open).line));
        return std::nullopt;
    }

    // Skips a balanced bracket group starting at i_; leaves i_ after it.
    void skip_group() {
        auto close = match(i_);
        i_ = close ? *close + 1 : tree_.tokens.size();
    }

    void skip_annotation() {
        ++i_;  // '@'
        dotted_name();
        if (at("(")) skip_group();
    }

    std::vector<std::string> parse_modifiers() {
        std::vector<std::string> mods;
        while (i_ < tree_.tokens.size()) {
            const auto& t = tok(i_);
            if (t.is("@") && !peek_is(1, "interface")) {
                skip_annotation();
            } else if (t.kind == TokenKind::Keyword &&
                       std::find(kModifierKeywords.begin(), kModifierKeywords.end(), t.text) != kModifierKeywords.end()) {
                mods.push_back(t.text);
                ++i_;
            } else if (t.kind == TokenKind::Identifier && t.text == "sealed" && i_ + 1 < tree_.tokens.size() &&
                       (tok(i_ + 1).kind == TokenKind::Identifier || tok(i_ + 1).kind == TokenKind::Keyword)) {
                mods.push_back("sealed");
                ++i_;
            } else if (t.kind == TokenKind::Identifier && t.text == "non" && peek_is(1, "-") && i_ + 2 < tree_.tokens.size() &&
                       tok(i_ + 2).text == "sealed") {
                mods.push_back("non-sealed");
                i_ += 3;
            } else {
                break;
            }
        }
        return mods;
    }

    bool at_type_declaration() const {
        if (at("class") || at("interface") || at("enum")) return true;
        if (at("@") && peek_is(1, "interface")) return true;
        return at_ident() && tok(i_).text == "record" && i_ + 1 < tree_.tokens.size() &&
               tok(i_ + 1).kind == TokenKind::Identifier;
    }

    // Skips "<...>" type arguments/parameters. Returns false when the angle
    // brackets do not close before a statement-level token.
    bool skip_angles() {
        int depth = 0;
        while (i_ < tree_.tokens.size()) {
            const auto& t = tok(i_);
            if (t.is("<")) {
                ++depth;
            } else if (t.is(">")) {
                --depth;
            } else if (t.is(">>")) {
                depth -= 2;
            } else if (t.is(">>>")) {
                depth -= 3;
            } else if (t.is(";") || t.is("{") || t.is("}") || t.is("=") || t.is(")")) {
                error(t.line, "unterminated type argument list");
                return false;
            } else if (t.is("(")) {
                skip_group();
                continue;
            }
            ++i_;
            if (depth <= 0) return true;
        }
        return false;
    }

    // Skips a type reference; returns its compact text or "" if none found.
    std::string parse_type() {
        const auto begin = i_;
        while (at("@") && !peek_is(1, "interface")) skip_annotation();
        const auto text_begin = i_;
        if (i_ < tree_.tokens.size() && tok(i_).kind == TokenKind::Keyword &&
            std::find(kPrimitiveTypes.begin(), kPrimitiveTypes.end(), tok(i_).text) != kPrimitiveTypes.end()) {
            ++i_;
        } else if (at_ident()) {
            while (at_ident()) {
                ++i_;
                if (at("<") && !skip_angles()) break;
                if (at(".") && i_ + 1 < tree_.tokens.size() &&
                    (tok(i_ + 1).kind == TokenKind::Identifier || tok(i_ + 1).is("@"))) {
                    ++i_;
                    while (at("@")) skip_annotation();
                    continue;
                }
                break;
            }
        } else {
            i_ = begin;
            return {};
        }
        while (at("[") && peek_is(1, "]")) i_ += 2;
        std::string text;
        for (auto k = text_begin; k < i_; ++k) text += tok(k).text;
        return text;
    }

    void parse_type_declaration(std::size_t start, std::vector<std::string> mods, std::optional<std::size_t> parent) {
        ClassNode node;
        if (at("@")) {
            node.kind = ClassKind::Annotation;
            i_ += 2;
        } else if (at("interface")) {
            node.kind = ClassKind::Interface;
            ++i_;
        } else if (at("enum")) {
            node.kind = ClassKind::Enum;
            ++i_;
        } else if (at("class")) {
            node.kind = ClassKind::Class;
            ++i_;
        } else {
            node.kind = ClassKind::Record;
            ++i_;
        }
        if (!at_ident()) {
            error(line_at(i_), "expected type name");
            return;
        }
        node.name = tok(i_).text;
        ++i_;
        node.qualified_name = parent ? tree_.classes[*parent].qualified_name + "." + node.name : node.name;
        node.modifiers = std::move(mods);
        node.parent = parent;
        node.doc = doc_before(start);
        node.span.first = tok(start).line;
        node.tokens.begin = start;

        // Header: type parameters, record components, extends/implements/permits.
        while (i_ < tree_.tokens.size() && !at("{")) {
            if (at("<")) {
                if (!skip_angles()) break;
            } else if (at("(")) {
                skip_group();
            } else if (at(";") || at("}")) {
                break;
            } else {
                ++i_;
            }
        }
        if (!at("{")) {
            error(line_at(i_), "expected '{' after declaration of " + node.name);
            node.span.last = line_at(i_);
            node.tokens.end = i_;
            add_class(std::move(node), parent);
            return;
        }
        const auto index = add_class(std::move(node), parent);
        parse_class_body(index);
    }

    std::size_t add_class(ClassNode node, std::optional<std::size_t> parent) {
        tree_.classes.push_back(std::move(node));
        const auto index = tree_.classes.size() - 1;
        if (parent) tree_.classes[*parent].nested.push_back(index);
        return index;
    }

    void parse_enum_constants() {
        while (i_ < tree_.tokens.size()) {
            while (at("@")) skip_annotation();
            if (at(";")) {
                ++i_;
                return;
            }
            if (at("}")) return;
            if (!at_ident()) {
                error(line_at(i_), "malformed enum constant");
                return;
            }
            ++i_;
            if (at("(")) skip_group();
            if (at("{")) skip_group();
            if (at(",")) ++i_;
        }
    }

    void parse_class_body(std::size_t index) {
        const auto open = i_;
        ++i_;
        if (tree_.classes[index].kind == ClassKind::Enum) parse_enum_constants();
        while (i_ < tree_.tokens.size() && !at("}")) {
            if (at(";")) {
                ++i_;
                continue;
            }
            const auto start = i_;
            auto mods = parse_modifiers();
            if (at("{")) {
                skip_group();  // instance or static initializer
                continue;
            }
            if (at_type_declaration()) {
                parse_type_declaration(start, std::move(mods), index);
                continue;
            }
            parse_member(index, start, std::move(mods));
            if (i_ == start) {
                error(line_at(i_), "unexpected token '" + tok(i_).text + "' in class body");
                ++i_;
            }
        }
        auto& node = tree_.classes[index];
        if (i_ >= tree_.tokens.size()) {
            error(line_at(i_), "unexpected end of input in body of " + node.name + " opened at line " +
                                   std::to_string(tok(open).line));
            node.span.last = line_at(i_);
            node.tokens.end = tree_.tokens.size();
            return;
        }
        node.span.last = tok(i_).end_line;
        node.tokens.end = i_ + 1;
        ++i_;
    }

    // Skips to the end of a field declaration or unparseable member.
    void skip_member_rest() {
        while (i_ < tree_.tokens.size()) {
            if (at(";")) {
                ++i_;
                return;
            }
            if (at("}")) return;
            if (is_open(tok(i_))) {
                const bool brace = at("{");
                skip_group();
                if (brace && !at(",") && !at(";") && !at(".") && !at(")")) return;
                continue;
            }
            ++i_;
        }
    }

    std::vector<std::string> parse_parameters(bool& varargs) {
        std::vector<std::string> types;
        auto close = match(i_);
        const auto end = close ? *close : tree_.tokens.size();
        ++i_;
        while (i_ < end) {
            std::vector<std::string> parts;
            int angle = 0;
            while (i_ < end) {
                const auto& t = tok(i_);
                if (angle == 0 && t.is(",")) break;
                if (t.is("@")) {
                    skip_annotation();
                    continue;
                }
                if (t.is("final")) {
                    ++i_;
                    continue;
                }
                if (t.is("<")) ++angle;
                if (t.is(">")) --angle;
                if (t.is(">>")) angle -= 2;
                if (t.is(">>>")) angle -= 3;
                if (t.is("...")) varargs = true;
                parts.push_back(t.text);
                ++i_;
            }
            if (at(",")) ++i_;
            // Trailing "[]" after the name belongs to the type.
            std::string dims;
            while (parts.size() >= 2 && parts.back() == "]" && parts[parts.size() - 2] == "[") {
                dims += "[]";
                parts.resize(parts.size() - 2);
            }
            if (parts.size() < 2) {
                if (!parts.empty()) error(line_at(i_), "malformed parameter");
                continue;
            }
            parts.pop_back();  // parameter name
            std::string type;
            for (const auto& p : parts) type += p;
            types.push_back(type + dims);
        }
        i_ = close ? *close + 1 : tree_.tokens.size();
        return types;
    }

    void parse_member(std::size_t index, std::size_t start, std::vector<std::string> mods) {
        if (at("<") && !skip_angles()) {
            skip_member_rest();
            return;
        }
        const auto& owner_name = tree_.classes[index].name;
        MethodNode method;
        if (at_ident() && peek_is(1, "(")) {
            method.is_constructor = true;
        } else if (at_ident() && peek_is(1, "{") && tok(i_).text == owner_name) {
            method.is_constructor = true;  // compact record constructor
        } else {
            auto type = parse_type();
            if (type.empty() || !at_ident()) {
                error(line_at(i_), "expected member declaration");
                skip_member_rest();
                return;
            }
            if (!peek_is(1, "(")) {
                FieldNode field;
                field.name = tok(i_).text;
                field.modifiers = std::move(mods);
                field.doc = doc_before(start);
                field.span.first = tok(start).line;
                skip_member_rest();
                field.span.last = i_ > 0 ? tok(i_ - 1).end_line : field.span.first;
                tree_.classes[index].fields.push_back(std::move(field));
                return;
            }
        }

        method.name = tok(i_).text;
        ++i_;
        method.modifiers = std::move(mods);
        method.doc = doc_before(start);
        method.span.first = tok(start).line;
        method.tokens.begin = start;
        if (at("(")) {
            method.parameter_types = parse_parameters(method.varargs);
        }
        while (at("[") && peek_is(1, "]")) i_ += 2;
        if (at("throws")) {
            while (i_ < tree_.tokens.size() && !at("{") && !at(";") && !at("}")) ++i_;
        }
        if (at("default")) {
            while (i_ < tree_.tokens.size() && !at(";") && !at("}")) {
                if (is_open(tok(i_)))
                    skip_group();
                else
                    ++i_;
            }
        }
        if (at("{")) {
            const auto open = i_;
            auto close = match(open);
            if (!close) {
                method.body = TokenRange{open + 1, tree_.tokens.size()};
                method.tokens.end = tree_.tokens.size();
                method.span.last = line_at(tree_.tokens.size());
                i_ = tree_.tokens.size();
            } else {
                method.body = TokenRange{open + 1, *close};
                method.tokens.end = *close + 1;
                method.span.last = tok(*close).end_line;
                i_ = *close + 1;
            }
        } else if (at(";")) {
            method.tokens.end = i_ + 1;
            method.span.last = tok(i_).end_line;
            ++i_;
        } else {
            error(line_at(i_), "expected method body for " + method.name);
            method.tokens.end = i_;
            method.span.last = line_at(i_ == 0 ? 0 : i_ - 1);
            skip_member_rest();
        }
        tree_.classes[index].methods.push_back(std::move(method));
    }

    EntityTree& tree_;
    std::vector<std::size_t> comments_before_;  // comments preceding code token k
    std::size_t i_ = 0;
};

std::size_t count_lines(std::string_view source) {
    if (source.empty()) return 0;
    auto n = static_cast<std::size_t>(std::count(source.begin(), source.end(), '\n'));
    return source.back() == '\n' ? n : n + 1;
}

void check_unique_keys(EntityTree& tree) {
    std::vector<std::string> keys;
    for (const auto& c : tree.classes) {
        keys.push_back("class " + c.qualified_name);
        for (const auto& m : c.methods) keys.push_back("method " + c.method_key(m));
    }
    std::sort(keys.begin(), keys.end());
    for (std::size_t k = 1; k < keys.size(); ++k)
        if (keys[k] == keys[k - 1]) tree.errors.push_back({0, "duplicate declaration: " + keys[k]});
}

}  // namespace

EntityTree parse_entities(std::string_view source) {
    EntityTree tree;
    tree.line_count = count_lines(source);
    auto tokens = tokenize(source);
    Parser parser(std::move(tokens), tree);
    parser.run();
    check_unique_keys(tree);
    return tree;
}

}  // namespace qd::java
