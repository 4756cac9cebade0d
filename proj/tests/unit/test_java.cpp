#include "qd/error.hpp"
#include "qd/java/entity_tree.hpp"
#include "qd/java/lexer.hpp"

#include <doctest.h>

using namespace qd;
using java::TokenKind;

TEST_CASE("lexer classifies tokens") {
    const auto toks = java::tokenize("int x = a >>> 2; // c\n/** d */ s = \"q\\\"\" + 'c' + 1.5e3f + null;");
    std::vector<std::pair<TokenKind, std::string>> got;
    for (const auto& t : toks) got.emplace_back(t.kind, t.text);
    const std::vector<std::pair<TokenKind, std::string>> want = {
        {TokenKind::Keyword, "int"},      {TokenKind::Identifier, "x"},   {TokenKind::Operator, "="},
        {TokenKind::Identifier, "a"},     {TokenKind::Operator, ">>>"},   {TokenKind::Literal, "2"},
        {TokenKind::Separator, ";"},      {TokenKind::LineComment, "// c"}, {TokenKind::DocComment, "/** d */"},
        {TokenKind::Identifier, "s"},     {TokenKind::Operator, "="},     {TokenKind::Literal, "\"q\\\"\""},
        {TokenKind::Operator, "+"},       {TokenKind::Literal, "'c'"},    {TokenKind::Operator, "+"},
        {TokenKind::Literal, "1.5e3f"},   {TokenKind::Operator, "+"},     {TokenKind::Literal, "null"},
        {TokenKind::Separator, ";"},
    };
    CHECK(got == want);
    CHECK(toks[8].line == 2);
}

TEST_CASE("lexer tracks multi-line tokens") {
    const auto toks = java::tokenize("/* a\n b\n */ x\n\"\"\"\n text\n \"\"\" y");
    REQUIRE(toks.size() == 4);
    CHECK(toks[0].kind == TokenKind::BlockComment);
    CHECK(toks[0].line == 1);
    CHECK(toks[0].end_line == 3);
    CHECK(toks[1].line == 3);
    CHECK(toks[2].kind == TokenKind::Literal);
    CHECK(toks[2].line == 4);
    CHECK(toks[2].end_line == 6);
    CHECK(toks[3].line == 6);
}

TEST_CASE("unterminated comments and literals are lexical failures") {
    CHECK_THROWS_AS(java::tokenize("/* open"), ParseError);
    CHECK_THROWS_AS(java::tokenize("s = \"open;\n"), ParseError);
    CHECK_THROWS_AS(java::parse_entities("class A { /* }"), ParseError);
}

TEST_CASE("minimal program") {
    const auto tree = java::parse_entities("class A { void m() {} }");
    CHECK(tree.ok());
    REQUIRE(tree.classes.size() == 1);
    REQUIRE(tree.classes[0].methods.size() == 1);
    CHECK(tree.classes[0].methods[0].name == "m");
}

TEST_CASE("empty input") {
    const auto tree = java::parse_entities("");
    CHECK(tree.ok());
    CHECK(tree.classes.empty());
}

TEST_CASE("nested class span table") {
    const std::string src =
        "package p;\n"                          // 1
        "\n"                                     // 2
        "import java.util.List;\n"               // 3
        "\n"                                     // 4
        "/** Outer doc. */\n"                    // 5
        "public class Outer {\n"                 // 6
        "    private int n;\n"                   // 7
        "\n"                                     // 8
        "    public int get() {\n"               // 9
        "        return n;\n"                    // 10
        "    }\n"                                // 11
        "\n"                                     // 12
        "    static class Inner {\n"             // 13
        "        /** Doc. */\n"                  // 14
        "        void run(List<String> xs,\n"    // 15
        "                 int... rest) {\n"      // 16
        "        }\n"                            // 17
        "    }\n"                                // 18
        "}\n"                                    // 19
        "class Tail {}\n";                       // 20
    const auto tree = java::parse_entities(src);
    CHECK(tree.ok());
    CHECK(tree.package_name == "p");
    REQUIRE(tree.imports.size() == 1);
    CHECK(tree.imports[0].simple_name() == "List");

    REQUIRE(tree.classes.size() == 3);
    const auto& outer = tree.classes[0];
    const auto& inner = tree.classes[1];
    const auto& tail = tree.classes[2];
    CHECK(outer.qualified_name == "Outer");
    CHECK(outer.span == java::LineSpan{6, 19});
    CHECK(outer.doc == java::LineSpan{5, 5});
    CHECK(outer.nested == std::vector<std::size_t>{1});
    CHECK(inner.qualified_name == "Outer.Inner");
    CHECK(inner.span == java::LineSpan{13, 18});
    CHECK(inner.parent == std::optional<std::size_t>{0});
    CHECK(tail.span == java::LineSpan{20, 20});
    CHECK_FALSE(tail.parent.has_value());

    REQUIRE(outer.fields.size() == 1);
    CHECK(outer.fields[0].name == "n");
    CHECK(outer.fields[0].span == java::LineSpan{7, 7});
    REQUIRE(outer.methods.size() == 1);
    CHECK(outer.methods[0].span == java::LineSpan{9, 11});
    CHECK(outer.method_key(outer.methods[0]) == "Outer.get()");

    REQUIRE(inner.methods.size() == 1);
    const auto& run = inner.methods[0];
    CHECK(run.span == java::LineSpan{15, 17});
    CHECK(run.doc == java::LineSpan{14, 14});
    CHECK(run.varargs);
    CHECK(inner.method_key(run) == "Outer.Inner.run(List<String>,int...)");
    CHECK(tree.find_class("Outer.Inner") == &inner);
}

TEST_CASE("declaration kinds") {
    const auto tree = java::parse_entities(
        "interface I { int f(); }\n"
        "enum E { A, B; int g() { return 0; } }\n"
        "record R(int x) { R { } int x2() { return x * 2; } }\n"
        "@interface Ann { String value() default \"\"; }\n"
        "abstract class C<T extends Comparable<T>> implements I { public C() {} @Override public int f() { return 1; } }\n");
    CHECK(tree.ok());
    REQUIRE(tree.classes.size() == 5);
    CHECK(tree.classes[0].kind == java::ClassKind::Interface);
    CHECK(tree.classes[1].kind == java::ClassKind::Enum);
    CHECK(tree.classes[2].kind == java::ClassKind::Record);
    CHECK(tree.classes[3].kind == java::ClassKind::Annotation);
    CHECK(tree.classes[4].kind == java::ClassKind::Class);
    CHECK(tree.classes[1].methods.size() == 1);
    const auto& c = tree.classes[4];
    REQUIRE(c.methods.size() == 2);
    CHECK(c.methods[0].is_constructor);
    CHECK(c.methods[1].has_modifier("public"));
}

TEST_CASE("anonymous and local classes stay inside the method") {
    const auto tree = java::parse_entities(
        "class A {\n void m() {\n  Runnable r = new Runnable() { public void run() {} };\n  class L { void k() {} }\n }\n}\n");
    CHECK(tree.ok());
    REQUIRE(tree.classes.size() == 1);
    CHECK(tree.classes[0].methods.size() == 1);
}

TEST_CASE("syntax errors keep the recoverable part") {
    const auto tree = java::parse_entities("class A {\n void m() { int x = 1; }\n void broken( {\n}\n");
    CHECK_FALSE(tree.ok());
    REQUIRE_FALSE(tree.classes.empty());
    CHECK(tree.classes[0].name == "A");
    CHECK_FALSE(tree.classes[0].methods.empty());
    const auto unbalanced = java::parse_entities("class A { void m() { ) } }");
    CHECK_FALSE(unbalanced.ok());
}
