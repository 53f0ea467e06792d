#include <doctest.h>

#include <algorithm>

#include "ast_dump.hpp"
#include "blockoff/frontend.hpp"
#include "fixtures.hpp"
#include "random_program.hpp"

using namespace blockoff;
using blockoff::testing::app;
using blockoff::testing::fixture_dir;

namespace {

const AstNode* find_call(const SourceUnit& u, std::string_view name)
{
    for (const auto& c : list_calls(u))
        if (c.name == name) return c.node;
    return nullptr;
}

/// Children inside parent, ordered, pairwise disjoint.
bool spans_well_formed(const AstNode& n, std::size_t size)
{
    if (n.span.end > size || n.span.start > n.span.end) return false;
    std::size_t prev_end = n.span.start;
    for (const auto& c : n.children) {
        if (c.span.start < prev_end || c.span.end > n.span.end) return false;
        if (!spans_well_formed(c, size)) return false;
        prev_end = c.span.end;
    }
    return true;
}

std::vector<std::filesystem::path> corpus()
{
    std::vector<std::filesystem::path> files;
    for (const auto* sub : {"apps", "lib", "include", "frontend", "db/refs"})
        for (const auto& e : std::filesystem::directory_iterator(fixture_dir() / sub)) files.push_back(e.path());
    std::sort(files.begin(), files.end());
    return files;
}

}  // namespace

TEST_CASE("empty file has no top-level children")
{
    const auto u = parse("empty.c", "");
    CHECK(u.root.kind == NodeKind::TranslationUnit);
    CHECK(u.root.children.empty());
    CHECK(u.root.span == Span{0, 0});
}

TEST_CASE("fft_app.c contains the four1 call with three arguments")
{
    const auto u = parse_file(app("fft_app.c"));
    const auto* call = find_call(u, "four1");
    REQUIRE(call != nullptr);
    CHECK(call->kind == NodeKind::CallExpr);
    const auto* args = call->child_of_kind(NodeKind::ArgList);
    REQUIRE(args != nullptr);
    CHECK(args->children.size() == 3);
    CHECK(u.text(call->span) == "four1(data, nn, isign)");
}

TEST_CASE("two functions and a struct give three definitions in order")
{
    const auto u = parse_file(fixture_dir() / "frontend" / "defs.c");
    const auto defs = list_definitions(u);
    REQUIRE(defs.size() == 3);
    CHECK(defs[0].kind == DefinitionKind::StructDef);
    CHECK(defs[0].name == "point");
    CHECK(defs[1].kind == DefinitionKind::FunctionDef);
    CHECK(defs[1].name == "norm2");
    CHECK(defs[2].kind == DefinitionKind::FunctionDef);
    CHECK(defs[2].name == "dot");
    for (const auto& d : defs)
        CHECK(d.node->kind == (d.kind == DefinitionKind::StructDef ? NodeKind::StructDef : NodeKind::FunctionDef));
}

TEST_CASE("list_calls")
{
    SUBCASE("no calls")
    {
        CHECK(list_calls(parse("a.c", "int x = 1;\nint y;\n")).empty());
    }
    SUBCASE("enclosing call precedes nested call")
    {
        const auto u = parse("a.c", "void h(void) { f(g(x)); }");
        const auto calls = list_calls(u);
        REQUIRE(calls.size() == 2);
        CHECK(calls[0].name == "f");
        CHECK(calls[1].name == "g");
        CHECK(calls[0].node->span.contains(calls[1].node->span));
    }
    SUBCASE("fft_app.c calls four1 exactly once")
    {
        const auto calls = list_calls(parse_file(app("fft_app.c")));
        CHECK(std::count_if(calls.begin(), calls.end(), [](const CallRef& c) { return c.name == "four1"; }) == 1);
    }
    SUBCASE("every CallExpr has one ArgList child")
    {
        for (const auto& f : corpus()) {
            const auto u = parse_file(f);
            for (const auto& c : list_calls(u)) {
                const auto n = std::count_if(c.node->children.begin(), c.node->children.end(),
                                             [](const AstNode& k) { return k.kind == NodeKind::ArgList; });
                CHECK(n == 1);
            }
        }
    }
}

TEST_CASE("list_definitions")
{
    SUBCASE("prototypes only")
    {
        const auto u = parse_file(fixture_dir() / "include" / "fastlib.h");
        CHECK(list_definitions(u).empty());
    }
    SUBCASE("lu_app.c defines ludcmp")
    {
        const auto defs = list_definitions(parse_file(app("lu_app.c")));
        CHECK(std::any_of(defs.begin(), defs.end(), [](const Definition& d) {
            return d.kind == DefinitionKind::FunctionDef && d.name == "ludcmp";
        }));
    }
    SUBCASE("anonymous struct")
    {
        const auto defs = list_definitions(parse("a.c", "struct { int a; double b; } pair;\n"));
        REQUIRE(defs.size() == 1);
        CHECK(defs[0].kind == DefinitionKind::StructDef);
        CHECK(defs[0].name.empty());
    }
    SUBCASE("struct declaration without body is excluded")
    {
        CHECK(list_definitions(parse("a.c", "struct node;\nstruct node *head;\n")).empty());
    }
}

TEST_CASE("unbalanced delimiters are reported with a position")
{
    SUBCASE("unclosed brace")
    {
        try {
            parse("bad.c", "int f(void)\n{\n    if (x) {\n}\n");
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.kind() == ParseError::Kind::UnbalancedDelimiters);
            CHECK(e.line() == 2);
            CHECK(e.column() == 1);
            CHECK(std::string(e.what()).find("bad.c:2:1") != std::string::npos);
        }
    }
    SUBCASE("stray closing paren")
    {
        CHECK_THROWS_AS(parse("bad.c", "int x = 1);\n"), ParseError);
    }
    SUBCASE("mismatched pair")
    {
        CHECK_THROWS_AS(parse("bad.c", "void f(void) { g(1]; }\n"), ParseError);
    }
    SUBCASE("unterminated comment")
    {
        try {
            parse("bad.c", "int x; /* never closed\n");
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.kind() == ParseError::Kind::Lexical);
        }
    }
}

TEST_CASE("unsupported constructs become opaque nodes with exact spans")
{
    const std::string src = "int f(int x)\n{\n    goto out;\n    switch (x) { case 1: x = 2; break; }\n"
                            "out:\n    asm(\"nop\");\n    return x;\n}\nvoid (*handler)(int);\n";
    const auto u = parse("o.c", src);
    std::vector<std::string> opaque;
    walk(u.root, [&](const AstNode& n, const std::vector<const AstNode*>&) {
        if (n.kind == NodeKind::OpaqueStmt) opaque.emplace_back(u.text(n.span));
    });
    CHECK(std::find(opaque.begin(), opaque.end(), "goto out;") != opaque.end());
    CHECK(std::find(opaque.begin(), opaque.end(), "asm(\"nop\");") != opaque.end());
    CHECK(std::find(opaque.begin(), opaque.end(), "void (*handler)(int);") != opaque.end());
    CHECK(std::any_of(opaque.begin(), opaque.end(), [](const std::string& s) { return s.rfind("switch", 0) == 0; }));
}

TEST_CASE("preprocessor lines are opaque top-level nodes")
{
    const auto u = parse("p.c", "#include <stdio.h>\n#define N \\\n  4\nint x;\n");
    REQUIRE(u.root.children.size() == 3);
    CHECK(u.root.children[0].kind == NodeKind::OpaqueStmt);
    CHECK(u.text(u.root.children[0].span) == "#include <stdio.h>");
    CHECK(u.text(u.root.children[1].span) == "#define N \\\n  4");
    CHECK(u.root.children[2].kind == NodeKind::DeclStmt);
}

TEST_CASE("spans are lossless, nested and disjoint on the corpus")
{
    for (const auto& f : corpus()) {
        CAPTURE(f);
        const auto u = parse_file(f);
        CHECK(spans_well_formed(u.root, u.bytes.size()));
        CHECK(u.root.span == Span{0, u.bytes.size()});
        std::string rebuilt;
        std::size_t at = 0;
        for (const auto& c : u.root.children) {
            rebuilt += u.bytes.substr(at, c.span.start - at);
            rebuilt += u.text(c.span);
            at = c.span.end;
        }
        rebuilt += u.bytes.substr(at);
        CHECK(rebuilt == u.bytes);
    }
}

TEST_CASE("comments and whitespace do not change structure")
{
    for (std::uint32_t seed = 1; seed <= 100; ++seed) {
        const blockoff::testing::RandomProgram prog(seed);
        const auto plain = parse("r.c", prog.render({}));
        const auto noisy = parse("r.c", prog.render({"v", true, true}));
        CAPTURE(seed);
        CHECK(blockoff::testing::shape(plain.root) == blockoff::testing::shape(noisy.root));
        CHECK(spans_well_formed(noisy.root, noisy.bytes.size()));
    }
}

TEST_CASE("parsing is deterministic")
{
    const auto text = blockoff::testing::read_file(app("lu_app.c"));
    const auto a = parse("lu_app.c", text);
    const auto b = parse("lu_app.c", text);
    CHECK(blockoff::testing::shape(a.root) == blockoff::testing::shape(b.root));
}

TEST_CASE("line_of is one-based")
{
    const auto u = parse("l.c", "int a;\nint b;\n");
    CHECK(u.line_of(0) == 1);
    CHECK(u.line_of(7) == 2);
}

TEST_CASE("argument typing")
{
    const std::string src =
        "unsigned long g;\n"
        "void f(double *data, float x, int n, size_t m)\n{\n"
        "    long k = 0;\n    int idx[4];\n    double d;\n"
        "    use(data, x, n, m, k, g, idx, &d, data[0], 2.0f, 3, 4UL, (double)n, -x, name_nobody_declared);\n}\n";
    const auto u = parse("t.c", src);
    const auto defs = list_definitions(u);
    REQUIRE(defs.size() == 1);
    const auto scope = DeclaredTypes::for_scope(u, defs[0].node);
    const auto* call = find_call(u, "use");
    REQUIRE(call != nullptr);
    const auto& args = call->child_of_kind(NodeKind::ArgList)->children;
    const std::vector<TypeTag> expected = {
        TypeTag::F64Array, TypeTag::F32, TypeTag::I32, TypeTag::U64, TypeTag::I64, TypeTag::U64,
        TypeTag::I32Array, TypeTag::F64Array, TypeTag::F64, TypeTag::F32, TypeTag::I32, TypeTag::U64,
        TypeTag::F64, TypeTag::F32, TypeTag::Unknown};
    REQUIRE(args.size() == expected.size());
    for (std::size_t i = 0; i < args.size(); ++i) {
        CAPTURE(i);
        CHECK(infer_type(u, args[i], scope) == expected[i]);
    }
}
