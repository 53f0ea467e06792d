#include "blockoff/frontend.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <set>
#include <sstream>

#include "lexer.hpp"

namespace blockoff {

using detail::Tok;
using detail::Token;

ParseError::ParseError(Kind kind, std::filesystem::path path, std::size_t line, std::size_t column,
                       const std::string& what)
    : std::runtime_error(path.string() + ":" + std::to_string(line) + ":" + std::to_string(column) +
                         ": " + what),
      kind_(kind),
      path_(std::move(path)),
      line_(line),
      column_(column)
{
}

namespace {

// Thrown inside the parser to abandon a construct; the caller rewinds and
// records an OpaqueStmt instead.
struct Unsupported {};

constexpr std::array<std::string_view, 12> kTypeKeywords{
    "void", "char", "short", "int", "long", "float", "double", "signed", "unsigned", "_Bool", "bool", "_Complex"};

constexpr std::array<std::string_view, 15> kQualifiers{
    "static",     "extern",   "register", "inline",        "const",     "volatile",  "restrict", "auto",
    "__inline",   "__inline__", "__restrict", "__restrict__", "_Noreturn", "__extension__", "_Thread_local"};

constexpr std::array<std::string_view, 20> kKnownTypedefs{
    "size_t",   "ptrdiff_t", "FILE",     "int8_t",    "int16_t",   "int32_t",  "int64_t",
    "uint8_t",  "uint16_t",  "uint32_t", "uint64_t",  "intptr_t",  "uintptr_t", "ssize_t",
    "off_t",    "time_t",    "clock_t",  "va_list",   "wchar_t",   "bool_t"};

template <std::size_t N>
bool one_of(const std::array<std::string_view, N>& set, std::string_view s)
{
    return std::find(set.begin(), set.end(), s) != set.end();
}

int binary_precedence(std::string_view op)
{
    static constexpr std::array<std::pair<std::string_view, int>, 18> table{{
        {"||", 1}, {"&&", 2}, {"|", 3},  {"^", 4},  {"&", 5},  {"==", 6}, {"!=", 6}, {"<", 7},  {">", 7},
        {"<=", 7}, {">=", 7}, {"<<", 8}, {">>", 8}, {"+", 9},  {"-", 9},  {"*", 10}, {"/", 10}, {"%", 10},
    }};
    for (const auto& [spelling, prec] : table)
        if (spelling == op) return prec;
    return 0;
}

bool is_assignment_op(std::string_view op)
{
    static constexpr std::array<std::string_view, 11> ops{"=", "+=", "-=", "*=", "/=", "%=",
                                                          "&=", "|=", "^=", "<<=", ">>="};
    return one_of(ops, op);
}

struct Declarator {
    std::string name;
    Span name_span{};
    Span span{};
    int pointers = 0;
    int arrays = 0;
    bool function = false;
    std::optional<AstNode> params;
};

struct Specifiers {
    std::vector<std::string> words;
    std::optional<AstNode> struct_def;
    bool is_typedef = false;
    bool any = false;
    Span span{};

    std::string base() const
    {
        std::string out;
        for (const auto& w : words) {
            if (!out.empty()) out += ' ';
            out += w;
        }
        return out;
    }
};

std::string declared_type(const Specifiers& specs, const Declarator& d)
{
    std::string t = specs.base();
    t.append(static_cast<std::size_t>(d.pointers), '*');
    for (int i = 0; i < d.arrays; ++i) t += "[]";
    return t;
}

class Parser {
public:
    Parser(const std::string& text, const std::filesystem::path& path) : text_(text)
    {
        for (auto& t : detail::tokenize(text, path)) {
            if (t.kind == Tok::PpLine)
                pp_.push_back(t);
            else
                toks_.push_back(t);
        }
        partner_ = detail::match_delimiters(toks_, text, path);
    }

    AstNode translation_unit()
    {
        AstNode root{NodeKind::TranslationUnit, {0, text_.size()}, {}, {}, {}};
        while (!at_end()) {
            flush_pp(root.children, cur().span.start);
            root.children.push_back(guarded([this] { return external_declaration(); }));
        }
        flush_pp(root.children, text_.size());
        return root;
    }

private:
    // ---- token helpers -------------------------------------------------

    const Token& cur() const { return toks_[pos_]; }
    const Token& ahead(std::size_t n) const { return toks_[std::min(pos_ + n, toks_.size() - 1)]; }
    bool at_end() const { return cur().kind == Tok::End; }
    bool is(std::string_view s) const { return cur().is(s); }

    const Token& take()
    {
        const Token& t = toks_[pos_];
        if (t.kind != Tok::End) ++pos_;
        return t;
    }

    const Token& expect(std::string_view s)
    {
        if (!is(s)) throw Unsupported{};
        return take();
    }

    bool accept(std::string_view s)
    {
        if (!is(s)) return false;
        ++pos_;
        return true;
    }

    std::size_t prev_end() const { return pos_ == 0 ? 0 : toks_[pos_ - 1].span.end; }

    void flush_pp(std::vector<AstNode>& into, std::size_t before)
    {
        while (next_pp_ < pp_.size() && pp_[next_pp_].span.start < before) {
            const auto& t = pp_[next_pp_++];
            if (!into.empty() && t.span.start < into.back().span.end) continue;
            into.push_back(AstNode{NodeKind::OpaqueStmt, t.span, {}, {}, {}});
        }
    }

    static AstNode node(NodeKind kind, Span span, std::vector<AstNode> children = {}, std::string name = {})
    {
        return AstNode{kind, span, std::move(children), std::move(name), {}};
    }

    // ---- recovery ------------------------------------------------------

    template <typename F>
    AstNode guarded(F&& parse_fn)
    {
        const auto save = pos_;
        const auto save_pp = next_pp_;
        try {
            return parse_fn();
        } catch (const Unsupported&) {
            pos_ = save;
            next_pp_ = save_pp;
            return opaque();
        }
    }

    // Consumes one unsupported statement or declaration: up to the next ';'
    // at this nesting level, or through a trailing brace group.
    AstNode opaque()
    {
        const auto start_tok = pos_;
        const auto start = cur().span.start;
        const bool keeps_going = is("enum") || is("union") || is("struct") || is("typedef");
        while (!at_end()) {
            if (is("}")) break;
            if (is(";")) {
                take();
                break;
            }
            if (is("(") || is("[")) {
                pos_ = partner_[pos_] + 1;
                continue;
            }
            if (is("{")) {
                const bool initializer = pos_ > start_tok && (toks_[pos_ - 1].is("=") || toks_[pos_ - 1].is(","));
                pos_ = partner_[pos_] + 1;
                if (keeps_going || initializer) continue;
                accept(";");
                break;
            }
            take();
        }
        if (pos_ == start_tok) take();
        skip_pp_before(prev_end());
        return node(NodeKind::OpaqueStmt, {start, prev_end()});
    }

    void skip_pp_before(std::size_t offset)
    {
        while (next_pp_ < pp_.size() && pp_[next_pp_].span.start < offset) ++next_pp_;
    }

    // ---- declarations --------------------------------------------------

    bool is_type_name(const Token& t) const
    {
        return t.kind == Tok::Ident && (one_of(kTypeKeywords, t.text) || typedefs_.count(std::string(t.text)) ||
                                        one_of(kKnownTypedefs, t.text));
    }

    bool starts_declaration() const
    {
        const auto& t = cur();
        if (t.kind != Tok::Ident) return false;
        if (one_of(kQualifiers, t.text) || t.text == "struct" || t.text == "union" || t.text == "enum" ||
            t.text == "typedef")
            return true;
        if (is_type_name(t)) return !ahead(1).is("(") || one_of(kTypeKeywords, t.text);
        // `ident ident` or `ident *... ident (=|;|,|[)`
        if (ahead(1).kind == Tok::Ident && !ahead(1).is("sizeof")) return true;
        std::size_t k = 1;
        while (ahead(k).is("*")) ++k;
        if (k > 1 && ahead(k).kind == Tok::Ident) {
            const auto& after = ahead(k + 1);
            return after.is("=") || after.is(";") || after.is(",") || after.is("[");
        }
        return false;
    }

    Specifiers specifiers()
    {
        Specifiers s;
        s.span.start = cur().span.start;
        bool have_type = false;
        while (cur().kind == Tok::Ident) {
            const auto word = cur().text;
            if (word == "typedef") {
                s.is_typedef = true;
                s.any = true;
                take();
            } else if (one_of(kQualifiers, word)) {
                s.any = true;
                take();
            } else if (word == "struct" || word == "union" || word == "enum") {
                const auto kw_start = cur().span.start;
                take();
                std::string tag;
                if (cur().kind == Tok::Ident) tag = std::string(take().text);
                if (is("{")) {
                    if (word != "struct") throw Unsupported{};
                    s.struct_def = struct_body(kw_start, tag);
                }
                s.words.push_back(std::string(word) + (tag.empty() ? "" : " " + tag));
                have_type = true;
                s.any = true;
            } else if (one_of(kTypeKeywords, word)) {
                s.words.emplace_back(word);
                take();
                have_type = true;
                s.any = true;
            } else if (!have_type && (is_type_name(cur()) || ahead(1).kind == Tok::Ident || ahead(1).is("*"))) {
                s.words.emplace_back(word);
                take();
                have_type = true;
                s.any = true;
            } else {
                break;
            }
        }
        if (!s.any) throw Unsupported{};
        s.span.end = prev_end();
        return s;
    }

    AstNode struct_body(std::size_t start, const std::string& tag)
    {
        const auto close = partner_[pos_];
        skip_pp_before(cur().span.start);
        take();
        AstNode def = node(NodeKind::StructDef, {start, 0}, {}, tag);
        while (pos_ < close) {
            flush_pp(def.children, cur().span.start);
            def.children.push_back(guarded([this] { return declaration(false); }));
        }
        flush_pp(def.children, toks_[close].span.start);
        pos_ = close;
        def.span.end = take().span.end;
        return def;
    }

    Declarator declarator(bool allow_abstract)
    {
        Declarator d;
        d.span.start = cur().span.start;
        while (is("*") || (cur().kind == Tok::Ident && one_of(kQualifiers, cur().text))) {
            if (take().text == "*") ++d.pointers;
        }
        if (is("(")) throw Unsupported{};  // function pointer or parenthesized declarator
        if (cur().kind == Tok::Ident && !one_of(kTypeKeywords, cur().text)) {
            d.name_span = cur().span;
            d.name = std::string(take().text);
        } else if (!allow_abstract) {
            throw Unsupported{};
        }
        while (true) {
            if (is("[")) {
                pos_ = partner_[pos_] + 1;
                ++d.arrays;
            } else if (is("(") && !d.function && !d.name.empty()) {
                d.function = true;
                d.params = param_list();
            } else {
                break;
            }
        }
        d.span.end = prev_end();
        return d;
    }

    AstNode param_list()
    {
        const auto open = pos_;
        const auto close = partner_[open];
        AstNode list = node(NodeKind::ParamList, {cur().span.start, toks_[close].span.end});
        take();
        if (pos_ == close || (is("void") && ahead(1).is(")"))) {
            pos_ = close + 1;
            return list;
        }
        while (true) {
            if (is("...")) {
                const auto& t = take();
                AstNode p = node(NodeKind::Param, t.span);
                p.type = "...";
                list.children.push_back(std::move(p));
            } else {
                const auto specs = specifiers();
                const auto d = declarator(true);
                AstNode p = node(NodeKind::Param, {specs.span.start, prev_end()}, {}, d.name);
                p.type = declared_type(specs, d);
                list.children.push_back(std::move(p));
            }
            if (accept(",")) continue;
            if (pos_ != close) throw Unsupported{};
            break;
        }
        pos_ = close + 1;
        return list;
    }

    AstNode initializer()
    {
        if (!is("{")) return assignment();
        const auto close = partner_[pos_];
        AstNode init = node(NodeKind::OpaqueStmt, {cur().span.start, toks_[close].span.end});
        take();
        while (pos_ < close) {
            if (is(".") || is("[")) throw Unsupported{};  // designated initializers
            init.children.push_back(initializer());
            if (!accept(",") && pos_ != close) throw Unsupported{};
        }
        pos_ = close + 1;
        return init;
    }

    // Declaration, struct definition or (at file scope) function definition.
    AstNode declaration(bool file_scope)
    {
        const auto start = cur().span.start;
        auto specs = specifiers();
        if (specs.is_typedef) return typedef_rest(start, std::move(specs));
        if (is(";")) {
            take();
            if (specs.struct_def) {
                AstNode def = std::move(*specs.struct_def);
                def.span = {start, prev_end()};
                return def;
            }
            return node(NodeKind::DeclStmt, {start, prev_end()});
        }

        AstNode decl = node(NodeKind::DeclStmt, {start, 0});
        if (specs.struct_def) decl.children.push_back(std::move(*specs.struct_def));
        bool first = true;
        while (true) {
            auto d = declarator(false);
            if (first && file_scope && d.function && is("{")) {
                if (!decl.children.empty()) throw Unsupported{};
                AstNode fn = node(NodeKind::FunctionDef, {start, 0}, {}, d.name);
                fn.type = specs.base();
                fn.type.append(static_cast<std::size_t>(d.pointers), '*');
                fn.children.push_back(std::move(*d.params));
                fn.children.push_back(compound());
                fn.span.end = prev_end();
                return fn;
            }
            first = false;
            AstNode id = node(NodeKind::Identifier, d.name_span, {}, d.name);
            id.type = d.function ? "()" : declared_type(specs, d);
            decl.children.push_back(std::move(id));
            if (accept("=")) decl.children.push_back(initializer());
            if (accept(",")) continue;
            expect(";");
            break;
        }
        decl.span.end = prev_end();
        return decl;
    }

    AstNode typedef_rest(std::size_t start, Specifiers specs)
    {
        AstNode td = node(NodeKind::Typedef, {start, 0});
        if (specs.struct_def) td.children.push_back(std::move(*specs.struct_def));
        while (true) {
            auto d = declarator(false);
            if (td.name.empty()) td.name = d.name;
            typedefs_.insert(d.name);
            AstNode id = node(NodeKind::Identifier, d.name_span, {}, d.name);
            id.type = declared_type(specs, d);
            td.children.push_back(std::move(id));
            if (accept(",")) continue;
            expect(";");
            break;
        }
        td.span.end = prev_end();
        return td;
    }

    AstNode external_declaration()
    {
        if (is(";")) {
            const auto& t = take();
            return node(NodeKind::OpaqueStmt, t.span);
        }
        return declaration(true);
    }

    // ---- statements ----------------------------------------------------

    AstNode compound()
    {
        if (!is("{")) throw Unsupported{};
        const auto close = partner_[pos_];
        AstNode block = node(NodeKind::CompoundStmt, {cur().span.start, toks_[close].span.end});
        skip_pp_before(cur().span.start);
        take();
        while (pos_ < close) {
            flush_pp(block.children, cur().span.start);
            block.children.push_back(guarded([this] { return statement(); }));
        }
        flush_pp(block.children, toks_[close].span.start);
        pos_ = close + 1;
        return block;
    }

    AstNode paren_expr()
    {
        expect("(");
        auto e = expression();
        expect(")");
        return e;
    }

    AstNode statement()
    {
        const auto start = cur().span.start;
        const auto& t = cur();
        if (t.is("{")) return compound();
        if (t.is(";")) {
            take();
            return node(NodeKind::ExprStmt, {start, prev_end()});
        }
        if (t.kind == Tok::Ident) {
            if (t.text == "if") {
                take();
                AstNode s = node(NodeKind::IfStmt, {start, 0});
                s.children.push_back(paren_expr());
                s.children.push_back(statement());
                if (accept("else")) s.children.push_back(statement());
                s.span.end = prev_end();
                return s;
            }
            if (t.text == "while") {
                take();
                AstNode s = node(NodeKind::WhileStmt, {start, 0});
                s.children.push_back(paren_expr());
                s.children.push_back(statement());
                s.span.end = prev_end();
                return s;
            }
            if (t.text == "do") {
                take();
                AstNode s = node(NodeKind::DoStmt, {start, 0});
                s.children.push_back(statement());
                expect("while");
                s.children.push_back(paren_expr());
                expect(";");
                s.span.end = prev_end();
                return s;
            }
            if (t.text == "for") return for_statement();
            if (t.text == "return") {
                take();
                AstNode s = node(NodeKind::ReturnStmt, {start, 0});
                if (!is(";")) s.children.push_back(expression());
                expect(";");
                s.span.end = prev_end();
                return s;
            }
            if (t.text == "switch") {
                take();
                AstNode s = node(NodeKind::OpaqueStmt, {start, 0}, {}, "switch");
                s.children.push_back(paren_expr());
                s.children.push_back(statement());
                s.span.end = prev_end();
                return s;
            }
            if (t.text == "case" || t.text == "default") {
                while (!at_end() && !is(":")) {
                    if (is("(") || is("[")) pos_ = partner_[pos_];
                    take();
                }
                expect(":");
                return node(NodeKind::OpaqueStmt, {start, prev_end()}, {}, std::string(t.text));
            }
            if (ahead(1).is(":") && !one_of(kTypeKeywords, t.text)) {
                take();
                take();
                return node(NodeKind::OpaqueStmt, {start, prev_end()}, {}, "label");
            }
            if (t.text == "break" || t.text == "continue" || t.text == "goto" || t.text == "asm" ||
                t.text == "__asm__")
                throw Unsupported{};
            if (starts_declaration()) return declaration(false);
        }
        AstNode s = node(NodeKind::ExprStmt, {start, 0});
        s.children.push_back(expression());
        expect(";");
        s.span.end = prev_end();
        return s;
    }

    AstNode for_statement()
    {
        const auto start = take().span.start;
        AstNode s = node(NodeKind::ForStmt, {start, 0});
        const auto close = partner_[pos_];
        expect("(");
        if (starts_declaration()) {
            s.children.push_back(declaration(false));
        } else {
            if (!is(";")) s.children.push_back(expression());
            expect(";");
        }
        if (!is(";")) s.children.push_back(expression());
        expect(";");
        if (pos_ != close) s.children.push_back(expression());
        if (pos_ != close) throw Unsupported{};
        take();
        s.children.push_back(statement());
        s.span.end = prev_end();
        return s;
    }

    // ---- expressions ---------------------------------------------------

    AstNode expression()
    {
        auto lhs = assignment();
        while (is(",")) {
            take();
            auto rhs = assignment();
            Span span{lhs.span.start, rhs.span.end};
            std::vector<AstNode> kids;
            kids.push_back(std::move(lhs));
            kids.push_back(std::move(rhs));
            lhs = node(NodeKind::BinaryExpr, span, std::move(kids), ",");
        }
        return lhs;
    }

    AstNode assignment()
    {
        auto lhs = conditional();
        if (cur().kind == Tok::Punct && is_assignment_op(cur().text)) {
            const std::string op(take().text);
            auto rhs = assignment();
            Span span{lhs.span.start, rhs.span.end};
            std::vector<AstNode> kids;
            kids.push_back(std::move(lhs));
            kids.push_back(std::move(rhs));
            return node(NodeKind::AssignExpr, span, std::move(kids), op);
        }
        return lhs;
    }

    AstNode conditional()
    {
        auto c = binary(1);
        if (!is("?")) return c;
        take();
        auto then_e = expression();
        expect(":");
        auto else_e = conditional();
        Span span{c.span.start, else_e.span.end};
        std::vector<AstNode> kids;
        kids.push_back(std::move(c));
        kids.push_back(std::move(then_e));
        kids.push_back(std::move(else_e));
        return node(NodeKind::BinaryExpr, span, std::move(kids), "?:");
    }

    AstNode binary(int min_prec)
    {
        auto lhs = unary();
        while (cur().kind == Tok::Punct) {
            const int prec = binary_precedence(cur().text);
            if (prec == 0 || prec < min_prec) break;
            const std::string op(take().text);
            auto rhs = binary(prec + 1);
            Span span{lhs.span.start, rhs.span.end};
            std::vector<AstNode> kids;
            kids.push_back(std::move(lhs));
            kids.push_back(std::move(rhs));
            lhs = node(NodeKind::BinaryExpr, span, std::move(kids), op);
        }
        return lhs;
    }

    bool paren_starts_type() const
    {
        if (!is("(")) return false;
        const auto& t = ahead(1);
        if (t.kind != Tok::Ident) return false;
        return is_type_name(t) || t.text == "struct" || t.text == "union" || t.text == "enum" ||
               t.text == "const" || t.text == "volatile";
    }

    // Parses `( type-name )` and returns the normalized type.
    std::string type_name_in_parens()
    {
        const auto close = partner_[pos_];
        take();
        auto specs = specifiers();
        auto d = declarator(true);
        if (!d.name.empty() || pos_ != close) throw Unsupported{};
        take();
        return declared_type(specs, d);
    }

    AstNode unary()
    {
        const auto start = cur().span.start;
        if (cur().kind == Tok::Punct) {
            const auto op = cur().text;
            if (op == "++" || op == "--" || op == "+" || op == "-" || op == "!" || op == "~" || op == "*" ||
                op == "&") {
                take();
                auto operand = unary();
                Span span{start, operand.span.end};
                std::vector<AstNode> kids;
                kids.push_back(std::move(operand));
                return node(NodeKind::UnaryExpr, span, std::move(kids), std::string(op));
            }
            if (paren_starts_type()) {
                auto type = type_name_in_parens();
                if (is("{")) {
                    auto init = initializer();
                    init.span.start = start;
                    return postfix(std::move(init));
                }
                auto operand = unary();
                Span span{start, operand.span.end};
                std::vector<AstNode> kids;
                kids.push_back(std::move(operand));
                AstNode cast = node(NodeKind::UnaryExpr, span, std::move(kids), "cast");
                cast.type = std::move(type);
                return cast;
            }
        }
        if (is("sizeof") || is("_Alignof") || is("alignof")) {
            const std::string op(take().text);
            if (paren_starts_type()) {
                auto type = type_name_in_parens();
                AstNode s = node(NodeKind::UnaryExpr, {start, prev_end()}, {}, op);
                s.type = std::move(type);
                return s;
            }
            auto operand = unary();
            Span span{start, operand.span.end};
            std::vector<AstNode> kids;
            kids.push_back(std::move(operand));
            return node(NodeKind::UnaryExpr, span, std::move(kids), op);
        }
        return postfix(primary());
    }

    AstNode arg_list()
    {
        const auto close = partner_[pos_];
        AstNode args = node(NodeKind::ArgList, {cur().span.start, toks_[close].span.end});
        take();
        while (pos_ < close) {
            args.children.push_back(assignment());
            if (!accept(",") && pos_ != close) throw Unsupported{};
        }
        pos_ = close + 1;
        return args;
    }

    AstNode postfix(AstNode base)
    {
        while (true) {
            if (is("(")) {
                auto args = arg_list();
                Span span{base.span.start, args.span.end};
                AstNode call = node(NodeKind::CallExpr, span);
                if (base.kind == NodeKind::Identifier) {
                    call.name = base.name;
                } else {
                    call.children.push_back(std::move(base));
                }
                call.children.push_back(std::move(args));
                base = std::move(call);
            } else if (is("[")) {
                const auto close = partner_[pos_];
                take();
                auto index = expression();
                if (pos_ != close) throw Unsupported{};
                take();
                Span span{base.span.start, prev_end()};
                std::vector<AstNode> kids;
                kids.push_back(std::move(base));
                kids.push_back(std::move(index));
                base = node(NodeKind::IndexExpr, span, std::move(kids));
            } else if (is(".") || is("->")) {
                take();
                if (cur().kind != Tok::Ident) throw Unsupported{};
                const std::string member(take().text);
                Span span{base.span.start, prev_end()};
                std::vector<AstNode> kids;
                kids.push_back(std::move(base));
                base = node(NodeKind::MemberExpr, span, std::move(kids), member);
            } else if (is("++") || is("--")) {
                const std::string op = "post" + std::string(take().text);
                Span span{base.span.start, prev_end()};
                std::vector<AstNode> kids;
                kids.push_back(std::move(base));
                base = node(NodeKind::UnaryExpr, span, std::move(kids), op);
            } else {
                return base;
            }
        }
    }

    AstNode primary()
    {
        const auto& t = cur();
        switch (t.kind) {
        case Tok::Ident:
            if (one_of(kTypeKeywords, t.text) || t.text == "struct" || t.text == "union" || t.text == "enum")
                throw Unsupported{};
            take();
            return node(NodeKind::Identifier, t.span, {}, std::string(t.text));
        case Tok::Number:
        case Tok::Char:
            take();
            return node(NodeKind::Literal, t.span);
        case Tok::String: {
            const auto start = take().span.start;
            while (cur().kind == Tok::String) take();
            return node(NodeKind::Literal, {start, prev_end()});
        }
        case Tok::Punct:
            if (t.is("(")) {
                const auto start = t.span.start;
                const auto close = partner_[pos_];
                take();
                if (is("{")) throw Unsupported{};  // statement expression
                auto inner = expression();
                if (pos_ != close) throw Unsupported{};
                take();
                inner.span = {start, prev_end()};
                return inner;
            }
            throw Unsupported{};
        default:
            throw Unsupported{};
        }
    }

    const std::string& text_;
    std::vector<Token> toks_;
    std::vector<Token> pp_;
    std::vector<std::size_t> partner_;
    std::size_t pos_ = 0;
    std::size_t next_pp_ = 0;
    std::set<std::string> typedefs_;
};

void walk_impl(const AstNode& n, std::vector<const AstNode*>& ancestors,
               const std::function<void(const AstNode&, const std::vector<const AstNode*>&)>& visit)
{
    visit(n, ancestors);
    ancestors.push_back(&n);
    for (const auto& c : n.children) walk_impl(c, ancestors, visit);
    ancestors.pop_back();
}

TypeTag literal_tag(std::string_view text)
{
    if (text.empty()) return TypeTag::Unknown;
    if (text.front() == '\'') return TypeTag::I32;
    if (text.front() == '"' || !(std::isdigit(static_cast<unsigned char>(text.front())) || text.front() == '.'))
        return TypeTag::Unknown;
    const bool hex = text.size() > 1 && text[0] == '0' && (text[1] == 'x' || text[1] == 'X');
    bool floating = text.find('.') != std::string_view::npos;
    if (!hex && text.find_first_of("eE") != std::string_view::npos) floating = true;
    if (hex && text.find_first_of("pP") != std::string_view::npos) floating = true;
    std::size_t suffix_start = text.size();
    while (suffix_start > 0 && std::string_view("fFlLuU").find(text[suffix_start - 1]) != std::string_view::npos &&
           !(hex && !floating && (text[suffix_start - 1] == 'f' || text[suffix_start - 1] == 'F')))
        --suffix_start;
    const auto suffix = text.substr(suffix_start);
    if (floating) {
        if (suffix.find_first_of("fF") != std::string_view::npos) return TypeTag::F32;
        if (suffix.find_first_of("lL") != std::string_view::npos) return TypeTag::Unknown;
        return TypeTag::F64;
    }
    const bool is_unsigned = suffix.find_first_of("uU") != std::string_view::npos;
    const bool is_long = suffix.find_first_of("lL") != std::string_view::npos;
    if (is_long) return is_unsigned ? TypeTag::U64 : TypeTag::I64;
    return is_unsigned ? TypeTag::U32 : TypeTag::I32;
}

}  // namespace

std::string_view to_string(NodeKind kind)
{
    static constexpr std::array<std::string_view, kNodeKindCount> names{
        "TranslationUnit", "FunctionDef", "StructDef", "Typedef",   "ParamList",  "Param",
        "CompoundStmt",    "DeclStmt",    "ExprStmt",  "IfStmt",    "ForStmt",    "WhileStmt",
        "DoStmt",          "ReturnStmt",  "OpaqueStmt", "CallExpr", "ArgList",    "BinaryExpr",
        "UnaryExpr",       "AssignExpr",  "IndexExpr", "MemberExpr", "Identifier", "Literal"};
    return names[static_cast<std::size_t>(kind)];
}

const AstNode* AstNode::child_of_kind(NodeKind k) const
{
    for (const auto& c : children)
        if (c.kind == k) return &c;
    return nullptr;
}

std::size_t SourceUnit::line_of(std::size_t offset) const
{
    return static_cast<std::size_t>(std::count(bytes.begin(), bytes.begin() + static_cast<std::ptrdiff_t>(
                                                                                  std::min(offset, bytes.size())),
                                               '\n')) +
           1;
}

SourceUnit parse(std::filesystem::path path, std::string text)
{
    SourceUnit unit{std::move(path), std::move(text), {}};
    unit.root = Parser(unit.bytes, unit.path).translation_unit();
    return unit;
}

SourceUnit parse_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(path, ss.str());
}

void walk(const AstNode& root,
          const std::function<void(const AstNode&, const std::vector<const AstNode*>&)>& visit)
{
    std::vector<const AstNode*> ancestors;
    walk_impl(root, ancestors, visit);
}

std::vector<CallRef> list_calls(const SourceUnit& unit)
{
    std::vector<CallRef> calls;
    walk(unit.root, [&](const AstNode& n, const auto&) {
        if (n.kind == NodeKind::CallExpr) calls.push_back({n.name, &n});
    });
    return calls;
}

std::vector<Definition> list_definitions(const SourceUnit& unit)
{
    std::vector<Definition> defs;
    walk(unit.root, [&](const AstNode& n, const auto&) {
        if (n.kind == NodeKind::FunctionDef) defs.push_back({DefinitionKind::FunctionDef, n.name, &n});
        if (n.kind == NodeKind::StructDef) defs.push_back({DefinitionKind::StructDef, n.name, &n});
    });
    return defs;
}

DeclaredTypes DeclaredTypes::for_scope(const SourceUnit& unit, const AstNode* function)
{
    DeclaredTypes scope;
    auto record_decl = [&](const AstNode& decl) {
        for (const auto& c : decl.children)
            if (c.kind == NodeKind::Identifier && !c.type.empty()) scope.types_[c.name] = c.type;
    };
    for (const auto& top : unit.root.children)
        if (top.kind == NodeKind::DeclStmt) record_decl(top);
    if (function != nullptr) {
        if (const auto* params = function->child_of_kind(NodeKind::ParamList))
            for (const auto& p : params->children)
                if (!p.name.empty()) scope.types_[p.name] = p.type;
        walk(*function, [&](const AstNode& n, const auto&) {
            if (n.kind == NodeKind::DeclStmt) record_decl(n);
        });
    }
    return scope;
}

std::string_view DeclaredTypes::lookup(std::string_view name) const
{
    const auto it = types_.find(name);
    return it == types_.end() ? std::string_view{} : std::string_view(it->second);
}

TypeTag infer_type(const SourceUnit& unit, const AstNode& expr, const DeclaredTypes& scope)
{
    switch (expr.kind) {
    case NodeKind::Identifier: {
        const auto declared = scope.lookup(expr.name);
        return declared.empty() ? TypeTag::Unknown : tag_from_c_type(declared);
    }
    case NodeKind::Literal:
        return literal_tag(unit.text(expr.span));
    case NodeKind::IndexExpr:
        return element_of(infer_type(unit, expr.children.front(), scope));
    case NodeKind::UnaryExpr: {
        if (expr.name == "cast") return tag_from_c_type(expr.type);
        if (expr.children.empty()) return TypeTag::Unknown;
        const auto inner = infer_type(unit, expr.children.front(), scope);
        if (expr.name == "-" || expr.name == "+") return is_numeric_scalar(inner) ? inner : TypeTag::Unknown;
        if (expr.name == "&") return array_of(inner);
        if (expr.name == "*") return element_of(inner);
        return TypeTag::Unknown;
    }
    default:
        return TypeTag::Unknown;
    }
}

}  // namespace blockoff
