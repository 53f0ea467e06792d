#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace blockoff {

/// Half-open byte range [start, end) into a SourceUnit's text.
struct Span {
    std::size_t start = 0;
    std::size_t end = 0;

    std::size_t size() const { return end - start; }
    bool empty() const { return start == end; }
    bool contains(const Span& o) const { return start <= o.start && o.end <= end; }
    bool overlaps(const Span& o) const { return start < o.end && o.start < end; }

    friend bool operator==(const Span&, const Span&) = default;
};

// The order of this list is the characteristic-vector basis. Append only.
enum class NodeKind : std::uint8_t {
    TranslationUnit,
    FunctionDef,
    StructDef,
    Typedef,
    ParamList,
    Param,
    CompoundStmt,
    DeclStmt,
    ExprStmt,
    IfStmt,
    ForStmt,
    WhileStmt,
    DoStmt,
    ReturnStmt,
    OpaqueStmt,
    CallExpr,
    ArgList,
    BinaryExpr,
    UnaryExpr,
    AssignExpr,
    IndexExpr,
    MemberExpr,
    Identifier,
    Literal,
};

inline constexpr std::size_t kNodeKindCount = 24;

std::string_view to_string(NodeKind kind);

/// Syntax tree node. `name` holds the identifier for functions, structs,
/// typedefs, declared variables, members and callees; for operators it holds
/// the operator spelling. `type` is the normalized declared type for Param
/// nodes, declarator Identifiers and casts (e.g. "double*", "unsigned long").
struct AstNode {
    NodeKind kind = NodeKind::OpaqueStmt;
    Span span;
    std::vector<AstNode> children;
    std::string name;
    std::string type;

    const AstNode* child_of_kind(NodeKind k) const;
};

struct SourceUnit {
    std::filesystem::path path;
    std::string bytes;
    AstNode root;

    std::string_view text(const Span& s) const {
        return std::string_view(bytes).substr(s.start, s.size());
    }
    /// 1-based line of a byte offset.
    std::size_t line_of(std::size_t offset) const;
};

enum class DefinitionKind { FunctionDef, StructDef };

struct Definition {
    DefinitionKind kind;
    std::string name;
    const AstNode* node;
};

struct CallRef {
    std::string name;
    const AstNode* node;
};

}  // namespace blockoff
