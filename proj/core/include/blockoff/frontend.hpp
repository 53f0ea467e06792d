#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "blockoff/ast.hpp"
#include "blockoff/types.hpp"

namespace blockoff {

class ParseError : public std::runtime_error {
public:
    enum class Kind { UnbalancedDelimiters, Lexical };

    ParseError(Kind kind, std::filesystem::path path, std::size_t line, std::size_t column,
               const std::string& what);

    Kind kind() const { return kind_; }
    const std::filesystem::path& path() const { return path_; }
    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    Kind kind_;
    std::filesystem::path path_;
    std::size_t line_;
    std::size_t column_;
};

/// Parse un-preprocessed C-like source. Constructs outside the supported
/// subset become OpaqueStmt nodes; comments and whitespace are gap bytes.
/// Throws ParseError on unbalanced delimiters or unterminated tokens.
SourceUnit parse(std::filesystem::path path, std::string text);

/// Read and parse a file from disk.
SourceUnit parse_file(const std::filesystem::path& path);

/// Every CallExpr in document order; an enclosing call precedes the calls
/// nested in its arguments.
std::vector<CallRef> list_calls(const SourceUnit& unit);

/// Function and struct definitions with bodies, in document order.
std::vector<Definition> list_definitions(const SourceUnit& unit);

/// Pre-order walk with the chain of ancestors (outermost first).
void walk(const AstNode& root,
          const std::function<void(const AstNode&, const std::vector<const AstNode*>&)>& visit);

/// Declared types visible inside one function: file-scope declarations
/// overlaid by the function's parameters and local declarations.
class DeclaredTypes {
public:
    static DeclaredTypes for_scope(const SourceUnit& unit, const AstNode* function);

    /// Normalized declared type, or empty when the name is not declared.
    std::string_view lookup(std::string_view name) const;

private:
    std::map<std::string, std::string, std::less<>> types_;
};

/// Lightweight typing of an argument expression: declared types of
/// identifiers, literal suffixes, explicit casts, `&var`, `arr[i]`.
TypeTag infer_type(const SourceUnit& unit, const AstNode& expr, const DeclaredTypes& scope);

}  // namespace blockoff
