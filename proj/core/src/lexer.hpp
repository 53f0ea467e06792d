#pragma once

#include <cstddef>
#include <filesystem>
#include <string_view>
#include <vector>

#include "blockoff/ast.hpp"

namespace blockoff::detail {

enum class Tok { Ident, Number, String, Char, Punct, PpLine, End };

struct Token {
    Tok kind = Tok::End;
    Span span;
    std::string_view text;

    bool is(std::string_view s) const { return (kind == Tok::Punct || kind == Tok::Ident) && text == s; }
};

/// Maps byte offsets to 1-based line/column.
class LineTable {
public:
    explicit LineTable(std::string_view text);
    std::size_t line(std::size_t offset) const;
    std::size_t column(std::size_t offset) const;

private:
    std::vector<std::size_t> starts_;
};

/// Tokenize `text`. Comments and whitespace are dropped; preprocessor lines
/// become single PpLine tokens. The returned vector ends with an End token.
/// Throws ParseError(Lexical) on unterminated comments or literals.
std::vector<Token> tokenize(std::string_view text, const std::filesystem::path& path);

/// Throws ParseError(UnbalancedDelimiters) unless (), [] and {} nest
/// properly across all non-preprocessor tokens. Returns, for every token
/// index holding an opening delimiter, the index of its partner (other
/// entries are 0).
std::vector<std::size_t> match_delimiters(const std::vector<Token>& tokens, std::string_view text,
                                          const std::filesystem::path& path);

}  // namespace blockoff::detail
