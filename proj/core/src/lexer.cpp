#include "lexer.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <string>

#include "blockoff/frontend.hpp"

namespace blockoff::detail {

namespace {

constexpr std::array<std::string_view, 24> kPunctuators{
    ">>=", "<<=", "...", "->", "++", "--", "<<", ">>", "<=", ">=", "==", "!=",
    "&&",  "||",  "+=",  "-=", "*=", "/=", "%=", "&=", "|=", "^=", "##", "::"};

bool ident_start(unsigned char c)
{
    return std::isalpha(c) || c == '_' || c >= 0x80;
}

bool ident_char(unsigned char c)
{
    return std::isalnum(c) || c == '_' || c >= 0x80;
}

class Lexer {
public:
    Lexer(std::string_view text, const std::filesystem::path& path)
        : text_(text), path_(path), lines_(text) {}

    std::vector<Token> run()
    {
        std::vector<Token> out;
        bool line_start = true;
        while (pos_ < text_.size()) {
            const char c = text_[pos_];
            if (c == '\n') {
                line_start = true;
                ++pos_;
                continue;
            }
            if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos_;
                continue;
            }
            if (c == '/' && peek(1) == '/') {
                skip_line_comment();
                continue;
            }
            if (c == '/' && peek(1) == '*') {
                skip_block_comment();
                continue;
            }
            if (c == '#' && line_start) {
                out.push_back(pp_line());
                continue;
            }
            line_start = false;
            out.push_back(next_token());
        }
        out.push_back(Token{Tok::End, {text_.size(), text_.size()}, {}});
        return out;
    }

private:
    char peek(std::size_t ahead) const
    {
        return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
    }

    [[noreturn]] void fail(std::size_t offset, const std::string& msg) const
    {
        throw ParseError(ParseError::Kind::Lexical, path_, lines_.line(offset),
                         lines_.column(offset), msg);
    }

    void skip_line_comment()
    {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
    }

    void skip_block_comment()
    {
        const auto end = text_.find("*/", pos_ + 2);
        if (end == std::string_view::npos) fail(pos_, "unterminated block comment");
        pos_ = end + 2;
    }

    Token make(Tok kind, std::size_t start)
    {
        return Token{kind, {start, pos_}, text_.substr(start, pos_ - start)};
    }

    // Runs to end of line, following backslash continuations and block
    // comments that start on the directive line.
    Token pp_line()
    {
        const auto start = pos_;
        while (pos_ < text_.size()) {
            const char c = text_[pos_];
            if (c == '\\' && peek(1) == '\n') {
                pos_ += 2;
            } else if (c == '\\' && peek(1) == '\r' && peek(2) == '\n') {
                pos_ += 3;
            } else if (c == '/' && peek(1) == '*') {
                skip_block_comment();
            } else if (c == '/' && peek(1) == '/') {
                skip_line_comment();
            } else if (c == '\n') {
                break;
            } else {
                ++pos_;
            }
        }
        auto end = pos_;
        while (end > start && (text_[end - 1] == '\r' || text_[end - 1] == ' ' || text_[end - 1] == '\t'))
            --end;
        return Token{Tok::PpLine, {start, end}, text_.substr(start, end - start)};
    }

    void quoted(char quote)
    {
        const auto start = pos_;
        ++pos_;
        while (true) {
            if (pos_ >= text_.size() || text_[pos_] == '\n')
                fail(start, quote == '"' ? "unterminated string literal" : "unterminated character literal");
            if (text_[pos_] == '\\') {
                pos_ += 2;
                continue;
            }
            if (text_[pos_] == quote) {
                ++pos_;
                return;
            }
            ++pos_;
        }
    }

    Token next_token()
    {
        const auto start = pos_;
        const auto c = static_cast<unsigned char>(text_[pos_]);

        if (c == '"' || c == '\'') {
            quoted(static_cast<char>(c));
            return make(c == '"' ? Tok::String : Tok::Char, start);
        }
        if (ident_start(c)) {
            while (pos_ < text_.size() && ident_char(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            const auto word = text_.substr(start, pos_ - start);
            // encoding prefixes: L"", u8"", u'', U''
            if (pos_ < text_.size() && (text_[pos_] == '"' || text_[pos_] == '\'') &&
                (word == "L" || word == "u" || word == "U" || word == "u8")) {
                const char q = text_[pos_];
                quoted(q);
                return make(q == '"' ? Tok::String : Tok::Char, start);
            }
            return make(Tok::Ident, start);
        }
        if (std::isdigit(c) || (c == '.' && std::isdigit(static_cast<unsigned char>(peek(1))))) {
            ++pos_;
            while (pos_ < text_.size()) {
                const char d = text_[pos_];
                if ((d == '+' || d == '-') &&
                    (text_[pos_ - 1] == 'e' || text_[pos_ - 1] == 'E' || text_[pos_ - 1] == 'p' ||
                     text_[pos_ - 1] == 'P')) {
                    ++pos_;
                } else if (std::isalnum(static_cast<unsigned char>(d)) || d == '.' || d == '_') {
                    ++pos_;
                } else {
                    break;
                }
            }
            return make(Tok::Number, start);
        }
        for (auto p : kPunctuators) {
            if (text_.substr(pos_, p.size()) == p) {
                pos_ += p.size();
                return make(Tok::Punct, start);
            }
        }
        ++pos_;
        return make(Tok::Punct, start);
    }

    std::string_view text_;
    const std::filesystem::path& path_;
    LineTable lines_;
    std::size_t pos_ = 0;
};

}  // namespace

LineTable::LineTable(std::string_view text)
{
    starts_.push_back(0);
    for (std::size_t i = 0; i < text.size(); ++i)
        if (text[i] == '\n') starts_.push_back(i + 1);
}

std::size_t LineTable::line(std::size_t offset) const
{
    return static_cast<std::size_t>(std::upper_bound(starts_.begin(), starts_.end(), offset) - starts_.begin());
}

std::size_t LineTable::column(std::size_t offset) const
{
    return offset - starts_[line(offset) - 1] + 1;
}

std::vector<Token> tokenize(std::string_view text, const std::filesystem::path& path)
{
    return Lexer(text, path).run();
}

std::vector<std::size_t> match_delimiters(const std::vector<Token>& tokens, std::string_view text,
                                          const std::filesystem::path& path)
{
    std::vector<std::size_t> partner(tokens.size(), 0);
    std::vector<std::size_t> stack;
    const LineTable lines(text);
    auto fail = [&](const Token& t, const std::string& msg) {
        throw ParseError(ParseError::Kind::UnbalancedDelimiters, path, lines.line(t.span.start),
                         lines.column(t.span.start), msg);
    };
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const auto& t = tokens[i];
        if (t.kind != Tok::Punct) continue;
        if (t.text == "(" || t.text == "[" || t.text == "{") {
            stack.push_back(i);
        } else if (t.text == ")" || t.text == "]" || t.text == "}") {
            if (stack.empty()) fail(t, "unmatched '" + std::string(t.text) + "'");
            const auto open = stack.back();
            const char want = tokens[open].text == "(" ? ')' : tokens[open].text == "[" ? ']' : '}';
            if (t.text[0] != want)
                fail(t, "'" + std::string(t.text) + "' does not close '" + std::string(tokens[open].text) +
                            "' opened at line " + std::to_string(lines.line(tokens[open].span.start)));
            partner[open] = i;
            stack.pop_back();
        }
    }
    if (!stack.empty()) fail(tokens[stack.back()], "unclosed '" + std::string(tokens[stack.back()].text) + "'");
    return partner;
}

}  // namespace blockoff::detail
