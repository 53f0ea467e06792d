#include "random_program.hpp"

#include <algorithm>

namespace blockoff::testing {

namespace {

class Generator {
public:
    Generator(std::uint32_t seed, const Rendering& how) : rng_(seed), how_(how) {}

    std::string run()
    {
        const int tag = fresh();
        const int member_d = fresh();
        const int member_i = fresh();
        const int alias = fresh();
        member_d_ = member_d;
        member_i_ = member_i;
        tag_ = tag;
        alias_ = alias;

        out_ += "#include <stdio.h>\n";
        out_ += "struct " + name(tag) + " {" + sp() + "double " + name(member_d) + ";" + sp() + "int " +
                name(member_i) + ";" + sp() + "};\n";
        comment("type alias");
        out_ += "typedef double " + name(alias) + ";\n\n";

        const int functions = pick(1, 4);
        for (int f = 0; f < functions; ++f) function();
        return out_;
    }

private:
    std::mt19937 rng_;
    Rendering how_;
    std::string out_;
    int next_id_ = 0;
    int tag_ = 0, member_d_ = 0, member_i_ = 0, alias_ = 0;
    std::vector<int> functions_;

    // Current scope.
    int array_ = 0, count_ = 0, real_ = 0, index_ = 0, record_ = 0;

    int fresh() { return next_id_++; }
    int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    bool coin() { return pick(0, 1) == 1; }

    std::string name(int id) const { return how_.prefix + std::to_string(id); }
    std::string sp() const { return how_.extra_spaces ? "   " : " "; }

    void comment(const std::string& text)
    {
        if (how_.comments) out_ += "/* " + text + " */\n";
    }

    static std::string indent(int depth) { return std::string(static_cast<std::size_t>(4 * depth), ' '); }

    std::string scalar()
    {
        switch (pick(0, 4)) {
        case 0: return name(real_);
        case 1: return name(index_);
        case 2: return name(count_);
        case 3: return name(record_) + "." + name(member_d_);
        default: return name(array_) + "[" + name(index_) + "]";
        }
    }

    std::string literal()
    {
        if (coin()) return std::to_string(pick(0, 99));
        return std::to_string(pick(0, 9)) + "." + std::to_string(pick(0, 9));
    }

    std::string expr(int depth)
    {
        if (depth <= 0) return coin() ? scalar() : literal();
        static const char* ops[] = {"+", "-", "*", "/", "<", ">", "==", "&&"};
        switch (pick(0, 5)) {
        case 0:
        case 1: return expr(depth - 1) + sp() + ops[pick(0, 7)] + sp() + expr(depth - 1);
        case 2: return "-" + expr(depth - 1);
        case 3: return "(" + expr(depth - 1) + ")";
        case 4:
            if (!functions_.empty()) {
                const int callee = functions_[static_cast<std::size_t>(pick(0, static_cast<int>(functions_.size()) - 1))];
                return name(callee) + "(" + name(array_) + "," + sp() + name(count_) + ")";
            }
            return scalar();
        default: return scalar();
        }
    }

    void statement(int depth, int nesting)
    {
        const auto pad = indent(depth);
        const int choice = nesting > 2 ? pick(0, 2) : pick(0, 7);
        switch (choice) {
        case 0:
            out_ += pad + name(real_) + sp() + "=" + sp() + expr(2) + ";\n";
            break;
        case 1:
            out_ += pad + name(array_) + "[" + name(index_) + "]" + sp() + "+=" + sp() + expr(1) + ";\n";
            break;
        case 2:
            out_ += pad + name(record_) + "." + name(member_i_) + "++;\n";
            break;
        case 3:
            out_ += pad + "if" + sp() + "(" + expr(1) + ") {\n";
            block(depth + 1, nesting + 1);
            if (coin()) {
                out_ += pad + "} else {\n";
                block(depth + 1, nesting + 1);
            }
            out_ += pad + "}\n";
            break;
        case 4:
            out_ += pad + "for (" + name(index_) + " = 0; " + name(index_) + " < " + name(count_) + "; " +
                    name(index_) + "++) {\n";
            block(depth + 1, nesting + 1);
            out_ += pad + "}\n";
            break;
        case 5:
            out_ += pad + "while" + sp() + "(" + expr(1) + ") {\n";
            block(depth + 1, nesting + 1);
            out_ += pad + "}\n";
            break;
        case 6:
            out_ += pad + "do {\n";
            block(depth + 1, nesting + 1);
            out_ += pad + "} while (" + expr(1) + ");\n";
            break;
        default:
            if (!functions_.empty()) {
                const int callee = functions_.back();
                out_ += pad + name(callee) + "(" + name(array_) + ", " + expr(1) + ");\n";
            } else {
                out_ += pad + name(real_) + " = " + literal() + ";\n";
            }
            break;
        }
        const bool note = coin();
        if (how_.comments && note) out_ += pad + "// step\n";
    }

    void block(int depth, int nesting)
    {
        const int n = pick(1, 3);
        for (int i = 0; i < n; ++i) statement(depth, nesting);
    }

    void function()
    {
        const int fn = fresh();
        array_ = fresh();
        count_ = fresh();
        real_ = fresh();
        index_ = fresh();
        record_ = fresh();
        comment("function");
        out_ += "double " + name(fn) + "(double *" + name(array_) + "," + sp() + "int " + name(count_) + ")\n{\n";
        out_ += "    " + name(alias_) + " " + name(real_) + " = 0.0;\n";
        out_ += "    int " + name(index_) + " = 0;\n";
        out_ += "    struct " + name(tag_) + " " + name(record_) + ";\n";
        block(1, 0);
        out_ += "    return " + name(real_) + ";\n}\n\n";
        functions_.push_back(fn);
    }
};

}  // namespace

std::string RandomProgram::render(const Rendering& how) const
{
    return Generator(seed_, how).run();
}

}  // namespace blockoff::testing
