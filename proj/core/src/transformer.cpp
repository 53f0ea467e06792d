#include "blockoff/transformer.hpp"

#include <algorithm>
#include <fstream>
#include <regex>
#include <set>

namespace blockoff {

namespace fs = std::filesystem;

UnboundPlaceholder::UnboundPlaceholder(std::optional<std::size_t> index)
    : std::runtime_error(index ? "snippet placeholder {{arg" + std::to_string(*index) + "}} is not bound"
                               : std::string("snippet placeholder {{ret}} is not bound")),
      index_(index)
{
}

OverlapError::OverlapError(std::size_t first, std::size_t second)
    : std::runtime_error("candidates " + std::to_string(first) + " and " + std::to_string(second) +
                         " rewrite overlapping code"),
      first_(first),
      second_(second)
{
}

void SpliceSet::add(Edit e)
{
    for (const auto& x : edits_) {
        const bool clash = x.span.overlaps(e.span) || (e.span.empty() && x.span.start < e.span.start &&
                                                       e.span.start < x.span.end) ||
                           (x.span.empty() && e.span.start < x.span.start && x.span.start < e.span.end) ||
                           (x.span.empty() && e.span.empty() && x.span.start == e.span.start);
        if (clash) throw std::invalid_argument("overlapping edits");
    }
    const auto pos = std::upper_bound(edits_.begin(), edits_.end(), e, [](const Edit& a, const Edit& b) {
        return std::tie(a.span.start, a.span.end) < std::tie(b.span.start, b.span.end);
    });
    edits_.insert(pos, std::move(e));
}

std::string SpliceSet::apply_to(const std::string& text) const
{
    std::string out = text;
    for (auto it = edits_.rbegin(); it != edits_.rend(); ++it)
        out.replace(it->span.start, it->span.size(), it->text);
    return out;
}

std::string render_snippet(const PatternRecord& record, const InterfaceBinding& binding,
                           const std::vector<std::string>& args, const std::optional<std::string>& ret_target)
{
    static const std::regex placeholder(R"(\{\{(arg([0-9]+)|ret)\}\})");
    const std::string& snippet = record.replacement.snippet;
    std::string out;
    std::size_t last = 0;
    for (auto it = std::sregex_iterator(snippet.begin(), snippet.end(), placeholder); it != std::sregex_iterator();
         ++it) {
        const auto& m = *it;
        out.append(snippet, last, static_cast<std::size_t>(m.position()) - last);
        last = static_cast<std::size_t>(m.position() + m.length());
        if (m[1] == "ret") {
            if (!ret_target) throw UnboundPlaceholder(std::nullopt);
            out += *ret_target;
            continue;
        }
        const std::size_t k = std::stoul(m[2].str());
        if (k >= binding.arg_map.size()) throw UnboundPlaceholder(k);
        const auto& entry = binding.arg_map[k];
        std::string expr;
        switch (entry.source) {
        case ArgBinding::Source::Argument:
            if (k >= args.size()) throw UnboundPlaceholder(k);
            expr = args[k];
            break;
        case ArgBinding::Source::DefaultedOptional:
        case ArgBinding::Source::Missing:
            if (k >= record.interface.params.size() || !record.interface.params[k].default_value)
                throw UnboundPlaceholder(k);
            expr = *record.interface.params[k].default_value;
            break;
        case ArgBinding::Source::DroppedOptional:
            throw UnboundPlaceholder(k);
        }
        if (entry.cast) expr = "(" + std::string(c_spelling(entry.cast->to)) + ")(" + expr + ")";
        out += expr;
    }
    out.append(snippet, last, std::string::npos);
    return out;
}

std::string removal_marker(const std::string& record_id)
{
    return "/* blockoff: removed " + record_id + " */";
}

namespace {

struct IncludeLine {
    Span span;
    std::string header;
};

std::vector<IncludeLine> include_lines(const SourceUnit& unit)
{
    static const std::regex directive(R"(^#\s*include\s*[<"]([^>"]+)[>"])");
    std::vector<IncludeLine> out;
    for (const auto& n : unit.root.children) {
        if (n.kind != NodeKind::OpaqueStmt) continue;
        const std::string text(unit.text(n.span));
        std::smatch m;
        if (std::regex_search(text, m, directive)) out.push_back({n.span, m[1].str()});
    }
    return out;
}

}  // namespace

SpliceSet plan_edits(const SourceUnit& unit, const std::vector<const OffloadCandidate*>& on, const PatternDb& db)
{
    for (std::size_t i = 0; i < on.size(); ++i)
        for (std::size_t j = i + 1; j < on.size(); ++j)
            if (on[i]->conflicts_with(*on[j]))
                throw OverlapError(std::min(on[i]->index, on[j]->index), std::max(on[i]->index, on[j]->index));

    SpliceSet edits;
    std::vector<std::string> wanted;
    for (const auto* c : on) {
        const auto* rec = db.find(c->record_id);
        if (rec == nullptr) throw std::invalid_argument("unknown record '" + c->record_id + "'");
        auto text = render_snippet(*rec, c->binding, c->args, c->ret_target);
        if (c->replaces_body) text = "{\n    " + text + "\n}";
        edits.add({c->site, std::move(text)});
        if (c->removed_definition) edits.add({*c->removed_definition, removal_marker(c->record_id)});
        for (const auto& h : rec->replacement.includes)
            if (std::find(wanted.begin(), wanted.end(), h) == wanted.end()) wanted.push_back(h);
    }

    const auto existing = include_lines(unit);
    std::string insertion;
    for (const auto& h : wanted) {
        const bool present = std::any_of(existing.begin(), existing.end(),
                                         [&](const IncludeLine& l) { return l.header == h; });
        if (!present) insertion += "#include \"" + h + "\"\n";
    }
    if (!insertion.empty()) {
        if (existing.empty()) {
            edits.add({{0, 0}, insertion});
        } else {
            const auto at = existing.back().span.end;
            insertion.pop_back();
            edits.add({{at, at}, "\n" + insertion});
        }
    }
    return edits;
}

std::string apply(const SourceUnit& unit, const std::vector<const OffloadCandidate*>& on, const PatternDb& db)
{
    if (on.empty()) return unit.bytes;
    return plan_edits(unit, on, db).apply_to(unit.bytes);
}

fs::path write_variant(const fs::path& out_root, const OffloadPattern& pattern, const std::vector<SourceUnit>& units,
                       const std::vector<OffloadCandidate>& candidates, const PatternDb& db)
{
    if (pattern.size() != candidates.size())
        throw std::invalid_argument("pattern length does not match candidate count");
    const fs::path dir = out_root / (pattern.size() == 0 ? std::string("baseline") : pattern.str());
    fs::create_directories(dir);
    std::set<std::string> names;
    for (std::size_t u = 0; u < units.size(); ++u) {
        std::vector<const OffloadCandidate*> on;
        for (std::size_t i = 0; i < candidates.size(); ++i)
            if (pattern.test(i) && candidates[i].unit_index == u) on.push_back(&candidates[i]);
        const auto name = units[u].path.filename().string();
        if (!names.insert(name).second) throw std::invalid_argument("duplicate source file name '" + name + "'");
        std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
        out << apply(units[u], on, db);
        if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
    }
    return dir;
}

}  // namespace blockoff
