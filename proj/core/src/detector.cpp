#include "blockoff/detector.hpp"

#include <algorithm>
#include <map>
#include <tuple>

#include "blockoff/frontend.hpp"

namespace blockoff {

std::string_view to_string(MatchOrigin o)
{
    return o == MatchOrigin::NameMatch ? "NameMatch" : "SimilarityMatch";
}

std::vector<Span> OffloadCandidate::edit_spans() const
{
    std::vector<Span> spans{site};
    if (removed_definition) spans.push_back(*removed_definition);
    return spans;
}

bool OffloadCandidate::conflicts_with(const OffloadCandidate& other) const
{
    if (unit_index != other.unit_index) return false;
    for (const auto& a : edit_spans())
        for (const auto& b : other.edit_spans())
            if (a.overlaps(b) || (a.empty() && b.contains(a)) || (b.empty() && a.contains(b))) return true;
    return false;
}

namespace {

struct CallSite {
    const AstNode* call = nullptr;
    const AstNode* function = nullptr;  // enclosing FunctionDef, if any
    Span site;
    ReturnUse use = ReturnUse::Used;
    std::optional<Span> ret_target;
};

CallSite locate(const AstNode& call, const std::vector<const AstNode*>& ancestors)
{
    CallSite cs;
    cs.call = &call;
    cs.site = call.span;
    for (const auto* a : ancestors)
        if (a->kind == NodeKind::FunctionDef) cs.function = a;
    if (ancestors.empty()) return cs;
    const AstNode& parent = *ancestors.back();
    if (parent.kind == NodeKind::ExprStmt && parent.children.size() == 1) {
        cs.site = parent.span;
        cs.use = ReturnUse::Discarded;
    } else if (parent.kind == NodeKind::AssignExpr && parent.name == "=" && parent.children.size() == 2 &&
               &parent.children[1] == &call && ancestors.size() >= 2) {
        const AstNode& stmt = *ancestors[ancestors.size() - 2];
        if (stmt.kind == NodeKind::ExprStmt && stmt.children.size() == 1) {
            cs.site = stmt.span;
            cs.use = ReturnUse::Assigned;
            cs.ret_target = parent.children[0].span;
        }
    }
    return cs;
}

std::vector<CallSite> call_sites(const SourceUnit& unit)
{
    std::vector<CallSite> out;
    walk(unit.root, [&](const AstNode& n, const std::vector<const AstNode*>& ancestors) {
        if (n.kind == NodeKind::CallExpr) out.push_back(locate(n, ancestors));
    });
    return out;
}

// Fills args, call info and binding from a concrete call site.
void attach_call(OffloadCandidate& c, const SourceUnit& unit, const CallSite& cs, const PatternRecord& rec)
{
    c.site = cs.site;
    c.call.return_use = cs.use;
    if (cs.ret_target) c.ret_target = std::string(unit.text(*cs.ret_target));
    const auto scope = DeclaredTypes::for_scope(unit, cs.function);
    if (const auto* args = cs.call->child_of_kind(NodeKind::ArgList)) {
        for (const auto& a : args->children) {
            c.args.emplace_back(unit.text(a.span));
            c.call.arg_types.push_back(infer_type(unit, a, scope));
        }
    }
    c.binding = blockoff::bind(c.call, rec.interface,
                     referenced_mask(rec.replacement.snippet, rec.interface.params.size()));
}

void assign_indices(std::vector<OffloadCandidate>& cs)
{
    std::stable_sort(cs.begin(), cs.end(), [](const OffloadCandidate& a, const OffloadCandidate& b) {
        return std::tie(a.unit_index, a.site.start) < std::tie(b.unit_index, b.site.start);
    });
    for (std::size_t i = 0; i < cs.size(); ++i) cs[i].index = i;
}

struct Reference {
    const PatternRecord* record;
    std::vector<CharacteristicVector> bodies;
};

std::vector<Reference> load_references(const PatternDb& db, std::vector<ReferenceWarning>& warnings)
{
    std::vector<Reference> refs;
    for (const auto& rec : db.records()) {
        if (!rec.comparison_code) continue;
        try {
            const auto ref_unit = parse_file(*rec.comparison_code);
            Reference r{&rec, {}};
            for (const auto& d : list_definitions(ref_unit))
                if (d.kind == DefinitionKind::FunctionDef)
                    if (const auto* body = d.node->child_of_kind(NodeKind::CompoundStmt))
                        r.bodies.push_back(vectorize(*body));
            if (r.bodies.empty()) {
                warnings.push_back({rec.id, "reference code defines no function"});
                continue;
            }
            refs.push_back(std::move(r));
        } catch (const std::exception& e) {
            warnings.push_back({rec.id, std::string("ReferenceParseError: ") + e.what()});
        }
    }
    return refs;
}

}  // namespace

std::vector<OffloadCandidate> detect_by_name(const SourceUnit& unit, const PatternDb& db)
{
    std::vector<OffloadCandidate> out;
    for (const auto& cs : call_sites(unit)) {
        for (const auto* rec : db.lookup_by_callee(cs.call->name)) {
            OffloadCandidate c;
            c.record_id = rec->id;
            c.origin = MatchOrigin::NameMatch;
            c.function_name = cs.call->name;
            attach_call(c, unit, cs, *rec);
            out.push_back(std::move(c));
        }
    }
    assign_indices(out);
    return out;
}

SimilarityDetection detect_by_similarity(const SourceUnit& unit, const PatternDb& db, double sigma)
{
    SimilarityDetection result;
    const auto refs = load_references(db, result.warnings);
    if (refs.empty()) return result;

    const auto sites = call_sites(unit);
    for (const auto& top : unit.root.children) {
        if (top.kind != NodeKind::FunctionDef || top.name == "main") continue;
        const auto* body = top.child_of_kind(NodeKind::CompoundStmt);
        if (body == nullptr) continue;
        const auto vec = vectorize(*body);
        if (vec.token_mass < kMinSimilarityMass) continue;

        std::vector<const CallSite*> callers;
        for (const auto& cs : sites)
            if (cs.call->name == top.name && !top.span.contains(cs.call->span)) callers.push_back(&cs);

        for (const auto& ref : refs) {
            double best = 0.0;
            for (const auto& rv : ref.bodies) best = std::max(best, similarity(vec, rv));
            if (best < sigma) continue;

            OffloadCandidate c;
            c.record_id = ref.record->id;
            c.origin = MatchOrigin::SimilarityMatch;
            c.score = best;
            c.function_name = top.name;
            if (callers.size() == 1) {
                attach_call(c, unit, *callers.front(), *ref.record);
                c.removed_definition = top.span;
            } else {
                // Rewrite the body in place; the parameters become the arguments.
                c.site = body->span;
                c.replaces_body = true;
                const auto scope = DeclaredTypes::for_scope(unit, &top);
                if (const auto* params = top.child_of_kind(NodeKind::ParamList)) {
                    for (const auto& p : params->children) {
                        c.args.push_back(p.name);
                        c.call.arg_types.push_back(p.name.empty() ? TypeTag::Unknown : tag_from_c_type(p.type));
                    }
                }
                c.call.return_use = top.type == "void" ? ReturnUse::Discarded : ReturnUse::Used;
                c.binding = blockoff::bind(c.call, ref.record->interface,
                                 referenced_mask(ref.record->replacement.snippet,
                                                 ref.record->interface.params.size()));
            }
            result.candidates.push_back(std::move(c));
        }
    }
    assign_indices(result.candidates);
    return result;
}

Detection detect(const std::vector<SourceUnit>& units, const PatternDb& db, double sigma)
{
    Detection d;
    for (std::size_t u = 0; u < units.size(); ++u) {
        auto named = detect_by_name(units[u], db);
        auto similar = detect_by_similarity(units[u], db, sigma);
        for (auto* list : {&named, &similar.candidates})
            for (auto& c : *list) {
                c.unit_index = u;
                d.candidates.push_back(std::move(c));
            }
        if (u == 0) d.warnings = std::move(similar.warnings);
    }
    assign_indices(d.candidates);
    for (std::size_t i = 0; i < d.candidates.size(); ++i)
        for (std::size_t j = i + 1; j < d.candidates.size(); ++j)
            if (d.candidates[i].conflicts_with(d.candidates[j])) d.overlaps.emplace_back(i, j);
    return d;
}

}  // namespace blockoff
