#include <doctest.h>

#include <algorithm>
#include <random>

#include "blockoff/frontend.hpp"
#include "blockoff/similarity.hpp"
#include "blockoff/transformer.hpp"
#include "random_program.hpp"

using namespace blockoff;
using blockoff::testing::RandomProgram;
using blockoff::testing::Rendering;

namespace {

std::vector<CharacteristicVector> function_vectors(const SourceUnit& u)
{
    std::vector<CharacteristicVector> out;
    for (const auto& d : list_definitions(u))
        if (d.node->kind == NodeKind::FunctionDef) out.push_back(vectorize(*d.node->child_of_kind(NodeKind::CompoundStmt)));
    return out;
}

/// Record for the first generated function (identifier 4 in every program).
PatternDb first_function_db()
{
    PatternRecord r;
    r.id = "first";
    r.source_library.callee_names = {"v4"};
    r.replacement.snippet = "accel_first({{arg0}}, {{arg1}});";
    r.replacement.includes = {"accel.h"};
    r.replacement.backend_profile = "accel_cpu_standin";
    r.interface.params = {{"a", TypeTag::F64Array, false, std::nullopt}, {"n", TypeTag::I32, false, std::nullopt}};
    r.interface.returns = TypeTag::F64;
    return PatternDb({r});
}

bool inside_some(const Span& s, const std::vector<const OffloadCandidate*>& on)
{
    for (const auto* c : on)
        for (const auto& e : c->edit_spans())
            if (e.start <= s.start && s.end <= e.end) return true;
    return false;
}

}  // namespace

TEST_CASE("random programs: vectors ignore names and trivia; similarity is symmetric")
{
    for (std::uint32_t seed = 1; seed <= 1000; ++seed) {
        CAPTURE(seed);
        const RandomProgram prog(seed);
        const auto plain = parse("p.c", prog.render({}));
        const auto renamed = parse("r.c", prog.render({"renamed_", false, false}));
        const auto noisy = parse("n.c", prog.render({"q", true, true}));
        const auto a = function_vectors(plain);
        const auto b = function_vectors(renamed);
        const auto c = function_vectors(noisy);
        REQUIRE(!a.empty());
        REQUIRE(a.size() == b.size());
        REQUIRE(a.size() == c.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i] == b[i]);
            CHECK(a[i] == c[i]);
            CHECK(similarity(a[i], b[i]) == 1.0);
            for (std::size_t j = 0; j < a.size(); ++j) CHECK(similarity(a[i], a[j]) == similarity(a[j], b[i]));
        }
    }
}

TEST_CASE("random programs: rewriting touches only the chosen sites")
{
    const auto db = first_function_db();
    std::mt19937 rng(77);
    std::size_t programs_with_sites = 0;
    for (std::uint32_t seed = 1; seed <= 300; ++seed) {
        CAPTURE(seed);
        const auto u = parse("p.c", RandomProgram(seed).render({}));
        CHECK(apply(u, {}, db) == u.bytes);
        const auto cs = detect_by_name(u, db);
        if (cs.empty()) continue;
        ++programs_with_sites;

        std::vector<const OffloadCandidate*> on;
        for (const auto& c : cs) {
            if (rng() % 2 == 0) continue;
            const bool clash = std::any_of(on.begin(), on.end(), [&](const auto* o) { return o->conflicts_with(c); });
            if (!clash) on.push_back(&c);
        }
        const auto plan = plan_edits(u, on, db);
        const auto out = plan.apply_to(u.bytes);

        std::size_t at_in = 0;
        std::size_t at_out = 0;
        for (const auto& e : plan.edits()) {
            CHECK((e.span.start == e.span.end || inside_some(e.span, on)));
            const auto keep = e.span.start - at_in;
            CHECK(u.bytes.compare(at_in, keep, out, at_out, keep) == 0);
            at_out += keep + e.text.size();
            at_in = e.span.end;
        }
        CHECK(u.bytes.compare(at_in, std::string::npos, out, at_out, std::string::npos) == 0);
        CHECK(out.size() - at_out == u.bytes.size() - at_in);
    }
    CHECK(programs_with_sites > 50);
}
