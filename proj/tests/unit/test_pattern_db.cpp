#include <doctest.h>

#include <nlohmann/json.hpp>

#include "blockoff/pattern_db.hpp"
#include "fixtures.hpp"

using namespace blockoff;
using blockoff::testing::fixture_dir;
using blockoff::testing::scratch_dir;
using blockoff::testing::write_file;
using nlohmann::json;

namespace {

json record(const std::string& id, std::vector<std::string> callees)
{
    return {{"id", id},
            {"kind", "gpu_library"},
            {"source_library", {{"callee_names", callees}, {"header", nullptr}}},
            {"replacement",
             {{"snippet", "fast_" + id + "({{arg0}}, {{arg1}});"},
              {"includes", json::array({"fast.h"})},
              {"link_flags", json::array({"-lfast"})},
              {"backend_profile", "accel_cpu_standin"}}},
            {"interface",
             {{"params", json::array({{{"name", "a"}, {"type", "f64_array"}, {"optional", false}},
                                      {{"name", "n"}, {"type", "i32"}, {"optional", false}}})},
              {"returns", "void"}}}};
}

PatternRecord parse_json(const json& j, const std::filesystem::path& root = "/nonexistent")
{
    return parse_record(j.dump(), "rec.json", root);
}

std::string schema_key(const json& j)
{
    try {
        parse_json(j);
    } catch (const SchemaError& e) {
        return e.key();
    }
    return "<no error>";
}

}  // namespace

TEST_CASE("empty directory loads to an empty DB")
{
    const auto dir = scratch_dir("db_empty");
    CHECK(PatternDb::load(dir).records().empty());
    std::filesystem::create_directories(dir / "patterns");
    CHECK(PatternDb::load(dir).records().empty());
}

TEST_CASE("fixture DB loads two records sorted by id")
{
    const auto db = PatternDb::load(fixture_dir() / "db");
    REQUIRE(db.records().size() == 2);
    CHECK(db.records()[0].id == "fft2d");
    CHECK(db.records()[1].id == "lu_solve");

    const auto& fft = db.records()[0];
    CHECK(fft.kind == RecordKind::GpuLibrary);
    CHECK(fft.source_library.callee_names == std::vector<std::string>{"four1", "fourn"});
    CHECK(fft.source_library.header == "nr_fft.h");
    REQUIRE(fft.comparison_code);
    CHECK(std::filesystem::exists(*fft.comparison_code));
    CHECK(fft.replacement.backend_profile == "accel_cpu_standin");
    REQUIRE(fft.interface.params.size() == 3);
    CHECK(fft.interface.params[1].type == TypeTag::U64);
    CHECK(fft.interface.params[2].optional);
    CHECK(fft.interface.required_count() == 2);
    CHECK_FALSE(fft.interface.returns);

    CHECK_FALSE(db.records()[1].source_library.header);
    CHECK_FALSE(db.records()[1].comparison_code);
}

TEST_CASE("loading twice gives equal records")
{
    const auto a = PatternDb::load(fixture_dir() / "db");
    const auto b = PatternDb::load(fixture_dir() / "db");
    REQUIRE(a.records().size() == b.records().size());
    for (std::size_t i = 0; i < a.records().size(); ++i) {
        CHECK(a.records()[i].id == b.records()[i].id);
        CHECK(a.records()[i].replacement.snippet == b.records()[i].replacement.snippet);
    }
}

TEST_CASE("schema errors name the offending key")
{
    auto j = record("r", {"f"});
    j.erase("replacement");
    CHECK(schema_key(j) == "replacement");

    j = record("r", {"f"});
    j["replacment"] = 1;
    CHECK(schema_key(j) == "replacment");

    j = record("r", {"f"});
    j["kind"] = "gpu";
    CHECK(schema_key(j) == "kind");

    j = record("r", {"f"});
    j["interface"]["params"][1]["type"] = "float";
    CHECK(schema_key(j) == "interface.params[1].type");

    j = record("r", {"f"});
    j["interface"]["params"][0]["optional"] = true;
    CHECK(schema_key(j) == "interface.params[1].optional");

    j = record("r", {"f"});
    j["replacement"]["snippet"] = "g({{arg2}});";
    CHECK(schema_key(j) == "replacement.snippet");

    j = record("r", {"f"});
    j["replacement"]["snippet"] = "{{ret}} = g();";
    CHECK(schema_key(j) == "replacement.snippet");

    j = record("r", {});
    CHECK(schema_key(j) == "source_library.callee_names");

    j = record("r", {"f"});
    j["replacement"]["includes"] = "fast.h";
    CHECK(schema_key(j) == "replacement.includes");

    CHECK_THROWS_AS(parse_record("{not json", "x.json", "/"), SchemaError);
}

TEST_CASE("record invariants that pass")
{
    auto j = record("r", {"f"});
    j["interface"]["returns"] = "i32";
    j["replacement"]["snippet"] = "{{ret}} = fast({{arg0}});";
    const auto rec = parse_json(j);
    CHECK(rec.interface.returns == TypeTag::I32);

    j = record("ip", {"f"});
    j["kind"] = "fpga_ip_core";
    CHECK(parse_json(j).kind == RecordKind::FpgaIpCore);
}

TEST_CASE("duplicate ids and dangling paths")
{
    const auto dir = scratch_dir("db_errors");
    write_file(dir / "patterns" / "a.json", record("same", {"f"}).dump());
    write_file(dir / "patterns" / "b.json", record("same", {"g"}).dump());
    try {
        PatternDb::load(dir);
        FAIL("expected DuplicateIdError");
    } catch (const DuplicateIdError& e) {
        CHECK(e.id() == "same");
    }

    const auto dir2 = scratch_dir("db_dangling");
    auto j = record("r", {"f"});
    j["comparison_code"] = "refs/missing.c";
    write_file(dir2 / "patterns" / "r.json", j.dump());
    CHECK_THROWS_AS(PatternDb::load(dir2), DanglingPathError);
}

TEST_CASE("lookup_by_callee")
{
    const auto db = PatternDb::load(fixture_dir() / "db");
    const auto hits = db.lookup_by_callee("four1");
    REQUIRE(hits.size() == 1);
    CHECK(hits[0]->id == "fft2d");
    CHECK(db.lookup_by_callee("printf").empty());
    CHECK(db.lookup_by_callee("four").empty());

    SUBCASE("collisions come back in id order")
    {
        PatternDb both({parse_json(record("zeta_gemm", {"dgemm"})), parse_json(record("alpha_gemm", {"dgemm"}))});
        const auto r = both.lookup_by_callee("dgemm");
        REQUIRE(r.size() == 2);
        CHECK(r[0]->id == "alpha_gemm");
        CHECK(r[1]->id == "zeta_gemm");
    }
}

TEST_CASE("snippet placeholder scanning")
{
    CHECK(referenced_args("f({{arg2}}, {{arg0}}, {{arg2}})") == std::vector<std::size_t>{0, 2});
    CHECK(referenced_args("g();").empty());
    CHECK(references_ret("{{ret}} = h();"));
    CHECK_FALSE(references_ret("h();"));
}
