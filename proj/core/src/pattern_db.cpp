#include "blockoff/pattern_db.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <regex>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace blockoff {

using nlohmann::json;

SchemaError::SchemaError(std::filesystem::path file, std::string key, const std::string& detail)
    : DbError(file.string() + ": schema error at '" + key + "': " + detail),
      file_(std::move(file)),
      key_(std::move(key))
{
}

DuplicateIdError::DuplicateIdError(std::string id)
    : DbError("duplicate record id '" + id + "'"), id_(std::move(id))
{
}

DanglingPathError::DanglingPathError(std::string id, std::filesystem::path path)
    : DbError("record '" + id + "': comparison_code not found: " + path.string()), path_(std::move(path))
{
}

std::size_t InterfaceDescriptor::required_count() const
{
    return static_cast<std::size_t>(
        std::count_if(params.begin(), params.end(), [](const ParamSpec& p) { return !p.optional; }));
}

std::vector<std::size_t> referenced_args(std::string_view snippet)
{
    static const std::regex placeholder(R"(\{\{arg([0-9]+)\}\})");
    std::set<std::size_t> found;
    const std::string s(snippet);
    for (auto it = std::sregex_iterator(s.begin(), s.end(), placeholder); it != std::sregex_iterator(); ++it)
        found.insert(std::stoul((*it)[1].str()));
    return {found.begin(), found.end()};
}

bool references_ret(std::string_view snippet)
{
    return snippet.find("{{ret}}") != std::string_view::npos;
}

namespace {

// Strict-schema field access with key paths in error messages.
class Reader {
public:
    Reader(const json& obj, std::filesystem::path file, std::string prefix)
        : obj_(obj), file_(std::move(file)), prefix_(std::move(prefix))
    {
        if (!obj_.is_object()) fail(prefix_.empty() ? "<root>" : prefix_, "expected an object");
    }

    [[noreturn]] void fail(const std::string& key, const std::string& detail) const
    {
        throw SchemaError(file_, key, detail);
    }

    std::string path(std::string_view key) const
    {
        return prefix_.empty() ? std::string(key) : prefix_ + "." + std::string(key);
    }

    void allow_only(std::initializer_list<std::string_view> keys) const
    {
        for (const auto& [k, v] : obj_.items())
            if (std::find(keys.begin(), keys.end(), k) == keys.end()) fail(path(k), "unknown key");
    }

    const json* optional(std::string_view key) const
    {
        const auto it = obj_.find(std::string(key));
        if (it == obj_.end() || it->is_null()) return nullptr;
        return &*it;
    }

    const json& required(std::string_view key) const
    {
        const auto it = obj_.find(std::string(key));
        if (it == obj_.end()) fail(path(key), "missing required key");
        return *it;
    }

    std::string string(std::string_view key) const { return as_string(required(key), key); }

    std::string as_string(const json& v, std::string_view key) const
    {
        if (!v.is_string()) fail(path(key), "expected a string");
        return v.get<std::string>();
    }

    std::vector<std::string> strings(std::string_view key) const
    {
        const auto& v = required(key);
        if (!v.is_array()) fail(path(key), "expected an array of strings");
        std::vector<std::string> out;
        for (const auto& e : v) {
            if (!e.is_string()) fail(path(key), "expected an array of strings");
            out.push_back(e.get<std::string>());
        }
        return out;
    }

    Reader object(std::string_view key) const { return Reader(required(key), file_, path(key)); }

    const std::filesystem::path& file() const { return file_; }

private:
    const json& obj_;
    std::filesystem::path file_;
    std::string prefix_;
};

InterfaceDescriptor read_interface(const Reader& r)
{
    r.allow_only({"params", "returns"});
    InterfaceDescriptor iface;
    const auto& params = r.required("params");
    if (!params.is_array()) r.fail(r.path("params"), "expected an array");
    bool seen_optional = false;
    for (std::size_t i = 0; i < params.size(); ++i) {
        const Reader p(params[i], r.file(), r.path("params[" + std::to_string(i) + "]"));
        p.allow_only({"name", "type", "optional", "default"});
        ParamSpec spec;
        spec.name = p.string("name");
        const auto type = p.string("type");
        const auto tag = parse_type_tag(type);
        if (!tag) p.fail(p.path("type"), "unknown type tag '" + type + "'");
        spec.type = *tag;
        const auto& opt = p.required("optional");
        if (!opt.is_boolean()) p.fail(p.path("optional"), "expected a boolean");
        spec.optional = opt.get<bool>();
        if (const auto* d = p.optional("default")) spec.default_value = p.as_string(*d, "default");
        if (spec.optional) {
            seen_optional = true;
        } else if (seen_optional) {
            p.fail(p.path("optional"), "required parameter follows an optional one");
        }
        iface.params.push_back(std::move(spec));
    }
    const auto ret = r.string("returns");
    if (ret != "void") {
        const auto tag = parse_type_tag(ret);
        if (!tag) r.fail(r.path("returns"), "unknown type tag '" + ret + "'");
        iface.returns = *tag;
    }
    return iface;
}

ReplacementSpec read_replacement(const Reader& r)
{
    r.allow_only({"snippet", "includes", "link_flags", "backend_profile"});
    return ReplacementSpec{r.string("snippet"), r.strings("includes"), r.strings("link_flags"),
                           r.string("backend_profile")};
}

}  // namespace

PatternRecord parse_record(std::string_view json_text, const std::filesystem::path& file,
                           const std::filesystem::path& db_root)
{
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw SchemaError(file, "<document>", e.what());
    }
    const Reader r(doc, file, "");
    r.allow_only({"id", "kind", "source_library", "comparison_code", "replacement", "interface"});

    PatternRecord rec;
    rec.id = r.string("id");
    if (rec.id.empty()) r.fail("id", "must not be empty");

    const auto kind = r.string("kind");
    if (kind == "gpu_library") {
        rec.kind = RecordKind::GpuLibrary;
    } else if (kind == "fpga_ip_core") {
        rec.kind = RecordKind::FpgaIpCore;
    } else {
        r.fail("kind", "expected \"gpu_library\" or \"fpga_ip_core\"");
    }

    const auto lib = r.object("source_library");
    lib.allow_only({"callee_names", "header"});
    rec.source_library.callee_names = lib.strings("callee_names");
    if (const auto* h = lib.optional("header")) rec.source_library.header = lib.as_string(*h, "header");

    if (const auto* cc = r.optional("comparison_code"))
        rec.comparison_code = db_root / r.as_string(*cc, "comparison_code");

    rec.replacement = read_replacement(r.object("replacement"));
    rec.interface = read_interface(r.object("interface"));

    if (rec.source_library.callee_names.empty() && !rec.comparison_code)
        r.fail("source_library.callee_names", "record needs callee_names or comparison_code to be discoverable");
    for (const auto idx : referenced_args(rec.replacement.snippet))
        if (idx >= rec.interface.params.size())
            r.fail("replacement.snippet", "{{arg" + std::to_string(idx) + "}} exceeds the " +
                                              std::to_string(rec.interface.params.size()) + " interface params");
    if (references_ret(rec.replacement.snippet) && !rec.interface.returns)
        r.fail("replacement.snippet", "{{ret}} used but interface returns void");
    if (rec.comparison_code && !std::filesystem::exists(*rec.comparison_code))
        throw DanglingPathError(rec.id, *rec.comparison_code);
    return rec;
}

PatternDb::PatternDb(std::vector<PatternRecord> records) : records_(std::move(records))
{
    std::sort(records_.begin(), records_.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    for (std::size_t i = 1; i < records_.size(); ++i)
        if (records_[i].id == records_[i - 1].id) throw DuplicateIdError(records_[i].id);
}

PatternDb PatternDb::load(const std::filesystem::path& root)
{
    namespace fs = std::filesystem;
    if (!fs::is_directory(root)) throw DbError("pattern DB root is not a directory: " + root.string());
    const fs::path dir = fs::is_directory(root / "patterns") ? root / "patterns" : root;

    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
    std::sort(files.begin(), files.end());

    std::vector<PatternRecord> records;
    for (const auto& f : files) {
        std::ifstream in(f, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        records.push_back(parse_record(ss.str(), f, root));
    }
    return PatternDb(std::move(records));
}

const PatternRecord* PatternDb::find(std::string_view id) const
{
    for (const auto& r : records_)
        if (r.id == id) return &r;
    return nullptr;
}

std::vector<const PatternRecord*> PatternDb::lookup_by_callee(std::string_view name) const
{
    std::vector<const PatternRecord*> out;
    for (const auto& r : records_) {
        const auto& names = r.source_library.callee_names;
        if (std::find(names.begin(), names.end(), name) != names.end()) out.push_back(&r);
    }
    return out;
}

}  // namespace blockoff
