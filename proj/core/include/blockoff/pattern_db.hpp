#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "blockoff/types.hpp"

namespace blockoff {

enum class RecordKind { GpuLibrary, FpgaIpCore };

struct ParamSpec {
    std::string name;
    TypeTag type = TypeTag::Unknown;
    bool optional = false;
    /// Expression substituted when the caller omits this optional parameter.
    std::optional<std::string> default_value;
};

struct InterfaceDescriptor {
    std::vector<ParamSpec> params;
    std::optional<TypeTag> returns;  // nullopt = void

    std::size_t required_count() const;
};

struct ReplacementSpec {
    std::string snippet;
    std::vector<std::string> includes;
    std::vector<std::string> link_flags;
    std::string backend_profile;
};

struct SourceLibrary {
    std::vector<std::string> callee_names;
    std::optional<std::string> header;
};

struct PatternRecord {
    std::string id;
    RecordKind kind = RecordKind::GpuLibrary;
    SourceLibrary source_library;
    /// Absolute path of the reference source used for similarity detection.
    std::optional<std::filesystem::path> comparison_code;
    ReplacementSpec replacement;
    InterfaceDescriptor interface;
};

class DbError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A record file is missing a key, has an ill-typed or unknown key, or breaks
/// a record invariant.
class SchemaError : public DbError {
public:
    SchemaError(std::filesystem::path file, std::string key, const std::string& detail);
    const std::filesystem::path& file() const { return file_; }
    const std::string& key() const { return key_; }

private:
    std::filesystem::path file_;
    std::string key_;
};

class DuplicateIdError : public DbError {
public:
    explicit DuplicateIdError(std::string id);
    const std::string& id() const { return id_; }

private:
    std::string id_;
};

class DanglingPathError : public DbError {
public:
    DanglingPathError(std::string id, std::filesystem::path path);
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

/// Placeholder indices `{{argK}}` referenced by a snippet, ascending, unique.
std::vector<std::size_t> referenced_args(std::string_view snippet);
bool references_ret(std::string_view snippet);

/// Parse and validate one record document. `db_root` anchors
/// comparison_code.
PatternRecord parse_record(std::string_view json_text, const std::filesystem::path& file,
                           const std::filesystem::path& db_root);

class PatternDb {
public:
    PatternDb() = default;
    explicit PatternDb(std::vector<PatternRecord> records);

    /// Loads `root/patterns/*.json` (or `root/*.json` when there is no
    /// patterns/ subdirectory). Records are sorted by id.
    static PatternDb load(const std::filesystem::path& root);

    const std::vector<PatternRecord>& records() const { return records_; }
    const PatternRecord* find(std::string_view id) const;

    /// Records whose callee_names contain `name`, in id order.
    std::vector<const PatternRecord*> lookup_by_callee(std::string_view name) const;

private:
    std::vector<PatternRecord> records_;
};

}  // namespace blockoff
