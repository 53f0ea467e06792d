#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "blockoff/ast.hpp"
#include "blockoff/detector.hpp"
#include "blockoff/pattern.hpp"
#include "blockoff/pattern_db.hpp"

namespace blockoff {

/// Snippet references an argument (or `{{ret}}`) the binding cannot supply.
class UnboundPlaceholder : public std::runtime_error {
public:
    explicit UnboundPlaceholder(std::optional<std::size_t> index);
    /// nullopt for `{{ret}}`.
    std::optional<std::size_t> index() const { return index_; }

private:
    std::optional<std::size_t> index_;
};

class OverlapError : public std::runtime_error {
public:
    OverlapError(std::size_t first, std::size_t second);
    std::size_t first() const { return first_; }
    std::size_t second() const { return second_; }

private:
    std::size_t first_;
    std::size_t second_;
};

struct Edit {
    Span span;
    std::string text;
};

/// Non-overlapping edits, sorted by start offset.
class SpliceSet {
public:
    /// Throws std::invalid_argument if `e` overlaps an existing edit.
    void add(Edit e);
    const std::vector<Edit>& edits() const { return edits_; }
    /// Applies edits back to front so earlier spans stay valid.
    std::string apply_to(const std::string& text) const;

private:
    std::vector<Edit> edits_;
};

/// Substitute `{{argK}}`/`{{ret}}` with the bound source expressions,
/// wrapping casts as `(T)(expr)`.
std::string render_snippet(const PatternRecord& record, const InterfaceBinding& binding,
                           const std::vector<std::string>& args,
                           const std::optional<std::string>& ret_target = std::nullopt);

/// Marker left where a replaced clone definition used to be.
std::string removal_marker(const std::string& record_id);

/// The splice set realizing `on` (candidates of this unit only) plus the
/// include insertion.
SpliceSet plan_edits(const SourceUnit& unit, const std::vector<const OffloadCandidate*>& on, const PatternDb& db);

/// Rewritten source text for one unit.
std::string apply(const SourceUnit& unit, const std::vector<const OffloadCandidate*>& on, const PatternDb& db);

/// Write every unit (rewritten per `pattern`) to `out_root/<bits>/<name>`
/// and return the variant directory. Patterns over zero candidates use the
/// directory name "baseline".
std::filesystem::path write_variant(const std::filesystem::path& out_root, const OffloadPattern& pattern,
                                    const std::vector<SourceUnit>& units,
                                    const std::vector<OffloadCandidate>& candidates, const PatternDb& db);

}  // namespace blockoff
