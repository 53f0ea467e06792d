#pragma once

#include <optional>
#include <string>
#include <vector>

#include "blockoff/ast.hpp"
#include "blockoff/interface_matcher.hpp"
#include "blockoff/pattern_db.hpp"
#include "blockoff/similarity.hpp"

namespace blockoff {

inline constexpr double kDefaultSigma = 0.9;

enum class MatchOrigin { NameMatch, SimilarityMatch };

std::string_view to_string(MatchOrigin o);

/// One detected replaceable block.
struct OffloadCandidate {
    std::size_t index = 0;
    /// Position of the owning SourceUnit in the caller's list of units.
    std::size_t unit_index = 0;
    Span site;
    std::string record_id;
    MatchOrigin origin = MatchOrigin::NameMatch;
    /// Similarity score; 1.0 for name matches.
    double score = 1.0;

    /// Source text of each actual argument, in call order.
    std::vector<std::string> args;
    /// Assignment target when the call is `lhs = call(...);`.
    std::optional<std::string> ret_target;
    CallSiteInfo call;

    /// Clone definition deleted together with the rewritten call site.
    std::optional<Span> removed_definition;
    /// The site is a function body (clone called zero or several times).
    bool replaces_body = false;
    std::string function_name;

    InterfaceBinding binding;

    /// Every byte range this candidate rewrites.
    std::vector<Span> edit_spans() const;
    bool conflicts_with(const OffloadCandidate& other) const;
};

struct ReferenceWarning {
    std::string record_id;
    std::string message;
};

struct SimilarityDetection {
    std::vector<OffloadCandidate> candidates;
    std::vector<ReferenceWarning> warnings;
};

/// Calls whose callee is registered in the DB; one candidate per
/// (call, record) pair, indexed by site order.
std::vector<OffloadCandidate> detect_by_name(const SourceUnit& unit, const PatternDb& db);

/// Function definitions whose body vector is within `sigma` of a record's
/// reference code.
SimilarityDetection detect_by_similarity(const SourceUnit& unit, const PatternDb& db, double sigma);

struct Detection {
    std::vector<OffloadCandidate> candidates;
    std::vector<ReferenceWarning> warnings;
    /// Pairs (i, j), i < j, of candidates whose edits overlap.
    std::vector<std::pair<std::size_t, std::size_t>> overlaps;
};

/// Both detectors over several units; candidates are re-indexed by
/// (unit, site start) and overlapping pairs are reported.
Detection detect(const std::vector<SourceUnit>& units, const PatternDb& db, double sigma);

}  // namespace blockoff
