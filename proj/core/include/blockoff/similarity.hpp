#pragma once

#include <array>
#include <cstdint>

#include "blockoff/ast.hpp"

namespace blockoff {

/// Per-kind node counts of a subtree, indexed by NodeKind.
struct CharacteristicVector {
    std::array<std::uint32_t, kNodeKindCount> counts{};
    std::uint64_t token_mass = 0;

    std::uint32_t operator[](NodeKind k) const { return counts[static_cast<std::size_t>(k)]; }
    friend bool operator==(const CharacteristicVector&, const CharacteristicVector&) = default;
};

/// Bodies lighter than this never take part in similarity matching.
inline constexpr std::uint64_t kMinSimilarityMass = 20;

CharacteristicVector vectorize(const AstNode& node);

/// 1 - |u - v| / (|u| + |v|) with Euclidean norms; two zero vectors give 1.
double similarity(const CharacteristicVector& u, const CharacteristicVector& v);

}  // namespace blockoff
