#include "blockoff/similarity.hpp"

#include <cmath>

namespace blockoff {

namespace {

void accumulate(const AstNode& node, CharacteristicVector& v)
{
    ++v.counts[static_cast<std::size_t>(node.kind)];
    ++v.token_mass;
    for (const auto& c : node.children) accumulate(c, v);
}

}  // namespace

CharacteristicVector vectorize(const AstNode& node)
{
    CharacteristicVector v;
    accumulate(node, v);
    return v;
}

double similarity(const CharacteristicVector& u, const CharacteristicVector& v)
{
    double diff = 0.0;
    double nu = 0.0;
    double nv = 0.0;
    for (std::size_t k = 0; k < kNodeKindCount; ++k) {
        const double a = u.counts[k];
        const double b = v.counts[k];
        diff += (a - b) * (a - b);
        nu += a * a;
        nv += b * b;
    }
    const double denom = std::sqrt(nu) + std::sqrt(nv);
    if (denom == 0.0) return 1.0;
    return 1.0 - std::sqrt(diff) / denom;
}

}  // namespace blockoff
