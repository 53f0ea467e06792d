#include "blockoff/search.hpp"

#include <string>
#include <tuple>

namespace blockoff {

NoValidBaseline::NoValidBaseline(MeasureStatus status)
    : std::runtime_error("baseline measurement is not valid (" + std::string(to_string(status)) + ")"),
      status_(status)
{
}

bool better_than(double median_a, const OffloadPattern& a, double median_b, const OffloadPattern& b)
{
    return std::make_tuple(median_a, a.count(), a.str()) < std::make_tuple(median_b, b.count(), b.str());
}

SearchReport search(std::size_t n, const ConflictFn& conflicts, const MeasurementResult& baseline,
                    const MeasureFn& measure_fn)
{
    if (!baseline.ok() || !baseline.median_s) throw NoValidBaseline(baseline.status);

    SearchReport rep;
    rep.baseline = baseline;
    rep.selected = OffloadPattern(n);
    rep.selected_median_s = *baseline.median_s;

    const auto consider = [&](const MeasurementResult& r, const OffloadPattern& p) {
        if (r.ok() && r.median_s && better_than(*r.median_s, p, rep.selected_median_s, rep.selected)) {
            rep.selected = p;
            rep.selected_median_s = *r.median_s;
        }
    };

    for (std::size_t i = 0; i < n; ++i) {
        const auto p = OffloadPattern::single(n, i);
        auto r = measure_fn(p);
        r.pattern = p.str();
        ++rep.measurements;
        if (r.ok() && r.median_s && *r.median_s < *baseline.median_s) rep.winners.push_back(i);
        consider(r, p);
        rep.singles.push_back(std::move(r));
    }

    if (rep.winners.size() >= 2) {
        std::vector<std::size_t> kept;
        for (const auto w : rep.winners) {
            bool clash = false;
            for (const auto k : kept) clash = clash || conflicts(k, w);
            if (clash)
                rep.dropped_from_combination.push_back(w);
            else
                kept.push_back(w);
        }
        rep.combination_extrapolated = kept.size() > 2;
        if (kept.size() >= 2) {
            const auto p = OffloadPattern::from_indices(n, kept);
            auto r = measure_fn(p);
            r.pattern = p.str();
            ++rep.measurements;
            consider(r, p);
            rep.combined = std::move(r);
        }
    }

    rep.speedup = rep.selected_median_s > 0.0 ? *baseline.median_s / rep.selected_median_s : 1.0;
    return rep;
}

SearchReport search(const std::vector<OffloadCandidate>& candidates, const MeasurementResult& baseline,
                    const MeasureFn& measure_fn)
{
    return search(
        candidates.size(), [&](std::size_t i, std::size_t j) { return candidates[i].conflicts_with(candidates[j]); },
        baseline, measure_fn);
}

}  // namespace blockoff
