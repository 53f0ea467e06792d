#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "blockoff/detector.hpp"
#include "blockoff/harness.hpp"
#include "blockoff/pattern.hpp"

namespace blockoff {

class NoValidBaseline : public std::runtime_error {
public:
    explicit NoValidBaseline(MeasureStatus status);
    MeasureStatus status() const { return status_; }

private:
    MeasureStatus status_;
};

/// Compiles, runs and times one pattern.
using MeasureFn = std::function<MeasurementResult(const OffloadPattern&)>;
/// True when candidates i and j may not be ON together.
using ConflictFn = std::function<bool(std::size_t, std::size_t)>;

struct SearchReport {
    MeasurementResult baseline;
    /// singles[i] measures candidate i alone.
    std::vector<MeasurementResult> singles;
    std::optional<MeasurementResult> combined;

    /// Candidates whose single run is valid and faster than the baseline.
    std::vector<std::size_t> winners;
    /// Winners left out of the combination because they conflict with an
    /// earlier winner.
    std::vector<std::size_t> dropped_from_combination;
    /// Set when more than two winners were combined.
    bool combination_extrapolated = false;

    OffloadPattern selected;
    double selected_median_s = 0.0;
    /// baseline median over selected median.
    double speedup = 1.0;
    /// Baseline included.
    std::size_t measurements = 1;
};

/// Single-then-combine search over `n` candidates. The baseline must already
/// be measured.
SearchReport search(std::size_t n, const ConflictFn& conflicts, const MeasurementResult& baseline,
                    const MeasureFn& measure_fn);

SearchReport search(const std::vector<OffloadCandidate>& candidates, const MeasurementResult& baseline,
                    const MeasureFn& measure_fn);

/// Ordering used for selection: median, then ON-bit count, then bitstring.
bool better_than(double median_a, const OffloadPattern& a, double median_b, const OffloadPattern& b);

}  // namespace blockoff
