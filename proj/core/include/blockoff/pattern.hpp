#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace blockoff {

/// Which candidates are offloaded; bit i = candidate i, leftmost = index 0.
class OffloadPattern {
public:
    OffloadPattern() = default;
    explicit OffloadPattern(std::size_t n) : bits_(n, false) {}

    static OffloadPattern single(std::size_t n, std::size_t i);
    static OffloadPattern from_indices(std::size_t n, const std::vector<std::size_t>& on);
    static OffloadPattern parse(std::string_view bits);

    std::size_t size() const { return bits_.size(); }
    bool test(std::size_t i) const { return bits_[i]; }
    void set(std::size_t i, bool v = true) { bits_[i] = v; }
    std::size_t count() const;
    bool none() const { return count() == 0; }
    std::vector<std::size_t> on_indices() const;

    /// "01010"-style bitstring.
    std::string str() const;

    friend bool operator==(const OffloadPattern&, const OffloadPattern&) = default;

private:
    std::vector<bool> bits_;
};

}  // namespace blockoff
