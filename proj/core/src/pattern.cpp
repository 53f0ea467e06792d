#include "blockoff/pattern.hpp"

#include <algorithm>
#include <stdexcept>

namespace blockoff {

OffloadPattern OffloadPattern::single(std::size_t n, std::size_t i)
{
    OffloadPattern p(n);
    p.set(i);
    return p;
}

OffloadPattern OffloadPattern::from_indices(std::size_t n, const std::vector<std::size_t>& on)
{
    OffloadPattern p(n);
    for (const auto i : on) p.set(i);
    return p;
}

OffloadPattern OffloadPattern::parse(std::string_view bits)
{
    OffloadPattern p(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i] != '0' && bits[i] != '1') throw std::invalid_argument("bad pattern bitstring");
        p.set(i, bits[i] == '1');
    }
    return p;
}

std::size_t OffloadPattern::count() const
{
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), true));
}

std::vector<std::size_t> OffloadPattern::on_indices() const
{
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < bits_.size(); ++i)
        if (bits_[i]) out.push_back(i);
    return out;
}

std::string OffloadPattern::str() const
{
    std::string s;
    s.reserve(bits_.size());
    for (const bool b : bits_) s += b ? '1' : '0';
    return s;
}

}  // namespace blockoff
