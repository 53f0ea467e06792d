#include "blockoff/types.hpp"

#include <algorithm>
#include <array>
#include <sstream>
#include <utility>
#include <vector>

namespace blockoff {

namespace {

constexpr std::array<std::pair<TypeTag, std::string_view>, 13> kNames{{
    {TypeTag::Unknown, "unknown"},
    {TypeTag::I32, "i32"},
    {TypeTag::I64, "i64"},
    {TypeTag::U32, "u32"},
    {TypeTag::U64, "u64"},
    {TypeTag::F32, "f32"},
    {TypeTag::F64, "f64"},
    {TypeTag::I32Array, "i32_array"},
    {TypeTag::I64Array, "i64_array"},
    {TypeTag::U32Array, "u32_array"},
    {TypeTag::U64Array, "u64_array"},
    {TypeTag::F32Array, "f32_array"},
    {TypeTag::F64Array, "f64_array"},
}};

TypeTag scalar_from_specifiers(const std::vector<std::string>& words)
{
    auto count = [&](std::string_view w) {
        return std::count(words.begin(), words.end(), w);
    };
    if (words.size() == 1) {
        const auto& w = words.front();
        if (w == "size_t" || w == "uint64_t") return TypeTag::U64;
        if (w == "int64_t" || w == "ptrdiff_t") return TypeTag::I64;
        if (w == "int32_t") return TypeTag::I32;
        if (w == "uint32_t") return TypeTag::U32;
    }
    for (const auto& w : words) {
        static constexpr std::array<std::string_view, 6> known{
            "unsigned", "signed", "int", "long", "float", "double"};
        if (std::find(known.begin(), known.end(), w) == known.end()) return TypeTag::Unknown;
    }
    const auto longs = count("long");
    const bool is_unsigned = count("unsigned") > 0;
    if (count("float") > 0) return words.size() == 1 ? TypeTag::F32 : TypeTag::Unknown;
    if (count("double") > 0) return words.size() == 1 ? TypeTag::F64 : TypeTag::Unknown;
    if (words.empty()) return TypeTag::Unknown;
    if (longs > 0) return is_unsigned ? TypeTag::U64 : TypeTag::I64;
    return is_unsigned ? TypeTag::U32 : TypeTag::I32;
}

}  // namespace

bool is_array(TypeTag t)
{
    return t >= TypeTag::I32Array && t <= TypeTag::F64Array;
}

bool is_numeric_scalar(TypeTag t)
{
    return t >= TypeTag::I32 && t <= TypeTag::F64;
}

TypeTag array_of(TypeTag scalar)
{
    if (!is_numeric_scalar(scalar)) return TypeTag::Unknown;
    return static_cast<TypeTag>(static_cast<int>(scalar) + 6);
}

TypeTag element_of(TypeTag array)
{
    if (!is_array(array)) return TypeTag::Unknown;
    return static_cast<TypeTag>(static_cast<int>(array) - 6);
}

std::string_view to_string(TypeTag t)
{
    for (const auto& [tag, name] : kNames)
        if (tag == t) return name;
    return "unknown";
}

std::optional<TypeTag> parse_type_tag(std::string_view s)
{
    for (const auto& [tag, name] : kNames)
        if (name == s && tag != TypeTag::Unknown) return tag;
    return std::nullopt;
}

std::string_view c_spelling(TypeTag t)
{
    switch (t) {
    case TypeTag::I32: return "int";
    case TypeTag::I64: return "long";
    case TypeTag::U32: return "unsigned int";
    case TypeTag::U64: return "unsigned long";
    case TypeTag::F32: return "float";
    case TypeTag::F64: return "double";
    case TypeTag::I32Array: return "int *";
    case TypeTag::I64Array: return "long *";
    case TypeTag::U32Array: return "unsigned int *";
    case TypeTag::U64Array: return "unsigned long *";
    case TypeTag::F32Array: return "float *";
    case TypeTag::F64Array: return "double *";
    case TypeTag::Unknown: break;
    }
    return "void";
}

TypeTag tag_from_c_type(std::string_view normalized)
{
    std::size_t indirections = 0;
    while (!normalized.empty() && (normalized.back() == '*' || normalized.back() == ']' ||
                                   normalized.back() == ' ')) {
        if (normalized.back() == '*') {
            ++indirections;
            normalized.remove_suffix(1);
        } else if (normalized.back() == ']') {
            const auto open = normalized.rfind('[');
            if (open == std::string_view::npos) return TypeTag::Unknown;
            ++indirections;
            normalized = normalized.substr(0, open);
        } else {
            normalized.remove_suffix(1);
        }
    }
    std::vector<std::string> words;
    std::istringstream in{std::string(normalized)};
    for (std::string w; in >> w;) words.push_back(w);

    const TypeTag scalar = scalar_from_specifiers(words);
    if (indirections == 0) return scalar;
    if (indirections == 1) return array_of(scalar);
    return TypeTag::Unknown;
}

}  // namespace blockoff
