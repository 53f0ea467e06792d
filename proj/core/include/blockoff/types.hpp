#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace blockoff {

/// Coarse type tags used for interface reconciliation. Arrays cover both
/// `T*` and `T[]` declarators.
enum class TypeTag {
    Unknown,
    I32,
    I64,
    U32,
    U64,
    F32,
    F64,
    I32Array,
    I64Array,
    U32Array,
    U64Array,
    F32Array,
    F64Array,
};

bool is_array(TypeTag t);
bool is_numeric_scalar(TypeTag t);
/// Array tag with the given scalar element; Unknown for non-scalars.
TypeTag array_of(TypeTag scalar);
/// Element tag of an array tag; Unknown for non-arrays.
TypeTag element_of(TypeTag array);

/// Spelling used in pattern records: "i32", "f64_array", "unknown".
std::string_view to_string(TypeTag t);
/// Inverse of to_string for concrete tags; nullopt for anything else
/// (including "unknown" and "void").
std::optional<TypeTag> parse_type_tag(std::string_view s);

/// C spelling used when a cast must be written into generated code.
std::string_view c_spelling(TypeTag t);

/// Map a normalized declared type ("unsigned long", "double*", "float[]")
/// onto a tag. Types outside the supported set map to Unknown.
TypeTag tag_from_c_type(std::string_view normalized);

}  // namespace blockoff
