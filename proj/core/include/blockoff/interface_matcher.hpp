#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "blockoff/pattern_db.hpp"
#include "blockoff/types.hpp"

namespace blockoff {

/// Ordered from best to worst; combining outcomes takes the maximum.
enum class BindStatus { AutoBind, AutoBindWithCasts, ConfirmationRequired, Incompatible };

std::string_view to_string(BindStatus s);

/// How the original call's value is consumed.
enum class ReturnUse {
    Discarded,  ///< standalone expression statement
    Assigned,   ///< `lhs = call(...);` statement
    Used,       ///< nested inside a larger expression
};

struct CallSiteInfo {
    std::vector<TypeTag> arg_types;
    ReturnUse return_use = ReturnUse::Discarded;
};

struct Cast {
    TypeTag from;
    TypeTag to;
    friend bool operator==(const Cast&, const Cast&) = default;
};

struct ArgBinding {
    enum class Source {
        Argument,           ///< caller's argument at the same position
        DroppedOptional,    ///< caller passes it, replacement does not take it
        DefaultedOptional,  ///< caller omits it, declared default is used
        Missing,            ///< required by the replacement, caller omits it
    };
    Source source = Source::Argument;
    std::optional<Cast> cast;
};

struct InterfaceBinding {
    BindStatus status = BindStatus::AutoBind;
    /// One entry per position max(args, params).
    std::vector<ArgBinding> arg_map;
    std::vector<std::string> notes;

    bool executable() const
    {
        return status == BindStatus::AutoBind || status == BindStatus::AutoBindWithCasts;
    }
};

/// True for the fixed widening set f32->f64, i32->i64, u32->u64, i32->f64.
bool is_widening(TypeTag from, TypeTag to);

/// Reconcile a call site with a replacement interface. `referenced[i]` says
/// whether the replacement snippet consumes parameter i; optional parameters
/// it does not consume may be dropped from the call.
InterfaceBinding bind(const CallSiteInfo& site, const InterfaceDescriptor& iface,
                      const std::vector<bool>& referenced);

/// Same, treating every parameter as referenced.
InterfaceBinding bind(const CallSiteInfo& site, const InterfaceDescriptor& iface);

/// referenced-mask derived from a snippet's {{argK}} placeholders.
std::vector<bool> referenced_mask(std::string_view snippet, std::size_t param_count);

}  // namespace blockoff
