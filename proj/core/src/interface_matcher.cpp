#include "blockoff/interface_matcher.hpp"

#include <algorithm>

namespace blockoff {

std::string_view to_string(BindStatus s)
{
    switch (s) {
    case BindStatus::AutoBind: return "AutoBind";
    case BindStatus::AutoBindWithCasts: return "AutoBindWithCasts";
    case BindStatus::ConfirmationRequired: return "ConfirmationRequired";
    case BindStatus::Incompatible: return "Incompatible";
    }
    return "?";
}

bool is_widening(TypeTag from, TypeTag to)
{
    return (from == TypeTag::F32 && to == TypeTag::F64) || (from == TypeTag::I32 && to == TypeTag::I64) ||
           (from == TypeTag::U32 && to == TypeTag::U64) || (from == TypeTag::I32 && to == TypeTag::F64);
}

std::vector<bool> referenced_mask(std::string_view snippet, std::size_t param_count)
{
    std::vector<bool> mask(param_count, false);
    for (const auto i : referenced_args(snippet))
        if (i < param_count) mask[i] = true;
    return mask;
}

namespace {

class BindingBuilder {
public:
    void raise(BindStatus s, std::string note)
    {
        binding.status = std::max(binding.status, s);
        binding.notes.push_back(std::move(note));
    }

    InterfaceBinding binding;
};

std::string arg_label(std::size_t i, const ParamSpec* p)
{
    std::string s = "argument " + std::to_string(i);
    if (p != nullptr && !p->name.empty()) s += " (" + p->name + ")";
    return s;
}

}  // namespace

InterfaceBinding bind(const CallSiteInfo& site, const InterfaceDescriptor& iface,
                      const std::vector<bool>& referenced)
{
    BindingBuilder b;
    const auto m = site.arg_types.size();
    const auto p = iface.params.size();
    const auto r = iface.required_count();

    if (m < r)
        b.raise(BindStatus::ConfirmationRequired, "call passes " + std::to_string(m) + " argument(s) but the " +
                                                      "replacement requires " + std::to_string(r) +
                                                      "; missing arguments must be supplied");
    if (m > p)
        b.raise(BindStatus::ConfirmationRequired, "call passes " + std::to_string(m) + " argument(s) but the " +
                                                      "replacement accepts " + std::to_string(p) + "; arguments " +
                                                      std::to_string(p) + ".." + std::to_string(m - 1) +
                                                      " would be dropped");

    for (std::size_t i = 0; i < std::max(m, p); ++i) {
        ArgBinding entry;
        const ParamSpec* param = i < p ? &iface.params[i] : nullptr;
        const bool used = i < referenced.size() ? referenced[i] : true;
        if (param == nullptr) {
            entry.source = ArgBinding::Source::DroppedOptional;
        } else if (i >= m) {
            if (!param->optional) {
                entry.source = ArgBinding::Source::Missing;
            } else {
                entry.source = ArgBinding::Source::DefaultedOptional;
                if (used && !param->default_value)
                    b.raise(BindStatus::ConfirmationRequired,
                            arg_label(i, param) + " is omitted by the call and has no declared default");
                else
                    b.binding.notes.push_back(arg_label(i, param) + " omitted by the call; default used");
            }
        } else if (param->optional && !used) {
            entry.source = ArgBinding::Source::DroppedOptional;
            b.binding.notes.push_back(arg_label(i, param) + " is optional and dropped for the replacement");
        } else {
            const auto have = site.arg_types[i];
            const auto want = param->type;
            if (have == want) {
                // exact
            } else if (have == TypeTag::Unknown) {
                b.raise(BindStatus::ConfirmationRequired,
                        arg_label(i, param) + ": type could not be inferred; replacement expects " +
                            std::string(to_string(want)));
            } else if (is_numeric_scalar(have) && is_numeric_scalar(want)) {
                if (is_widening(have, want)) {
                    entry.cast = Cast{have, want};
                    b.raise(BindStatus::AutoBindWithCasts, arg_label(i, param) + ": cast " +
                                                               std::string(to_string(have)) + " -> " +
                                                               std::string(to_string(want)));
                } else {
                    entry.cast = Cast{have, want};
                    b.raise(BindStatus::ConfirmationRequired,
                            arg_label(i, param) + ": narrowing conversion " + std::string(to_string(have)) +
                                " -> " + std::string(to_string(want)) + " must be approved");
                }
            } else {
                b.raise(BindStatus::Incompatible, arg_label(i, param) + ": " + std::string(to_string(have)) +
                                                      " cannot be converted to " + std::string(to_string(want)));
            }
        }
        b.binding.arg_map.push_back(entry);
    }

    const bool replacement_returns = iface.returns.has_value();
    if (site.return_use != ReturnUse::Discarded && !replacement_returns)
        b.raise(BindStatus::ConfirmationRequired,
                "the original call's result is used but the replacement returns void");
    if (site.return_use == ReturnUse::Discarded && replacement_returns)
        b.raise(BindStatus::ConfirmationRequired, "the replacement returns " +
                                                      std::string(to_string(*iface.returns)) +
                                                      " which the original call site ignores");
    return b.binding;
}

InterfaceBinding bind(const CallSiteInfo& site, const InterfaceDescriptor& iface)
{
    return blockoff::bind(site, iface, std::vector<bool>(iface.params.size(), true));
}

}  // namespace blockoff
