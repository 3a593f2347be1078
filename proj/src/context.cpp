#include "jetvar/context.hpp"

#include "jetvar/error.hpp"

#include <algorithm>
#include <set>

namespace jetvar {

namespace {

std::optional<std::size_t> index_of(const std::vector<std::string>& names, const std::string& name)
{
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) return std::nullopt;
    return static_cast<std::size_t>(it - names.begin());
}

} // namespace

JetContext::JetContext(std::vector<std::string> base_names, std::vector<std::string> fiber_names,
                       std::vector<OpaqueFunction> functions, std::vector<std::string> parameters)
    : base_names_(std::move(base_names)), fiber_names_(std::move(fiber_names)),
      functions_(std::move(functions)), parameters_(std::move(parameters))
{
    if (base_names_.empty()) throw SemanticError("context needs at least one base variable");
    if (fiber_names_.empty()) throw SemanticError("context needs at least one field");

    std::set<std::string> seen;
    auto claim = [&](const std::string& name) {
        if (name.empty()) throw SemanticError("empty identifier in context");
        if (!seen.insert(name).second) throw SemanticError("duplicate name '" + name + "' in context");
    };
    for (auto& s : base_names_) claim(s);
    for (auto& s : fiber_names_) claim(s);
    for (auto& f : functions_) {
        claim(f.name);
        for (auto& a : f.args) {
            if (auto* jv = std::get_if<JetVar>(&a)) {
                if (jv->field >= m() || jv->sigma.dim() != n() || !jv->sigma.is_zero()) {
                    throw SemanticError("opaque function '" + f.name +
                                        "' may only depend on base and zero-order fiber coordinates");
                }
            } else if (std::get<BaseVar>(a).index >= n()) {
                throw SemanticError("opaque function '" + f.name + "' has an invalid argument");
            }
        }
    }
    for (auto& p : parameters_) claim(p);
}

std::optional<std::size_t> JetContext::find_base(const std::string& name) const
{
    return index_of(base_names_, name);
}

std::optional<std::size_t> JetContext::find_field(const std::string& name) const
{
    return index_of(fiber_names_, name);
}

std::optional<std::size_t> JetContext::find_function(const std::string& name) const
{
    for (std::size_t k = 0; k < functions_.size(); ++k) {
        if (functions_[k].name == name) return k;
    }
    return std::nullopt;
}

std::optional<std::size_t> JetContext::find_parameter(const std::string& name) const
{
    return index_of(parameters_, name);
}

JetContext JetContext::with_parameter(const std::string& name) const
{
    if (find_parameter(name)) return *this;
    auto params = parameters_;
    params.push_back(name);
    return JetContext(base_names_, fiber_names_, functions_, std::move(params));
}

bool JetContext::single_letter_base() const noexcept
{
    return std::all_of(base_names_.begin(), base_names_.end(),
                       [](const std::string& s) { return s.size() == 1; });
}

std::string JetContext::coordinate_name(const Coordinate& c) const
{
    if (auto* b = std::get_if<BaseVar>(&c)) return base_names_.at(b->index);
    const auto& j = std::get<JetVar>(c);
    auto name = fiber_names_.at(j.field);
    if (j.sigma.is_zero()) return name;
    if (single_letter_base()) return name + "_" + j.sigma.to_string(base_names_, "");
    return name + "_{" + j.sigma.to_string(base_names_) + "}";
}

bool operator==(const JetContext& a, const JetContext& b)
{
    if (a.base_names_ != b.base_names_ || a.fiber_names_ != b.fiber_names_ ||
        a.parameters_ != b.parameters_ || a.functions_.size() != b.functions_.size()) {
        return false;
    }
    for (std::size_t k = 0; k < a.functions_.size(); ++k) {
        if (a.functions_[k].name != b.functions_[k].name || a.functions_[k].args != b.functions_[k].args) {
            return false;
        }
    }
    return true;
}

} // namespace jetvar
