/**
 * @file context.hpp
 * @brief Ambient jet-space declaration: base variables, fields, opaque
 *        coefficient functions and named symbolic parameters.
 */
#pragma once

#include "jetvar/multiindex.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace jetvar {

/// Base coordinate x^lambda.
struct BaseVar {
    std::size_t index = 0;
    friend bool operator==(const BaseVar&, const BaseVar&) = default;
};

/// Jet coordinate y^i_sigma; sigma = 0 is the fiber coordinate y^i itself.
struct JetVar {
    std::size_t field = 0;
    MultiIndex sigma;
    friend bool operator==(const JetVar&, const JetVar&) = default;
};

/// Designates one coordinate of the jet space.
using Coordinate = std::variant<BaseVar, JetVar>;

/// Smooth function symbol with unevaluated values, e.g. a metric
/// coefficient g_ab(q). Arguments are base or zero-order fiber coordinates.
struct OpaqueFunction {
    std::string name;
    std::vector<Coordinate> args;
};

class JetContext {
public:
    JetContext() = default;

    /// Throws SemanticError on duplicate or empty name lists.
    JetContext(std::vector<std::string> base_names, std::vector<std::string> fiber_names,
               std::vector<OpaqueFunction> functions = {}, std::vector<std::string> parameters = {});

    [[nodiscard]] std::size_t n() const noexcept { return base_names_.size(); }
    [[nodiscard]] std::size_t m() const noexcept { return fiber_names_.size(); }

    [[nodiscard]] const std::vector<std::string>& base_names() const noexcept { return base_names_; }
    [[nodiscard]] const std::vector<std::string>& fiber_names() const noexcept { return fiber_names_; }
    [[nodiscard]] const std::vector<OpaqueFunction>& functions() const noexcept { return functions_; }
    [[nodiscard]] const std::vector<std::string>& parameters() const noexcept { return parameters_; }

    [[nodiscard]] std::optional<std::size_t> find_base(const std::string& name) const;
    [[nodiscard]] std::optional<std::size_t> find_field(const std::string& name) const;
    [[nodiscard]] std::optional<std::size_t> find_function(const std::string& name) const;
    [[nodiscard]] std::optional<std::size_t> find_parameter(const std::string& name) const;

    /// Copy of this context with an extra named parameter (no-op if present).
    [[nodiscard]] JetContext with_parameter(const std::string& name) const;

    /// All base names are one character long, so `y_tt` shorthand is usable.
    [[nodiscard]] bool single_letter_base() const noexcept;

    [[nodiscard]] std::string coordinate_name(const Coordinate& c) const;

    friend bool operator==(const JetContext& a, const JetContext& b);

private:
    std::vector<std::string> base_names_;
    std::vector<std::string> fiber_names_;
    std::vector<OpaqueFunction> functions_;
    std::vector<std::string> parameters_;
};

} // namespace jetvar
