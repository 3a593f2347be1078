/**
 * @file problem.hpp
 * @brief Problem files: a context declaration followed by named
 *        Lagrangians, source forms, sections, variation fields, bilinear
 *        forms, on-shell relations and numeric settings.
 *
 * Example:
 *
 *     # harmonic oscillator
 *     context
 *       base t
 *       fields y
 *     lagrangian L = 1/2*(y_t^2 - y^2)
 *     section s
 *       y = sin(t)
 *     variation xi
 *       y = 1
 *     numeric
 *       domain t = [0, pi]
 *       nodes 64
 *
 * Block keywords start in column 1; entries are indented. `#` starts a
 * comment. See README.md for the full list of entries.
 */
#pragma once

#include "jetvar/context.hpp"
#include "jetvar/expr.hpp"
#include "jetvar/jetcalc.hpp"
#include "jetvar/variational.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace jetvar {

/// Closed-form section: one expression in base coordinates per field.
struct SectionDecl {
    std::string name;
    std::vector<Expr> components;
};

/// Variation field. Linear variations give xi in base coordinates (the
/// numeric module multiplies in a boundary bump). Flow variations give the
/// flow map psi(x, y, eps) directly; `field` then holds d psi / d eps at eps = 0.
struct VariationDecl {
    std::string name;
    VerticalField field;
    std::optional<std::vector<Expr>> flow;
    std::size_t flow_parameter = 0; ///< index of `eps` in flow_context
};

struct BilinearDecl {
    std::string name;
    BilinearForm form;
};

struct OnShellDecl {
    std::string name;
    std::vector<OnShellRelation> relations;
};

struct NumericDecl {
    std::vector<Expr> lower; ///< exact box bounds per base variable
    std::vector<Expr> upper;
    std::size_t nodes = 64;
    double step = 1e-3;
    double tol = 1e-6;
    double abs_tol = 1e-8;
};

struct ProblemFile {
    JetContext ctx;
    /// ctx plus the reserved flow parameter `eps`.
    JetContext flow_context;
    std::vector<std::pair<std::string, Lagrangian>> lagrangians;
    std::vector<std::pair<std::string, SourceForm>> sources;
    std::vector<SectionDecl> sections;
    std::vector<VariationDecl> variations;
    std::vector<BilinearDecl> bilinears;
    std::vector<OnShellDecl> onshell;
    std::optional<NumericDecl> numeric;

    /// Lookups by name; an empty name selects the only entry if there is
    /// exactly one. Throw SemanticError otherwise.
    [[nodiscard]] const Lagrangian& lagrangian(const std::string& name = {}) const;
    [[nodiscard]] const SourceForm& source(const std::string& name = {}) const;
    [[nodiscard]] const SectionDecl& section(const std::string& name = {}) const;
    [[nodiscard]] const VariationDecl& variation(const std::string& name) const;
    [[nodiscard]] const BilinearDecl& bilinear(const std::string& name = {}) const;
    [[nodiscard]] const OnShellDecl* find_onshell(const std::string& name = {}) const;
};

/// Throws ParseError (with file positions) or SemanticError.
[[nodiscard]] ProblemFile parse_problem(std::string_view text);

[[nodiscard]] ProblemFile load_problem(const std::filesystem::path& path);

/// Reserved name of the flow parameter in flow variations.
inline constexpr const char* kFlowParameter = "eps";

} // namespace jetvar
