/**
 * @file numeric.hpp
 * @brief Numeric oracle: jet expressions along prolonged closed-form
 *        sections, action integrals by tensor Gauss-Legendre quadrature,
 *        and finite-difference variations of the action under flows.
 *
 * Prolongations are exact: (j_r s)^i_sigma is the symbolic partial
 * derivative of s^i, evaluated in double precision only at the end.
 */
#pragma once

#include "jetvar/context.hpp"
#include "jetvar/error.hpp"
#include "jetvar/expr.hpp"
#include "jetvar/jetcalc.hpp"
#include "jetvar/variational.hpp"

#include <optional>
#include <span>
#include <vector>

namespace jetvar::numeric {

/// Axis-aligned box with exact bounds (constants such as pi are allowed).
struct Box {
    std::vector<Expr> lower;
    std::vector<Expr> upper;

    [[nodiscard]] std::size_t n() const noexcept { return lower.size(); }
    [[nodiscard]] double lo(std::size_t k) const;
    [[nodiscard]] double hi(std::size_t k) const;
};

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// N-point Gauss-Legendre rule mapped to [a, b].
[[nodiscard]] QuadratureRule gauss_legendre(std::size_t nodes, double a, double b);

class NumericSection {
public:
    /// `components` are expressions in base coordinates only; derivatives
    /// up to `prolongation_order` are tabulated symbolically.
    NumericSection(std::vector<Expr> components, Box domain, std::size_t nodes, std::uint32_t prolongation_order);

    [[nodiscard]] const std::vector<Expr>& components() const noexcept { return components_; }
    [[nodiscard]] const Box& domain() const noexcept { return domain_; }
    [[nodiscard]] std::size_t nodes() const noexcept { return nodes_; }
    [[nodiscard]] std::uint32_t prolongation_order() const noexcept { return order_; }

    /// d_sigma s^i, exact.
    [[nodiscard]] const Expr& derivative(const JetVar& v) const;

    /// Tensor-product quadrature points and weights over the box.
    [[nodiscard]] const std::vector<std::vector<double>>& points() const noexcept { return points_; }
    [[nodiscard]] const std::vector<double>& weights() const noexcept { return weights_; }

private:
    std::vector<Expr> components_;
    Box domain_;
    std::size_t nodes_;
    std::uint32_t order_;
    JetMap table_;
    std::vector<std::vector<double>> points_;
    std::vector<double> weights_;
};

/// e along j_r s at a base point. Throws SemanticError if the section's
/// prolongation order is below jet_order(e), EvaluationError on domain errors.
[[nodiscard]] double eval_on_section(const Expr& e, const NumericSection& s, std::span<const double> pt);

/// Quadrature of e along s over the box.
[[nodiscard]] double integrate(const Expr& e, const NumericSection& s);

/// Action integral of lambda along s.
[[nodiscard]] double action(const Lagrangian& lambda, const NumericSection& s);

struct ActionEstimate {
    double value = 0.0;
    /// |Q_N - Q_{N/2}| plus a roundoff floor.
    double error_estimate = 0.0;
};

[[nodiscard]] ActionEstimate action_with_estimate(const Lagrangian& lambda, const NumericSection& s);

/// Boundary bump prod ((x - a)(b - x))^4 normalized to peak 1; it vanishes to
/// fourth order on the boundary of the box.
[[nodiscard]] Expr bump(const Box& box);

/// One flow psi_t of the variation. Linear flows shift the section by
/// t * field; general flows substitute the section into psi(x, y, eps).
struct VariationSpec {
    std::vector<Expr> field;                ///< generator d psi / d eps at eps = 0
    std::optional<std::vector<Expr>> flow;  ///< psi^i(x, y, eps), if not linear
    std::size_t flow_parameter = 0;

    [[nodiscard]] VerticalField generator() const { return VerticalField{field}; }
};

/// Linear variation with the bump multiplied into every component.
[[nodiscard]] VariationSpec bumped_linear(const std::vector<Expr>& field, const Box& box);

struct VariationConfig {
    std::vector<VariationSpec> fields;
    double step = 1e-3;
    bool richardson = false;
};

/// Flowed section psi^k_{t_k} o ... o psi^1_{t_1} o s.
[[nodiscard]] NumericSection flowed_section(const NumericSection& s, std::span<const VariationSpec> fields,
                                            std::span<const double> t, std::uint32_t prolongation_order);

/// Central-difference i-th mixed derivative (i = 1 or 2) of the action at
/// t = 0. Throws SemanticError for other orders or too few fields.
[[nodiscard]] double finite_diff_variation(const Lagrangian& lambda, const NumericSection& s,
                                           const VariationConfig& vc, int order);

struct Tolerance {
    double rel = 1e-6;
    double abs = 1e-8;

    /// |a - b| <= max(rel * max(|a|, |b|), abs).
    [[nodiscard]] bool accepts(double a, double b) const;
};

struct CriticalReport {
    double residual = 0.0; ///< max |e_i| over quadrature nodes
    double threshold = 0.0;
    bool critical = false;
};

/// Criticality is accepted when the residual is at most max(tol.abs, tol.rel).
[[nodiscard]] CriticalReport check_critical(const Lagrangian& lambda, const NumericSection& s,
                                            const JetContext& ctx, const Tolerance& tol = {});

/// Raised by checks whose premise is a critical section.
class NotCritical : public Error {
public:
    explicit NotCritical(CriticalReport report);
    [[nodiscard]] const CriticalReport& report() const noexcept { return report_; }

private:
    CriticalReport report_;
};

struct SymmetryReport {
    double lhs = 0.0; ///< integral of xi1 ⌋ j xi2 ⌋ VE along s
    double rhs = 0.0; ///< integral of xi2 ⌋ j xi1 ⌋ VE along s
    double difference = 0.0;
    /// max pointwise |lhs - rhs| integrand difference; reported, not asserted.
    double pointwise_max = 0.0;
    bool passed = false;
    CriticalReport critical;
};

/// Throws NotCritical when s fails check_critical.
[[nodiscard]] SymmetryReport check_onshell_symmetry(const Lagrangian& lambda, const NumericSection& s,
                                                    const VerticalField& xi1, const VerticalField& xi2,
                                                    const JetContext& ctx, const Tolerance& tol = {});

struct SecondVariationReport {
    double finite_difference = 0.0;
    double vertical_differential = 0.0; ///< integral of xi1 ⌋ j xi2 ⌋ VE(lambda)
    double jacobi = 0.0;                ///< integral of xi1 ⌋ j xi2 ⌋ VE(lambda)*
    bool matches_vertical_differential = false;
    bool matches_jacobi = false;
    CriticalReport critical;
};

/// Second variation along a critical section against both bundle
/// morphisms. Throws NotCritical when s fails check_critical.
[[nodiscard]] SecondVariationReport check_second_variation(const Lagrangian& lambda, const NumericSection& s,
                                                           const VariationConfig& vc, const JetContext& ctx,
                                                           const Tolerance& tol = {});

} // namespace jetvar::numeric
