/**
 * @file variational.hpp
 * @brief Euler-Lagrange and Helmholtz morphisms, formal adjoints, the
 *        vertical differential of the Euler-Lagrange morphism (Jacobi
 *        morphism) and iterated quotient variations.
 *
 * Bilinear forms use one fixed slot convention throughout: the component
 * A(sigma, i, j) pairs an undifferentiated first field with the sigma-th
 * total derivative of the second field,
 *
 *     contract(xi1, xi2, A) = sum A(sigma, i, j) * xi1^i * D_sigma(xi2^j).
 */
#pragma once

#include "jetvar/context.hpp"
#include "jetvar/expr.hpp"
#include "jetvar/jetcalc.hpp"
#include "jetvar/multiindex.hpp"

#include <map>
#include <utility>
#include <vector>

namespace jetvar {

/// Density L of lambda = L v_X.
struct Lagrangian {
    Expr density;
    [[nodiscard]] std::uint32_t order() const { return jet_order(density); }
};

/// Components e_i of e_i omega^i wedge v_X.
struct SourceForm {
    std::vector<Expr> components;
    [[nodiscard]] std::size_t m() const noexcept { return components.size(); }
    [[nodiscard]] std::uint32_t order() const;
    [[nodiscard]] bool is_zero() const;
    friend bool operator==(const SourceForm&, const SourceForm&) = default;
};

struct BilinearKey {
    MultiIndex sigma;
    std::size_t first = 0;  ///< fiber index of the undifferentiated field
    std::size_t second = 0; ///< fiber index of the differentiated field

    friend bool operator==(const BilinearKey&, const BilinearKey&) = default;
    friend std::strong_ordering operator<=>(const BilinearKey& a, const BilinearKey& b)
    {
        if (auto c = a.sigma <=> b.sigma; c != 0) return c;
        if (auto c = a.first <=> b.first; c != 0) return c;
        return a.second <=> b.second;
    }
};

/// Finitely supported components A(sigma, i, j); zero components are never stored.
class BilinearForm {
public:
    BilinearForm() = default;
    BilinearForm(std::size_t n, std::size_t m) : n_(n), m_(m) {}

    [[nodiscard]] std::size_t n() const noexcept { return n_; }
    [[nodiscard]] std::size_t m() const noexcept { return m_; }

    [[nodiscard]] Expr get(const MultiIndex& sigma, std::size_t first, std::size_t second) const;
    void set(const MultiIndex& sigma, std::size_t first, std::size_t second, Expr value);
    void add(const MultiIndex& sigma, std::size_t first, std::size_t second, const Expr& value);

    [[nodiscard]] const std::map<BilinearKey, Expr>& components() const noexcept { return comps_; }
    [[nodiscard]] bool is_zero() const noexcept { return comps_.empty(); }
    /// Highest |sigma| carrying a nonzero component.
    [[nodiscard]] std::uint32_t max_order() const;

    friend BilinearForm operator-(const BilinearForm& a, const BilinearForm& b);
    friend BilinearForm operator+(const BilinearForm& a, const BilinearForm& b);
    friend BilinearForm operator*(const Expr& c, const BilinearForm& a);
    friend bool operator==(const BilinearForm& a, const BilinearForm& b);

private:
    void check(const MultiIndex& sigma, std::size_t first, std::size_t second) const;

    std::size_t n_ = 0;
    std::size_t m_ = 0;
    std::map<BilinearKey, Expr> comps_;
};

/// e_i = sum_sigma (-1)^|sigma| D_sigma(d L / d y^i_sigma).
[[nodiscard]] SourceForm euler_lagrange(const Lagrangian& lambda, const JetContext& ctx);

/// Helmholtz kernel H~ of a source form. The component
/// H^sigma_{ij} (omega^i_sigma tensor omega^j) is stored at
/// (sigma, first = j, second = i):
///
///     H^sigma_{ij} = d^sigma_i e_j
///                    - sum_rho (-1)^|sigma+rho| C(sigma+rho, rho) D_rho d^{sigma+rho}_j e_i
///
/// with C the multi-index binomial. The rho-sum stops where partials of e
/// vanish, which makes the formula total for source forms of any order.
[[nodiscard]] BilinearForm helmholtz(const SourceForm& e, const JetContext& ctx);

/// Skew-adjoint part (H~ - adjoint(H~)) / 2 of a Helmholtz kernel.
[[nodiscard]] BilinearForm helmholtz_skew(const BilinearForm& h, const JetContext& ctx);

/// A source form is locally variational iff its Helmholtz kernel vanishes.
[[nodiscard]] bool is_locally_variational(const SourceForm& e, const JetContext& ctx);

/// Formal adjoint under integration by parts:
///     A*(rho, j, i) = sum_{sigma >= rho} (-1)^|sigma| C(sigma, rho) D_{sigma-rho} A(sigma, i, j).
[[nodiscard]] BilinearForm adjoint(const BilinearForm& a, const JetContext& ctx);

/// Linearization of a source form: component (sigma, i, j) = d^sigma_j e_i.
[[nodiscard]] BilinearForm linearization(const SourceForm& e, const JetContext& ctx);

/// Vertical differential VE(lambda) of the Euler-Lagrange morphism.
[[nodiscard]] BilinearForm vertical_differential(const Lagrangian& lambda, const JetContext& ctx);

/// Jacobi morphism: adjoint of the vertical differential.
[[nodiscard]] BilinearForm jacobi(const Lagrangian& lambda, const JetContext& ctx);

/// sum A(sigma, i, j) xi1^i D_sigma(xi2^j).
[[nodiscard]] Expr contract(const VerticalField& xi1, const VerticalField& xi2, const BilinearForm& a);

/// xi ⌋ e = xi^i e_i.
[[nodiscard]] Expr contract(const VerticalField& xi, const SourceForm& e);

/// Right fold xi_1 ⌋ E(xi_2 ⌋ E(... xi_k ⌋ E(lambda))). Throws SemanticError
/// on an empty field list.
[[nodiscard]] Lagrangian quotient_variation(const Lagrangian& lambda, const std::vector<VerticalField>& fields,
                                            const JetContext& ctx);

/// xi1 ⌋ E(xi2 ⌋ E(lambda)).
[[nodiscard]] Lagrangian hessian(const Lagrangian& lambda, const VerticalField& xi1, const VerticalField& xi2,
                                 const JetContext& ctx);

/// coefficient * D_rho(e_field): one generator term of the differential
/// ideal spanned by the Euler-Lagrange components.
struct IdealTerm {
    Expr coefficient;
    std::size_t field = 0;
    MultiIndex rho;
};

struct SecondVariationSplit {
    /// sum (-1)^|sigma| xi1^j D_sigma(d^sigma_j xi2^i e_i): vanishes on critical sections.
    Expr s1;
    /// sum (-1)^|sigma| xi1^j D_sigma(xi2^i d^sigma_j e_i) = xi1 ⌋ j xi2 ⌋ VE(lambda)*.
    Expr s2;
    /// s1 written as sum coefficient * D_rho(e_i), built alongside s1.
    std::vector<IdealTerm> s1_ideal;
    SourceForm euler_lagrange;
};

[[nodiscard]] SecondVariationSplit second_variation_decomposition(const Lagrangian& lambda,
                                                                  const VerticalField& xi1,
                                                                  const VerticalField& xi2,
                                                                  const JetContext& ctx);

/// Evaluates an ideal expansion back into an expression, given e.
[[nodiscard]] Expr expand_ideal(const std::vector<IdealTerm>& terms, const SourceForm& e);

/// Critical relations solved for highest derivatives, e.g. y_tt -> -y.
struct OnShellRelation {
    JetVar lhs;
    Expr rhs;
};

/// Replaces every y^i_tau with tau >= lhs.sigma by D_{tau - sigma}(rhs),
/// repeating until no reducible coordinate remains. Throws SemanticError if
/// the rewriting does not terminate within a fixed number of passes.
[[nodiscard]] Expr reduce_on_shell(const Expr& e, const std::vector<OnShellRelation>& relations);

[[nodiscard]] BilinearForm reduce_on_shell(const BilinearForm& a, const std::vector<OnShellRelation>& relations);

} // namespace jetvar
