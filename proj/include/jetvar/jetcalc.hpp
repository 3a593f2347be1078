/**
 * @file jetcalc.hpp
 * @brief Total derivatives, prolongations of vertical fields and the
 *        horizontal/vertical differentials of functions on jet spaces.
 */
#pragma once

#include "jetvar/context.hpp"
#include "jetvar/expr.hpp"
#include "jetvar/multiindex.hpp"

#include <map>
#include <utility>
#include <vector>

namespace jetvar {

/// xi = xi^i d/dy^i, one component per field. Components may depend on jet
/// coordinates of any order; order 0 gives a vertical field on Y.
struct VerticalField {
    std::vector<Expr> components;

    [[nodiscard]] std::size_t m() const noexcept { return components.size(); }
    [[nodiscard]] std::uint32_t order() const;

    /// The constant field d/dy^i in a fiber of dimension m.
    static VerticalField unit(std::size_t m, std::size_t i);
};

/// Orders (i, sigma) keys by field, then graded-lex multi-index.
struct JetVarLess {
    bool operator()(const JetVar& a, const JetVar& b) const
    {
        if (a.field != b.field) return a.field < b.field;
        return a.sigma < b.sigma;
    }
};

using JetMap = std::map<JetVar, Expr, JetVarLess>;

/// D_lambda e = d_lambda e + sum_{j,sigma} y^j_{sigma+lambda} d^sigma_j e,
/// summed over the coordinates that actually occur in e.
[[nodiscard]] Expr total_derivative(const Expr& e, std::size_t lambda);

/// D_sigma e; D_0 is the identity.
[[nodiscard]] Expr total_derivative(const Expr& e, const MultiIndex& sigma);

/// Components D_sigma xi^i of j_r xi for every |sigma| <= r.
[[nodiscard]] JetMap prolong(const VerticalField& xi, std::uint32_t r, std::size_t n);

/// Coefficients of d^lambda in d_H f.
[[nodiscard]] std::vector<Expr> d_horizontal(const Expr& f, std::size_t n);

/// Nonzero coefficients of omega^i_sigma in d_V f.
[[nodiscard]] JetMap d_vertical(const Expr& f);

} // namespace jetvar
