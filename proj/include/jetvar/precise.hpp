/**
 * @file precise.hpp
 * @brief Extended-precision evaluation of expressions.
 *
 * Expanded polynomials (bump-weighted variations in particular) carry large
 * coefficients that cancel; evaluating them with 50 significant digits keeps
 * the final double-precision value accurate.
 */
#pragma once

#include "jetvar/expr.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <functional>

namespace jetvar {

using Real = boost::multiprecision::cpp_bin_float_50;

struct PreciseValuation {
    std::function<Real(std::size_t lambda)> base;
    std::function<Real(const JetVar&)> jet;
    std::function<Real(std::size_t param)> param;
};

/// Same contract as evaluate(), in extended precision.
[[nodiscard]] Real evaluate_precise(const Expr& e, const PreciseValuation& v);

[[nodiscard]] Real to_real(const Rational& q);

} // namespace jetvar
