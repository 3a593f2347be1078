/**
 * @file expr.hpp
 * @brief Immutable symbolic expressions over jet coordinates.
 *
 * An Expr is always held in canonical form: a sparse polynomial with exact
 * rational coefficients whose generators ("atoms") are jet and base
 * coordinates, pi, named parameters, elementary function applications,
 * opaque function symbols (with formal partial derivatives) and reciprocals
 * of non-monomial polynomials. Atom arguments are themselves canonical, so
 * two expressions that are equal as polynomials in these generators compare
 * equal structurally. No trigonometric or radical identities are applied.
 *
 * Expressions share subtrees freely and are safe to use from several threads.
 */
#pragma once

#include "jetvar/context.hpp"
#include "jetvar/multiindex.hpp"

#include <gmpxx.h>

#include <compare>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace jetvar {

using Rational = mpq_class;

enum class AtomKind : std::uint8_t { Jet, Base, Pi, Param, Opaque, Func, Recip };

enum class Fn : std::uint8_t { Sin, Cos, Exp, Log, Sqrt };

[[nodiscard]] const char* fn_name(Fn f) noexcept;
[[nodiscard]] std::optional<Fn> fn_from_name(const std::string& name) noexcept;

namespace detail {
struct Poly;
struct AtomNode;
} // namespace detail

class Atom;

class Expr {
public:
    /// The zero polynomial.
    Expr();
    Expr(const Rational& c); // NOLINT(google-explicit-constructor)
    Expr(long c);            // NOLINT(google-explicit-constructor)
    Expr(int c) : Expr(static_cast<long>(c)) {} // NOLINT(google-explicit-constructor)

    static Expr jet(std::size_t field, MultiIndex sigma);
    static Expr jet(const JetVar& v) { return jet(v.field, v.sigma); }
    static Expr base(std::size_t lambda);
    static Expr coordinate(const Coordinate& c);
    static Expr pi();
    static Expr param(std::size_t index);
    static Expr func(Fn f, const Expr& arg);
    /// Formal partial derivative `deriv` (counts per argument slot) of the
    /// opaque function `id` applied to `args`.
    static Expr opaque(std::size_t id, std::vector<Expr> args, MultiIndex deriv);
    static Expr opaque(std::size_t id, std::vector<Expr> args);
    static Expr from_atom(const Atom& a, int exponent = 1);

    [[nodiscard]] bool is_zero() const noexcept;
    [[nodiscard]] bool is_constant() const noexcept;
    /// Value if the expression is a rational constant.
    [[nodiscard]] std::optional<Rational> constant_value() const;
    [[nodiscard]] std::size_t term_count() const noexcept;
    [[nodiscard]] std::size_t hash() const noexcept;

    [[nodiscard]] const detail::Poly& poly() const noexcept { return *p_; }

    friend Expr operator+(const Expr& a, const Expr& b);
    friend Expr operator-(const Expr& a, const Expr& b);
    friend Expr operator*(const Expr& a, const Expr& b);
    /// Throws DivisionByZero if b is identically zero.
    friend Expr operator/(const Expr& a, const Expr& b);
    friend Expr operator-(const Expr& a);
    Expr& operator+=(const Expr& b) { return *this = *this + b; }
    Expr& operator-=(const Expr& b) { return *this = *this - b; }
    Expr& operator*=(const Expr& b) { return *this = *this * b; }

    friend bool operator==(const Expr& a, const Expr& b);
    /// Total order used for canonical sorting of atom arguments.
    friend std::strong_ordering operator<=>(const Expr& a, const Expr& b);

private:
    explicit Expr(std::shared_ptr<const detail::Poly> p) : p_(std::move(p)) {}
    friend struct ExprBuilder;

    std::shared_ptr<const detail::Poly> p_;
};

/// Integer power; negative exponents of non-monomials become reciprocal atoms.
[[nodiscard]] Expr pow(const Expr& base, int exponent);

class Atom {
public:
    [[nodiscard]] AtomKind kind() const noexcept;
    /// Field (Jet), base index (Base), parameter index (Param), function id
    /// (Opaque) or Fn value (Func).
    [[nodiscard]] std::size_t index() const noexcept;
    /// Derivative multi-index (Jet), or derivative counts per slot (Opaque).
    [[nodiscard]] const MultiIndex& sigma() const noexcept;
    [[nodiscard]] const std::vector<Expr>& args() const noexcept;
    [[nodiscard]] std::size_t hash() const noexcept;
    [[nodiscard]] std::uint32_t jet_order() const noexcept;

    friend bool operator==(const Atom& a, const Atom& b);
    friend std::strong_ordering operator<=>(const Atom& a, const Atom& b);

private:
    explicit Atom(std::shared_ptr<const detail::AtomNode> n) : n_(std::move(n)) {}
    friend struct ExprBuilder;

    std::shared_ptr<const detail::AtomNode> n_;
};

struct Factor {
    Atom atom;
    int exponent;
    friend bool operator==(const Factor&, const Factor&) = default;
};

/// Factors sorted ascending by atom, exponents nonzero.
using Monomial = std::vector<Factor>;

struct Term {
    Monomial monomial;
    Rational coef;
};

/// Canonical monomial order: total degree, then highest jet order, then
/// lexicographic from the largest atom down.
[[nodiscard]] std::strong_ordering compare_monomials(const Monomial& a, const Monomial& b);

namespace detail {

struct Poly {
    std::vector<Term> terms; ///< ascending monomial order, nonzero coefficients
    std::size_t hash = 0;
    std::uint32_t jet_order = 0;
};

struct AtomNode {
    AtomKind kind;
    std::size_t index = 0;
    MultiIndex sigma{};
    std::vector<Expr> args{};
    std::size_t hash = 0;
    std::uint32_t jet_order = 0;
};

} // namespace detail

/// Re-canonicalizes e from its leaves. Expressions are kept canonical by
/// every constructor, so this is the identity up to structural sharing; it
/// is idempotent and exposed for callers that want an explicit normal form.
[[nodiscard]] Expr simplify(const Expr& e);

/// Formal partial derivative, treating all jet coordinates as independent.
[[nodiscard]] Expr partial(const Expr& e, const Coordinate& c);

/// Maximal |sigma| over jet coordinates occurring anywhere in e.
[[nodiscard]] std::uint32_t jet_order(const Expr& e);

struct CoordinateLess {
    bool operator()(const Coordinate& a, const Coordinate& b) const;
};
using Bindings = std::map<Coordinate, Expr, CoordinateLess>;

/// Simultaneous substitution of coordinates; the result is canonical.
[[nodiscard]] Expr substitute(const Expr& e, const Bindings& bindings);

/// Substitutes named parameters by index.
[[nodiscard]] Expr substitute_params(const Expr& e, const std::map<std::size_t, Expr>& bindings);

/// Every jet coordinate occurring in e (including inside atom arguments).
[[nodiscard]] std::vector<JetVar> jet_variables(const Expr& e);

/// True if any base coordinate occurs explicitly in e.
[[nodiscard]] bool depends_on_base(const Expr& e);

/// Generic derivation: extends `leaf` (the derivative of Jet/Base/Pi/Param
/// atoms) to all of e by the Leibniz and chain rules.
[[nodiscard]] Expr apply_derivation(const Expr& e, const std::function<Expr(const Atom&)>& leaf);

/// Structural validation against a context; throws SemanticError.
void validate(const Expr& e, const JetContext& ctx);

/// Numeric values for the leaves of an expression.
struct Valuation {
    std::function<double(std::size_t lambda)> base;
    std::function<double(const JetVar&)> jet;
    std::function<double(std::size_t param)> param;
};

/// Double-precision evaluation. Throws EvaluationError on domain errors or
/// when a leaf has no value (opaque functions never do).
[[nodiscard]] double evaluate(const Expr& e, const Valuation& v);

[[nodiscard]] double to_double(const Rational& q);

} // namespace jetvar

template <>
struct std::hash<jetvar::Expr> {
    std::size_t operator()(const jetvar::Expr& e) const noexcept { return e.hash(); }
};
