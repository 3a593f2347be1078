// Shared fixtures and random generators for the test binaries.
#pragma once

#include "jetvar/context.hpp"
#include "jetvar/expr.hpp"
#include "jetvar/jetcalc.hpp"
#include "jetvar/textio.hpp"
#include "jetvar/variational.hpp"

#include <random>
#include <string>
#include <vector>

namespace jetvar::testing {

inline JetContext make_context(std::size_t n, std::size_t m)
{
    static const std::vector<std::string> base1{"t"};
    static const std::vector<std::string> base2{"x", "z"};
    static const std::vector<std::string> fibers{"u", "v"};
    std::vector<std::string> base = n == 1 ? base1 : base2;
    return JetContext(base, std::vector<std::string>(fibers.begin(), fibers.begin() + static_cast<long>(m)));
}

inline JetContext oscillator_context() { return JetContext({"t"}, {"y"}); }

/// Parses an expression in ctx; tests write fixtures in the input syntax.
inline Expr P(const std::string& src, const JetContext& ctx) { return parse_expr(src, ctx); }

class Generator {
public:
    explicit Generator(unsigned seed) : rng_(seed) {}

    int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

    Rational coefficient()
    {
        int num = 0;
        while (num == 0) num = uniform(-5, 5);
        return Rational(num, uniform(1, 3));
    }

    Expr jet(std::size_t n, std::size_t m, std::uint32_t max_order)
    {
        auto order = static_cast<std::uint32_t>(uniform(0, static_cast<int>(max_order)));
        auto all = enumerate_exact(n, order);
        auto sigma = all[static_cast<std::size_t>(uniform(0, static_cast<int>(all.size()) - 1))];
        return Expr::jet(static_cast<std::size_t>(uniform(0, static_cast<int>(m) - 1)), sigma);
    }

    Expr monomial(std::size_t n, std::size_t m, std::uint32_t max_order, int max_factors, bool with_base = true)
    {
        Expr out = coefficient();
        int factors = uniform(1, max_factors);
        for (int k = 0; k < factors; ++k) {
            if (with_base && uniform(0, 5) == 0) {
                out *= Expr::base(static_cast<std::size_t>(uniform(0, static_cast<int>(n) - 1)));
            } else {
                out *= jet(n, m, max_order);
            }
        }
        return out;
    }

    Expr polynomial(std::size_t n, std::size_t m, std::uint32_t max_order, int max_terms, int max_factors = 3,
                    bool with_base = true)
    {
        Expr out;
        int terms = uniform(1, max_terms);
        for (int k = 0; k < terms; ++k) out += monomial(n, m, max_order, max_factors, with_base);
        return out;
    }

    /// Polynomial plus occasional elementary functions of jet variables.
    Expr smooth(std::size_t n, std::size_t m, std::uint32_t max_order, int max_terms)
    {
        Expr out = polynomial(n, m, max_order, max_terms);
        if (uniform(0, 1) == 0) out += coefficient() * Expr::func(Fn::Sin, jet(n, m, max_order));
        if (uniform(0, 2) == 0) out += jet(n, m, max_order) * Expr::func(Fn::Exp, jet(n, m, 0));
        return out;
    }

    VerticalField field(std::size_t n, std::size_t m, std::uint32_t max_order, int max_terms = 2)
    {
        VerticalField xi;
        for (std::size_t i = 0; i < m; ++i) xi.components.push_back(polynomial(n, m, max_order, max_terms, 2));
        return xi;
    }

    BilinearForm bilinear(std::size_t n, std::size_t m, std::uint32_t max_order, int entries)
    {
        BilinearForm a(n, m);
        auto sigmas = enumerate_up_to(n, max_order);
        for (int k = 0; k < entries; ++k) {
            auto sigma = sigmas[static_cast<std::size_t>(uniform(0, static_cast<int>(sigmas.size()) - 1))];
            auto i = static_cast<std::size_t>(uniform(0, static_cast<int>(m) - 1));
            auto j = static_cast<std::size_t>(uniform(0, static_cast<int>(m) - 1));
            a.add(sigma, i, j, polynomial(n, m, 1, 2, 2));
        }
        return a;
    }

    std::mt19937& engine() { return rng_; }

private:
    std::mt19937 rng_;
};

} // namespace jetvar::testing
