#include "jetvar/jetcalc.hpp"

#include <algorithm>

namespace jetvar {

std::uint32_t VerticalField::order() const
{
    std::uint32_t r = 0;
    for (auto& c : components) r = std::max(r, jet_order(c));
    return r;
}

VerticalField VerticalField::unit(std::size_t m, std::size_t i)
{
    VerticalField xi{std::vector<Expr>(m)};
    xi.components.at(i) = Expr(1);
    return xi;
}

Expr total_derivative(const Expr& e, std::size_t lambda)
{
    return apply_derivation(e, [lambda](const Atom& a) -> Expr {
        switch (a.kind()) {
        case AtomKind::Jet: return Expr::jet(a.index(), a.sigma().plus_unit(lambda));
        case AtomKind::Base: return Expr(a.index() == lambda ? 1 : 0);
        default: return Expr();
        }
    });
}

Expr total_derivative(const Expr& e, const MultiIndex& sigma)
{
    Expr out = e;
    for (std::size_t lambda = 0; lambda < sigma.dim(); ++lambda) {
        for (std::uint32_t k = 0; k < sigma[lambda] && !out.is_zero(); ++k) {
            out = total_derivative(out, lambda);
        }
    }
    return out;
}

JetMap prolong(const VerticalField& xi, std::uint32_t r, std::size_t n)
{
    JetMap out;
    for (std::size_t i = 0; i < xi.m(); ++i) {
        // Walk the graded-lex list so each D_sigma reuses a cached D_{sigma - 1_lambda}.
        std::map<MultiIndex, Expr> done;
        for (auto& sigma : enumerate_up_to(n, r)) {
            Expr value;
            if (sigma.is_zero()) {
                value = xi.components[i];
            } else {
                std::size_t lambda = 0;
                while (sigma[lambda] == 0) ++lambda;
                auto prev = sigma - MultiIndex::unit(n, lambda);
                value = total_derivative(done.at(prev), lambda);
            }
            done.emplace(sigma, value);
            out.emplace(JetVar{i, sigma}, std::move(value));
        }
    }
    return out;
}

std::vector<Expr> d_horizontal(const Expr& f, std::size_t n)
{
    std::vector<Expr> out;
    out.reserve(n);
    for (std::size_t lambda = 0; lambda < n; ++lambda) out.push_back(total_derivative(f, lambda));
    return out;
}

JetMap d_vertical(const Expr& f)
{
    JetMap out;
    for (auto& v : jet_variables(f)) {
        Expr c = partial(f, v);
        if (!c.is_zero()) out.emplace(v, std::move(c));
    }
    return out;
}

} // namespace jetvar
