#include "jetvar/error.hpp"
#include "jetvar/textio.hpp"
#include "jetvar/variational.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

using namespace jetvar;
using jetvar::testing::Generator;
using jetvar::testing::P;

namespace {

const JetContext& osc()
{
    static const JetContext c({"t"}, {"y"});
    return c;
}

const JetContext& beam()
{
    static const JetContext c({"x"}, {"y"});
    return c;
}

Lagrangian oscillator() { return {P("1/2*(y_t^2 - y^2)", osc())}; }

BilinearForm single(const MultiIndex& sigma, const Expr& v)
{
    BilinearForm a(1, 1);
    a.set(sigma, 0, 0, v);
    return a;
}

VerticalField field(const std::string& src, const JetContext& ctx) { return {{P(src, ctx)}}; }

} // namespace

TEST(EulerLagrange, Oscillator)
{
    auto e = euler_lagrange(oscillator(), osc());
    ASSERT_EQ(e.m(), 1u);
    EXPECT_EQ(e.components[0], P("-(y + y_tt)", osc()));
}

TEST(EulerLagrange, HigherOrder)
{
    auto e = euler_lagrange({P("1/2*y_xx^2", beam())}, beam());
    EXPECT_EQ(e.components[0], P("y_xxxx", beam()));
}

TEST(EulerLagrange, NonlinearThirdOrderTerm)
{
    // y*y_t*y_tt = D_t(1/2*y*y_t^2) - 1/2*y_t^3.
    auto lhs = euler_lagrange({P("y*y_t*y_tt", osc())}, osc());
    auto rhs = euler_lagrange({P("-1/2*y_t^3", osc())}, osc());
    EXPECT_EQ(lhs, rhs);
    EXPECT_EQ(rhs.components[0], P("3*y_t*y_tt", osc()));
}

TEST(EulerLagrange, OrderBound)
{
    Generator g(31);
    for (int k = 0; k < 20; ++k) {
        auto ctx = jetvar::testing::make_context(2, 2);
        Lagrangian l{g.smooth(2, 2, 2, 5)};
        EXPECT_LE(euler_lagrange(l, ctx).order(), 2 * l.order());
    }
}

TEST(EulerLagrange, OpaqueFirstOrder)
{
    JetContext c({"t"}, {"q"}, {OpaqueFunction{"g", {JetVar{0, MultiIndex{0}}}}});
    auto e = euler_lagrange({P("1/2*g(q)*q_t^2", c)}, c);
    EXPECT_EQ(e.components[0], P("-g(q)*q_tt - 1/2*g_{q}(q)*q_t^2", c));
}

TEST(Helmholtz, FirstDerivativeSourceIsNotVariational)
{
    SourceForm e{{P("y_t", osc())}};
    auto h = helmholtz(e, osc());
    EXPECT_EQ(h.get(MultiIndex{1}, 0, 0), Expr(2));
    EXPECT_EQ(h.components().size(), 1u);
    EXPECT_FALSE(is_locally_variational(e, osc()));
}

TEST(Helmholtz, SecondDerivativeSourceIsVariational)
{
    SourceForm e{{P("y_tt", osc())}};
    EXPECT_TRUE(helmholtz(e, osc()).is_zero());
    EXPECT_TRUE(is_locally_variational(e, osc()));
}

TEST(Helmholtz, BruteForceSingleField)
{
    // Oracle: for n = m = 1 the multi-index binomial is the scalar binomial,
    // so the formula can be summed independently here.
    auto e = SourceForm{{P("y*y_t^2 + t*y_ttt + sin(y_t)*y_tt", osc())}};
    auto h = helmholtz(e, osc());
    std::uint32_t r = e.order();
    auto binom = [](unsigned a, unsigned b) {
        long v = 1;
        for (unsigned k = 1; k <= b; ++k) v = v * static_cast<long>(a - b + k) / static_cast<long>(k);
        return v;
    };
    for (std::uint32_t s = 0; s <= r; ++s) {
        Expr expect = partial(e.components[0], JetVar{0, MultiIndex{s}});
        for (std::uint32_t q = 0; s + q <= r; ++q) {
            long sign = (s + q) % 2 == 0 ? 1 : -1;
            expect -= Expr(sign * binom(s + q, q)) *
                      total_derivative(partial(e.components[0], JetVar{0, MultiIndex{s + q}}), MultiIndex{q});
        }
        EXPECT_EQ(h.get(MultiIndex{s}, 0, 0), expect) << "sigma order " << s;
    }
}

TEST(Helmholtz, SkewPart)
{
    auto h = helmholtz(SourceForm{{P("y_t", osc())}}, osc());
    auto skew = helmholtz_skew(h, osc());
    EXPECT_EQ(skew, h);
    EXPECT_EQ(adjoint(skew, osc()), Expr(-1) * skew);
}

TEST(Helmholtz, KernelIsSkewAdjoint)
{
    Generator g(32);
    auto ctx = jetvar::testing::make_context(1, 2);
    for (int k = 0; k < 10; ++k) {
        SourceForm e{{g.polynomial(1, 2, 2, 3), g.polynomial(1, 2, 2, 3)}};
        auto h = helmholtz(e, ctx);
        EXPECT_EQ(adjoint(h, ctx), Expr(-1) * h);
    }
}

TEST(Adjoint, Examples)
{
    auto a = adjoint(single(MultiIndex{1}, Expr(1)), osc());
    EXPECT_EQ(a, single(MultiIndex{1}, Expr(-1)));
    auto f = single(MultiIndex{0}, P("exp(y)", osc()));
    EXPECT_EQ(adjoint(f, osc()), f);
    auto dd = single(MultiIndex{2}, Expr(1));
    EXPECT_EQ(adjoint(dd, osc()), dd);
}

TEST(Adjoint, VariableCoefficient)
{
    // (a xi_t)* = -D_t(a .) = -a xi_t - a_t xi with a = y.
    auto a = adjoint(single(MultiIndex{1}, P("y", osc())), osc());
    BilinearForm expect(1, 1);
    expect.set(MultiIndex{1}, 0, 0, P("-y", osc()));
    expect.set(MultiIndex{0}, 0, 0, P("-y_t", osc()));
    EXPECT_EQ(a, expect);
}

TEST(Adjoint, Involution)
{
    Generator g(33);
    for (int k = 0; k < 20; ++k) {
        std::size_t n = 1 + static_cast<std::size_t>(k % 2);
        auto ctx = jetvar::testing::make_context(n, 2);
        auto a = g.bilinear(n, 2, 3, 5);
        EXPECT_EQ(adjoint(adjoint(a, ctx), ctx), a);
    }
}

TEST(Adjoint, IntegrationByPartsOracle)
{
    // With coefficients in base coordinates only, xi1.A(xi2) - xi2.A*(xi1) is a total
    // divergence, so its Euler-Lagrange form vanishes.
    JetContext ctx({"x", "z"}, {"u", "v"});
    Generator g(34);
    for (int k = 0; k < 10; ++k) {
        BilinearForm a(2, 2);
        for (auto& sigma : enumerate_up_to(2, 2)) {
            auto i = static_cast<std::size_t>(g.uniform(0, 1));
            auto j = static_cast<std::size_t>(g.uniform(0, 1));
            a.set(sigma, i, j, Expr(g.coefficient()) * pow(Expr::base(g.uniform(0, 1)), g.uniform(0, 2)));
        }
        auto adj = adjoint(a, ctx);
        Expr uu = Expr::jet(0, MultiIndex::zero(2));
        Expr vv = Expr::jet(1, MultiIndex::zero(2));
        VerticalField u{{uu, vv}};
        VerticalField v{{vv, uu + vv}};
        Lagrangian diff{contract(u, v, a) - contract(v, u, adj)};
        EXPECT_TRUE(euler_lagrange(diff, ctx).is_zero());
    }
}

TEST(VerticalDifferential, Oscillator)
{
    auto ve = vertical_differential(oscillator(), osc());
    BilinearForm expect(1, 1);
    expect.set(MultiIndex{0}, 0, 0, Expr(-1));
    expect.set(MultiIndex{2}, 0, 0, Expr(-1));
    EXPECT_EQ(ve, expect);
    EXPECT_EQ(jacobi(oscillator(), osc()), ve);
    EXPECT_EQ(contract(VerticalField::unit(1, 0), VerticalField::unit(1, 0), ve), Expr(-1));
}

TEST(VerticalDifferential, FlatGeodesics)
{
    JetContext c({"t"}, {"q1", "q2"});
    Lagrangian l{P("1/2*(q1_t^2 + q2_t^2)", c)};
    auto ve = vertical_differential(l, c);
    BilinearForm expect(1, 2);
    expect.set(MultiIndex{2}, 0, 0, Expr(-1));
    expect.set(MultiIndex{2}, 1, 1, Expr(-1));
    EXPECT_EQ(ve, expect);
    EXPECT_EQ(jacobi(l, c), expect);
}

TEST(VerticalDifferential, Beam)
{
    auto ve = vertical_differential({P("1/2*y_xx^2", beam())}, beam());
    EXPECT_EQ(ve, single(MultiIndex{4}, Expr(1)));
    EXPECT_EQ(jacobi({P("1/2*y_xx^2", beam())}, beam()), ve);
}

TEST(VerticalDifferential, JacobiEqualsVerticalDifferentialForEulerLagrangeForms)
{
    // The vertical differential of an Euler-Lagrange form is formally
    // self-adjoint, including off shell.
    EXPECT_EQ(jacobi({P("y*y_t*y_tt", osc())}, osc()), vertical_differential({P("y*y_t*y_tt", osc())}, osc()));
    Generator g(35);
    for (int k = 0; k < 15; ++k) {
        auto ctx = jetvar::testing::make_context(1 + static_cast<std::size_t>(k % 2), 2);
        Lagrangian l{g.polynomial(ctx.n(), 2, 2, 4)};
        EXPECT_EQ(jacobi(l, ctx), vertical_differential(l, ctx));
    }
}

TEST(VerticalDifferential, LinearizationMatchesDefinition)
{
    Generator g(36);
    auto ctx = jetvar::testing::make_context(2, 2);
    for (int k = 0; k < 10; ++k) {
        SourceForm e{{g.smooth(2, 2, 2, 3), g.smooth(2, 2, 2, 3)}};
        auto xi1 = g.field(2, 2, 1);
        auto xi2 = g.field(2, 2, 1);
        // xi1^i * sum_{j, sigma} d e_i / d y^j_sigma * D_sigma xi2^j
        Expr expect;
        auto pr = prolong(xi2, e.order(), 2);
        for (std::size_t i = 0; i < 2; ++i) {
            for (auto& [v, d] : d_vertical(e.components[i])) expect += xi1.components[i] * d * pr.at(v);
        }
        EXPECT_EQ(contract(xi1, xi2, linearization(e, ctx)), expect);
    }
}

TEST(QuotientVariation, FirstOrderIsContraction)
{
    auto v = quotient_variation(oscillator(), {VerticalField::unit(1, 0)}, osc());
    EXPECT_EQ(v.density, P("-y - y_tt", osc()));
    EXPECT_THROW((void)quotient_variation(oscillator(), {}, osc()), SemanticError);
}

TEST(QuotientVariation, HessianDiffersFromContractionByDivergence)
{
    auto u = VerticalField::unit(1, 0);
    auto h = hessian(oscillator(), u, u, osc());
    EXPECT_EQ(h.density, Expr(-1));
    Lagrangian diff{h.density - contract(u, u, vertical_differential(oscillator(), osc()))};
    EXPECT_TRUE(euler_lagrange(diff, osc()).is_zero());

    auto xi = field("y", osc());
    auto h2 = hessian(oscillator(), xi, xi, osc());
    Lagrangian diff2{h2.density - contract(xi, xi, vertical_differential(oscillator(), osc()))};
    EXPECT_EQ(h2.density, P("-2*y^2 - 2*y*y_tt", osc()));
    EXPECT_FALSE(euler_lagrange(diff2, osc()).is_zero());
}

TEST(QuotientVariation, ThreeFields)
{
    Lagrangian l{P("y^4", osc())};
    auto u = VerticalField::unit(1, 0);
    EXPECT_EQ(quotient_variation(l, {u, u, u}, osc()).density, P("24*y", osc()));
}

TEST(SecondVariationSplit, ConstantField)
{
    auto u = VerticalField::unit(1, 0);
    auto split = second_variation_decomposition(oscillator(), u, u, osc());
    EXPECT_TRUE(split.s1.is_zero());
    EXPECT_EQ(split.s2, hessian(oscillator(), u, u, osc()).density);
}

TEST(SecondVariationSplit, FiberDependentFieldVanishesOnShell)
{
    auto xi2 = field("y", osc());
    auto xi1 = VerticalField::unit(1, 0);
    auto split = second_variation_decomposition(oscillator(), xi1, xi2, osc());
    EXPECT_FALSE(split.s1.is_zero());
    std::vector<OnShellRelation> rel{{JetVar{0, MultiIndex{2}}, P("-y", osc())}};
    EXPECT_TRUE(reduce_on_shell(split.s1, rel).is_zero());
    EXPECT_EQ(expand_ideal(split.s1_ideal, split.euler_lagrange), split.s1);
}

TEST(SecondVariationSplit, IdentitiesOnRandomInputs)
{
    Generator g(37);
    for (int k = 0; k < 10; ++k) {
        auto n = 1 + static_cast<std::size_t>(k % 2);
        auto ctx = jetvar::testing::make_context(n, 2);
        Lagrangian l{g.polynomial(n, 2, 2, 4)};
        auto xi1 = g.field(n, 2, 1);
        auto xi2 = g.field(n, 2, 1);
        auto split = second_variation_decomposition(l, xi1, xi2, ctx);
        EXPECT_EQ(split.s1 + split.s2, hessian(l, xi1, xi2, ctx).density);
        EXPECT_EQ(split.s2, contract(xi1, xi2, jacobi(l, ctx)));
        EXPECT_EQ(split.s2, contract(xi1, xi2, vertical_differential(l, ctx)));
        EXPECT_EQ(expand_ideal(split.s1_ideal, split.euler_lagrange), split.s1);
        EXPECT_TRUE(contract(xi1, xi2, helmholtz(split.euler_lagrange, ctx)).is_zero());
    }
}

TEST(OnShell, ReducesDerivativesOfRelations)
{
    std::vector<OnShellRelation> rel{{JetVar{0, MultiIndex{2}}, P("-y", osc())}};
    EXPECT_EQ(reduce_on_shell(P("y_tttt + y_ttt + y_tt", osc()), rel), P("y - y_t - y", osc()));
    auto ve = vertical_differential({P("y*y_t*y_tt", osc())}, osc());
    auto reduced = reduce_on_shell(ve, rel);
    for (auto& [k, v] : reduced.components()) EXPECT_LE(jet_order(v), 1u);
}

TEST(OnShell, DivergentRewritingIsReported)
{
    std::vector<OnShellRelation> rel{{JetVar{0, MultiIndex{1}}, P("y_t + 1", osc())}};
    EXPECT_THROW((void)reduce_on_shell(P("y_t", osc()), rel), SemanticError);
}

TEST(BilinearForm, Arithmetic)
{
    auto a = single(MultiIndex{1}, Expr(2));
    auto b = single(MultiIndex{1}, Expr(-2));
    EXPECT_TRUE((a + b).is_zero());
    EXPECT_EQ(a - b, Expr(2) * a);
    EXPECT_EQ(a.max_order(), 1u);
    EXPECT_THROW(a.set(MultiIndex{1}, 1, 0, Expr(1)), DimensionError);
    EXPECT_TRUE(contract(VerticalField::unit(1, 0), VerticalField::unit(1, 0), BilinearForm(1, 1)).is_zero());
}
