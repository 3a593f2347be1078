// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include "jetvar/cli.hpp"
#include "jetvar/jetcalc.hpp"
#include "jetvar/numeric.hpp"
#include "jetvar/problem.hpp"
#include "jetvar/textio.hpp"
#include "jetvar/variational.hpp"

#include "support.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

using namespace jetvar;
using jetvar::testing::Generator;
using jetvar::testing::make_context;

namespace {

std::string problem(const std::string& name) { return std::string(JETVAR_PROBLEMS_DIR) + "/" + name; }

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what)
    {
        if (!ok) {
            pass = false;
            if (!detail.empty()) detail += "; ";
            detail += what;
        }
    }
};

std::string fmt(const char* f, double a, double b = 0.0)
{
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

int run_cli(std::vector<std::string> args, std::string* out = nullptr)
{
    args.insert(args.begin(), "jetvar");
    std::vector<const char*> argv;
    for (auto& a : args) argv.push_back(a.c_str());
    std::ostringstream o;
    std::ostringstream e;
    int status = cli::main_entry(static_cast<int>(argv.size()), argv.data(), o, e);
    if (out) *out = o.str();
    return status;
}

numeric::NumericSection section_of(const ProblemFile& p, const std::string& name, std::uint32_t order)
{
    const auto& nd = *p.numeric;
    return numeric::NumericSection(p.section(name).components, numeric::Box{nd.lower, nd.upper}, nd.nodes, order);
}

// Christoffel form of the geodesic equations for a symbolic metric.
Outcome geodesic_fixture()
{
    Outcome o;
    auto p = load_problem(problem("geodesic.jv"));
    const auto& ctx = p.ctx;
    auto g = [&](std::size_t a, std::size_t b) {
        static const char* names[2][2] = {{"g11(q1, q2)", "g12(q1, q2)"}, {"g12(q1, q2)", "g22(q1, q2)"}};
        return parse_expr(names[a][b], ctx);
    };
    auto dg = [&](std::size_t a, std::size_t b, std::size_t c) { return partial(g(a, b), JetVar{c, MultiIndex{0}}); };
    auto e = euler_lagrange(p.lagrangian(), ctx);
    for (std::size_t a = 0; a < 2; ++a) {
        Expr expect;
        for (std::size_t b = 0; b < 2; ++b) {
            expect += g(a, b) * Expr::jet(b, MultiIndex{2});
            for (std::size_t c = 0; c < 2; ++c) {
                Expr gamma = Expr(Rational(1, 2)) * (dg(a, b, c) + dg(a, c, b) - dg(b, c, a));
                expect += gamma * Expr::jet(b, MultiIndex{1}) * Expr::jet(c, MultiIndex{1});
            }
        }
        o.require(simplify(e.components[a] + expect).is_zero(), "component " + std::to_string(a + 1) + " differs");
    }
    o.require(run_cli({"el", problem("geodesic.jv")}) == 0, "el subcommand failed");
    if (o.pass) o.detail = "e_a + g_ab q''^b + Gamma_abc q'^b q'^c = 0 for a = 1, 2";
    return o;
}

Outcome exactness()
{
    Outcome o;
    Generator g(2001);
    int zero = 0;
    for (int k = 0; k < 50; ++k) {
        auto n = static_cast<std::size_t>(g.uniform(1, 2));
        auto m = static_cast<std::size_t>(g.uniform(1, 2));
        auto ctx = make_context(n, m);
        Lagrangian l{g.polynomial(n, m, 2, 6)};
        if (helmholtz(euler_lagrange(l, ctx), ctx).is_zero()) ++zero;
    }
    o.require(zero == 50, "nonzero Helmholtz kernel");
    o.detail = std::to_string(zero) + "/50 Helmholtz kernels vanish" + (o.pass ? "" : "; " + o.detail);
    return o;
}

Outcome divergence_invariance()
{
    Outcome o;
    Generator g(2002);
    int zero = 0;
    for (int k = 0; k < 50; ++k) {
        auto n = static_cast<std::size_t>(g.uniform(1, 2));
        auto m = static_cast<std::size_t>(g.uniform(1, 2));
        auto ctx = make_context(n, m);
        Expr div;
        for (std::size_t lam = 0; lam < n; ++lam) div += total_derivative(g.smooth(n, m, 2, 4), lam);
        if (euler_lagrange({div}, ctx).is_zero()) ++zero;
    }
    o.require(zero == 50, "nonzero Euler-Lagrange form of a divergence");
    o.detail = std::to_string(zero) + "/50 divergences have zero Euler-Lagrange form" + (o.pass ? "" : "; " + o.detail);
    return o;
}

Outcome non_variational_source()
{
    Outcome o;
    auto p = load_problem(problem("source_yt.jv"));
    auto he = helmholtz(p.source("e"), p.ctx);
    o.require(he.get(MultiIndex{1}, 0, 0) == Expr(2), "H^(t)_yy != 2 for e = y_t");
    o.require(!is_locally_variational(p.source("e"), p.ctx), "e = y_t reported variational");
    o.require(helmholtz(p.source("f"), p.ctx).is_zero(), "H != 0 for e = y_tt");
    std::string out;
    o.require(run_cli({"helmholtz", problem("source_yt.jv"), "--source", "e"}, &out) == 0 &&
                  out.find("verdict: not locally variational") != std::string::npos,
              "cli verdict missing");
    if (o.pass) o.detail = "y_t: H[t](y,y) = 2, not locally variational; y_tt: H = 0";
    return o;
}

Outcome split_identity()
{
    Outcome o;
    Generator g(2005);
    int ok = 0;
    for (int k = 0; k < 20; ++k) {
        auto n = static_cast<std::size_t>(g.uniform(1, 2));
        auto m = static_cast<std::size_t>(g.uniform(1, 2));
        auto ctx = make_context(n, m);
        Lagrangian l{g.polynomial(n, m, 2, 5)};
        auto xi1 = g.field(n, m, 1);
        auto xi2 = g.field(n, m, 1);
        auto split = second_variation_decomposition(l, xi1, xi2, ctx);
        bool sum = simplify(split.s1 + split.s2 - hessian(l, xi1, xi2, ctx).density).is_zero();
        bool ideal = expand_ideal(split.s1_ideal, split.euler_lagrange) == split.s1;
        if (sum && ideal) ++ok;
    }
    o.require(ok == 20, "identity or ideal membership failed");
    o.detail = std::to_string(ok) + "/20 splits satisfy S1 + S2 = hessian with S1 in the ideal of D_rho(e_i)" +
               (o.pass ? "" : "; " + o.detail);
    return o;
}

Outcome oscillator_second_variation()
{
    Outcome o;
    auto p = load_problem(problem("oscillator.jv"));
    auto s = section_of(p, "s", 2);
    const auto& box = s.domain();
    numeric::VariationConfig vc{
        {numeric::bumped_linear(p.variation("xi").field.components, box),
         numeric::bumped_linear(p.variation("eta").field.components, box)},
        p.numeric->step};
    numeric::Tolerance tol{1e-6, 0.0};
    auto r = numeric::check_second_variation(p.lagrangian(), s, vc, p.ctx, tol);
    o.require(r.matches_vertical_differential, "finite difference differs from VE");
    o.require(r.matches_jacobi, "finite difference differs from the Jacobi morphism");
    o.detail = fmt("FD %.12g, VE %.12g", r.finite_difference, r.vertical_differential) +
               fmt(", J %.12g, rel err %.2e", r.jacobi,
                   std::abs(r.finite_difference - r.vertical_differential) / std::abs(r.vertical_differential));
    return o;
}

Outcome onshell_symmetry()
{
    Outcome o;
    numeric::Tolerance tol{1e-6, 0.0};
    std::string detail;
    for (auto [file, section, f1, f2] : {std::tuple{"oscillator.jv", "s", "xi", "eta"},
                                         std::tuple{"flat_geodesic.jv", "line", "a", "b"}}) {
        auto p = load_problem(problem(file));
        auto s = section_of(p, section, 1);
        auto xi1 = numeric::bumped_linear(p.variation(f1).field.components, s.domain()).generator();
        auto xi2 = numeric::bumped_linear(p.variation(f2).field.components, s.domain()).generator();
        auto r = numeric::check_onshell_symmetry(p.lagrangian(), s, xi1, xi2, p.ctx, tol);
        o.require(r.passed, std::string(file) + " asymmetric");
        detail += std::string(file) + fmt(" |diff| %.2e of %.6g; ", r.difference, r.lhs);
    }
    std::string out;
    int status = run_cli({"check-critical", problem("oscillator.jv"), "--section", "line", "--format", "structured"},
                         &out);
    o.require(status == 3, "non-critical section exit status " + std::to_string(status));
    o.require(out.find("\"critical\": false") != std::string::npos, "non-critical section reported critical");
    o.detail = detail + "line y = t exits " + std::to_string(status) + (o.pass ? "" : "; " + o.detail);
    return o;
}

Outcome criticality_oracle()
{
    Outcome o;
    Generator g(2008);
    double worst = 0.0;
    for (auto [file, section] : {std::pair{"oscillator.jv", "s"}, std::pair{"flat_geodesic.jv", "line"}}) {
        auto p = load_problem(problem(file));
        auto s = section_of(p, section, p.lagrangian().order());
        for (int k = 0; k < 5; ++k) {
            std::vector<Expr> field;
            for (std::size_t i = 0; i < p.ctx.m(); ++i) {
                Expr c = g.coefficient();
                Expr t = Expr::base(0);
                field.push_back(c + Expr(g.coefficient()) * t + Expr(g.coefficient()) * t * t);
            }
            numeric::VariationConfig vc{{numeric::bumped_linear(field, s.domain())}, p.numeric->step};
            worst = std::max(worst, std::abs(numeric::finite_diff_variation(p.lagrangian(), s, vc, 1)));
        }
    }
    o.require(worst <= 1e-8, "first variation too large");
    o.detail = fmt("max |delta A| = %.2e over 10 bump fields", worst);
    return o;
}

Outcome higher_order_beam()
{
    Outcome o;
    auto p = load_problem(problem("beam.jv"));
    const auto& ctx = p.ctx;
    auto e = euler_lagrange(p.lagrangian(), ctx);
    o.require(e.components.at(0) == Expr::jet(0, MultiIndex{4}), "e != y_xxxx");
    BilinearForm eta4(1, 1);
    eta4.set(MultiIndex{4}, 0, 0, Expr(1));
    o.require(jacobi(p.lagrangian(), ctx) == eta4, "Jacobi operator is not eta_xxxx");
    auto s = section_of(p, "cubic", 4);
    numeric::VariationConfig vc{
        {numeric::bumped_linear(p.variation("a").field.components, s.domain()),
         numeric::bumped_linear(p.variation("b").field.components, s.domain())},
        p.numeric->step};
    auto r = numeric::check_second_variation(p.lagrangian(), s, vc, ctx, numeric::Tolerance{1e-6, 0.0});
    o.require(r.matches_vertical_differential && r.matches_jacobi, "numeric second variation mismatch");
    o.detail = "e = y_xxxx, J = D_xxxx" +
               fmt(", FD %.12g vs %.12g", r.finite_difference, r.vertical_differential) + (o.pass ? "" : "; " + o.detail);
    return o;
}

Outcome adjoint_involution()
{
    Outcome o;
    Generator g(2010);
    int ok = 0;
    for (int k = 0; k < 50; ++k) {
        auto n = static_cast<std::size_t>(g.uniform(1, 2));
        auto m = static_cast<std::size_t>(g.uniform(1, 2));
        auto ctx = make_context(n, m);
        auto a = g.bilinear(n, m, 3, g.uniform(1, 5));
        if (adjoint(adjoint(a, ctx), ctx) == a) ++ok;
    }
    o.require(ok == 50, "involution failed");
    o.detail = std::to_string(ok) + "/50 forms satisfy adjoint(adjoint(A)) = A" + (o.pass ? "" : "; " + o.detail);
    return o;
}

} // namespace

int main()
{
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"geodesic Euler-Lagrange equations", geodesic_fixture},
        {"exactness of Euler-Lagrange forms", exactness},
        {"divergence invariance", divergence_invariance},
        {"non-variational source detection", non_variational_source},
        {"second variation split identity", split_identity},
        {"oscillator second variation", oscillator_second_variation},
        {"on-shell symmetry", onshell_symmetry},
        {"criticality oracle", criticality_oracle},
        {"fourth-order beam", higher_order_beam},
        {"adjoint involution", adjoint_involution},
    };
    int failed = 0;
    int index = 0;
    for (auto& [name, check] : criteria) {
        ++index;
        auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (!o.pass) ++failed;
        std::printf("%s %2d %s: %s (%.2fs)\n", o.pass ? "PASS" : "FAIL", index, name, o.detail.c_str(), secs);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
