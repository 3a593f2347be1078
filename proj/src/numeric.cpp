#include "jetvar/numeric.hpp"

#include "jetvar/precise.hpp"

#include <gsl/gsl_integration.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <utility>

namespace jetvar::numeric {

namespace {

double constant_value(const Expr& e)
{
    return evaluate(e, Valuation{});
}

} // namespace

double Box::lo(std::size_t k) const { return constant_value(lower.at(k)); }
double Box::hi(std::size_t k) const { return constant_value(upper.at(k)); }

namespace {

// P_n(x) and P_n'(x) by the three-term recurrence.
std::pair<long double, long double> legendre(std::size_t n, long double x)
{
    long double p0 = 1.0L;
    long double p1 = x;
    for (std::size_t k = 2; k <= n; ++k) {
        long double p2 = ((2.0L * k - 1.0L) * x * p1 - (k - 1.0L) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if (n == 0) return {1.0L, 0.0L};
    return {p1, n * (x * p1 - p0) / (x * x - 1.0L)};
}

} // namespace

QuadratureRule gauss_legendre(std::size_t nodes, double a, double b)
{
    std::unique_ptr<gsl_integration_glfixed_table, decltype(&gsl_integration_glfixed_table_free)> table(
        gsl_integration_glfixed_table_alloc(nodes), &gsl_integration_glfixed_table_free);
    if (!table) throw Error("cannot allocate a Gauss-Legendre table");
    QuadratureRule rule;
    rule.nodes.resize(nodes);
    rule.weights.resize(nodes);
    const long double half = (static_cast<long double>(b) - a) / 2;
    const long double mid = (static_cast<long double>(b) + a) / 2;
    for (std::size_t k = 0; k < nodes; ++k) {
        double x0 = 0.0;
        double w0 = 0.0;
        gsl_integration_glfixed_point(-1.0, 1.0, k, &x0, &w0, table.get());
        // GSL computes untabulated rules to roughly 1e-11; polish the node.
        long double x = x0;
        for (int it = 0; it < 3; ++it) {
            auto [p, dp] = legendre(nodes, x);
            x -= p / dp;
        }
        auto [p, dp] = legendre(nodes, x);
        (void)p;
        rule.nodes[k] = static_cast<double>(mid + half * x);
        rule.weights[k] = static_cast<double>(half * 2.0L / ((1.0L - x * x) * dp * dp));
    }
    return rule;
}

NumericSection::NumericSection(std::vector<Expr> components, Box domain, std::size_t nodes,
                               std::uint32_t prolongation_order)
    : components_(std::move(components)), domain_(std::move(domain)), nodes_(nodes), order_(prolongation_order)
{
    const auto n = domain_.n();
    if (n == 0 || domain_.upper.size() != n) throw DimensionError("section domain is malformed");
    if (nodes_ == 0) throw SemanticError("quadrature needs at least one node");
    for (auto& c : components_) {
        if (!jet_variables(c).empty()) throw SemanticError("sections may only reference base coordinates");
    }

    for (std::size_t i = 0; i < components_.size(); ++i) {
        for (auto& sigma : enumerate_up_to(n, order_)) {
            Expr value;
            if (sigma.is_zero()) {
                value = components_[i];
            } else {
                std::size_t lambda = 0;
                while (sigma[lambda] == 0) ++lambda;
                value = partial(table_.at(JetVar{i, sigma - MultiIndex::unit(n, lambda)}), BaseVar{lambda});
            }
            table_.emplace(JetVar{i, sigma}, std::move(value));
        }
    }

    std::vector<QuadratureRule> rules;
    for (std::size_t k = 0; k < n; ++k) rules.push_back(gauss_legendre(nodes_, domain_.lo(k), domain_.hi(k)));
    std::vector<std::size_t> idx(n, 0);
    while (true) {
        std::vector<double> pt(n);
        double w = 1.0;
        for (std::size_t k = 0; k < n; ++k) {
            pt[k] = rules[k].nodes[idx[k]];
            w *= rules[k].weights[idx[k]];
        }
        points_.push_back(std::move(pt));
        weights_.push_back(w);
        std::size_t k = 0;
        while (k < n && ++idx[k] == nodes_) idx[k++] = 0;
        if (k == n) break;
    }
}

const Expr& NumericSection::derivative(const JetVar& v) const
{
    auto it = table_.find(v);
    if (it == table_.end()) {
        throw SemanticError("section is not prolonged to order " + std::to_string(v.sigma.order()));
    }
    return it->second;
}

namespace {

/// s itself, or s re-prolonged when its order is below `order`.
NumericSection prolonged_to(const NumericSection& s, std::uint32_t order)
{
    if (order <= s.prolongation_order()) return s;
    return NumericSection(s.components(), s.domain(), s.nodes(), order);
}

} // namespace

namespace {

Real eval_precise(const Expr& e, const NumericSection& s, std::span<const double> pt)
{
    if (jet_order(e) > s.prolongation_order()) {
        throw SemanticError("insufficient prolongation order: expression has order " + std::to_string(jet_order(e)) +
                            ", section is prolonged to " + std::to_string(s.prolongation_order()));
    }
    if (pt.size() != s.domain().n()) throw DimensionError("base point has the wrong dimension");
    PreciseValuation base_only;
    base_only.base = [pt](std::size_t lambda) { return Real(pt[lambda]); };
    std::map<JetVar, Real, JetVarLess> cache;
    PreciseValuation v;
    v.base = base_only.base;
    v.jet = [&](const JetVar& jv) {
        if (auto it = cache.find(jv); it != cache.end()) return it->second;
        Real x = evaluate_precise(s.derivative(jv), base_only);
        cache.emplace(jv, x);
        return x;
    };
    return evaluate_precise(e, v);
}

} // namespace

double eval_on_section(const Expr& e, const NumericSection& s, std::span<const double> pt)
{
    return static_cast<double>(eval_precise(e, s, pt));
}

double integrate(const Expr& e, const NumericSection& s)
{
    Real sum = 0;
    const auto& pts = s.points();
    const auto& w = s.weights();
    for (std::size_t k = 0; k < pts.size(); ++k) sum += Real(w[k]) * eval_precise(e, s, pts[k]);
    return static_cast<double>(sum);
}

double action(const Lagrangian& lambda, const NumericSection& s) { return integrate(lambda.density, s); }

ActionEstimate action_with_estimate(const Lagrangian& lambda, const NumericSection& s)
{
    ActionEstimate out;
    out.value = action(lambda, s);
    double magnitude = 0.0;
    for (std::size_t k = 0; k < s.points().size(); ++k) {
        magnitude += std::abs(s.weights()[k] * eval_on_section(lambda.density, s, s.points()[k]));
    }
    double coarse = out.value;
    if (s.nodes() > 1) {
        NumericSection half(s.components(), s.domain(), s.nodes() / 2, s.prolongation_order());
        coarse = action(lambda, half);
    }
    out.error_estimate = std::abs(out.value - coarse) +
                         64.0 * std::numeric_limits<double>::epsilon() * std::max(magnitude, 1.0);
    return out;
}

Expr bump(const Box& box)
{
    Expr out(1);
    for (std::size_t k = 0; k < box.n(); ++k) {
        Expr x = Expr::base(k);
        Expr half_width = (box.upper[k] - box.lower[k]) / Expr(2);
        out *= pow((x - box.lower[k]) * (box.upper[k] - x), 4) / pow(half_width, 8);
    }
    return out;
}

VariationSpec bumped_linear(const std::vector<Expr>& field, const Box& box)
{
    Expr b = bump(box);
    VariationSpec spec;
    for (auto& c : field) spec.field.push_back(c * b);
    return spec;
}

NumericSection flowed_section(const NumericSection& s, std::span<const VariationSpec> fields,
                              std::span<const double> t, std::uint32_t prolongation_order)
{
    std::vector<Expr> comps = s.components();
    const auto n = s.domain().n();
    for (std::size_t k = 0; k < fields.size(); ++k) {
        const auto& spec = fields[k];
        Expr tk{Rational(t[k])};
        if (!spec.flow) {
            for (std::size_t i = 0; i < comps.size(); ++i) comps[i] += tk * spec.field.at(i);
            continue;
        }
        Bindings bind;
        for (std::size_t l = 0; l < comps.size(); ++l) bind.emplace(JetVar{l, MultiIndex::zero(n)}, comps[l]);
        std::vector<Expr> next;
        for (auto& psi : *spec.flow) {
            next.push_back(substitute_params(substitute(psi, bind), {{spec.flow_parameter, tk}}));
        }
        comps = std::move(next);
    }
    return NumericSection(std::move(comps), s.domain(), s.nodes(), prolongation_order);
}

namespace {

double central_difference(const Lagrangian& lambda, const NumericSection& s, std::span<const VariationSpec> fields,
                          int order, double h)
{
    const auto r = lambda.order();
    auto at = [&](std::vector<double> t) { return action(lambda, flowed_section(s, fields, t, r)); };
    if (order == 1) return (at({h}) - at({-h})) / (2.0 * h);
    return (at({h, h}) - at({h, -h}) - at({-h, h}) + at({-h, -h})) / (4.0 * h * h);
}

} // namespace

double finite_diff_variation(const Lagrangian& lambda, const NumericSection& s, const VariationConfig& vc, int order)
{
    if (order != 1 && order != 2) throw SemanticError("finite-difference variations support orders 1 and 2");
    if (vc.fields.size() < static_cast<std::size_t>(order)) {
        throw SemanticError("variation of order " + std::to_string(order) + " needs that many fields");
    }
    if (!(vc.step > 0.0)) throw SemanticError("finite-difference step must be positive");
    std::span<const VariationSpec> fields(vc.fields.data(), static_cast<std::size_t>(order));
    double d = central_difference(lambda, s, fields, order, vc.step);
    if (!vc.richardson) return d;
    double d_half = central_difference(lambda, s, fields, order, vc.step / 2.0);
    return (4.0 * d_half - d) / 3.0;
}

bool Tolerance::accepts(double a, double b) const
{
    return std::abs(a - b) <= std::max(rel * std::max(std::abs(a), std::abs(b)), abs);
}

CriticalReport check_critical(const Lagrangian& lambda, const NumericSection& s, const JetContext& ctx,
                              const Tolerance& tol)
{
    auto e = euler_lagrange(lambda, ctx);
    CriticalReport out;
    auto full = prolonged_to(s, e.order());
    for (auto& pt : full.points()) {
        for (auto& c : e.components) out.residual = std::max(out.residual, std::abs(eval_on_section(c, full, pt)));
    }
    out.threshold = std::max(tol.abs, tol.rel);
    out.critical = out.residual <= out.threshold;
    return out;
}

NotCritical::NotCritical(CriticalReport report)
    : Error("section is not critical: Euler-Lagrange residual " + std::to_string(report.residual) + " exceeds " +
            std::to_string(report.threshold)),
      report_(report)
{
}

SymmetryReport check_onshell_symmetry(const Lagrangian& lambda, const NumericSection& s, const VerticalField& xi1,
                                      const VerticalField& xi2, const JetContext& ctx, const Tolerance& tol)
{
    SymmetryReport out;
    out.critical = check_critical(lambda, s, ctx, tol);
    if (!out.critical.critical) throw NotCritical(out.critical);
    auto ve = vertical_differential(lambda, ctx);
    Expr forward = contract(xi1, xi2, ve);
    Expr backward = contract(xi2, xi1, ve);
    Expr diff = forward - backward;
    auto full = prolonged_to(s, std::max(jet_order(forward), jet_order(backward)));
    out.lhs = integrate(forward, full);
    out.rhs = integrate(backward, full);
    out.difference = out.lhs - out.rhs;
    for (auto& pt : full.points()) {
        out.pointwise_max = std::max(out.pointwise_max, std::abs(eval_on_section(diff, full, pt)));
    }
    out.passed = tol.accepts(out.lhs, out.rhs);
    return out;
}

SecondVariationReport check_second_variation(const Lagrangian& lambda, const NumericSection& s,
                                             const VariationConfig& vc, const JetContext& ctx, const Tolerance& tol)
{
    SecondVariationReport out;
    out.critical = check_critical(lambda, s, ctx, tol);
    if (!out.critical.critical) throw NotCritical(out.critical);
    if (vc.fields.size() < 2) throw SemanticError("second variation needs two fields");
    out.finite_difference = finite_diff_variation(lambda, s, vc, 2);
    auto xi1 = vc.fields[0].generator();
    auto xi2 = vc.fields[1].generator();
    auto ve = vertical_differential(lambda, ctx);
    Expr lin = contract(xi1, xi2, ve);
    Expr jac = contract(xi1, xi2, adjoint(ve, ctx));
    auto prolonged = prolonged_to(s, std::max(jet_order(lin), jet_order(jac)));
    out.vertical_differential = integrate(lin, prolonged);
    out.jacobi = integrate(jac, prolonged);
    out.matches_vertical_differential = tol.accepts(out.finite_difference, out.vertical_differential);
    out.matches_jacobi = tol.accepts(out.finite_difference, out.jacobi);
    return out;
}

} // namespace jetvar::numeric
