#include "jetvar/variational.hpp"

#include "jetvar/error.hpp"

#include <algorithm>

namespace jetvar {

namespace {

Expr sign(std::uint32_t order) { return Expr(order % 2 == 0 ? 1 : -1); }

/// Nonzero partials of e with respect to every jet coordinate occurring in it.
JetMap jet_partials(const Expr& e) { return d_vertical(e); }

void require_field_count(const SourceForm& e, const JetContext& ctx)
{
    if (e.m() != ctx.m()) throw DimensionError("source form has the wrong number of components");
}

void require_field_count(const VerticalField& xi, const JetContext& ctx)
{
    if (xi.m() != ctx.m()) throw DimensionError("vertical field has the wrong number of components");
}

} // namespace

// ---------------------------------------------------------------------------
// SourceForm / BilinearForm

std::uint32_t SourceForm::order() const
{
    std::uint32_t r = 0;
    for (auto& c : components) r = std::max(r, jet_order(c));
    return r;
}

bool SourceForm::is_zero() const
{
    return std::all_of(components.begin(), components.end(), [](const Expr& c) { return c.is_zero(); });
}

void BilinearForm::check(const MultiIndex& sigma, std::size_t first, std::size_t second) const
{
    if (sigma.dim() != n_ || first >= m_ || second >= m_) {
        throw DimensionError("bilinear form component out of range");
    }
}

Expr BilinearForm::get(const MultiIndex& sigma, std::size_t first, std::size_t second) const
{
    check(sigma, first, second);
    auto it = comps_.find(BilinearKey{sigma, first, second});
    return it == comps_.end() ? Expr() : it->second;
}

void BilinearForm::set(const MultiIndex& sigma, std::size_t first, std::size_t second, Expr value)
{
    check(sigma, first, second);
    BilinearKey key{sigma, first, second};
    if (value.is_zero()) {
        comps_.erase(key);
    } else {
        comps_.insert_or_assign(std::move(key), std::move(value));
    }
}

void BilinearForm::add(const MultiIndex& sigma, std::size_t first, std::size_t second, const Expr& value)
{
    if (value.is_zero()) return;
    set(sigma, first, second, get(sigma, first, second) + value);
}

std::uint32_t BilinearForm::max_order() const
{
    std::uint32_t r = 0;
    for (auto& [k, v] : comps_) r = std::max(r, k.sigma.order());
    return r;
}

BilinearForm operator+(const BilinearForm& a, const BilinearForm& b)
{
    if (a.n_ != b.n_ || a.m_ != b.m_) throw DimensionError("bilinear forms over different jet spaces");
    BilinearForm out = a;
    for (auto& [k, v] : b.comps_) out.add(k.sigma, k.first, k.second, v);
    return out;
}

BilinearForm operator-(const BilinearForm& a, const BilinearForm& b)
{
    return a + Expr(-1) * b;
}

BilinearForm operator*(const Expr& c, const BilinearForm& a)
{
    BilinearForm out(a.n_, a.m_);
    for (auto& [k, v] : a.comps_) out.set(k.sigma, k.first, k.second, c * v);
    return out;
}

bool operator==(const BilinearForm& a, const BilinearForm& b)
{
    return a.n_ == b.n_ && a.m_ == b.m_ && a.comps_ == b.comps_;
}

// ---------------------------------------------------------------------------
// Morphisms

SourceForm euler_lagrange(const Lagrangian& lambda, const JetContext& ctx)
{
    validate(lambda.density, ctx);
    SourceForm e{std::vector<Expr>(ctx.m())};
    for (auto& [v, p] : jet_partials(lambda.density)) {
        e.components[v.field] += sign(v.sigma.order()) * total_derivative(p, v.sigma);
    }
    return e;
}

BilinearForm helmholtz(const SourceForm& e, const JetContext& ctx)
{
    require_field_count(e, ctx);
    const auto n = ctx.n();
    const auto m = ctx.m();
    std::vector<JetMap> partials;
    partials.reserve(m);
    for (auto& c : e.components) partials.push_back(jet_partials(c));

    BilinearForm h(n, m);
    for (auto& sigma : enumerate_up_to(n, e.order())) {
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < m; ++j) {
                Expr value;
                if (auto it = partials[j].find(JetVar{i, sigma}); it != partials[j].end()) value = it->second;
                // d^{sigma+rho}_j e_i is nonzero only for coordinates occurring in e_i.
                for (auto& [v, p] : partials[i]) {
                    if (v.field != j || !v.sigma.contains(sigma)) continue;
                    auto rho = v.sigma - sigma;
                    auto binom = static_cast<long>(multi_binomial(v.sigma, rho));
                    value -= sign(v.sigma.order()) * Expr(binom) * total_derivative(p, rho);
                }
                h.set(sigma, j, i, std::move(value));
            }
        }
    }
    return h;
}

BilinearForm helmholtz_skew(const BilinearForm& h, const JetContext& ctx)
{
    return Expr(Rational(1, 2)) * (h - adjoint(h, ctx));
}

bool is_locally_variational(const SourceForm& e, const JetContext& ctx) { return helmholtz(e, ctx).is_zero(); }

BilinearForm adjoint(const BilinearForm& a, const JetContext& ctx)
{
    if (a.n() != ctx.n() || a.m() != ctx.m()) throw DimensionError("bilinear form does not match context");
    BilinearForm out(a.n(), a.m());
    for (auto& [key, value] : a.components()) {
        for (auto& rho : sub_indices(key.sigma)) {
            auto binom = static_cast<long>(multi_binomial(key.sigma, rho));
            out.add(rho, key.second, key.first,
                    sign(key.sigma.order()) * Expr(binom) * total_derivative(value, key.sigma - rho));
        }
    }
    return out;
}

BilinearForm linearization(const SourceForm& e, const JetContext& ctx)
{
    require_field_count(e, ctx);
    BilinearForm out(ctx.n(), ctx.m());
    for (std::size_t i = 0; i < e.m(); ++i) {
        for (auto& [v, p] : jet_partials(e.components[i])) out.set(v.sigma, i, v.field, p);
    }
    return out;
}

BilinearForm vertical_differential(const Lagrangian& lambda, const JetContext& ctx)
{
    return linearization(euler_lagrange(lambda, ctx), ctx);
}

BilinearForm jacobi(const Lagrangian& lambda, const JetContext& ctx)
{
    return adjoint(vertical_differential(lambda, ctx), ctx);
}

Expr contract(const VerticalField& xi1, const VerticalField& xi2, const BilinearForm& a)
{
    if (xi1.m() != a.m() || xi2.m() != a.m()) throw DimensionError("field and bilinear form dimensions differ");
    std::map<BilinearKey, Expr> derivs;
    Expr out;
    for (auto& [key, value] : a.components()) {
        if (xi1.components[key.first].is_zero()) continue;
        BilinearKey dkey{key.sigma, 0, key.second};
        auto it = derivs.find(dkey);
        if (it == derivs.end()) {
            it = derivs.emplace(dkey, total_derivative(xi2.components[key.second], key.sigma)).first;
        }
        out += value * xi1.components[key.first] * it->second;
    }
    return out;
}

Expr contract(const VerticalField& xi, const SourceForm& e)
{
    if (xi.m() != e.m()) throw DimensionError("field and source form dimensions differ");
    Expr out;
    for (std::size_t i = 0; i < e.m(); ++i) out += xi.components[i] * e.components[i];
    return out;
}

Lagrangian quotient_variation(const Lagrangian& lambda, const std::vector<VerticalField>& fields,
                              const JetContext& ctx)
{
    if (fields.empty()) throw SemanticError("quotient variation needs at least one vertical field");
    for (auto& xi : fields) require_field_count(xi, ctx);
    Lagrangian current = lambda;
    for (auto it = fields.rbegin(); it != fields.rend(); ++it) {
        current = Lagrangian{contract(*it, euler_lagrange(current, ctx))};
    }
    return current;
}

Lagrangian hessian(const Lagrangian& lambda, const VerticalField& xi1, const VerticalField& xi2,
                   const JetContext& ctx)
{
    return quotient_variation(lambda, {xi1, xi2}, ctx);
}

SecondVariationSplit second_variation_decomposition(const Lagrangian& lambda, const VerticalField& xi1,
                                                    const VerticalField& xi2, const JetContext& ctx)
{
    require_field_count(xi1, ctx);
    require_field_count(xi2, ctx);
    SecondVariationSplit out;
    out.euler_lagrange = euler_lagrange(lambda, ctx);
    const auto& e = out.euler_lagrange.components;
    const auto m = ctx.m();

    // First summand: derivatives of xi2 against e.
    std::vector<JetMap> xi2_partials;
    std::vector<JetVar> xi2_vars;
    for (auto& c : xi2.components) {
        xi2_partials.push_back(jet_partials(c));
        for (auto& [v, p] : xi2_partials.back()) xi2_vars.push_back(v);
    }
    std::sort(xi2_vars.begin(), xi2_vars.end(), JetVarLess{});
    xi2_vars.erase(std::unique(xi2_vars.begin(), xi2_vars.end()), xi2_vars.end());

    std::map<std::pair<std::size_t, MultiIndex>, Expr> ideal;
    for (auto& v : xi2_vars) {
        const auto j = v.field;
        if (xi1.components[j].is_zero()) continue;
        Expr inner;
        for (std::size_t i = 0; i < m; ++i) {
            auto it = xi2_partials[i].find(v);
            if (it == xi2_partials[i].end()) continue;
            const Expr& c = it->second;
            inner += c * e[i];
            for (auto& tau : sub_indices(v.sigma)) {
                auto binom = static_cast<long>(multi_binomial(v.sigma, tau));
                Expr coef = sign(v.sigma.order()) * Expr(binom) * xi1.components[j] *
                            total_derivative(c, v.sigma - tau);
                if (!coef.is_zero()) ideal[{i, tau}] += coef;
            }
        }
        out.s1 += sign(v.sigma.order()) * xi1.components[j] * total_derivative(inner, v.sigma);
    }
    for (auto& [key, coef] : ideal) {
        if (!coef.is_zero()) out.s1_ideal.push_back({coef, key.first, key.second});
    }

    // Second summand: xi2 against the linearization of e.
    std::vector<JetMap> e_partials;
    std::vector<JetVar> e_vars;
    for (auto& c : e) {
        e_partials.push_back(jet_partials(c));
        for (auto& [v, p] : e_partials.back()) e_vars.push_back(v);
    }
    std::sort(e_vars.begin(), e_vars.end(), JetVarLess{});
    e_vars.erase(std::unique(e_vars.begin(), e_vars.end()), e_vars.end());
    for (auto& v : e_vars) {
        const auto j = v.field;
        if (xi1.components[j].is_zero()) continue;
        Expr inner;
        for (std::size_t i = 0; i < m; ++i) {
            auto it = e_partials[i].find(v);
            if (it != e_partials[i].end()) inner += xi2.components[i] * it->second;
        }
        out.s2 += sign(v.sigma.order()) * xi1.components[j] * total_derivative(inner, v.sigma);
    }
    return out;
}

Expr expand_ideal(const std::vector<IdealTerm>& terms, const SourceForm& e)
{
    Expr out;
    for (auto& t : terms) out += t.coefficient * total_derivative(e.components.at(t.field), t.rho);
    return out;
}

Expr reduce_on_shell(const Expr& e, const std::vector<OnShellRelation>& relations)
{
    constexpr int kMaxPasses = 256;
    Expr current = e;
    for (int pass = 0; pass < kMaxPasses; ++pass) {
        Bindings bindings;
        for (auto& v : jet_variables(current)) {
            for (auto& r : relations) {
                if (r.lhs.field == v.field && v.sigma.contains(r.lhs.sigma)) {
                    bindings.emplace(v, total_derivative(r.rhs, v.sigma - r.lhs.sigma));
                    break;
                }
            }
        }
        if (bindings.empty()) return current;
        current = substitute(current, bindings);
    }
    throw SemanticError("on-shell reduction did not terminate; relations must lower the derivative order");
}

BilinearForm reduce_on_shell(const BilinearForm& a, const std::vector<OnShellRelation>& relations)
{
    BilinearForm out(a.n(), a.m());
    for (auto& [k, v] : a.components()) out.set(k.sigma, k.first, k.second, reduce_on_shell(v, relations));
    return out;
}

} // namespace jetvar
