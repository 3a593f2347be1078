#include "jetvar/expr.hpp"
#include "jetvar/precise.hpp"

#include "jetvar/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <type_traits>
#include <unordered_map>

namespace jetvar {

namespace {

constexpr std::size_t kHashMul = 0x9e3779b97f4a7c15ULL;

std::size_t mix(std::size_t seed, std::size_t v)
{
    return seed ^ (v + kHashMul + (seed << 6) + (seed >> 2));
}

std::size_t hash_rational(const Rational& q)
{
    std::size_t h = mpz_get_ui(q.get_num_mpz_t());
    h = mix(h, static_cast<std::size_t>(mpz_sgn(q.get_num_mpz_t()) + 1));
    h = mix(h, static_cast<std::size_t>(mpz_size(q.get_num_mpz_t())));
    return mix(h, mpz_get_ui(q.get_den_mpz_t()));
}

int kind_rank(AtomKind k) { return static_cast<int>(k); }

struct MonomialLess {
    bool operator()(const Monomial& a, const Monomial& b) const { return compare_monomials(a, b) < 0; }
};

Monomial multiply_monomials(const Monomial& a, const Monomial& b)
{
    Monomial out;
    out.reserve(a.size() + b.size());
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < a.size() || j < b.size()) {
        if (j == b.size() || (i < a.size() && a[i].atom < b[j].atom)) {
            out.push_back(a[i++]);
        } else if (i == a.size() || b[j].atom < a[i].atom) {
            out.push_back(b[j++]);
        } else {
            int e = a[i].exponent + b[j].exponent;
            if (e != 0) out.push_back({a[i].atom, e});
            ++i;
            ++j;
        }
    }
    return out;
}

std::size_t hash_monomial(const Monomial& m)
{
    std::size_t h = 17;
    for (auto& f : m) h = mix(mix(h, f.atom.hash()), static_cast<std::size_t>(f.exponent));
    return h;
}

} // namespace

const char* fn_name(Fn f) noexcept
{
    switch (f) {
    case Fn::Sin: return "sin";
    case Fn::Cos: return "cos";
    case Fn::Exp: return "exp";
    case Fn::Log: return "log";
    case Fn::Sqrt: return "sqrt";
    }
    return "?";
}

std::optional<Fn> fn_from_name(const std::string& name) noexcept
{
    for (Fn f : {Fn::Sin, Fn::Cos, Fn::Exp, Fn::Log, Fn::Sqrt}) {
        if (name == fn_name(f)) return f;
    }
    return std::nullopt;
}

// Construction of canonical nodes. Every Expr and Atom goes through here.
struct ExprBuilder {
    static Expr make(std::vector<Term> sorted_terms)
    {
        auto p = std::make_shared<detail::Poly>();
        std::size_t h = 0x51ed;
        std::uint32_t order = 0;
        for (auto& t : sorted_terms) {
            h = mix(mix(h, hash_monomial(t.monomial)), hash_rational(t.coef));
            for (auto& f : t.monomial) order = std::max(order, f.atom.jet_order());
        }
        p->terms = std::move(sorted_terms);
        p->hash = h;
        p->jet_order = order;
        return Expr(std::shared_ptr<const detail::Poly>(std::move(p)));
    }

    static Atom atom(detail::AtomNode node)
    {
        std::size_t h = mix(static_cast<std::size_t>(node.kind) + 1, node.index);
        for (auto c : node.sigma.counts()) h = mix(h, c);
        std::uint32_t order = 0;
        if (node.kind == AtomKind::Jet) order = node.sigma.order();
        for (auto& a : node.args) {
            h = mix(h, a.hash());
            order = std::max(order, a.poly().jet_order);
        }
        node.hash = h;
        node.jet_order = order;
        return Atom(std::make_shared<const detail::AtomNode>(std::move(node)));
    }

    static Expr monomial(const Atom& a, int exponent)
    {
        std::vector<Term> t;
        t.push_back({Monomial{{a, exponent}}, Rational(1)});
        return make(std::move(t));
    }
};

namespace {

// Sparse accumulator of terms keyed by monomial.
class Accumulator {
public:
    void add(const Monomial& m, const Rational& c)
    {
        if (c == 0) return;
        auto [it, inserted] = terms_.try_emplace(m, c);
        if (!inserted) {
            it->second += c;
            if (it->second == 0) terms_.erase(it);
        }
    }

    void add_product(const Rational& c, const Monomial& m, const Expr& e)
    {
        for (auto& t : e.poly().terms) add(multiply_monomials(m, t.monomial), c * t.coef);
    }

    Expr finish()
    {
        std::vector<Term> out;
        out.reserve(terms_.size());
        for (auto& [m, c] : terms_) out.push_back({m, c});
        terms_.clear();
        return ExprBuilder::make(std::move(out));
    }

private:
    std::map<Monomial, Rational, MonomialLess> terms_;
};

struct AtomHash {
    std::size_t operator()(const Atom& a) const noexcept { return a.hash(); }
};

Rational rational_pow(const Rational& c, int k)
{
    Rational out(1);
    Rational b = k < 0 ? Rational(1) / c : c;
    for (int i = 0; i < std::abs(k); ++i) out *= b;
    return out;
}

Expr recip_atom(const Expr& monic)
{
    detail::AtomNode n{AtomKind::Recip};
    n.args.push_back(monic);
    return ExprBuilder::monomial(ExprBuilder::atom(std::move(n)), 1);
}

} // namespace

// ---------------------------------------------------------------------------
// Expr

Expr::Expr() : Expr(ExprBuilder::make({})) {}

Expr::Expr(const Rational& c)
{
    if (c.get_den() == 0) throw DivisionByZero("rational constant with zero denominator");
    Rational q = c;
    q.canonicalize();
    std::vector<Term> t;
    if (q != 0) t.push_back({Monomial{}, std::move(q)});
    *this = ExprBuilder::make(std::move(t));
}

Expr::Expr(long c) : Expr(Rational(c)) {}

Expr Expr::jet(std::size_t field, MultiIndex sigma)
{
    detail::AtomNode n{AtomKind::Jet};
    n.index = field;
    n.sigma = std::move(sigma);
    return ExprBuilder::monomial(ExprBuilder::atom(std::move(n)), 1);
}

Expr Expr::base(std::size_t lambda)
{
    detail::AtomNode n{AtomKind::Base};
    n.index = lambda;
    return ExprBuilder::monomial(ExprBuilder::atom(std::move(n)), 1);
}

Expr Expr::coordinate(const Coordinate& c)
{
    if (auto* b = std::get_if<BaseVar>(&c)) return base(b->index);
    return jet(std::get<JetVar>(c));
}

Expr Expr::pi()
{
    return ExprBuilder::monomial(ExprBuilder::atom(detail::AtomNode{AtomKind::Pi}), 1);
}

Expr Expr::param(std::size_t index)
{
    detail::AtomNode n{AtomKind::Param};
    n.index = index;
    return ExprBuilder::monomial(ExprBuilder::atom(std::move(n)), 1);
}

Expr Expr::func(Fn f, const Expr& arg)
{
    if (auto c = arg.constant_value()) {
        switch (f) {
        case Fn::Sin:
            if (*c == 0) return Expr(0);
            break;
        case Fn::Cos:
        case Fn::Exp:
            if (*c == 0) return Expr(1);
            break;
        case Fn::Log:
            if (*c == 1) return Expr(0);
            break;
        case Fn::Sqrt:
            if (*c == 0 || *c == 1) return Expr(*c);
            break;
        }
    }
    detail::AtomNode n{AtomKind::Func};
    n.index = static_cast<std::size_t>(f);
    n.args.push_back(arg);
    return ExprBuilder::monomial(ExprBuilder::atom(std::move(n)), 1);
}

Expr Expr::opaque(std::size_t id, std::vector<Expr> args, MultiIndex deriv)
{
    if (deriv.dim() != args.size()) throw DimensionError("opaque derivative record does not match arity");
    detail::AtomNode n{AtomKind::Opaque};
    n.index = id;
    n.sigma = std::move(deriv);
    n.args = std::move(args);
    return ExprBuilder::monomial(ExprBuilder::atom(std::move(n)), 1);
}

Expr Expr::opaque(std::size_t id, std::vector<Expr> args)
{
    auto k = args.size();
    return opaque(id, std::move(args), MultiIndex::zero(k));
}

Expr Expr::from_atom(const Atom& a, int exponent)
{
    if (exponent == 0) return Expr(1);
    if (a.kind() == AtomKind::Recip && exponent < 0) return pow(a.args().front(), -exponent);
    return ExprBuilder::monomial(a, exponent);
}

bool Expr::is_zero() const noexcept { return p_->terms.empty(); }

bool Expr::is_constant() const noexcept
{
    return p_->terms.empty() || (p_->terms.size() == 1 && p_->terms.front().monomial.empty());
}

std::optional<Rational> Expr::constant_value() const
{
    if (p_->terms.empty()) return Rational(0);
    if (p_->terms.size() == 1 && p_->terms.front().monomial.empty()) return p_->terms.front().coef;
    return std::nullopt;
}

std::size_t Expr::term_count() const noexcept { return p_->terms.size(); }

std::size_t Expr::hash() const noexcept { return p_->hash; }

Expr operator+(const Expr& a, const Expr& b)
{
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    const auto& x = a.poly().terms;
    const auto& y = b.poly().terms;
    std::vector<Term> out;
    out.reserve(x.size() + y.size());
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < x.size() || j < y.size()) {
        if (j == y.size()) {
            out.push_back(x[i++]);
            continue;
        }
        if (i == x.size()) {
            out.push_back(y[j++]);
            continue;
        }
        auto c = compare_monomials(x[i].monomial, y[j].monomial);
        if (c < 0) {
            out.push_back(x[i++]);
        } else if (c > 0) {
            out.push_back(y[j++]);
        } else {
            Rational s = x[i].coef + y[j].coef;
            if (s != 0) out.push_back({x[i].monomial, s});
            ++i;
            ++j;
        }
    }
    return ExprBuilder::make(std::move(out));
}

Expr operator-(const Expr& a)
{
    std::vector<Term> out = a.poly().terms;
    for (auto& t : out) t.coef = -t.coef;
    return ExprBuilder::make(std::move(out));
}

Expr operator-(const Expr& a, const Expr& b) { return a + (-b); }

Expr operator*(const Expr& a, const Expr& b)
{
    if (a.is_zero() || b.is_zero()) return Expr();
    if (auto c = a.constant_value(); c && *c == 1) return b;
    if (auto c = b.constant_value(); c && *c == 1) return a;
    Accumulator acc;
    for (auto& t : a.poly().terms) acc.add_product(t.coef, t.monomial, b);
    return acc.finish();
}

Expr operator/(const Expr& a, const Expr& b)
{
    if (b.is_zero()) throw DivisionByZero("division by an expression that is identically zero");
    if (a.is_zero()) return a;
    // a = c*b exactly: return the constant.
    if (a.term_count() == b.term_count() && b.term_count() > 1) {
        const auto& x = a.poly().terms;
        const auto& y = b.poly().terms;
        Rational ratio = x.front().coef / y.front().coef;
        bool proportional = true;
        for (std::size_t k = 0; k < x.size() && proportional; ++k) {
            proportional = x[k].monomial == y[k].monomial && x[k].coef == ratio * y[k].coef;
        }
        if (proportional) return Expr(ratio);
    }
    return a * pow(b, -1);
}

bool operator==(const Expr& a, const Expr& b)
{
    if (a.p_ == b.p_) return true;
    if (a.hash() != b.hash() || a.term_count() != b.term_count()) return false;
    const auto& x = a.poly().terms;
    const auto& y = b.poly().terms;
    for (std::size_t k = 0; k < x.size(); ++k) {
        if (x[k].coef != y[k].coef || !(x[k].monomial == y[k].monomial)) return false;
    }
    return true;
}

std::strong_ordering operator<=>(const Expr& a, const Expr& b)
{
    if (a.p_ == b.p_) return std::strong_ordering::equal;
    const auto& x = a.poly().terms;
    const auto& y = b.poly().terms;
    if (auto c = x.size() <=> y.size(); c != 0) return c;
    for (std::size_t k = 0; k < x.size(); ++k) {
        if (auto c = compare_monomials(x[k].monomial, y[k].monomial); c != 0) return c;
        int q = cmp(x[k].coef, y[k].coef);
        if (q != 0) return q < 0 ? std::strong_ordering::less : std::strong_ordering::greater;
    }
    return std::strong_ordering::equal;
}

Expr pow(const Expr& base, int exponent)
{
    if (exponent == 0) return Expr(1);
    if (base.is_zero()) {
        if (exponent < 0) throw DivisionByZero("negative power of an expression that is identically zero");
        return base;
    }
    if (exponent == 1) return base;
    const auto& terms = base.poly().terms;
    if (terms.size() == 1) {
        const auto& t = terms.front();
        Monomial m;
        Expr extra(1);
        for (auto& f : t.monomial) {
            int e = f.exponent * exponent;
            if (f.atom.kind() == AtomKind::Recip && e < 0) {
                extra = extra * pow(f.atom.args().front(), -e);
            } else {
                m.push_back({f.atom, e});
            }
        }
        std::vector<Term> out;
        out.push_back({std::move(m), rational_pow(t.coef, exponent)});
        return ExprBuilder::make(std::move(out)) * extra;
    }
    if (exponent > 0) {
        Expr result(1);
        Expr b = base;
        int k = exponent;
        while (k > 0) {
            if (k & 1) result = result * b;
            k >>= 1;
            if (k > 0) b = b * b;
        }
        return result;
    }
    // Reciprocal of a non-monomial: normalize to a monic polynomial.
    Rational lead = terms.back().coef;
    Expr monic = base * Expr(Rational(1) / lead);
    Expr r = recip_atom(monic);
    return Expr(rational_pow(lead, exponent)) * pow(r, -exponent);
}

// ---------------------------------------------------------------------------
// Atom

AtomKind Atom::kind() const noexcept { return n_->kind; }
std::size_t Atom::index() const noexcept { return n_->index; }
const MultiIndex& Atom::sigma() const noexcept { return n_->sigma; }
const std::vector<Expr>& Atom::args() const noexcept { return n_->args; }
std::size_t Atom::hash() const noexcept { return n_->hash; }
std::uint32_t Atom::jet_order() const noexcept { return n_->jet_order; }

bool operator==(const Atom& a, const Atom& b)
{
    if (a.n_ == b.n_) return true;
    return a.hash() == b.hash() && (a <=> b) == 0;
}

std::strong_ordering operator<=>(const Atom& a, const Atom& b)
{
    if (a.n_ == b.n_) return std::strong_ordering::equal;
    if (auto c = kind_rank(a.kind()) <=> kind_rank(b.kind()); c != 0) return c;
    switch (a.kind()) {
    case AtomKind::Jet:
        if (auto c = a.sigma().order() <=> b.sigma().order(); c != 0) return c;
        if (auto c = a.index() <=> b.index(); c != 0) return c;
        return a.sigma() <=> b.sigma();
    case AtomKind::Base:
    case AtomKind::Param:
    case AtomKind::Pi:
        return a.index() <=> b.index();
    case AtomKind::Opaque:
    case AtomKind::Func:
    case AtomKind::Recip:
        break;
    }
    if (auto c = a.index() <=> b.index(); c != 0) return c;
    if (a.kind() == AtomKind::Opaque) {
        if (auto c = a.sigma() <=> b.sigma(); c != 0) return c;
    }
    const auto& x = a.args();
    const auto& y = b.args();
    if (auto c = x.size() <=> y.size(); c != 0) return c;
    for (std::size_t k = 0; k < x.size(); ++k) {
        if (auto c = x[k] <=> y[k]; c != 0) return c;
    }
    return std::strong_ordering::equal;
}

std::strong_ordering compare_monomials(const Monomial& a, const Monomial& b)
{
    auto degree = [](const Monomial& m) {
        long d = 0;
        for (auto& f : m) d += f.exponent;
        return d;
    };
    if (auto c = degree(a) <=> degree(b); c != 0) return c;
    auto top = [](const Monomial& m) {
        std::uint32_t o = 0;
        for (auto& f : m) {
            if (f.atom.kind() == AtomKind::Jet) o = std::max(o, f.atom.jet_order());
        }
        return o;
    };
    if (auto c = top(a) <=> top(b); c != 0) return c;
    auto i = a.size();
    auto j = b.size();
    while (i > 0 && j > 0) {
        --i;
        --j;
        if (auto c = a[i].atom <=> b[j].atom; c != 0) return c;
        if (auto c = a[i].exponent <=> b[j].exponent; c != 0) return c;
    }
    return a.size() <=> b.size();
}

// ---------------------------------------------------------------------------
// Derivations and rewriting

namespace {

Expr fn_derivative(Fn f, const Expr& arg)
{
    switch (f) {
    case Fn::Sin: return Expr::func(Fn::Cos, arg);
    case Fn::Cos: return -Expr::func(Fn::Sin, arg);
    case Fn::Exp: return Expr::func(Fn::Exp, arg);
    case Fn::Log: return pow(arg, -1);
    case Fn::Sqrt: return Expr(Rational(1, 2)) * pow(Expr::func(Fn::Sqrt, arg), -1);
    }
    return Expr();
}

class Deriver {
public:
    explicit Deriver(const std::function<Expr(const Atom&)>& leaf) : leaf_(leaf) {}

    Expr run(const Expr& e)
    {
        Accumulator acc;
        for (auto& t : e.poly().terms) {
            for (std::size_t k = 0; k < t.monomial.size(); ++k) {
                const auto& f = t.monomial[k];
                const Expr& d = atom_derivative(f.atom);
                if (d.is_zero()) continue;
                Monomial rest = t.monomial;
                if (f.exponent == 1) {
                    rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(k));
                } else {
                    rest[k].exponent -= 1;
                }
                acc.add_product(t.coef * f.exponent, rest, d);
            }
        }
        return acc.finish();
    }

private:
    const Expr& atom_derivative(const Atom& a)
    {
        if (auto it = cache_.find(a); it != cache_.end()) return it->second;
        Expr d;
        switch (a.kind()) {
        case AtomKind::Jet:
        case AtomKind::Base:
        case AtomKind::Pi:
        case AtomKind::Param:
            d = leaf_(a);
            break;
        case AtomKind::Func: {
            Expr inner = run(a.args().front());
            if (!inner.is_zero()) d = fn_derivative(static_cast<Fn>(a.index()), a.args().front()) * inner;
            break;
        }
        case AtomKind::Opaque:
            for (std::size_t slot = 0; slot < a.args().size(); ++slot) {
                Expr inner = run(a.args()[slot]);
                if (inner.is_zero()) continue;
                d += Expr::opaque(a.index(), a.args(), a.sigma().plus_unit(slot)) * inner;
            }
            break;
        case AtomKind::Recip: {
            Expr inner = run(a.args().front());
            if (!inner.is_zero()) d = -Expr::from_atom(a, 2) * inner;
            break;
        }
        }
        return cache_.emplace(a, std::move(d)).first->second;
    }

    const std::function<Expr(const Atom&)>& leaf_;
    std::unordered_map<Atom, Expr, AtomHash> cache_;
};

class Rewriter {
public:
    explicit Rewriter(std::function<std::optional<Expr>(const Atom&)> leaf) : leaf_(std::move(leaf)) {}

    Expr run(const Expr& e)
    {
        Expr out;
        for (auto& t : e.poly().terms) {
            Expr prod(t.coef);
            for (auto& f : t.monomial) prod = prod * pow(rewrite_atom(f.atom), f.exponent);
            out += prod;
        }
        return out;
    }

private:
    const Expr& rewrite_atom(const Atom& a)
    {
        if (auto it = cache_.find(a); it != cache_.end()) return it->second;
        Expr r;
        switch (a.kind()) {
        case AtomKind::Jet:
        case AtomKind::Base:
        case AtomKind::Pi:
        case AtomKind::Param:
            r = leaf_(a).value_or(Expr::from_atom(a));
            break;
        case AtomKind::Func:
            r = Expr::func(static_cast<Fn>(a.index()), run(a.args().front()));
            break;
        case AtomKind::Opaque: {
            std::vector<Expr> args;
            for (auto& x : a.args()) args.push_back(run(x));
            r = Expr::opaque(a.index(), std::move(args), a.sigma());
            break;
        }
        case AtomKind::Recip:
            r = pow(run(a.args().front()), -1);
            break;
        }
        return cache_.emplace(a, std::move(r)).first->second;
    }

    std::function<std::optional<Expr>(const Atom&)> leaf_;
    std::unordered_map<Atom, Expr, AtomHash> cache_;
};

void collect_jets(const Expr& e, std::set<std::pair<std::size_t, MultiIndex>>& out, bool& base)
{
    for (auto& t : e.poly().terms) {
        for (auto& f : t.monomial) {
            switch (f.atom.kind()) {
            case AtomKind::Jet: out.emplace(f.atom.index(), f.atom.sigma()); break;
            case AtomKind::Base: base = true; break;
            default:
                for (auto& a : f.atom.args()) collect_jets(a, out, base);
            }
        }
    }
}

} // namespace

Expr apply_derivation(const Expr& e, const std::function<Expr(const Atom&)>& leaf)
{
    return Deriver(leaf).run(e);
}

Expr simplify(const Expr& e)
{
    return Rewriter([](const Atom&) -> std::optional<Expr> { return std::nullopt; }).run(e);
}

Expr partial(const Expr& e, const Coordinate& c)
{
    return apply_derivation(e, [&c](const Atom& a) -> Expr {
        if (auto* b = std::get_if<BaseVar>(&c)) {
            return Expr(a.kind() == AtomKind::Base && a.index() == b->index ? 1 : 0);
        }
        const auto& j = std::get<JetVar>(c);
        return Expr(a.kind() == AtomKind::Jet && a.index() == j.field && a.sigma() == j.sigma ? 1 : 0);
    });
}

std::uint32_t jet_order(const Expr& e) { return e.poly().jet_order; }

bool CoordinateLess::operator()(const Coordinate& a, const Coordinate& b) const
{
    if (a.index() != b.index()) return a.index() < b.index();
    if (auto* x = std::get_if<BaseVar>(&a)) return x->index < std::get<BaseVar>(b).index;
    const auto& x = std::get<JetVar>(a);
    const auto& y = std::get<JetVar>(b);
    if (x.field != y.field) return x.field < y.field;
    return x.sigma < y.sigma;
}

Expr substitute(const Expr& e, const Bindings& bindings)
{
    return Rewriter([&bindings](const Atom& a) -> std::optional<Expr> {
               Coordinate c;
               if (a.kind() == AtomKind::Jet) {
                   c = JetVar{a.index(), a.sigma()};
               } else if (a.kind() == AtomKind::Base) {
                   c = BaseVar{a.index()};
               } else {
                   return std::nullopt;
               }
               auto it = bindings.find(c);
               if (it == bindings.end()) return std::nullopt;
               return it->second;
           })
        .run(e);
}

Expr substitute_params(const Expr& e, const std::map<std::size_t, Expr>& bindings)
{
    return Rewriter([&bindings](const Atom& a) -> std::optional<Expr> {
               if (a.kind() != AtomKind::Param) return std::nullopt;
               auto it = bindings.find(a.index());
               if (it == bindings.end()) return std::nullopt;
               return it->second;
           })
        .run(e);
}

std::vector<JetVar> jet_variables(const Expr& e)
{
    std::set<std::pair<std::size_t, MultiIndex>> found;
    bool base = false;
    collect_jets(e, found, base);
    std::vector<JetVar> out;
    for (auto& [i, s] : found) out.push_back({i, s});
    return out;
}

bool depends_on_base(const Expr& e)
{
    std::set<std::pair<std::size_t, MultiIndex>> found;
    bool base = false;
    collect_jets(e, found, base);
    return base;
}

void validate(const Expr& e, const JetContext& ctx)
{
    for (auto& t : e.poly().terms) {
        for (auto& f : t.monomial) {
            const auto& a = f.atom;
            switch (a.kind()) {
            case AtomKind::Jet:
                if (a.index() >= ctx.m() || a.sigma().dim() != ctx.n()) {
                    throw SemanticError("jet coordinate is not valid in this context");
                }
                break;
            case AtomKind::Base:
                if (a.index() >= ctx.n()) throw SemanticError("base coordinate is not valid in this context");
                break;
            case AtomKind::Param:
                if (a.index() >= ctx.parameters().size()) throw SemanticError("unknown parameter");
                break;
            case AtomKind::Opaque:
                if (a.index() >= ctx.functions().size() ||
                    ctx.functions()[a.index()].args.size() != a.args().size()) {
                    throw SemanticError("opaque function application is not valid in this context");
                }
                break;
            default: break;
            }
            for (auto& x : a.args()) validate(x, ctx);
        }
    }
}

double to_double(const Rational& q) { return q.get_d(); }

Real to_real(const Rational& q)
{
    if (q.get_num().fits_slong_p() && q.get_den().fits_slong_p()) {
        return Real(q.get_num().get_si()) / Real(q.get_den().get_si());
    }
    return Real(q.get_num().get_str()) / Real(q.get_den().get_str());
}

namespace {

template <class T>
T convert(const Rational& q)
{
    if constexpr (std::is_same_v<T, double>) {
        return to_double(q);
    } else {
        return to_real(q);
    }
}

template <class T>
T pi_value()
{
    if constexpr (std::is_same_v<T, double>) {
        return std::numbers::pi;
    } else {
        return boost::math::constants::pi<T>();
    }
}

template <class T, class V>
T evaluate_poly(const Expr& e, const V& v);

template <class T, class V>
T evaluate_atom(const Atom& a, const V& v)
{
    using std::cos;
    using std::exp;
    using std::log;
    using std::sin;
    using std::sqrt;
    switch (a.kind()) {
    case AtomKind::Jet:
        if (!v.jet) throw EvaluationError("no value for jet coordinate");
        return v.jet(JetVar{a.index(), a.sigma()});
    case AtomKind::Base:
        if (!v.base) throw EvaluationError("no value for base coordinate");
        return v.base(a.index());
    case AtomKind::Pi: return pi_value<T>();
    case AtomKind::Param:
        if (!v.param) throw EvaluationError("no value for parameter");
        return v.param(a.index());
    case AtomKind::Opaque: throw EvaluationError("opaque function symbol has no numeric value");
    case AtomKind::Recip: {
        T d = evaluate_poly<T>(a.args().front(), v);
        if (d == 0) throw EvaluationError("division by zero during evaluation");
        return T(1) / d;
    }
    case AtomKind::Func: break;
    }
    T x = evaluate_poly<T>(a.args().front(), v);
    switch (static_cast<Fn>(a.index())) {
    case Fn::Sin: return sin(x);
    case Fn::Cos: return cos(x);
    case Fn::Exp: return exp(x);
    case Fn::Log:
        if (!(x > 0)) throw EvaluationError("log of a non-positive value");
        return log(x);
    case Fn::Sqrt:
        if (x < 0) throw EvaluationError("sqrt of a negative value");
        return sqrt(x);
    }
    return T(0);
}

template <class T>
T int_power(T x, int k)
{
    bool invert = k < 0;
    unsigned n = static_cast<unsigned>(invert ? -k : k);
    T result(1);
    while (n > 0) {
        if (n & 1u) result *= x;
        n >>= 1;
        if (n > 0) x *= x;
    }
    return invert ? T(1) / result : result;
}

template <class T, class V>
T evaluate_poly(const Expr& e, const V& v)
{
    T sum(0);
    for (auto& t : e.poly().terms) {
        T prod = convert<T>(t.coef);
        for (auto& f : t.monomial) {
            T x = evaluate_atom<T>(f.atom, v);
            if (f.exponent < 0 && x == 0) throw EvaluationError("division by zero during evaluation");
            prod *= f.exponent == 1 ? x : int_power(x, f.exponent);
        }
        sum += prod;
    }
    return sum;
}

} // namespace

double evaluate(const Expr& e, const Valuation& v) { return evaluate_poly<double>(e, v); }

Real evaluate_precise(const Expr& e, const PreciseValuation& v) { return evaluate_poly<Real>(e, v); }

} // namespace jetvar
