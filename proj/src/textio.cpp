#include "jetvar/textio.hpp"

#include "jetvar/error.hpp"

#include <cctype>
#include <sstream>

namespace jetvar {

using nlohmann::json;

Format parse_format(const std::string& name)
{
    if (name == "plain") return Format::Plain;
    if (name == "latex") return Format::Latex;
    if (name == "structured") return Format::Structured;
    throw SemanticError("unknown output format '" + name + "'");
}

// ---------------------------------------------------------------------------
// Lexer / parser

namespace {

enum class Tok { Number, Ident, Op, End };

struct Token {
    Tok kind = Tok::End;
    std::string text;   ///< number literal, identifier name or operator char
    std::string suffix; ///< derivative suffix contents for identifiers
    bool has_suffix = false;
    bool braced = false;
    int line = 1;
    int column = 1;
};

class Lexer {
public:
    Lexer(std::string_view src, int line, int column) : src_(src), line_(line), column_(column) {}

    Token next()
    {
        skip_space();
        Token t;
        t.line = line_;
        t.column = column_;
        if (pos_ >= src_.size()) return t;
        char c = src_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || (c == '.' && pos_ + 1 < src_.size() &&
                                                             std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
            t.kind = Tok::Number;
            t.text = lex_number();
            return t;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            t.kind = Tok::Ident;
            while (pos_ < src_.size() && std::isalnum(static_cast<unsigned char>(src_[pos_]))) t.text += advance();
            if (pos_ < src_.size() && src_[pos_] == '_') {
                advance();
                t.has_suffix = true;
                if (pos_ < src_.size() && src_[pos_] == '{') {
                    t.braced = true;
                    advance();
                    while (pos_ < src_.size() && src_[pos_] != '}') t.suffix += advance();
                    if (pos_ >= src_.size()) fail("unterminated derivative suffix", t.line, t.column);
                    advance();
                } else {
                    while (pos_ < src_.size() && std::isalnum(static_cast<unsigned char>(src_[pos_]))) {
                        t.suffix += advance();
                    }
                    if (t.suffix.empty()) fail("malformed derivative suffix", t.line, t.column);
                }
            }
            return t;
        }
        if (std::string_view("+-*/^(),").find(c) != std::string_view::npos) {
            t.kind = Tok::Op;
            t.text = std::string(1, advance());
            return t;
        }
        fail(std::string("unexpected character '") + c + "'", t.line, t.column);
    }

    [[noreturn]] static void fail(const std::string& msg, int line, int column)
    {
        throw ParseError(msg, line, column);
    }

private:
    char advance()
    {
        char c = src_[pos_++];
        if (c == '\n') {
            ++line_;
            column_ = 1;
        } else {
            ++column_;
        }
        return c;
    }

    void skip_space()
    {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) advance();
    }

    std::string lex_number()
    {
        std::string s;
        auto digits = [&] {
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) s += advance();
        };
        digits();
        if (pos_ < src_.size() && src_[pos_] == '.') {
            s += advance();
            digits();
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t save = pos_;
            std::size_t k = pos_ + 1;
            if (k < src_.size() && (src_[k] == '+' || src_[k] == '-')) ++k;
            if (k < src_.size() && std::isdigit(static_cast<unsigned char>(src_[k]))) {
                while (pos_ < k) s += advance();
                digits();
            } else {
                pos_ = save;
            }
        }
        return s;
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    int line_;
    int column_;
};

/// Exact rational value of a decimal literal such as "0.25" or "1e-3".
Rational decimal_to_rational(const std::string& text)
{
    std::string mantissa = text;
    long exponent = 0;
    if (auto e = text.find_first_of("eE"); e != std::string::npos) {
        mantissa = text.substr(0, e);
        exponent = std::stol(text.substr(e + 1));
    }
    std::string digits;
    for (char c : mantissa) {
        if (c == '.') {
            exponent -= static_cast<long>(mantissa.size() - mantissa.find('.') - 1);
        } else {
            digits += c;
        }
    }
    mpz_class num(digits.empty() ? "0" : digits, 10);
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(exponent)));
    Rational q = exponent >= 0 ? Rational(num * scale) : Rational(num, scale);
    q.canonicalize();
    return q;
}

std::vector<std::string> split_words(const std::string& s)
{
    std::istringstream in(s);
    std::vector<std::string> out;
    for (std::string w; in >> w;) out.push_back(w);
    return out;
}

class Parser {
public:
    Parser(std::string_view src, const JetContext& ctx, int line, int column) : lex_(src, line, column), ctx_(ctx)
    {
        cur_ = lex_.next();
        peek_ = lex_.next();
    }

    Expr parse_all()
    {
        Expr e = expr();
        if (cur_.kind != Tok::End) fail("unexpected '" + cur_.text + "'");
        return e;
    }

    JetVar jet_only()
    {
        if (cur_.kind != Tok::Ident) fail("expected a jet coordinate");
        auto field = ctx_.find_field(cur_.text);
        if (!field) fail("unknown field '" + cur_.text + "'");
        JetVar v{*field, cur_.has_suffix ? base_suffix(cur_) : MultiIndex::zero(ctx_.n())};
        advance();
        if (cur_.kind != Tok::End) fail("unexpected '" + cur_.text + "'");
        return v;
    }

    MultiIndex base_suffix(const Token& t) const
    {
        const auto& names = ctx_.base_names();
        std::vector<std::uint32_t> counts(ctx_.n(), 0);
        for (auto& w : suffix_words(t, names)) {
            auto idx = ctx_.find_base(w);
            if (!idx) Lexer::fail("malformed derivative suffix: '" + w + "' is not a base variable", t.line, t.column);
            ++counts[*idx];
        }
        return MultiIndex(std::move(counts));
    }

private:
    [[noreturn]] void fail(const std::string& msg) const { Lexer::fail(msg, cur_.line, cur_.column); }

    void advance()
    {
        cur_ = peek_;
        if (cur_.kind != Tok::End) peek_ = lex_.next();
    }

    bool is_op(const Token& t, char c) const { return t.kind == Tok::Op && t.text[0] == c; }

    void expect(char c)
    {
        if (!is_op(cur_, c)) fail(std::string("expected '") + c + "'");
        advance();
    }

    Expr expr()
    {
        Expr e = term();
        while (is_op(cur_, '+') || is_op(cur_, '-')) {
            bool minus = cur_.text[0] == '-';
            advance();
            Expr t = term();
            e = minus ? e - t : e + t;
        }
        return e;
    }

    Expr term()
    {
        Expr e = unary();
        while (is_op(cur_, '*') || is_op(cur_, '/')) {
            bool divide = cur_.text[0] == '/';
            Token at = cur_;
            advance();
            Expr f = unary();
            if (divide) {
                try {
                    e = e / f;
                } catch (const DivisionByZero& err) {
                    Lexer::fail(err.what(), at.line, at.column);
                }
            } else {
                e = e * f;
            }
        }
        return e;
    }

    Expr unary()
    {
        if (is_op(cur_, '-')) {
            advance();
            return -unary();
        }
        if (is_op(cur_, '+')) {
            advance();
            return unary();
        }
        return power();
    }

    Expr power()
    {
        Expr b = atom();
        if (!is_op(cur_, '^')) return b;
        Token at = cur_;
        advance();
        bool paren = false;
        if (is_op(cur_, '(')) {
            paren = true;
            advance();
        }
        bool negative = false;
        if (is_op(cur_, '-')) {
            negative = true;
            advance();
        }
        if (cur_.kind != Tok::Number || cur_.text.find_first_not_of("0123456789") != std::string::npos) {
            fail("exponent must be an integer");
        }
        long k = std::stol(cur_.text);
        advance();
        if (paren) expect(')');
        try {
            return pow(b, static_cast<int>(negative ? -k : k));
        } catch (const DivisionByZero& err) {
            Lexer::fail(err.what(), at.line, at.column);
        }
    }

    std::vector<std::string> suffix_words(const Token& t, const std::vector<std::string>& names) const
    {
        if (t.braced) return split_words(t.suffix);
        bool single = std::all_of(names.begin(), names.end(), [](const std::string& s) { return s.size() == 1; });
        if (!single) {
            Lexer::fail("malformed derivative suffix: shorthand needs single-letter names, use braces", t.line,
                        t.column);
        }
        std::vector<std::string> out;
        for (char c : t.suffix) out.emplace_back(1, c);
        return out;
    }

    std::vector<Expr> call_args()
    {
        expect('(');
        std::vector<Expr> args;
        if (!is_op(cur_, ')')) {
            args.push_back(expr());
            while (is_op(cur_, ',')) {
                advance();
                args.push_back(expr());
            }
        }
        expect(')');
        return args;
    }

    Expr atom()
    {
        if (cur_.kind == Tok::Number) {
            Expr e(decimal_to_rational(cur_.text));
            advance();
            return e;
        }
        if (is_op(cur_, '(')) {
            advance();
            Expr e = expr();
            expect(')');
            return e;
        }
        if (cur_.kind != Tok::Ident) fail(cur_.kind == Tok::End ? "unexpected end of expression" : "unexpected '" + cur_.text + "'");

        Token id = cur_;
        advance();
        if (is_op(cur_, '(')) return call(id);

        if (auto field = ctx_.find_field(id.text)) {
            return Expr::jet(*field, id.has_suffix ? base_suffix(id) : MultiIndex::zero(ctx_.n()));
        }
        if (id.has_suffix) Lexer::fail("derivative suffix on '" + id.text + "', which is not a field", id.line, id.column);
        if (auto b = ctx_.find_base(id.text)) return Expr::base(*b);
        if (auto p = ctx_.find_parameter(id.text)) return Expr::param(*p);
        if (id.text == "pi") return Expr::pi();
        Lexer::fail("unknown identifier '" + id.text + "'", id.line, id.column);
    }

    Expr call(const Token& id)
    {
        if (auto f = fn_from_name(id.text)) {
            if (id.has_suffix) Lexer::fail("elementary functions take no derivative suffix", id.line, id.column);
            auto args = call_args();
            if (args.size() != 1) Lexer::fail("arity mismatch: " + id.text + " takes one argument", id.line, id.column);
            return Expr::func(*f, args.front());
        }
        auto fid = ctx_.find_function(id.text);
        if (!fid) Lexer::fail("unknown function '" + id.text + "'", id.line, id.column);
        const auto& decl = ctx_.functions()[*fid];
        auto args = call_args();
        if (args.size() != decl.args.size()) {
            Lexer::fail("arity mismatch: " + id.text + " takes " + std::to_string(decl.args.size()) + " argument(s)",
                        id.line, id.column);
        }
        std::vector<std::uint32_t> deriv(decl.args.size(), 0);
        if (id.has_suffix) {
            std::vector<std::string> names;
            for (auto& a : decl.args) names.push_back(ctx_.coordinate_name(a));
            for (auto& w : suffix_words(id, names)) {
                auto it = std::find(names.begin(), names.end(), w);
                if (it == names.end()) {
                    Lexer::fail("malformed derivative suffix: '" + w + "' is not an argument of " + id.text, id.line,
                                id.column);
                }
                ++deriv[static_cast<std::size_t>(it - names.begin())];
            }
        }
        return Expr::opaque(*fid, std::move(args), MultiIndex(std::move(deriv)));
    }

    Lexer lex_;
    const JetContext& ctx_;
    Token cur_;
    Token peek_;
};

} // namespace

Expr parse_expr(std::string_view src, const JetContext& ctx, int line, int column)
{
    return Parser(src, ctx, line, column).parse_all();
}

JetVar parse_jet_variable(std::string_view src, const JetContext& ctx, int line, int column)
{
    return Parser(src, ctx, line, column).jet_only();
}

MultiIndex parse_derivative_list(std::string_view src, const JetContext& ctx, int line, int column)
{
    std::vector<std::uint32_t> counts(ctx.n(), 0);
    for (auto& w : split_words(std::string(src))) {
        auto idx = ctx.find_base(w);
        if (!idx) throw ParseError("'" + w + "' is not a base variable", line, column);
        ++counts[*idx];
    }
    return MultiIndex(std::move(counts));
}

// ---------------------------------------------------------------------------
// Printers

namespace {

std::string rational_latex(const Rational& q)
{
    if (q.get_den() == 1) return q.get_num().get_str();
    return "\\frac{" + q.get_num().get_str() + "}{" + q.get_den().get_str() + "}";
}

class Printer {
public:
    Printer(const JetContext& ctx, bool latex) : ctx_(ctx), latex_(latex) {}

    std::string expr(const Expr& e) const
    {
        const auto& terms = e.poly().terms;
        if (terms.empty()) return "0";
        std::vector<const Term*> order;
        for (auto& t : terms) order.push_back(&t);
        // Lead with a positive term when there is one.
        if (order.front()->coef < 0) {
            auto pos = std::find_if(order.begin(), order.end(), [](const Term* t) { return t->coef > 0; });
            if (pos != order.end()) std::rotate(order.begin(), pos, pos + 1);
        }
        std::string out;
        for (std::size_t k = 0; k < order.size(); ++k) {
            const Term& t = *order[k];
            bool negative = t.coef < 0;
            if (k == 0) {
                if (negative) out += "-";
            } else {
                out += negative ? " - " : " + ";
            }
            out += term(t.monomial, abs(t.coef));
        }
        return out;
    }

    std::string sigma(const MultiIndex& s) const
    {
        return s.to_string(ctx_.base_names(), ctx_.single_letter_base() ? "" : " ");
    }

private:
    std::string term(const Monomial& m, const Rational& c) const
    {
        if (m.empty()) return latex_ ? rational_latex(c) : c.get_str();
        std::string out;
        if (c != 1) out = latex_ ? rational_latex(c) + " " : c.get_str() + "*";
        for (std::size_t k = 0; k < m.size(); ++k) {
            if (k > 0) out += latex_ ? " " : "*";
            out += factor(m[k]);
        }
        return out;
    }

    std::string factor(const Factor& f) const
    {
        if (f.atom.kind() == AtomKind::Recip) {
            std::string inner = expr(f.atom.args().front());
            if (latex_) return "\\left(" + inner + "\\right)^{-" + std::to_string(f.exponent) + "}";
            return "(" + inner + ")^-" + std::to_string(f.exponent);
        }
        std::string a = atom(f.atom);
        if (f.exponent == 1) return a;
        if (latex_) return a + "^{" + std::to_string(f.exponent) + "}";
        return a + "^" + std::to_string(f.exponent);
    }

    std::string args(const std::vector<Expr>& xs) const
    {
        std::string out;
        for (std::size_t k = 0; k < xs.size(); ++k) {
            if (k > 0) out += ", ";
            out += expr(xs[k]);
        }
        return latex_ ? "\\left(" + out + "\\right)" : "(" + out + ")";
    }

    std::string atom(const Atom& a) const
    {
        switch (a.kind()) {
        case AtomKind::Jet: {
            const auto& name = ctx_.fiber_names().at(a.index());
            if (a.sigma().is_zero()) return name;
            if (latex_) return name + "_{" + sigma(a.sigma()) + "}";
            return ctx_.coordinate_name(JetVar{a.index(), a.sigma()});
        }
        case AtomKind::Base: return ctx_.base_names().at(a.index());
        case AtomKind::Pi: return latex_ ? "\\pi" : "pi";
        case AtomKind::Param: return ctx_.parameters().at(a.index());
        case AtomKind::Func: {
            auto f = static_cast<Fn>(a.index());
            if (latex_ && f == Fn::Sqrt) return "\\sqrt{" + expr(a.args().front()) + "}";
            return (latex_ ? "\\" : "") + std::string(fn_name(f)) + args(a.args());
        }
        case AtomKind::Opaque: {
            const auto& decl = ctx_.functions().at(a.index());
            std::string d;
            if (!a.sigma().is_zero()) {
                std::vector<std::string> names;
                for (auto& x : decl.args) names.push_back(ctx_.coordinate_name(x));
                d = a.sigma().to_string(names, " ");
            }
            if (latex_) return (d.empty() ? "" : "\\partial_{" + d + "} ") + decl.name + args(a.args());
            return decl.name + (d.empty() ? "" : "_{" + d + "}") + args(a.args());
        }
        case AtomKind::Recip: break;
        }
        return "(" + expr(a.args().front()) + ")";
    }

    const JetContext& ctx_;
    bool latex_;
};

std::string field_label(std::size_t i, bool latex)
{
    return latex ? "_{" + std::to_string(i + 1) + "}" : "_" + std::to_string(i + 1);
}

} // namespace

std::string print(const Expr& e, const JetContext& ctx, Format fmt)
{
    if (fmt == Format::Structured) return to_json(e, ctx).dump();
    return Printer(ctx, fmt == Format::Latex).expr(e);
}

std::string print(const SourceForm& e, const JetContext& ctx, Format fmt, const std::string& name)
{
    if (fmt == Format::Structured) return to_json(e, ctx).dump();
    bool latex = fmt == Format::Latex;
    Printer p(ctx, latex);
    std::string out;
    for (std::size_t i = 0; i < e.m(); ++i) {
        if (i > 0) out += "\n";
        out += name + field_label(i, latex) + " = " + p.expr(e.components[i]);
    }
    return out;
}

std::string print(const BilinearForm& a, const JetContext& ctx, Format fmt, const std::string& name)
{
    if (fmt == Format::Structured) return to_json(a, ctx).dump();
    bool latex = fmt == Format::Latex;
    Printer p(ctx, latex);
    if (a.is_zero()) return name + " = 0";
    std::string out;
    for (auto& [k, v] : a.components()) {
        if (!out.empty()) out += "\n";
        const auto& f = ctx.fiber_names();
        if (latex) {
            std::string sup = k.sigma.is_zero() ? "" : "^{" + p.sigma(k.sigma) + "}";
            out += name + sup + "_{" + f.at(k.first) + " " + f.at(k.second) + "} = " + p.expr(v);
        } else {
            out += name + "[" + k.sigma.to_string(ctx.base_names()) + "](" + f.at(k.first) + "," + f.at(k.second) +
                   ") = " + p.expr(v);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Structured format

namespace {

json sigma_json(const MultiIndex& s)
{
    json a = json::array();
    for (auto c : s.counts()) a.push_back(c);
    return a;
}

MultiIndex sigma_from_json(const json& j, std::size_t dim)
{
    if (!j.is_array() || j.size() != dim) throw ParseError("structured: bad multi-index", 1, 1);
    std::vector<std::uint32_t> c;
    for (auto& x : j) c.push_back(x.get<std::uint32_t>());
    return MultiIndex(std::move(c));
}

json atom_json(const Atom& a, const JetContext& ctx)
{
    json j;
    switch (a.kind()) {
    case AtomKind::Jet:
        j["kind"] = "jet";
        j["field"] = ctx.fiber_names().at(a.index());
        j["sigma"] = sigma_json(a.sigma());
        break;
    case AtomKind::Base:
        j["kind"] = "base";
        j["name"] = ctx.base_names().at(a.index());
        break;
    case AtomKind::Pi: j["kind"] = "pi"; break;
    case AtomKind::Param:
        j["kind"] = "param";
        j["name"] = ctx.parameters().at(a.index());
        break;
    case AtomKind::Func:
        j["kind"] = "func";
        j["name"] = fn_name(static_cast<Fn>(a.index()));
        j["arg"] = to_json(a.args().front(), ctx);
        break;
    case AtomKind::Opaque: {
        j["kind"] = "opaque";
        j["name"] = ctx.functions().at(a.index()).name;
        j["deriv"] = sigma_json(a.sigma());
        json args = json::array();
        for (auto& x : a.args()) args.push_back(to_json(x, ctx));
        j["args"] = args;
        break;
    }
    case AtomKind::Recip:
        j["kind"] = "recip";
        j["arg"] = to_json(a.args().front(), ctx);
        break;
    }
    return j;
}

template <class F>
auto lookup(const std::optional<std::size_t>& v, const std::string& what, const F& name)
{
    if (!v) throw ParseError("structured: unknown " + what + " '" + name + "'", 1, 1);
    return *v;
}

Expr atom_from_json(const json& j, const JetContext& ctx)
{
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "jet") {
        auto name = j.at("field").get<std::string>();
        return Expr::jet(lookup(ctx.find_field(name), "field", name), sigma_from_json(j.at("sigma"), ctx.n()));
    }
    if (kind == "base") {
        auto name = j.at("name").get<std::string>();
        return Expr::base(lookup(ctx.find_base(name), "base variable", name));
    }
    if (kind == "pi") return Expr::pi();
    if (kind == "param") {
        auto name = j.at("name").get<std::string>();
        return Expr::param(lookup(ctx.find_parameter(name), "parameter", name));
    }
    if (kind == "func") {
        auto name = j.at("name").get<std::string>();
        auto f = fn_from_name(name);
        if (!f) throw ParseError("structured: unknown function '" + name + "'", 1, 1);
        return Expr::func(*f, expr_from_json(j.at("arg"), ctx));
    }
    if (kind == "opaque") {
        auto name = j.at("name").get<std::string>();
        auto id = lookup(ctx.find_function(name), "function", name);
        std::vector<Expr> args;
        for (auto& x : j.at("args")) args.push_back(expr_from_json(x, ctx));
        if (args.size() != ctx.functions()[id].args.size()) throw ParseError("structured: arity mismatch", 1, 1);
        auto deriv = sigma_from_json(j.at("deriv"), args.size());
        return Expr::opaque(id, std::move(args), std::move(deriv));
    }
    if (kind == "recip") return pow(expr_from_json(j.at("arg"), ctx), -1);
    throw ParseError("structured: unknown atom kind '" + kind + "'", 1, 1);
}

} // namespace

json to_json(const Expr& e, const JetContext& ctx)
{
    json terms = json::array();
    for (auto& t : e.poly().terms) {
        json factors = json::array();
        for (auto& f : t.monomial) factors.push_back({{"atom", atom_json(f.atom, ctx)}, {"exp", f.exponent}});
        terms.push_back({{"coef", t.coef.get_str()}, {"factors", factors}});
    }
    return {{"terms", terms}};
}

json to_json(const SourceForm& e, const JetContext& ctx)
{
    json comps = json::array();
    for (std::size_t i = 0; i < e.m(); ++i) {
        comps.push_back({{"field", ctx.fiber_names().at(i)}, {"expr", to_json(e.components[i], ctx)}});
    }
    return {{"kind", "source"}, {"components", comps}};
}

json to_json(const BilinearForm& a, const JetContext& ctx)
{
    json comps = json::array();
    for (auto& [k, v] : a.components()) {
        comps.push_back({{"sigma", sigma_json(k.sigma)},
                         {"first", ctx.fiber_names().at(k.first)},
                         {"second", ctx.fiber_names().at(k.second)},
                         {"expr", to_json(v, ctx)}});
    }
    return {{"kind", "bilinear"}, {"components", comps}};
}

json to_json(const JetContext& ctx)
{
    json fns = json::array();
    for (auto& f : ctx.functions()) {
        json args = json::array();
        for (auto& a : f.args) args.push_back(ctx.coordinate_name(a));
        fns.push_back({{"name", f.name}, {"args", args}});
    }
    return {{"base", ctx.base_names()}, {"fields", ctx.fiber_names()}, {"functions", fns},
            {"parameters", ctx.parameters()}};
}

Expr expr_from_json(const json& j, const JetContext& ctx)
{
    try {
        Expr out;
        for (auto& t : j.at("terms")) {
            Rational c(t.at("coef").get<std::string>(), 10);
            if (c.get_den() == 0) throw ParseError("structured: zero denominator", 1, 1);
            c.canonicalize();
            Expr term(c);
            for (auto& f : t.at("factors")) term *= pow(atom_from_json(f.at("atom"), ctx), f.at("exp").get<int>());
            out += term;
        }
        return out;
    } catch (const json::exception& e) {
        throw ParseError(std::string("structured: ") + e.what(), 1, 1);
    } catch (const std::invalid_argument& e) {
        throw ParseError(std::string("structured: bad number: ") + e.what(), 1, 1);
    }
}

SourceForm source_from_json(const json& j, const JetContext& ctx)
{
    try {
        SourceForm e{std::vector<Expr>(ctx.m())};
        for (auto& c : j.at("components")) {
            auto name = c.at("field").get<std::string>();
            e.components[lookup(ctx.find_field(name), "field", name)] = expr_from_json(c.at("expr"), ctx);
        }
        return e;
    } catch (const json::exception& e) {
        throw ParseError(std::string("structured: ") + e.what(), 1, 1);
    }
}

BilinearForm bilinear_from_json(const json& j, const JetContext& ctx)
{
    try {
        BilinearForm a(ctx.n(), ctx.m());
        for (auto& c : j.at("components")) {
            auto first = c.at("first").get<std::string>();
            auto second = c.at("second").get<std::string>();
            a.add(sigma_from_json(c.at("sigma"), ctx.n()), lookup(ctx.find_field(first), "field", first),
                  lookup(ctx.find_field(second), "field", second), expr_from_json(c.at("expr"), ctx));
        }
        return a;
    } catch (const json::exception& e) {
        throw ParseError(std::string("structured: ") + e.what(), 1, 1);
    }
}

Expr parse_structured(std::string_view text, const JetContext& ctx)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("structured: ") + e.what(), 1, static_cast<int>(e.byte));
    }
    return expr_from_json(j, ctx);
}

} // namespace jetvar
