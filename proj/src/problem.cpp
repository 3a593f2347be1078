#include "jetvar/problem.hpp"

#include "jetvar/error.hpp"
#include "jetvar/textio.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace jetvar {

namespace {

struct Line {
    std::string text; ///< comment stripped, trailing space trimmed
    int number = 0;
    bool indented = false;
    int indent = 0;
};

std::string trim(const std::string& s)
{
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<Line> split_lines(std::string_view text)
{
    std::vector<Line> out;
    std::istringstream in{std::string(text)};
    int number = 0;
    for (std::string raw; std::getline(in, raw);) {
        ++number;
        if (auto h = raw.find('#'); h != std::string::npos) raw.erase(h);
        auto content = trim(raw);
        if (content.empty()) continue;
        Line l;
        l.number = number;
        l.indent = static_cast<int>(raw.find_first_not_of(" \t"));
        l.indented = l.indent > 0;
        l.text = content;
        out.push_back(std::move(l));
    }
    return out;
}

std::vector<std::string> words(const std::string& s)
{
    std::istringstream in(s);
    std::vector<std::string> out;
    for (std::string w; in >> w;) out.push_back(w);
    return out;
}

[[noreturn]] void fail(const std::string& msg, const Line& l, int column = 0)
{
    throw ParseError(msg, l.number, column > 0 ? column : l.indent + 1);
}

/// "lhs = rhs" split; returns the rhs column (1-based) for diagnostics.
std::pair<std::string, std::string> split_assign(const Line& l, const std::string& text, int& rhs_column)
{
    auto eq = text.find('=');
    if (eq == std::string::npos) fail("expected '='", l);
    auto rhs = text.substr(eq + 1);
    rhs_column = l.indent + 1 + static_cast<int>(eq + 1 + rhs.find_first_not_of(' '));
    return {trim(text.substr(0, eq)), trim(rhs)};
}

struct Block {
    Line header;
    std::vector<Line> entries;
};

std::vector<Block> group(const std::vector<Line>& lines)
{
    std::vector<Block> out;
    for (auto& l : lines) {
        if (!l.indented) {
            out.push_back({l, {}});
        } else {
            if (out.empty()) fail("indented entry outside of a block", l);
            out.back().entries.push_back(l);
        }
    }
    return out;
}

JetContext parse_context(const Block& b)
{
    if (words(b.header.text) != std::vector<std::string>{"context"}) fail("expected 'context'", b.header);
    std::vector<std::string> base;
    std::vector<std::string> fields;
    std::vector<std::string> params;
    struct PendingFn {
        std::string name;
        std::vector<std::string> args;
        Line line;
    };
    std::vector<PendingFn> fns;
    for (auto& l : b.entries) {
        auto listed = l.text;
        std::replace(listed.begin(), listed.end(), ',', ' ');
        auto w = words(listed);
        const auto& key = w.front();
        std::vector<std::string> rest(w.begin() + 1, w.end());
        if (key == "base") {
            base.insert(base.end(), rest.begin(), rest.end());
        } else if (key == "fields") {
            fields.insert(fields.end(), rest.begin(), rest.end());
        } else if (key == "parameter" || key == "parameters") {
            params.insert(params.end(), rest.begin(), rest.end());
        } else if (key == "function") {
            auto body = trim(l.text.substr(8));
            auto open = body.find('(');
            auto close = body.rfind(')');
            if (open == std::string::npos || close == std::string::npos || close < open) {
                fail("expected 'function name(arg, ...)'", l);
            }
            PendingFn f{trim(body.substr(0, open)), {}, l};
            std::string args = body.substr(open + 1, close - open - 1);
            std::replace(args.begin(), args.end(), ',', ' ');
            f.args = words(args);
            fns.push_back(std::move(f));
        } else {
            fail("unknown context entry '" + key + "'", l);
        }
    }
    std::vector<std::string> declared = base;
    declared.insert(declared.end(), fields.begin(), fields.end());
    declared.insert(declared.end(), params.begin(), params.end());
    for (auto& name : declared) {
        if (name.find_first_not_of("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789") !=
                std::string::npos ||
            !std::isalpha(static_cast<unsigned char>(name[0]))) {
            fail("invalid identifier '" + name + "'", b.header);
        }
    }
    try {
        JetContext bare(base, fields, {}, params);
        std::vector<OpaqueFunction> decls;
        for (auto& f : fns) {
            OpaqueFunction d{f.name, {}};
            for (auto& a : f.args) {
                if (auto x = bare.find_base(a)) {
                    d.args.emplace_back(BaseVar{*x});
                } else if (auto y = bare.find_field(a)) {
                    d.args.emplace_back(JetVar{*y, MultiIndex::zero(bare.n())});
                } else {
                    fail("function argument '" + a + "' is not a base variable or field", f.line);
                }
            }
            decls.push_back(std::move(d));
        }
        return JetContext(base, fields, std::move(decls), params);
    } catch (const SemanticError& e) {
        fail(e.what(), b.header);
    }
}

std::vector<Expr> field_entries(const Block& b, const JetContext& ctx, const JetContext& parse_ctx, bool all_required)
{
    std::vector<std::optional<Expr>> comps(ctx.m());
    for (auto& l : b.entries) {
        int col = 0;
        auto [lhs, rhs] = split_assign(l, l.text, col);
        auto field = ctx.find_field(lhs);
        if (!field) fail("unknown field '" + lhs + "'", l);
        if (comps[*field]) fail("duplicate entry for field '" + lhs + "'", l);
        comps[*field] = parse_expr(rhs, parse_ctx, l.number, col);
    }
    std::vector<Expr> out;
    for (std::size_t i = 0; i < comps.size(); ++i) {
        if (!comps[i] && all_required) {
            fail("missing entry for field '" + ctx.fiber_names()[i] + "'", b.header);
        }
        out.push_back(comps[i].value_or(Expr()));
    }
    return out;
}

void require_base_only(const Block& b, const std::vector<Expr>& comps, const JetContext& ctx, const std::string& what)
{
    for (auto& l : b.entries) {
        auto field = ctx.find_field(trim(l.text.substr(0, l.text.find('='))));
        if (field && !jet_variables(comps[*field]).empty()) {
            fail(what + " may only reference base coordinates", l);
        }
    }
}

/// Name after the keyword; rejects missing names.
std::string block_name(const Block& b, std::size_t at = 1)
{
    auto w = words(b.header.text);
    if (w.size() <= at) fail("'" + w.front() + "' needs a name", b.header);
    auto name = w[at];
    if (auto eq = name.find('='); eq != std::string::npos) name.erase(eq);
    if (name.empty()) fail("'" + w.front() + "' needs a name", b.header);
    return name;
}

Expr inline_expr(const Block& b, const JetContext& ctx)
{
    int col = 0;
    auto [lhs, rhs] = split_assign(b.header, b.header.text, col);
    if (!b.entries.empty()) fail("inline definition cannot also have entries", b.entries.front());
    return parse_expr(rhs, ctx, b.header.number, col);
}

Expr constant_bound(const std::string& text, const JetContext& ctx, const Line& l)
{
    Expr e = parse_expr(text, ctx, l.number, l.indent + 1);
    if (!jet_variables(e).empty() || depends_on_base(e)) fail("domain bounds must be constants", l);
    return e;
}

NumericDecl parse_numeric(const Block& b, const JetContext& ctx)
{
    NumericDecl out;
    std::vector<std::optional<std::pair<Expr, Expr>>> domain(ctx.n());
    for (auto& l : b.entries) {
        auto listed = l.text;
        std::replace(listed.begin(), listed.end(), ',', ' ');
        auto w = words(listed);
        const auto& key = w.front();
        auto value = trim(l.text.substr(key.size()));
        try {
            if (key == "domain") {
                int col = 0;
                auto [lhs, rhs] = split_assign(l, value, col);
                auto idx = ctx.find_base(lhs);
                if (!idx) fail("unknown base variable '" + lhs + "'", l);
                if (rhs.size() < 2 || rhs.front() != '[' || rhs.back() != ']') fail("expected '[a, b]'", l);
                auto inner = rhs.substr(1, rhs.size() - 2);
                auto comma = inner.find(',');
                if (comma == std::string::npos) fail("expected '[a, b]'", l);
                domain[*idx] = std::make_pair(constant_bound(inner.substr(0, comma), ctx, l),
                                              constant_bound(inner.substr(comma + 1), ctx, l));
            } else if (key == "nodes") {
                out.nodes = std::stoul(value);
                if (out.nodes == 0) fail("nodes must be positive", l);
            } else if (key == "step") {
                out.step = std::stod(value);
            } else if (key == "tol") {
                out.tol = std::stod(value);
            } else if (key == "atol") {
                out.abs_tol = std::stod(value);
            } else {
                fail("unknown numeric entry '" + key + "'", l);
            }
        } catch (const std::invalid_argument&) {
            fail("bad number '" + value + "'", l);
        } catch (const std::out_of_range&) {
            fail("number out of range '" + value + "'", l);
        }
    }
    for (std::size_t k = 0; k < ctx.n(); ++k) {
        if (!domain[k]) fail("numeric block needs a domain for '" + ctx.base_names()[k] + "'", b.header);
        out.lower.push_back(domain[k]->first);
        out.upper.push_back(domain[k]->second);
    }
    return out;
}

BilinearForm parse_bilinear(const Block& b, const JetContext& ctx)
{
    BilinearForm form(ctx.n(), ctx.m());
    for (auto& l : b.entries) {
        int col = 0;
        auto [lhs, rhs] = split_assign(l, l.text, col);
        auto close = lhs.find(']');
        auto open = lhs.find('(');
        auto end = lhs.find(')');
        if (lhs.empty() || lhs.front() != '[' || close == std::string::npos || open == std::string::npos ||
            end == std::string::npos || open < close) {
            fail("expected '[derivatives](first,second) = expr'", l);
        }
        auto sigma = parse_derivative_list(lhs.substr(1, close - 1), ctx, l.number, l.indent + 1);
        auto pair = lhs.substr(open + 1, end - open - 1);
        auto comma = pair.find(',');
        if (comma == std::string::npos) fail("expected '(first,second)'", l);
        auto first = ctx.find_field(trim(pair.substr(0, comma)));
        auto second = ctx.find_field(trim(pair.substr(comma + 1)));
        if (!first || !second) fail("unknown field in bilinear entry", l);
        form.add(sigma, *first, *second, parse_expr(rhs, ctx, l.number, col));
    }
    return form;
}

template <class T, class Key>
const T& find_named(const std::vector<T>& items, const std::string& name, const char* what, Key key)
{
    if (name.empty()) {
        if (items.size() == 1) return items.front();
        throw SemanticError(std::string("select a ") + what + " by name (" + std::to_string(items.size()) +
                            " defined)");
    }
    for (auto& it : items) {
        if (key(it) == name) return it;
    }
    throw SemanticError(std::string("no ") + what + " named '" + name + "'");
}

} // namespace

ProblemFile parse_problem(std::string_view text)
{
    auto blocks = group(split_lines(text));
    if (blocks.empty()) throw ParseError("empty problem file", 1, 1);
    ProblemFile p;
    p.ctx = parse_context(blocks.front());
    p.flow_context = p.ctx.with_parameter(kFlowParameter);
    const auto& ctx = p.ctx;

    std::set<std::string> names;
    for (std::size_t k = 1; k < blocks.size(); ++k) {
        const auto& b = blocks[k];
        auto kw = words(b.header.text).front();
        if (kw == "context") fail("duplicate context declaration", b.header);
        if (kw == "numeric") {
            if (p.numeric) fail("duplicate numeric block", b.header);
            p.numeric = parse_numeric(b, ctx);
            continue;
        }
        auto name = block_name(b);
        if (!names.insert(name).second) fail("duplicate name '" + name + "'", b.header);
        if (kw == "lagrangian") {
            p.lagrangians.emplace_back(name, Lagrangian{inline_expr(b, ctx)});
        } else if (kw == "source") {
            SourceForm e;
            if (b.header.text.find('=') != std::string::npos) {
                if (ctx.m() != 1) fail("inline source needs exactly one field; use entries", b.header);
                e.components = {inline_expr(b, ctx)};
            } else {
                e.components = field_entries(b, ctx, ctx, false);
            }
            p.sources.emplace_back(name, std::move(e));
        } else if (kw == "section") {
            SectionDecl s{name, field_entries(b, ctx, ctx, true)};
            require_base_only(b, s.components, ctx, "sections");
            p.sections.push_back(std::move(s));
        } else if (kw == "variation") {
            auto w = words(b.header.text);
            VariationDecl v{name, {}, std::nullopt, 0};
            if (w.size() > 2 && w[2] == "flow") {
                v.flow_parameter = *p.flow_context.find_parameter(kFlowParameter);
                auto psi = field_entries(b, ctx, p.flow_context, false);
                for (std::size_t i = 0; i < psi.size(); ++i) {
                    // Unlisted fields are left unchanged by the flow.
                    if (psi[i].is_zero()) psi[i] = Expr::jet(i, MultiIndex::zero(ctx.n()));
                    for (auto& jv : jet_variables(psi[i])) {
                        if (!jv.sigma.is_zero()) fail("flows may only reference zero-order fiber coordinates", b.header);
                    }
                }
                const auto eps = v.flow_parameter;
                for (auto& c : psi) {
                    Expr d = apply_derivation(c, [eps](const Atom& a) {
                        return Expr(a.kind() == AtomKind::Param && a.index() == eps ? 1 : 0);
                    });
                    v.field.components.push_back(substitute_params(d, {{eps, Expr(0)}}));
                }
                v.flow = std::move(psi);
            } else if (w.size() > 2) {
                fail("unexpected '" + w[2] + "' after variation name", b.header);
            } else {
                v.field.components = field_entries(b, ctx, ctx, false);
                require_base_only(b, v.field.components, ctx, "linear variation fields");
            }
            p.variations.push_back(std::move(v));
        } else if (kw == "bilinear") {
            p.bilinears.push_back({name, parse_bilinear(b, ctx)});
        } else if (kw == "onshell") {
            OnShellDecl d{name, {}};
            for (auto& l : b.entries) {
                int col = 0;
                auto [lhs, rhs] = split_assign(l, l.text, col);
                auto var = parse_jet_variable(lhs, ctx, l.number, l.indent + 1);
                auto value = parse_expr(rhs, ctx, l.number, col);
                for (auto& jv : jet_variables(value)) {
                    if (jv.field == var.field && jv.sigma.contains(var.sigma)) {
                        fail("on-shell relation must not reference its own left-hand side or its derivatives", l);
                    }
                }
                d.relations.push_back({var, value});
            }
            p.onshell.push_back(std::move(d));
        } else {
            fail("unknown block '" + kw + "'", b.header);
        }
    }
    return p;
}

ProblemFile load_problem(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path.string() + "'", 0, 0);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_problem(buf.str());
}

const Lagrangian& ProblemFile::lagrangian(const std::string& name) const
{
    return find_named(lagrangians, name, "lagrangian", [](auto& x) { return x.first; }).second;
}

const SourceForm& ProblemFile::source(const std::string& name) const
{
    return find_named(sources, name, "source", [](auto& x) { return x.first; }).second;
}

const SectionDecl& ProblemFile::section(const std::string& name) const
{
    return find_named(sections, name, "section", [](auto& x) { return x.name; });
}

const VariationDecl& ProblemFile::variation(const std::string& name) const
{
    return find_named(variations, name, "variation", [](auto& x) { return x.name; });
}

const BilinearDecl& ProblemFile::bilinear(const std::string& name) const
{
    return find_named(bilinears, name, "bilinear form", [](auto& x) { return x.name; });
}

const OnShellDecl* ProblemFile::find_onshell(const std::string& name) const
{
    if (name.empty()) return onshell.size() == 1 ? &onshell.front() : nullptr;
    for (auto& d : onshell) {
        if (d.name == name) return &d;
    }
    throw SemanticError("no onshell block named '" + name + "'");
}

} // namespace jetvar
