#include "jetvar/cli.hpp"

#include "jetvar/error.hpp"
#include "jetvar/numeric.hpp"
#include "jetvar/problem.hpp"
#include "jetvar/variational.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

namespace jetvar::cli {

using nlohmann::json;

namespace {

struct Report {
    json data;
    std::vector<std::string> lines;
    int status = kExitOk;
};

std::string number(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

std::string yes_no(bool b) { return b ? "yes" : "no"; }

class Session {
public:
    Session(const CommandRequest& req, ProblemFile problem) : req_(req), p_(std::move(problem)) {}

    Report el();
    Report jacobi();
    Report helmholtz();
    Report hessian();
    Report variation();
    Report check_critical();
    Report second_var();
    Report adjoint();

private:
    [[nodiscard]] bool latex() const { return req_.format == Format::Latex; }
    [[nodiscard]] std::string text(const Expr& e) const { return print(e, p_.ctx, latex() ? Format::Latex : Format::Plain); }
    [[nodiscard]] std::string text(const SourceForm& e, const std::string& name) const
    {
        return print(e, p_.ctx, latex() ? Format::Latex : Format::Plain, name);
    }
    [[nodiscard]] std::string text(const BilinearForm& a, const std::string& name) const
    {
        return print(a, p_.ctx, latex() ? Format::Latex : Format::Plain, name);
    }

    [[nodiscard]] const Lagrangian& lagrangian() const { return p_.lagrangian(req_.lagrangian); }
    [[nodiscard]] std::string lagrangian_name() const
    {
        if (!req_.lagrangian.empty()) return req_.lagrangian;
        return p_.lagrangians.size() == 1 ? p_.lagrangians.front().first : std::string{};
    }
    [[nodiscard]] std::vector<const VariationDecl*> fields(std::size_t min, std::size_t max) const;
    [[nodiscard]] const OnShellDecl* onshell() const { return p_.find_onshell(req_.onshell); }

    struct NumericSetup {
        numeric::NumericSection section;
        numeric::Tolerance tol;
        numeric::VariationConfig vc;
    };
    [[nodiscard]] NumericSetup numeric_setup(std::size_t min_fields, std::size_t max_fields) const;

    const CommandRequest& req_;
    ProblemFile p_;
};

std::vector<const VariationDecl*> Session::fields(std::size_t min, std::size_t max) const
{
    if (req_.fields.size() < min || req_.fields.size() > max) {
        std::string want = min == max ? std::to_string(min) : std::to_string(min) + " or more";
        if (max != min && max != static_cast<std::size_t>(-1)) want = std::to_string(min) + " to " + std::to_string(max);
        throw SemanticError("--fields expects " + want + " variation names, got " + std::to_string(req_.fields.size()));
    }
    std::vector<const VariationDecl*> out;
    for (auto& name : req_.fields) out.push_back(&p_.variation(name));
    return out;
}

Session::NumericSetup Session::numeric_setup(std::size_t min_fields, std::size_t max_fields) const
{
    if (!p_.numeric) throw SemanticError("problem file has no numeric block");
    const auto& nd = *p_.numeric;
    if (nd.lower.size() != p_.ctx.n()) throw SemanticError("numeric block must give a domain for every base variable");
    numeric::Box box{nd.lower, nd.upper};
    std::size_t nodes = req_.nodes.value_or(nd.nodes);
    if (nodes == 0) throw SemanticError("--nodes must be positive");
    numeric::Tolerance tol{req_.tol.value_or(nd.tol), nd.abs_tol};
    numeric::VariationConfig vc;
    vc.step = req_.step.value_or(nd.step);
    if (!(vc.step > 0.0)) throw SemanticError("--step must be positive");
    for (auto* v : fields(min_fields, max_fields)) {
        if (v->flow) {
            vc.fields.push_back({v->field.components, v->flow, v->flow_parameter});
        } else {
            vc.fields.push_back(numeric::bumped_linear(v->field.components, box));
        }
    }
    const auto& s = p_.section(req_.section);
    numeric::NumericSection section(s.components, box, nodes, lagrangian().order());
    return {std::move(section), tol, std::move(vc)};
}

json critical_json(const numeric::CriticalReport& r)
{
    return {{"residual", r.residual}, {"threshold", r.threshold}, {"critical", r.critical}};
}

std::string critical_line(const numeric::CriticalReport& r)
{
    return std::string(r.critical ? "critical" : "not critical") + ": Euler-Lagrange residual " + number(r.residual) +
           " (threshold " + number(r.threshold) + ")";
}

Report Session::el()
{
    auto e = euler_lagrange(lagrangian(), p_.ctx);
    Report r;
    r.data = {{"command", "el"}, {"lagrangian", lagrangian_name()}, {"euler_lagrange", to_json(e, p_.ctx)}};
    r.lines.push_back(text(e, "e"));
    return r;
}

Report Session::jacobi()
{
    const auto& ctx = p_.ctx;
    auto ve = vertical_differential(lagrangian(), ctx);
    auto jac = jetvar::adjoint(ve, ctx);
    bool self_adjoint = ve == jac;
    Report r;
    r.data = {{"command", "jacobi"},
              {"lagrangian", lagrangian_name()},
              {"vertical_differential", to_json(ve, ctx)},
              {"jacobi", to_json(jac, ctx)},
              {"self_adjoint", self_adjoint}};
    r.lines.push_back(text(ve, "VE"));
    r.lines.push_back(text(jac, "J"));
    r.lines.push_back("self-adjoint: " + yes_no(self_adjoint));
    if (auto* d = onshell()) {
        auto ve_on = reduce_on_shell(ve, d->relations);
        auto jac_on = reduce_on_shell(jac, d->relations);
        bool agree = ve_on == jac_on;
        r.data["onshell"] = {{"relations", d->name},
                             {"vertical_differential", to_json(ve_on, ctx)},
                             {"jacobi", to_json(jac_on, ctx)},
                             {"agree", agree}};
        r.lines.push_back("on shell (" + d->name + "):");
        r.lines.push_back(text(ve_on, "VE"));
        r.lines.push_back(text(jac_on, "J"));
        r.lines.push_back("agree on shell: " + yes_no(agree));
    }
    return r;
}

Report Session::helmholtz()
{
    const auto& ctx = p_.ctx;
    SourceForm e;
    std::string origin;
    if (!req_.source.empty() || (!p_.sources.empty() && req_.lagrangian.empty())) {
        e = p_.source(req_.source);
        origin = req_.source.empty() ? p_.sources.front().first : req_.source;
    } else {
        e = euler_lagrange(lagrangian(), ctx);
        origin = lagrangian_name();
    }
    auto h = jetvar::helmholtz(e, ctx);
    bool variational = h.is_zero();
    std::string verdict = variational ? "locally variational" : "not locally variational";
    Report r;
    r.data = {{"command", "helmholtz"},
              {"source", origin},
              {"helmholtz", to_json(h, ctx)},
              {"locally_variational", variational},
              {"verdict", verdict}};
    r.lines.push_back(text(h, "H"));
    r.lines.push_back("verdict: " + verdict);
    return r;
}

Report Session::hessian()
{
    const auto& ctx = p_.ctx;
    auto decls = fields(2, 2);
    const auto& xi1 = decls[0]->field;
    const auto& xi2 = decls[1]->field;
    auto h = jetvar::hessian(lagrangian(), xi1, xi2, ctx);
    auto split = second_variation_decomposition(lagrangian(), xi1, xi2, ctx);
    Report r;
    r.data = {{"command", "hessian"},
              {"lagrangian", lagrangian_name()},
              {"fields", req_.fields},
              {"hessian", to_json(h.density, ctx)},
              {"s1", to_json(split.s1, ctx)},
              {"s2", to_json(split.s2, ctx)}};
    r.lines.push_back("hessian = " + text(h.density));
    r.lines.push_back("S1 = " + text(split.s1));
    r.lines.push_back("S2 = " + text(split.s2));
    if (auto* d = onshell()) {
        auto s1_on = reduce_on_shell(split.s1, d->relations);
        r.data["onshell"] = {{"relations", d->name}, {"s1", to_json(s1_on, ctx)}};
        r.lines.push_back("S1 on shell (" + d->name + ") = " + text(s1_on));
    }
    return r;
}

Report Session::variation()
{
    const auto& ctx = p_.ctx;
    std::vector<VerticalField> xs;
    for (auto* d : fields(1, static_cast<std::size_t>(-1))) xs.push_back(d->field);
    auto v = quotient_variation(lagrangian(), xs, ctx);
    Report r;
    r.data = {{"command", "variation"},
              {"lagrangian", lagrangian_name()},
              {"fields", req_.fields},
              {"variation", to_json(v.density, ctx)}};
    r.lines.push_back("variation = " + text(v.density));
    return r;
}

Report Session::check_critical()
{
    auto setup = numeric_setup(0, static_cast<std::size_t>(-1));
    auto crit = numeric::check_critical(lagrangian(), setup.section, p_.ctx, setup.tol);
    Report r;
    r.data = {{"command", "check-critical"},
              {"lagrangian", lagrangian_name()},
              {"section", p_.section(req_.section).name},
              {"critical", critical_json(crit)},
              {"action", numeric::action(lagrangian(), setup.section)}};
    r.lines.push_back(critical_line(crit));
    r.lines.push_back("action = " + number(r.data["action"].get<double>()));
    json firsts = json::array();
    bool all_small = true;
    for (std::size_t k = 0; k < setup.vc.fields.size(); ++k) {
        numeric::VariationConfig one{{setup.vc.fields[k]}, setup.vc.step, setup.vc.richardson};
        double d = numeric::finite_diff_variation(lagrangian(), setup.section, one, 1);
        bool small = std::abs(d) <= std::max(setup.tol.abs, setup.tol.rel);
        all_small = all_small && small;
        firsts.push_back({{"field", req_.fields[k]}, {"value", d}, {"vanishes", small}});
        r.lines.push_back("first variation along " + req_.fields[k] + " = " + number(d));
    }
    r.data["first_variations"] = firsts;
    if (!crit.critical || !all_small) r.status = kExitNumeric;
    return r;
}

Report Session::second_var()
{
    auto setup = numeric_setup(2, 2);
    const auto& ctx = p_.ctx;
    Report r;
    r.data = {{"command", "second-var"}, {"lagrangian", lagrangian_name()}, {"fields", req_.fields}};
    try {
        auto sv = numeric::check_second_variation(lagrangian(), setup.section, setup.vc, ctx, setup.tol);
        auto xi1 = setup.vc.fields[0].generator();
        auto xi2 = setup.vc.fields[1].generator();
        auto sym = numeric::check_onshell_symmetry(lagrangian(), setup.section, xi1, xi2, ctx, setup.tol);
        r.data["critical"] = critical_json(sv.critical);
        r.data["second_variation"] = {{"finite_difference", sv.finite_difference},
                                      {"vertical_differential", sv.vertical_differential},
                                      {"jacobi", sv.jacobi},
                                      {"matches_vertical_differential", sv.matches_vertical_differential},
                                      {"matches_jacobi", sv.matches_jacobi}};
        r.data["symmetry"] = {{"lhs", sym.lhs},
                              {"rhs", sym.rhs},
                              {"difference", sym.difference},
                              {"pointwise_max", sym.pointwise_max},
                              {"passed", sym.passed}};
        r.lines.push_back(critical_line(sv.critical));
        r.lines.push_back("finite difference = " + number(sv.finite_difference));
        r.lines.push_back("vertical differential = " + number(sv.vertical_differential) + " (" +
                          (sv.matches_vertical_differential ? "match" : "MISMATCH") + ")");
        r.lines.push_back("jacobi = " + number(sv.jacobi) + " (" + (sv.matches_jacobi ? "match" : "MISMATCH") + ")");
        r.lines.push_back("symmetry: " + number(sym.lhs) + " vs " + number(sym.rhs) + " (" +
                          (sym.passed ? "match" : "MISMATCH") + "), pointwise max " + number(sym.pointwise_max));
        if (!sv.matches_vertical_differential || !sv.matches_jacobi || !sym.passed) r.status = kExitNumeric;
    } catch (const numeric::NotCritical& nc) {
        r.data["critical"] = critical_json(nc.report());
        r.lines.push_back(critical_line(nc.report()));
        r.lines.push_back("second variation requires a critical section");
        r.status = kExitNumeric;
    }
    return r;
}

Report Session::adjoint()
{
    const auto& ctx = p_.ctx;
    const auto& decl = p_.bilinear(req_.bilinear);
    auto adj = jetvar::adjoint(decl.form, ctx);
    Report r;
    r.data = {{"command", "adjoint"},
              {"bilinear", decl.name},
              {"form", to_json(decl.form, ctx)},
              {"adjoint", to_json(adj, ctx)},
              {"self_adjoint", adj == decl.form}};
    r.lines.push_back(text(adj, decl.name + "*"));
    return r;
}

using Handler = Report (Session::*)();

const std::map<std::string, Handler>& handlers()
{
    static const std::map<std::string, Handler> table{
        {"el", &Session::el},
        {"jacobi", &Session::jacobi},
        {"helmholtz", &Session::helmholtz},
        {"hessian", &Session::hessian},
        {"variation", &Session::variation},
        {"check-critical", &Session::check_critical},
        {"second-var", &Session::second_var},
        {"adjoint", &Session::adjoint},
    };
    return table;
}

void render(const Report& r, Format fmt, std::ostream& out)
{
    if (fmt == Format::Structured) {
        out << r.data.dump(2) << "\n";
        return;
    }
    for (auto& l : r.lines) out << l << "\n";
}

} // namespace

const std::vector<std::string>& subcommands()
{
    static const std::vector<std::string> names{"el",        "jacobi",         "helmholtz",  "hessian",
                                                "variation", "check-critical", "second-var", "adjoint"};
    return names;
}

int run(const CommandRequest& req, std::ostream& out, std::ostream& err)
{
    auto it = handlers().find(req.subcommand);
    if (it == handlers().end()) {
        err << "error: unknown subcommand '" << req.subcommand << "'\n";
        return kExitUsage;
    }
    try {
        if (!std::filesystem::exists(req.input)) {
            err << "error: cannot open '" << req.input.string() << "'\n";
            return kExitUsage;
        }
        Session session(req, load_problem(req.input));
        Report r = (session.*(it->second))();
        if (req.output) {
            std::ofstream file(*req.output);
            if (!file) {
                err << "error: cannot write '" << req.output->string() << "'\n";
                return kExitUsage;
            }
            render(r, req.format, file);
        } else {
            render(r, req.format, out);
        }
        return r.status;
    } catch (const ParseError& e) {
        err << req.input.string() << ":" << e.what() << "\n";
        return kExitUsage;
    } catch (const EvaluationError& e) {
        err << "numeric error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitSemantic;
    }
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Variational calculus on jet spaces"};
    app.require_subcommand(1, 1);
    CommandRequest req;
    std::string format = "plain";
    std::string fields;
    std::size_t nodes = 0;
    double step = 0.0;
    double tol = 0.0;
    std::string output;

    static const std::map<std::string, std::string> about{
        {"el", "Euler-Lagrange form of a Lagrangian"},
        {"jacobi", "vertical differential and Jacobi morphism"},
        {"helmholtz", "Helmholtz kernel and variationality verdict"},
        {"hessian", "Hessian of two variation fields and its split"},
        {"variation", "iterated quotient variation"},
        {"check-critical", "numeric criticality and first variations"},
        {"second-var", "numeric second variation against VE and Jacobi"},
        {"adjoint", "formal adjoint of a bilinear form"},
    };
    for (auto& name : subcommands()) {
        auto* sub = app.add_subcommand(name, about.at(name));
        sub->add_option("input", req.input, "problem file")->required();
        sub->add_option("--format", format, "plain, latex or structured")
            ->check(CLI::IsMember({"plain", "latex", "structured"}));
        sub->add_option("--nodes", nodes, "Gauss-Legendre nodes per axis");
        sub->add_option("--step", step, "finite-difference step");
        sub->add_option("--tol", tol, "relative tolerance");
        sub->add_option("--lagrangian", req.lagrangian, "Lagrangian name");
        sub->add_option("--section", req.section, "section name");
        sub->add_option("--fields", fields, "variation names, comma separated");
        sub->add_option("--source", req.source, "source form name");
        sub->add_option("--bilinear", req.bilinear, "bilinear form name");
        sub->add_option("--onshell", req.onshell, "on-shell relation block name");
        sub->add_option("--output", output, "write the report to this file");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        std::ostringstream o;
        std::ostringstream eo;
        int code = app.exit(e, o, eo);
        out << o.str();
        err << eo.str();
        return code == 0 ? kExitOk : kExitUsage;
    }

    auto* sub = app.get_subcommands().front();
    req.subcommand = sub->get_name();
    req.format = parse_format(format);
    if (sub->count("--nodes")) req.nodes = nodes;
    if (sub->count("--step")) req.step = step;
    if (sub->count("--tol")) req.tol = tol;
    if (sub->count("--output")) req.output = output;
    if (!fields.empty()) {
        std::stringstream ss(fields);
        std::string name;
        while (std::getline(ss, name, ',')) {
            if (!name.empty()) req.fields.push_back(name);
        }
    }
    return run(req, out, err);
}

} // namespace jetvar::cli
