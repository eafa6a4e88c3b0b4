#include "crc/dga.hpp"
#include "crc/model.hpp"
#include "crc/tube.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace crc;
using nlohmann::json;

namespace {

struct Common {
    std::string format = "json";
    std::string out;
    uint64_t seed = 0;
    int trials = 0;  // 0: command default
    double tol = 0;
    bool no_timing = false;
};

struct Usage : Error {
    using Error::Error;
};

int exit_code(Status s)
{
    switch (s) {
    case Status::pass: return 0;
    case Status::fail: return 1;
    case Status::inconclusive: return 3;
    }
    return 1;
}

int emit(Report r, const Common& c, const std::string& command)
{
    r.command = command;
    r.config["seed"] = c.seed;
    r.config["format"] = c.format;
    std::string text = c.format == "text" ? r.to_text() : r.to_json(!c.no_timing).dump(2) + "\n";
    if (c.out.empty()) {
        std::cout << text;
    } else {
        std::ofstream f(c.out);
        if (!f) throw Usage("cannot write " + c.out);
        f << text;
    }
    return exit_code(r.overall());
}

// Declares every identifier as a real variable unless --var says otherwise.
VariableTable table_for(const std::string& text, const std::vector<std::string>& decls)
{
    VariableTable t;
    for (auto& d : decls) {
        std::istringstream ss(d);
        std::string name, kind, partner;
        ss >> name >> kind >> partner;
        if (name.empty() || kind.empty()) throw Usage("bad --var '" + d + "' (expected 'NAME KIND [PARTNER]')");
        if (kind == "complex") {
            if (partner.empty()) throw Usage("complex variable " + name + " needs a partner name");
            t.declare_pair(name, partner);
        } else if (kind == "real") {
            t.declare(name, Reality::real);
        } else if (kind == "imaginary") {
            t.declare(name, Reality::imaginary);
        } else if (kind == "unit_modulus") {
            t.declare(name, Reality::unit_modulus);
        } else if (kind == "positive_real") {
            t.declare(name, Reality::positive_real);
        } else {
            throw Usage("unknown variable kind '" + kind + "'");
        }
    }
    return declare_free_as_real(text, std::move(t));
}

Point parse_point(const std::string& text, const VariableTable& t)
{
    Point p;
    std::stringstream ss(text);
    std::string item;
    VariableTable none;
    while (std::getline(ss, item, ',')) {
        auto eq = item.find('=');
        if (eq == std::string::npos) throw Usage("malformed point entry '" + item + "' (expected name=value)");
        std::string name = item.substr(0, eq);
        name.erase(std::remove_if(name.begin(), name.end(), ::isspace), name.end());
        ScalarExpr v = parse(item.substr(eq + 1), none);
        if (!v.is_constant() && !v.is_zero()) throw Usage("value of " + name + " is not a number");
        cplx z = evaluate(v, {});
        p[name] = z;
        if (Variable var = t.find(name); var && var->reality == Reality::complex_paired && !p.count(var->partner))
            p[var->partner] = std::conj(z);
    }
    return p;
}

void report_error(const std::string& input, const Error& e)
{
    std::cerr << "crc: " << e.what() << "\n";
    if (auto* pe = dynamic_cast<const ParseError*>(&e); pe && !input.empty()) {
        std::cerr << "  " << input << "\n  " << std::string(std::min(pe->offset, input.size()), ' ') << "^\n";
    }
}

TubeOptions tube_options(const Common& c)
{
    TubeOptions o;
    o.seed = c.seed;
    if (c.trials > 0) o.trials = c.trials;
    if (c.tol > 0) o.tol = c.tol;
    return o;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Exterior-calculus verifier for 2-nondegenerate CR structures"};
    app.set_version_flag("--version", std::string(kToolVersion));
    app.require_subcommand(1);
    app.fallthrough();
    Common c;
    app.add_option("--format", c.format, "Report format")->check(CLI::IsMember({"json", "text"}));
    app.add_option("--out", c.out, "Write the report to FILE");
    app.add_option("--seed", c.seed, "Seed for sampled tests");
    app.add_option("--trials", c.trials, "Sample count for sampled tests")->check(CLI::PositiveNumber);
    app.add_option("--tol", c.tol, "Tolerance for sampled tests")->check(CLI::PositiveNumber);
    app.add_flag("--no-timing", c.no_timing, "Omit timing fields from JSON");

    auto* model = app.add_subcommand("model", "Model group checks")->require_subcommand(1);
    auto* model_verify = model->add_subcommand("verify", "Structure equations and adjoint transforms");

    auto* dga = app.add_subcommand("dga", "Abstract structure-equation checks")->require_subcommand(1);
    auto* dga_verify = dga->add_subcommand("verify", "Run a suite");
    std::string suite = "shifts";
    dga_verify->add_option("--suite", suite, "Suite")
        ->check(CLI::IsMember({"shifts", "equivariance", "cartan", "flat"}));

    auto* tube = app.add_subcommand("tube", "Tube hypersurface pipeline")->require_subcommand(1);
    auto* tube_analyze = tube->add_subcommand("analyze", "Analyze a defining function rho(t1, t2)");
    std::string rho, box_text = "t1=0.02:0.08,t2=0.02:0.08", g;
    tube_analyze->add_option("--rho", rho, "Defining function in t1, t2")->required();
    tube_analyze->add_option("--box", box_text, "Sampling box, e.g. t1=0.02:0.08,t2=0.02:0.08");
    auto* tube_paper = tube->add_subcommand("paper-example", "The Monge-Ampere example with a closed-form coefficient");
    auto* tube_profile = tube->add_subcommand("profile", "Analyze rho = t2 g(t1/t2)");
    std::string profile_box = "t1=0.5:1,t2=0.5:1";
    tube_profile->add_option("--g", g, "Profile g(s)")->required();
    tube_profile->add_option("--box", profile_box, "Sampling box");

    auto* expr = app.add_subcommand("expr", "Scalar expression utilities")->require_subcommand(1);
    std::string e_text, at, wrt, zbox;
    std::vector<std::string> decls;
    auto* e_eval = expr->add_subcommand("eval", "Evaluate at a point");
    e_eval->add_option("expression", e_text)->required();
    e_eval->add_option("--at", at, "Point, e.g. x=0.5,y=2")->required();
    auto* e_diff = expr->add_subcommand("diff", "Differentiate");
    e_diff->add_option("expression", e_text)->required();
    e_diff->add_option("--wrt", wrt, "Variable")->required();
    auto* e_zero = expr->add_subcommand("zero", "Randomized zero test");
    e_zero->add_option("expression", e_text)->required();
    e_zero->add_option("--box", zbox, "Sampling box")->required();
    for (auto* s : {e_eval, e_diff, e_zero})
        s->add_option("--var", decls, "Declaration 'NAME KIND [PARTNER]'; undeclared names are real");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    std::string input;
    try {
        if (model_verify->parsed()) {
            Report r;
            r.merge(verify_structure_equations(), "structure: ");
            r.merge(verify_adjoint_transforms(), "adjoint: ");
            return emit(r, c, "model verify");
        }
        if (dga_verify->parsed()) {
            Report r = run_dga_suite(suite);
            return emit(r, c, "dga verify --suite " + suite);
        }
        if (tube_analyze->parsed()) {
            input = rho;
            DomainBox box = parse_box(box_text);
            return emit(analyze_tube(rho, box, tube_options(c)), c, "tube analyze");
        }
        if (tube_paper->parsed()) return emit(paper_example_report(tube_options(c)), c, "tube paper-example");
        if (tube_profile->parsed()) {
            input = g;
            return emit(profile_report(g, parse_box(profile_box), tube_options(c)), c, "tube profile");
        }
        if (e_eval->parsed() || e_diff->parsed() || e_zero->parsed()) {
            input = e_text;
            VariableTable t = table_for(e_text, decls);
            ScalarExpr e = parse(e_text, t);
            Report r;
            r.config["expression"] = e_text;
            if (e_eval->parsed()) {
                input.clear();
                Point p = parse_point(at, t);
                cplx v = evaluate(e, p);
                r.config["at"] = at;
                r.result = {{"canonical", e.str()}, {"value", {v.real(), v.imag()}}};
                r.add("evaluate", std::isfinite(v.real()) && std::isfinite(v.imag()));
                return emit(r, c, "expr eval");
            }
            if (e_diff->parsed()) {
                Variable v = t.find(wrt);
                if (!v) throw Usage("variable '" + wrt + "' does not occur in the expression");
                r.config["wrt"] = wrt;
                r.result = {{"canonical", e.str()}, {"derivative", differentiate(e, v).str()}};
                r.add("differentiate", Status::pass);
                return emit(r, c, "expr diff");
            }
            input.clear();
            DomainBox box = parse_box(zbox);
            ZeroTestOptions zo;
            zo.seed = c.seed;
            if (c.trials > 0) zo.trials = c.trials;
            if (c.tol > 0) zo.tol = c.tol;
            ZeroTest z = zero_test(e, box, zo);
            r.config["box"] = box_str(box);
            r.config["trials"] = zo.trials;
            r.config["tol"] = zo.tol;
            r.result = {{"canonical", e.str()},
                        {"verdict", to_string(z.verdict)},
                        {"exact", z.exact},
                        {"samples", z.samples},
                        {"failures", z.failures},
                        {"max_residual", z.max_residual}};
            Status st = z.verdict == ZeroVerdict::zero      ? Status::pass
                        : z.verdict == ZeroVerdict::nonzero ? Status::fail
                                                            : Status::inconclusive;
            r.add("identically zero", st);
            return emit(r, c, "expr zero");
        }
    } catch (const Usage& e) {
        report_error("", e);
        return 2;
    } catch (const ParseError& e) {
        report_error(input, e);
        return 2;
    } catch (const UndeclaredIdentifier& e) {
        report_error("", e);
        return 2;
    } catch (const HypothesisError& e) {
        report_error("", e);
        return 1;
    } catch (const Error& e) {
        report_error("", e);
        return 2;
    }
    return 2;
}
