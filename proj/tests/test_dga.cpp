#include "crc/dga.hpp"

#include <doctest.h>

#include <set>

using namespace crc;

namespace {

const Check& find_check(const Report& r, const std::string& name)
{
    for (auto& c : r.checks)
        if (c.name == name) return c;
    FAIL("no check named ", name);
    throw Error("unreachable");
}

std::set<std::string> failing(const Report& r)
{
    std::set<std::string> out;
    for (auto& c : r.checks)
        if (c.status != Status::pass) out.insert(c.name);
    return out;
}

ScalarExpr sym(const Chart& ch, const std::string& text) { return parse(text, ch.vars()); }

}  // namespace

TEST_SUITE("dga")
{
    TEST_CASE("flat chart satisfies d o d = 0")
    {
        AbstractP2Chart p2 = build_chart(CurvatureMode::flat);
        for (int k = 0; k < p2.chart->size(); ++k) CHECK(d(d(p2.chart->gen(k))).is_zero());
        CHECK(run_dga_suite("flat").overall() == Status::pass);
    }

    TEST_CASE("opaque chart")
    {
        AbstractP2Chart p2 = build_chart(CurvatureMode::opaque);
        const Chart& ch = *p2.chart;
        CHECK(p2.curvature.Theta2 == ch.gen("Theta2"));
        CHECK(conjugate_form(p2.curvature.Phi2) == -p2.curvature.Phi2);
        CHECK_THROWS_AS(bianchi_residuals(p2), MissingRule);
    }

    TEST_CASE("expanded curvature")
    {
        AbstractP2Chart p2 = build_chart(CurvatureMode::expanded);
        const Chart& ch = *p2.chart;
        const Curvatures& c = p2.curvature;
        CHECK(coefficient(c.Phi2, std::vector<std::string>{"phi1", "omega"}) == sym(ch, "T21/2"));
        CHECK(coefficient(c.Phi2, std::vector<std::string>{"omega1b", "theta2"}) == sym(ch, "-T21"));
        CHECK((c.Phi2 + conjugate_form(c.Phi2)).is_zero());
        CHECK((c.Psi + conjugate_form(c.Psi)).is_zero());
        CHECK(coefficient(c.Theta2, std::vector<std::string>{"omega1", "theta2"}) == sym(ch, "-T21"));
        CHECK(coefficient(c.Theta2, std::vector<std::string>{"theta2", "omega1"}) == sym(ch, "T21"));

        // the curvatures agree with their defining formulas
        Curvatures direct = curvatures_of(base_coframe(ch));
        CHECK(direct.Theta2 == c.Theta2);
        CHECK(direct.Phi1 == c.Phi1);
        CHECK(direct.Phi2 == c.Phi2);
        CHECK(direct.Psi == c.Psi);

        auto syms = coefficient_symbols();
        std::set<std::string> s(syms.begin(), syms.end());
        for (const char* n : {"T21", "T21c", "T20", "T10", "T1b0", "F220", "F210", "F120", "F12b0", "F110", "F11b0",
                              "P1", "P2", "P3", "Q1", "Q1c", "Q3", "Psi20", "Psi10"})
            CHECK(s.count(n) == 1);
        CHECK(conjugate(sym(ch, "Q3")) == -sym(ch, "Q3"));
    }

    TEST_CASE("bindings zero the leading terms")
    {
        AbstractP2Chart p2 = build_chart(CurvatureMode::expanded, {{"T21", 0}, {"T21c", 0}});
        const Chart& ch = *p2.chart;
        CHECK(coefficient(p2.curvature.Theta2, std::vector<std::string>{"omega1", "theta2"}).is_zero());
        CHECK(coefficient(p2.curvature.Theta2, std::vector<std::string>{"omega", "theta2"}) == sym(ch, "-T20"));
    }

    TEST_CASE("Bianchi residuals of the expanded chart")
    {
        AbstractP2Chart p2 = build_chart(CurvatureMode::expanded);
        const Chart& ch = *p2.chart;
        auto res = bianchi_residuals(p2);
        CHECK(res.at("omega").is_zero());
        FormExpr want = sym(ch, "F210c - T10") *
                        wedge(wedge(ch.gen("omega"), ch.gen("omega1")), ch.gen("omega1b"));
        CHECK(res.at("omega1") == want);
    }

    TEST_CASE("gauge shifts")
    {
        Report r = verify_gauge_shifts();
        CHECK(r.overall() == Status::pass);
        CHECK(find_check(r, "shift c").details["computed"] == "T2b1 - 3*c");
        CHECK(find_check(r, "shift f").details["computed"] == "T11b + 2*f");
        CHECK(find_check(r, "shift g").details["computed"] == "F11b + 2*g");
        CHECK(find_check(r, "shift r").details["computed"] == "-F210c + T10 + 3/2*r");
        for (const char* p : {"c", "f", "g", "r", "s"})
            CHECK(find_check(r, std::string("shift ") + p + " at zero parameters").status == Status::pass);
    }

    TEST_CASE("equivariance")
    {
        Report r = verify_equivariance();
        CHECK(r.overall() == Status::pass);
        for (const char* n : {"expanded: Re Phi2 = 0", "expanded: Re Psi = 0", "expanded: Theta2hat = Theta2",
                              "expanded: Phi2hat = Phi2", "expanded: Phi1hat = Phi1 + B Theta2 - Bb Phi2",
                              "opaque: Psihat = Psi + B^2/2 Theta2 - Bb^2/2 Theta2b + B Phi1 - Bb Phi1b - |B|^2 Phi2"})
            CHECK(find_check(r, n).status == Status::pass);
    }

    TEST_CASE("Cartan criterion")
    {
        Report r = verify_cartan_criterion();
        // sympy oracle: hatted-basis value minus printed value is Lam*conj(T21)
        CHECK(failing(r) == std::set<std::string>{"necessity: Phi1hat_11b (printed)"});
        const Check& printed = find_check(r, "necessity: Phi1hat_11b (printed)");
        CHECK(printed.details["difference"] == "Lam*T21c");
        CHECK(printed.details["computed"] == "-3/4*Bb*B*T21c + Bb*T20 - 3/4*Bb^2*T21 - B*F220c + 1/2*Lam*T21c");
        CHECK(find_check(r, "necessity: Psihat_11b").details["computed"] == "1/2*Bb*F120 + 1/2*B*F120c");
        for (const char* n : {"sufficiency: Theta2hat", "sufficiency: Phi1hat", "sufficiency: Phi2hat",
                              "sufficiency: Psihat", "sufficiency: Phi1hat_11b = Psihat_11b = 0",
                              "h1: Theta2check = A/Ab Theta2hat", "h1: Phi1check = 1/Ab Phi1hat",
                              "h1: Phi2check = Phi2hat"})
            CHECK(find_check(r, n).status == Status::pass);
    }

    TEST_CASE("suites are deterministic")
    {
        for (const char* s : {"shifts", "equivariance", "flat"})
            CHECK(run_dga_suite(s).to_json(false) == run_dga_suite(s).to_json(false));
        CHECK_THROWS_AS(run_dga_suite("nope"), Error);
        CHECK(curvature_mode_from_string(to_string(CurvatureMode::expanded)) == CurvatureMode::expanded);
    }
}
