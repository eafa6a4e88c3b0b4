#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace crc;
using namespace crc::testing;

namespace {

const char* kExampleRho = "((1-12*t1*t2)^(3/2)+18*t1*t2-1)/(108*t2^2)";

VariableTable t12()
{
    VariableTable t;
    t.declare("t1", Reality::real);
    t.declare("t2", Reality::real);
    return t;
}

VariableTable mixed()
{
    VariableTable t;
    t.declare("x", Reality::real);
    t.declare("lam", Reality::imaginary);
    t.declare("a", Reality::unit_modulus);
    t.declare("u", Reality::positive_real);
    t.declare_pair("b", "bb");
    return t;
}

double rel_err(cplx got, cplx want)
{
    return std::abs(got - want) / std::max(1.0, std::abs(want));
}

}  // namespace

TEST_SUITE("expr")
{
    TEST_CASE("parse")
    {
        VariableTable t = t12();
        CHECK(parse("t2*(t1/t2)^2", t) == parse("t1^2/t2", t));
        CHECK(parse("2^-1", t) == ScalarExpr(Qi(mpq_class(1, 2))));
        CHECK(parse("-t1^2", t) == -(t["t1"] * t["t1"]));
        CHECK(parse("2^3^2", t) == ScalarExpr(512));
        CHECK(parse("sqrt(t1)", t) == pow(t["t1"], mpq_class(1, 2)));
        CHECK(parse("0.25*t1", t) == ScalarExpr(Qi(mpq_class(1, 4))) * t["t1"]);
        CHECK(parse("i*i", t) == ScalarExpr(-1));

        ScalarExpr rho = parse(kExampleRho, t);
        Point p{{"t1", 0.05}, {"t2", 0.03}};
        double s = 1 - 12 * 0.05 * 0.03;
        double want = (std::pow(s, 1.5) + 18 * 0.05 * 0.03 - 1) / (108 * 0.03 * 0.03);
        CHECK(rel_err(evaluate(rho, p), want) < 1e-12);

        try {
            parse("t1 +", t);
            FAIL("expected a parse error");
        } catch (const ParseError& e) {
            CHECK(e.offset == 4);
        }
        try {
            parse("t1 + q", t);
            FAIL("expected an undeclared identifier");
        } catch (const UndeclaredIdentifier& e) {
            CHECK(e.name == "q");
        }
        CHECK_THROWS_AS(parse("(t1", t), ParseError);
        CHECK_THROWS_AS(parse("t1 t2", t), ParseError);
    }

    TEST_CASE("differentiate")
    {
        VariableTable t = t12();
        Variable t1 = t.get("t1");
        CHECK(differentiate(parse("t1^2/t2", t), t1) == parse("2*t1/t2", t));
        CHECK(differentiate(parse("(1-12*t1*t2)^(1/2)", t), t1) == parse("-6*t2*(1-12*t1*t2)^(-1/2)", t));

        ScalarExpr rho = parse(kExampleRho, t);
        ScalarExpr rho11 = differentiate(differentiate(rho, t1), t1);
        DomainBox box = parse_box("t1=0.02:0.08,t2=0.02:0.08");
        CHECK(zero_test(rho11 - parse("(1-12*t1*t2)^(-1/2)", t), box).verdict == ZeroVerdict::zero);

        CHECK(differentiate(ScalarExpr(7), t1).is_zero());
        CHECK(differentiate(t["t2"], t1).is_zero());
    }

    TEST_CASE("conjugate")
    {
        VariableTable t = mixed();
        CHECK(conjugate(t["lam"]) == -t["lam"]);
        CHECK(conjugate(t["a"]) == ScalarExpr(1) / t["a"]);
        CHECK(conjugate(ScalarExpr::imag_unit() * t["b"]) == -ScalarExpr::imag_unit() * t["bb"]);
        CHECK(conjugate(t["u"]) == t["u"]);
        CHECK(conjugate(t["x"]) == t["x"]);
        CHECK(conjugate(ScalarExpr(Qi(3, 4))) == ScalarExpr(Qi(3, -4)));
    }

    TEST_CASE("evaluate")
    {
        VariableTable t = t12();
        Point p{{"t1", 0.05}, {"t2", 0.05}};
        CHECK(rel_err(evaluate(parse("(1-12*t1*t2)^(1/2)", t), p), std::sqrt(0.97)) < 1e-14);
        CHECK(rel_err(evaluate(parse("(1-12*t1*t2)^(-1/2)", t), p), std::pow(0.97, -0.5)) < 1e-12);
        CHECK_THROWS_AS(evaluate(parse("1/t2", t), {{"t1", 1.0}, {"t2", 0.0}}), DomainError);
        CHECK_THROWS_AS(evaluate(parse("(t1-1)^(1/2)", t), {{"t1", 0.5}, {"t2", 1.0}}), DomainError);
        CHECK_THROWS_AS(evaluate(parse("t1", t), {}), Error);

        VariableTable m = mixed();
        CHECK_THROWS_AS(evaluate(m["x"], {{"x", cplx(1, 1)}}), RealityError);
        CHECK_THROWS_AS(evaluate(m["lam"], {{"lam", cplx(1, 0)}}), RealityError);
        CHECK_THROWS_AS(evaluate(m["a"], {{"a", cplx(2, 0)}}), RealityError);
        CHECK_THROWS_AS(evaluate(m["u"], {{"u", cplx(-1, 0)}}), Error);
        CHECK_THROWS_AS(evaluate(m["b"] + m["bb"], {{"b", cplx(1, 1)}, {"bb", cplx(1, 1)}}), RealityError);
    }

    TEST_CASE("zero test")
    {
        VariableTable t = t12();
        DomainBox unit = parse_box("t1=0.1:1,t2=0.1:1");
        ScalarExpr e = parse("(t1+t2)^2 - t1^2 - 2*t1*t2 - t2^2", t);
        ZeroTest z = zero_test(e, unit);
        CHECK(z.verdict == ZeroVerdict::zero);

        ScalarExpr s = parse("(1-(1-12*t1*t2)^(1/2))/(t2*(1-12*t1*t2)^(1/2))", t);
        CHECK(zero_test(s, parse_box("t1=0.02:0.08,t2=0.02:0.08")).verdict == ZeroVerdict::nonzero);

        ScalarExpr rho = parse("t1^2/t2", t);
        Variable t1 = t.get("t1"), t2 = t.get("t2");
        ScalarExpr ma = differentiate(differentiate(rho, t1), t1) * differentiate(differentiate(rho, t2), t2) -
                        pow(differentiate(differentiate(rho, t1), t2), 2);
        CHECK(ma.is_zero());
        CHECK(is_identically_zero(ma, unit));

        // the box misses the domain of every sample
        ZeroTest bad = zero_test(parse("(t1-5)^(1/2)", t), unit);
        CHECK(bad.verdict == ZeroVerdict::inconclusive);
        CHECK(bad.samples == 0);

        ZeroTestOptions o;
        o.seed = 42;
        ScalarExpr f = parse("t1^(1/3)*t2 - t2*t1^(1/3) + 10^(-12)*t1", t);
        ZeroTest a = zero_test(f, unit, o), b = zero_test(f, unit, o);
        CHECK(a.verdict == b.verdict);
        CHECK(a.max_residual == b.max_residual);
    }

    TEST_CASE("substitute and normalize")
    {
        VariableTable t = t12();
        t.declare_pair("z1", "z1b");
        ScalarExpr rho11 = parse("(1-12*t1*t2)^(-1/2)", t);
        ScalarExpr pulled = substitute(rho11, {{"t1", t["z1"] + t["z1b"]}});
        Point p{{"z1", cplx(0.02, 0.3)}, {"z1b", cplx(0.02, -0.3)}, {"t2", 0.05}};
        CHECK(rel_err(evaluate(pulled, p), std::pow(1 - 12 * 0.04 * 0.05, -0.5)) < 1e-13);
        CHECK_THROWS_AS(substitute(rho11, {{"t1", t["z1"]}}), RealityError);

        // simultaneous
        ScalarExpr sw = substitute(parse("t1 - 2*t2", t), {{"t1", t["t2"]}, {"t2", t["t1"]}});
        CHECK(sw == parse("t2 - 2*t1", t));

        VariableTable m = mixed();
        CHECK(normalize(m["a"] * (ScalarExpr(1) / m["a"])) == ScalarExpr(1));
        CHECK(normalize(pow(pow(ScalarExpr(1) - m["x"], mpq_class(1, 2)), 2)) == ScalarExpr(1) - m["x"]);
        CHECK(pow(pow(m["x"], mpq_class(1, 3)), 3) == m["x"]);
        CHECK(pow(ScalarExpr(4), mpq_class(1, 2)) == ScalarExpr(2));
        CHECK(pow(ScalarExpr(8), mpq_class(-2, 3)) == ScalarExpr(Qi(mpq_class(1, 4))));
    }

    TEST_CASE("property: finite differences agree with differentiate")
    {
        VariableTable t;
        t.declare("x", Reality::real);
        t.declare("y", Reality::real);
        Variable x = t.get("x");
        ExprGen gen{{t["x"], t["y"]}};
        Rng rng(1);
        std::uniform_real_distribution<double> coord(0.5, 1.5);
        const double h = 1e-5;
        int cases = 0;
        double worst = 0;
        while (cases < 200) {
            ScalarExpr e = gen(rng, uniform_int(rng, 1, 6));
            double px = coord(rng), py = coord(rng);
            cplx sym, fd;
            try {
                sym = evaluate(differentiate(e, x), {{"x", px}, {"y", py}});
                fd = (evaluate(e, {{"x", px + h}, {"y", py}}) - evaluate(e, {{"x", px - h}, {"y", py}})) / (2 * h);
            } catch (const DomainError&) {
                continue;
            }
            double err = rel_err(fd, sym);
            worst = std::max(worst, err);
            INFO("expression: ", e.str(), " at x=", px, " y=", py);
            CHECK(err < 1e-5);
            ++cases;
        }
        MESSAGE("worst relative error ", worst);
    }

    TEST_CASE("property: conjugation is an antilinear involution")
    {
        VariableTable t = mixed();
        ExprGen gen{{t["x"], t["lam"], t["a"], t["u"], t["b"], t["bb"]}, false};
        DomainBox box = parse_box("x=-1:1,lam=-1:1,a=0:6.3,u=0.5:2,b=-1:1");
        Rng rng(2);
        for (int k = 0; k < 200; ++k) {
            ScalarExpr e = gen(rng, 4), f = gen(rng, 3);
            INFO("e = ", e.str(), ", f = ", f.str());
            CHECK(conjugate(conjugate(e)) == e);
            CHECK(is_identically_zero(conjugate(e * f) - conjugate(e) * conjugate(f), box, 4, k));
            CHECK(conjugate(e + f) == conjugate(e) + conjugate(f));
            Point p = sample_points(free_variables(e), box, 1, k).front();
            try {
                CHECK(rel_err(evaluate(conjugate(e), p), std::conj(evaluate(e, p))) < 1e-10);
            } catch (const DomainError&) {
            }
        }
    }

    TEST_CASE("property: normalize is idempotent and preserves values")
    {
        VariableTable t;
        t.declare("x", Reality::real);
        t.declare("y", Reality::real);
        ExprGen gen{{t["x"], t["y"]}};
        DomainBox box = parse_box("x=0.5:1.5,y=0.5:1.5");
        Rng rng(3);
        for (int k = 0; k < 100; ++k) {
            ScalarExpr e = gen(rng, 5);
            ScalarExpr n = normalize(e);
            CHECK(normalize(n) == n);
            for (const Point& p : sample_points({t.get("x"), t.get("y")}, box, 16, k)) {
                try {
                    CHECK(rel_err(evaluate(n, p), evaluate(e, p)) < 1e-10);
                } catch (const DomainError&) {
                }
            }
        }
    }

    TEST_CASE("property: parse inverts print")
    {
        VariableTable t;
        t.declare("x", Reality::real);
        t.declare("y", Reality::real);
        ExprGen real_gen{{t["x"], t["y"]}};
        Rng rng(4);
        for (int k = 0; k < 200; ++k) {
            ScalarExpr e = real_gen(rng, uniform_int(rng, 1, 6));
            INFO("printed: ", print(e));
            CHECK(parse(print(e), t) == normalize(e));
        }
        VariableTable m = mixed();
        ExprGen cgen{{m["x"], m["lam"], m["a"], m["b"], m["bb"]}, false};
        for (int k = 0; k < 100; ++k) {
            ScalarExpr e = cgen(rng, 4);
            INFO("printed: ", print(e));
            CHECK(parse(print(e), m) == normalize(e));
        }
    }

    TEST_CASE("boxes")
    {
        DomainBox b = parse_box("t1=0.02:0.08, t2=-1:1");
        CHECK(b.at("t1").lo == doctest::Approx(0.02));
        CHECK(b.at("t2").hi == doctest::Approx(1));
        CHECK_THROWS_AS(parse_box("t1=1:0"), Error);
        CHECK_THROWS_AS(parse_box("t1"), Error);
        CHECK(parse_box(box_str(b)).at("t1").hi == doctest::Approx(0.08));
    }
}
