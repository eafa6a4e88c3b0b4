#pragma once

#include "crc/exterior.hpp"
#include "crc/model.hpp"

#include <random>
#include <string>
#include <vector>

namespace crc::testing {

using Rng = std::mt19937_64;

inline int uniform_int(Rng& rng, int lo, int hi)
{
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline ScalarExpr small_rational(Rng& rng, bool complex = false)
{
    mpq_class re(uniform_int(rng, -5, 5), uniform_int(rng, 1, 4));
    re.canonicalize();
    if (!complex || uniform_int(rng, 0, 2) != 0) return ScalarExpr(Qi(re));
    mpq_class im(uniform_int(rng, -3, 3), uniform_int(rng, 1, 3));
    im.canonicalize();
    return ScalarExpr(Qi(re, im));
}

// Random expression trees. With real_only the leaves are real variables and
// fractional powers are taken of 1 + e^2, which is positive; otherwise
// fractional powers are skipped.
struct ExprGen {
    std::vector<ScalarExpr> leaves;
    bool real_only = true;
    size_t max_terms = 40;

    ScalarExpr leaf(Rng& rng) const
    {
        if (uniform_int(rng, 0, 3) == 0) return small_rational(rng, !real_only);
        return leaves[uniform_int(rng, 0, static_cast<int>(leaves.size()) - 1)];
    }

    ScalarExpr operator()(Rng& rng, int depth) const
    {
        if (depth <= 0 || uniform_int(rng, 0, 4) == 0) return leaf(rng);
        ScalarExpr a = (*this)(rng, depth - 1);
        ScalarExpr r;
        switch (uniform_int(rng, 0, 5)) {
        case 0: r = a + (*this)(rng, depth - 1); break;
        case 1: r = a - (*this)(rng, depth - 1); break;
        case 2: r = a * (*this)(rng, depth - 1); break;
        case 3: {
            ScalarExpr b = (*this)(rng, depth - 1);
            r = a / (ScalarExpr(1) + b * (real_only ? b : conjugate(b)));
            break;
        }
        case 4: r = pow(a, uniform_int(rng, 2, 3)); break;
        default:
            if (real_only) {
                static const mpq_class exps[] = {mpq_class(1, 2), mpq_class(-1, 2), mpq_class(3, 2),
                                                 mpq_class(1, 3), mpq_class(-3, 4)};
                r = pow(ScalarExpr(1) + a * a, exps[uniform_int(rng, 0, 4)]);
            } else {
                r = a * leaf(rng);
            }
        }
        if (r.size() > max_terms) return leaf(rng);
        return r;
    }
};

// Model chart extended by a few scalar coordinates whose differentials are
// closed generators, so d(d f) = 0 holds for any form over it.
inline const std::string& test_chart_text()
{
    static const std::string text = model_chart_text() + R"(var x real
var y real
var z complex zb
gen ex self
gen ey self
gen ez pair ezb
d ex = 0
d ey = 0
d ez = 0
dvar x = ex
dvar y = ey
dvar z = ez
dvar zb = ezb
)";
    return text;
}

inline FormExpr random_form(const Chart& ch, const ExprGen& g, Rng& rng, int degree, int terms = 3)
{
    FormExpr f = ch.zero(degree);
    std::vector<int> gens;
    for (int k = 0; k < ch.size(); ++k)
        if (ch.generator(k).degree == 1) gens.push_back(k);
    for (int t = 0; t < terms; ++t) {
        FormExpr w = ch.scalar(g(rng, 2));
        for (int j = 0; j < degree; ++j) w = wedge(w, ch.gen(gens[uniform_int(rng, 0, static_cast<int>(gens.size()) - 1)]));
        f += w;
    }
    return f;
}

}  // namespace crc::testing
