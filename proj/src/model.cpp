#include "crc/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace crc {

using nlohmann::json;

Matrix5 identity5()
{
    Matrix5 m;
    for (int i = 0; i < 5; ++i) m[i][i] = ScalarExpr(1);
    return m;
}

Matrix5 operator*(const Matrix5& a, const Matrix5& b)
{
    Matrix5 m;
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) {
            ScalarExpr s;
            for (int k = 0; k < 5; ++k)
                if (!a[i][k].is_zero() && !b[k][j].is_zero()) s += a[i][k] * b[k][j];
            m[i][j] = s;
        }
    return m;
}

Matrix5 operator+(const Matrix5& a, const Matrix5& b)
{
    Matrix5 m;
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) m[i][j] = a[i][j] + b[i][j];
    return m;
}

Matrix5 operator-(const Matrix5& a, const Matrix5& b)
{
    Matrix5 m;
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) m[i][j] = a[i][j] - b[i][j];
    return m;
}

Matrix5 transpose(const Matrix5& a)
{
    Matrix5 m;
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) m[i][j] = a[j][i];
    return m;
}

Matrix5 conjugate(const Matrix5& a)
{
    Matrix5 m;
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) m[i][j] = conjugate(a[i][j]);
    return m;
}

namespace {

ScalarExpr laplace(const Matrix5& m, std::vector<int> rows, std::vector<int> cols)
{
    if (rows.size() == 1) return m[rows[0]][cols[0]];
    int r = rows[0];
    std::vector<int> rest(rows.begin() + 1, rows.end());
    ScalarExpr out;
    for (size_t k = 0; k < cols.size(); ++k) {
        const ScalarExpr& x = m[r][cols[k]];
        if (x.is_zero()) continue;
        std::vector<int> sub = cols;
        sub.erase(sub.begin() + static_cast<long>(k));
        ScalarExpr minor = laplace(m, rest, sub);
        if (minor.is_zero()) continue;
        out += (k % 2 ? -x : x) * minor;
    }
    return out;
}

int pivot_rank(const ScalarExpr& x)
{
    if (x.is_zero()) return 3;
    if (x.is_constant()) return 0;
    return x.is_monomial() ? 1 : 2;
}

}  // namespace

ScalarExpr det(const Matrix5& m)
{
    return laplace(m, {0, 1, 2, 3, 4}, {0, 1, 2, 3, 4});
}

Matrix5 inverse(const Matrix5& m)
{
    Matrix5 a = m, inv = identity5();
    for (int c = 0; c < 5; ++c) {
        int best = -1;
        for (int r = c; r < 5; ++r)
            if (!a[r][c].is_zero() && (best < 0 || pivot_rank(a[r][c]) < pivot_rank(a[best][c]))) best = r;
        if (best < 0) throw DomainError("matrix is singular");
        std::swap(a[c], a[best]);
        std::swap(inv[c], inv[best]);
        ScalarExpr p = a[c][c];
        for (int j = 0; j < 5; ++j) {
            a[c][j] = a[c][j] / p;
            inv[c][j] = inv[c][j] / p;
        }
        for (int r = 0; r < 5; ++r) {
            if (r == c || a[r][c].is_zero()) continue;
            ScalarExpr f = a[r][c];
            for (int j = 0; j < 5; ++j) {
                if (!a[c][j].is_zero()) a[r][j] -= f * a[c][j];
                if (!inv[c][j].is_zero()) inv[r][j] -= f * inv[c][j];
            }
        }
    }
    return inv;
}

bool is_zero(const Matrix5& m)
{
    for (auto& row : m)
        for (auto& x : row)
            if (!x.is_zero()) return false;
    return true;
}

std::string str(const Matrix5& m)
{
    std::string s;
    for (int i = 0; i < 5; ++i) {
        s += i ? "\n[" : "[";
        for (int j = 0; j < 5; ++j) s += (j ? ", " : "") + m[i][j].str();
        s += "]";
    }
    return s;
}

FormMatrix operator*(const Matrix5& h, const FormMatrix& m)
{
    FormMatrix out;
    const Chart& ch = m.e[0][0].chart();
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) {
            FormExpr s = ch.zero(m.e[0][0].degree());
            for (int k = 0; k < 5; ++k)
                if (!h[i][k].is_zero() && !m.e[k][j].is_zero()) s += h[i][k] * m.e[k][j];
            out.e[i][j] = s;
        }
    return out;
}

FormMatrix operator*(const FormMatrix& m, const Matrix5& h)
{
    FormMatrix out;
    const Chart& ch = m.e[0][0].chart();
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) {
            FormExpr s = ch.zero(m.e[0][0].degree());
            for (int k = 0; k < 5; ++k)
                if (!h[k][j].is_zero() && !m.e[i][k].is_zero()) s += m.e[i][k] * h[k][j];
            out.e[i][j] = s;
        }
    return out;
}

FormMatrix wedge(const FormMatrix& a, const FormMatrix& b)
{
    FormMatrix out;
    const Chart& ch = a.e[0][0].chart();
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) {
            FormExpr s = ch.zero(a.e[0][0].degree() + b.e[0][0].degree());
            for (int k = 0; k < 5; ++k)
                if (!a.e[i][k].is_zero() && !b.e[k][j].is_zero()) s += wedge(a.e[i][k], b.e[k][j]);
            out.e[i][j] = s;
        }
    return out;
}

FormMatrix d(const FormMatrix& m)
{
    FormMatrix out;
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) out.e[i][j] = d(m.e[i][j]);
    return out;
}

FormMatrix operator-(const FormMatrix& a, const FormMatrix& b)
{
    FormMatrix out;
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) out.e[i][j] = a.e[i][j] - b.e[i][j];
    return out;
}

BilinearMatrices bilinear_matrices()
{
    BilinearMatrices b;
    for (int i = 0; i < 5; ++i) {
        b.S[i][4 - i] = ScalarExpr(1);
        b.J[i][i] = ScalarExpr(i < 3 ? 1 : -1);
    }
    const int tcol[5] = {3, 4, 2, 0, 1};
    for (int i = 0; i < 5; ++i) b.T[i][tcol[i]] = ScalarExpr(1);
    return b;
}

namespace {

void require_imaginary(const ScalarExpr& x, const char* what)
{
    if (!(conjugate(x) + x).is_zero())
        throw RealityError(std::string(what) + " must be imaginary, got " + x.str());
}

// (row, col, sign) positions, 1-based, of a slot and of its conjugate slot in
// the Maurer-Cartan pattern. Slots: 0 theta, 1 theta1, 2 theta2, 3 phi1, 4 phi2, 5 psi.
struct Slot {
    std::vector<std::array<int, 3>> plain, bar;
};

const std::array<Slot, 6>& slots()
{
    static const std::array<Slot, 6> s = {{
        {{{1, 4, 1}, {2, 5, -1}}, {}},
        {{{1, 3, 1}, {3, 5, -1}}, {{2, 3, 1}, {3, 4, -1}}},
        {{{1, 2, 1}, {4, 5, -1}}, {{2, 1, 1}, {5, 4, -1}}},
        {{{3, 2, 1}, {4, 3, -1}}, {{3, 1, 1}, {5, 3, -1}}},
        {{{1, 1, 1}, {5, 5, -1}}, {{2, 2, 1}, {4, 4, -1}}},
        {{{4, 1, 1}, {5, 2, -1}}, {}},
    }};
    return s;
}

const std::array<std::array<int, 2>, 5> kZeroSlots = {{{1, 5}, {2, 4}, {3, 3}, {4, 2}, {5, 1}}};

FormMatrix pattern_from_forms(const Chart& chart, const std::array<FormExpr, 6>& f,
                              const std::array<FormExpr, 6>& fbar)
{
    FormMatrix m;
    for (auto& row : m.e)
        for (auto& x : row) x = chart.zero(1);
    for (int k = 0; k < 6; ++k) {
        for (auto [i, j, sg] : slots()[k].plain) m(i, j) = sg > 0 ? f[k] : -f[k];
        for (auto [i, j, sg] : slots()[k].bar) m(i, j) = sg > 0 ? fbar[k] : -fbar[k];
    }
    return m;
}

std::string bar_name(const Chart& chart, const std::string& name)
{
    const Generator& g = chart.generator(chart.index(name));
    if (g.link != Generator::Link::pair) throw Error(name + " has no conjugate partner");
    return chart.generator(g.partner).name;
}

}  // namespace

Matrix5 algebra_element(const ScalarExpr& alpha, const ScalarExpr& beta, const ScalarExpr& gamma,
                        const ScalarExpr& sigma, const ScalarExpr& delta, const ScalarExpr& rho_alg)
{
    require_imaginary(delta, "delta");
    require_imaginary(rho_alg, "rho_alg");
    ScalarExpr ab = conjugate(alpha), bb = conjugate(beta), gb = conjugate(gamma), sb = conjugate(sigma);
    Matrix5 m;
    m[0] = {alpha, beta, gamma, delta, 0};
    m[1] = {bb, ab, gb, 0, -delta};
    m[2] = {sigma, sb, 0, -gb, -gamma};
    m[3] = {rho_alg, 0, -sb, -ab, -beta};
    m[4] = {0, -rho_alg, -sigma, -bb, -alpha};
    return m;
}

std::optional<AlgebraParams> algebra_parameters(const Matrix5& m)
{
    AlgebraParams p{m[0][0], m[0][1], m[0][2], m[2][0], m[0][3], m[3][0]};
    try {
        if (algebra_element(p.alpha, p.beta, p.gamma, p.sigma, p.delta, p.rho_alg) != m) return std::nullopt;
    } catch (const RealityError&) {
        return std::nullopt;
    }
    return p;
}

Matrix5 subgroup_h1(const ScalarExpr& A)
{
    if (A.is_zero()) throw DomainError("H1 parameter A must be nonzero");
    ScalarExpr Ab = conjugate(A);
    Matrix5 m;
    m[0][0] = A;
    m[1][1] = Ab;
    m[2][2] = ScalarExpr(1);
    m[3][3] = ScalarExpr(1) / Ab;
    m[4][4] = ScalarExpr(1) / A;
    return m;
}

Matrix5 subgroup_h2(const ScalarExpr& B, const ScalarExpr& Lambda)
{
    require_imaginary(Lambda, "Lambda");
    ScalarExpr Bb = conjugate(B), half = Qi(mpq_class(1, 2)), n2 = half * B * Bb;
    Matrix5 m = identity5();
    m[2][0] = B;
    m[2][1] = Bb;
    m[3][0] = Lambda - n2;
    m[3][1] = -half * Bb * Bb;
    m[3][2] = -Bb;
    m[4][0] = -half * B * B;
    m[4][1] = -Lambda - n2;
    m[4][2] = -B;
    return m;
}

std::optional<std::pair<ScalarExpr, ScalarExpr>> h2_parameters(const Matrix5& m)
{
    ScalarExpr B = m[2][0];
    ScalarExpr Lambda = m[3][0] + Qi(mpq_class(1, 2)) * B * conjugate(B);
    try {
        if (subgroup_h2(B, Lambda) != m) return std::nullopt;
    } catch (const RealityError&) {
        return std::nullopt;
    }
    return std::make_pair(B, Lambda);
}

const std::string& model_chart_text()
{
    static const std::string text = R"(# Maurer-Cartan form of the model group
gen theta self -1
gen theta1 pair theta1b
gen theta2 pair theta2b
gen phi1 pair phi1b
gen phi2 pair phi2b
gen psi self -1
d theta = -theta1/\theta1b - theta/\(phi2 + phi2b)
d theta1 = theta2/\theta1b - theta1/\phi2 - theta/\phi1
d theta2 = -theta2/\(phi2 - phi2b) + theta1/\phi1
d phi1 = -theta2/\phi1b + theta1/\psi + phi1/\phi2b
d phi2 = theta2/\theta2b + theta1/\phi1b + theta/\psi
d psi = -phi1/\phi1b + psi/\(phi2 + phi2b)
)";
    return text;
}

const Chart& model_chart()
{
    static const std::unique_ptr<Chart> chart = load_chart(model_chart_text());
    return *chart;
}

FormMatrix mc_pattern(const Chart& chart, const std::array<std::string, 6>& names)
{
    std::array<FormExpr, 6> f, fb;
    for (int k = 0; k < 6; ++k) {
        f[k] = chart.gen(names[k]);
        fb[k] = (k == 0 || k == 5) ? chart.zero(1) : chart.gen(bar_name(chart, names[k]));
    }
    return pattern_from_forms(chart, f, fb);
}

FormMatrix maurer_cartan(const Chart& chart)
{
    return mc_pattern(chart, {"theta", "theta1", "theta2", "phi1", "phi2", "psi"});
}

Report verify_structure_equations(const Chart& chart)
{
    Report r;
    Stopwatch sw;
    FormMatrix mc = maurer_cartan(chart);
    FormMatrix res = d(mc) - wedge(mc, mc);
    for (int i = 1; i <= 5; ++i)
        for (int j = 1; j <= 5; ++j) {
            json det;
            det["entry"] = mc(i, j).str();
            det["d_entry"] = d(mc(i, j)).str();
            det["residual"] = res(i, j).str();
            r.add("entry(" + std::to_string(i) + "," + std::to_string(j) + ")", res(i, j).is_zero(), det);
        }
    if (!r.checks.empty()) r.checks.back().seconds = sw.seconds();
    return r;
}

FormExpr linear_form(const Chart& chart, const LinearFormula& lf)
{
    FormExpr f = chart.zero(1);
    for (auto& [coef, gen] : lf.terms) f += parse(coef, chart.vars()) * chart.gen(gen);
    return f;
}

std::vector<LinearFormula> printed_h2_formulas()
{
    return {
        {"omega", {{"1", "omega"}}},
        {"omega1", {{"1", "omega1"}, {"Bb", "omega"}}},
        {"theta2", {{"1", "theta2"}, {"-Bb", "omega1"}, {"-Bb^2/2", "omega"}}},
        {"phi1",
         {{"1", "phi1"},
          {"-(Lam + B*Bb/2)", "omega1"},
          {"-Bb^2/2", "omega1b"},
          {"B", "theta2"},
          {"-Lam*Bb", "omega"},
          {"Bb", "phi2b"}}},
        {"phi2", {{"1", "phi2"}, {"-B", "omega1"}, {"-(Lam + B*Bb/2)", "omega"}}},
        {"psi",
         {{"1", "psi"},
          {"-Lam*B", "omega1"},
          {"-Lam*Bb", "omega1b"},
          {"B^2/2", "theta2"},
          {"-Bb^2/2", "theta2b"},
          {"-Lam^2", "omega"},
          {"B", "phi1"},
          {"-Bb", "phi1b"},
          {"Lam - B*Bb/2", "phi2"},
          {"Lam + B*Bb/2", "phi2b"}}},
    };
}

std::vector<LinearFormula> printed_h1_formulas()
{
    return {
        {"omega", {{"A*Ab", "omega"}}},
        {"omega1", {{"A", "omega1"}}},
        {"theta2", {{"A/Ab", "theta2"}}},
        {"phi1", {{"1/Ab", "phi1"}}},
        {"phi2", {{"1", "phi2"}}},
        {"psi", {{"1/(A*Ab)", "psi"}}},
    };
}

const Chart& adjoint_chart()
{
    static const std::unique_ptr<Chart> chart = load_chart(R"(
var B complex Bb
var Lam imaginary
var A complex Ab
gen omega self -1
gen omega1 pair omega1b
gen theta2 pair theta2b
gen phi1 pair phi1b
gen phi2 pair phi2b
gen psi self -1
)");
    return *chart;
}

namespace {

const std::array<std::string, 6> kCoframe = {"omega", "omega1", "theta2", "phi1", "phi2", "psi"};

void compare_adjoint(Report& r, const std::string& prefix, const Chart& chart, const FormMatrix& computed,
                     const std::vector<LinearFormula>& printed)
{
    std::array<FormExpr, 6> f, fb;
    std::array<bool, 6> given{};
    for (auto& lf : printed) {
        auto it = std::find(kCoframe.begin(), kCoframe.end(), lf.target);
        if (it == kCoframe.end()) throw Error("unknown formula target " + lf.target);
        int k = static_cast<int>(it - kCoframe.begin());
        f[k] = linear_form(chart, lf);
        fb[k] = conjugate_form(f[k]);
        given[k] = true;
    }
    for (int k = 0; k < 6; ++k) {
        if (!given[k]) continue;
        json det;
        det["printed"] = f[k].str();
        bool ok = true;
        json mism = json::array();
        auto cmp = [&](const std::vector<std::array<int, 3>>& pos, const FormExpr& e) {
            for (auto [i, j, sg] : pos) {
                FormExpr want = sg > 0 ? e : -e;
                FormExpr diff = computed(i, j) - want;
                if (!diff.is_zero()) {
                    ok = false;
                    mism.push_back({{"entry", std::to_string(i) + "," + std::to_string(j)},
                                    {"computed", computed(i, j).str()},
                                    {"difference", diff.str()}});
                }
            }
        };
        cmp(slots()[k].plain, f[k]);
        cmp(slots()[k].bar, fb[k]);
        det["computed"] = computed(slots()[k].plain[0][0], slots()[k].plain[0][1]).str();
        if (!ok) det["mismatches"] = mism;
        r.add(prefix + kCoframe[k], ok, det);
    }
    json det = json::object();
    bool ok = true;
    for (auto [i, j] : kZeroSlots)
        if (!computed(i, j).is_zero()) {
            ok = false;
            det[std::to_string(i) + "," + std::to_string(j)] = computed(i, j).str();
        }
    r.add(prefix + "zero_entries", ok, det);
}

}  // namespace

Report verify_adjoint_transforms(const std::vector<LinearFormula>& h2, const std::vector<LinearFormula>& h1)
{
    Report r;
    Stopwatch sw;
    const Chart& ch = adjoint_chart();
    FormMatrix m = mc_pattern(ch, kCoframe);
    const VariableTable& v = ch.vars();

    Matrix5 g2 = subgroup_h2(v["B"], v["Lam"]);
    compare_adjoint(r, "h2:", ch, (g2 * m) * inverse(g2), h2);
    Matrix5 g1 = subgroup_h1(v["A"]);
    compare_adjoint(r, "h1:", ch, (g1 * m) * inverse(g1), h1);
    if (!r.checks.empty()) r.checks.back().seconds = sw.seconds();
    return r;
}

bool gamma_membership(const std::array<cplx, 5>& z, int side, double tol)
{
    if (side != 1 && side != -1) throw Error("side must be +1 or -1");
    double scale = 0;
    for (auto& x : z) scale = std::max(scale, std::abs(x));
    if (scale == 0) throw DomainError("zero vector is not a projective point");
    std::array<double, 5> x, y;
    for (int k = 0; k < 5; ++k) {
        x[k] = z[k].real() / scale;
        y[k] = z[k].imag() / scale;
    }
    auto form = [](const std::array<double, 5>& a, const std::array<double, 5>& b) {
        return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] - a[3] * b[3] - a[4] * b[4];
    };
    if (std::abs(form(x, x)) > tol || std::abs(form(y, y)) > tol || std::abs(form(x, y)) > tol) return false;
    double w = x[3] * y[4] - x[4] * y[3];
    return side > 0 ? w > tol : w < -tol;
}

}  // namespace crc
