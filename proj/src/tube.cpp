#include "crc/tube.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace crc {

using nlohmann::json;

namespace {

const Qi kHalf{mpq_class(1, 2)};

ScalarExpr d1(ScalarExpr e, int times = 1)
{
    for (int k = 0; k < times; ++k) e = differentiate(e, tube_vars().t1);
    return e;
}

class RhoJet : public FunctionFamily {
public:
    using FunctionFamily::FunctionFamily;
    bool is_positive(const std::vector<int>& index) const override { return index[0] == 2 && index[1] == 0; }
    std::optional<ScalarExpr> derivative(const std::vector<int>& index, Variable v) const override;
};

class SJet : public FunctionFamily {
public:
    using FunctionFamily::FunctionFamily;
    std::optional<ScalarExpr> derivative(const std::vector<int>& index, Variable v) const override;
};

const std::shared_ptr<RhoJet>& rho_family()
{
    static auto f = std::make_shared<RhoJet>("rho", std::vector<Variable>{tube_vars().t1, tube_vars().t2});
    return f;
}

const std::shared_ptr<SJet>& s_family()
{
    static auto f = std::make_shared<SJet>("S", std::vector<Variable>{tube_vars().t1, tube_vars().t2});
    return f;
}

ScalarExpr R(int i, int j) { return rho_family()->atom({i, j}); }
ScalarExpr Sk(int k) { return s_family()->atom({k, 0}); }
ScalarExpr q() { return R(1, 1) * pow(R(2, 0), -1); }

// d2 rho_11 = S rho_11 + q rho_111 and its t1-derivatives
std::optional<ScalarExpr> RhoJet::derivative(const std::vector<int>& index, Variable v) const
{
    const int i = index[0], j = index[1];
    if (v == tube_vars().t1) {
        if (i == 1 && j == 1) return Sk(0) * R(2, 0) + q() * R(3, 0);
        return atom({i + 1, j});
    }
    if (v != tube_vars().t2) return ScalarExpr();
    if (i == 0 && j == 0) return atom({0, 1});
    if (i == 1 && j == 0) return atom({1, 1});
    if (i == 0 && j == 1) return R(1, 1) * R(1, 1) * pow(R(2, 0), -1);
    if (i == 1 && j == 1) return ScalarExpr(2) * q() * Sk(0) * R(2, 0) + q() * q() * R(3, 0);
    if (j == 0 && i >= 2) return d1(Sk(0) * R(2, 0) + q() * R(3, 0), i - 2);
    return std::nullopt;
}

// d2 S = S^2 + q S_1
std::optional<ScalarExpr> SJet::derivative(const std::vector<int>& index, Variable v) const
{
    if (index[1] != 0) return std::nullopt;
    if (v == tube_vars().t1) return atom({index[0] + 1, 0});
    if (v != tube_vars().t2) return ScalarExpr();
    return d1(Sk(0) * Sk(0) + q() * Sk(1), index[0]);
}

ScalarExpr parse_jet(const std::string& text) { return parse(text, jet_table()); }

std::map<std::string, ScalarExpr> gamma0()
{
    return {{"u", ScalarExpr(1)}, {"a", ScalarExpr(1)}, {"b", ScalarExpr()}, {"bb", ScalarExpr()},
            {"lam", ScalarExpr()}};
}

DomainBox fiber_box(DomainBox box)
{
    box["u"] = {0.5, 2.0};
    box["a"] = {0.0, 2 * std::numbers::pi};
    box["b"] = {-1.0, 1.0};
    box["lam"] = {-1.0, 1.0};
    return box;
}

json cplx_json(cplx z) { return json::array({z.real(), z.imag()}); }

json point_json(const Point& p)
{
    json j = json::object();
    for (auto& [k, v] : p) j[k] = v.imag() == 0 ? json(v.real()) : cplx_json(v);
    return j;
}

}  // namespace

const TubeVars& tube_vars()
{
    static const TubeVars v = [] {
        TubeVars t;
        t.t1 = intern_variable("t1", Reality::real);
        t.t2 = intern_variable("t2", Reality::real);
        t.u = intern_variable("u", Reality::positive_real);
        t.a = intern_variable("a", Reality::unit_modulus);
        t.b = intern_variable("b", Reality::complex_paired, "bb");
        t.bb = intern_variable("bb", Reality::complex_paired, "b");
        t.lam = intern_variable("lam", Reality::imaginary);
        return t;
    }();
    return v;
}

ScalarExpr rho_jet(int i, int j)
{
    ScalarExpr e = R(0, 0);
    e = d1(e, i);
    for (int k = 0; k < j; ++k) e = differentiate(e, tube_vars().t2);
    return e;
}

ScalarExpr s_jet(int k) { return d1(Sk(0), k); }

const VariableTable& jet_table()
{
    static const VariableTable t = [] {
        VariableTable v;
        v.declare("t1", Reality::real);
        v.declare("t2", Reality::real);
        v.declare("u", Reality::positive_real);
        v.declare("a", Reality::unit_modulus);
        v.declare_pair("b", "bb");
        v.declare("lam", Reality::imaginary);
        for (auto [i, j] : std::vector<std::pair<int, int>>{{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {3, 0}, {4, 0}}) {
            ScalarExpr e = R(i, j);
            v.add_atom(e.terms()[0].mono[0].first->name, e);
        }
        for (int k = 0; k < 3; ++k) {
            ScalarExpr e = Sk(k);
            v.add_atom(e.terms()[0].mono[0].first->name, e);
        }
        return v;
    }();
    return t;
}

// ---------------------------------------------------------------- models

bool TubeModel::accepted() const
{
    return ma.status == Status::pass && positivity.status == Status::pass && twonondeg.status == Status::pass;
}

std::vector<std::string> TubeModel::failures() const
{
    std::vector<std::string> out;
    for (auto* h : {&ma, &positivity, &twonondeg})
        if (h->status != Status::pass) out.push_back(h->reason);
    return out;
}

ScalarExpr TubeModel::concretize(const ScalarExpr& e) const
{
    std::map<std::string, ScalarExpr> bind;
    for (const Atom* a : atoms_of(e)) {
        if (a->kind != Atom::Kind::deriv) continue;
        auto it = jet_cache->find(a->name);
        if (it == jet_cache->end()) {
            ScalarExpr v;
            if (a->family.get() == rho_family().get())
                v = rho;
            else if (a->family.get() == s_family().get())
                v = S;
            else
                throw Error("unknown jet atom " + a->name);
            v = d1(v, a->index[0]);
            for (int k = 0; k < a->index[1]; ++k) v = differentiate(v, tube_vars().t2);
            it = jet_cache->emplace(a->name, v).first;
        }
        bind[a->name] = it->second;
    }
    return bind.empty() ? e : substitute(e, bind);
}

TubeModel screen_rho(const std::string& text, const DomainBox& box, const TubeOptions& opt)
{
    VariableTable t;
    t.declare("t1", Reality::real);
    t.declare("t2", Reality::real);
    return screen_rho(parse(text, t), text, box, opt);
}

TubeModel screen_rho(const ScalarExpr& rho, const std::string& text, const DomainBox& box, const TubeOptions& opt)
{
    for (auto n : {"t1", "t2"})
        if (!box.count(n)) throw Error(std::string("box has no interval for ") + n);
    const TubeVars& v = tube_vars();
    TubeModel m;
    m.rho_text = text;
    m.rho = rho;
    m.box = {{"t1", box.at("t1")}, {"t2", box.at("t2")}};
    m.rho11 = differentiate(differentiate(rho, v.t1), v.t1);
    m.rho12 = differentiate(differentiate(rho, v.t1), v.t2);
    m.rho22 = differentiate(differentiate(rho, v.t2), v.t2);
    const ZeroTestOptions zo{16, opt.seed, 1e-9};

    ZeroTest ma = zero_test(m.rho11 * m.rho22 - m.rho12 * m.rho12, m.box, zo);
    m.ma.details = {{"verdict", to_string(ma.verdict)}, {"exact", ma.exact}, {"samples", ma.samples},
                    {"max_residual", ma.max_residual}};
    if (ma.verdict == ZeroVerdict::zero) {
        m.ma.status = Status::pass;
    } else if (ma.verdict == ZeroVerdict::nonzero) {
        m.ma.status = Status::fail;
        m.ma.reason = "Monge-Ampere: rho11*rho22 - rho12^2 is not identically zero";
    } else {
        m.ma.reason = "Monge-Ampere: residual could not be evaluated on the box";
    }

    auto pts = sample_points({v.t1, v.t2}, m.box, 16, opt.seed);
    int ok = 0;
    double min_r11 = INFINITY;
    m.positivity.status = Status::pass;
    for (auto& p : pts) {
        try {
            cplx r11 = evaluate(m.rho11, p);
            if (!std::isfinite(r11.real())) continue;
            ++ok;
            min_r11 = std::min(min_r11, r11.real());
            if (r11.real() <= 0 || std::abs(r11.imag()) > 1e-12 * (1 + std::abs(r11))) {
                m.positivity.status = Status::fail;
                m.positivity.reason = "positivity: rho11 <= 0 at t1 = " + std::to_string(p["t1"].real()) +
                                      ", t2 = " + std::to_string(p["t2"].real());
                break;
            }
        } catch (const DomainError&) {
        }
    }
    if (ok == 0 && m.positivity.status == Status::pass) {
        m.positivity.status = Status::inconclusive;
        m.positivity.reason = "positivity: rho11 could not be evaluated on the box";
    }
    m.positivity.details = {{"samples", ok}};
    if (ok) m.positivity.details["min_rho11"] = min_r11;

    if (m.rho11.is_zero()) {
        m.twonondeg.reason = "2-nondegeneracy: S undefined since rho11 ≡ 0";
        m.twonondeg.details = {{"verdict", "inconclusive"}};
    } else {
        try {
            m.S = differentiate(m.rho12 / m.rho11, v.t1);
            ZeroTest s = zero_test(m.S, m.box, zo);
            m.twonondeg.details = {{"verdict", to_string(s.verdict)}, {"exact", s.exact}, {"samples", s.samples},
                                   {"S", m.S.str()}};
            if (s.verdict == ZeroVerdict::nonzero) {
                m.twonondeg.status = Status::pass;
            } else if (s.verdict == ZeroVerdict::zero) {
                m.twonondeg.status = Status::fail;
                m.twonondeg.reason = "2-nondegeneracy: S ≡ 0";
            } else {
                m.twonondeg.reason = "2-nondegeneracy: S could not be evaluated on the box";
            }
        } catch (const DomainError& e) {
            m.twonondeg.reason = std::string("2-nondegeneracy: S undefined (") + e.what() + ")";
        }
    }
    return m;
}

TubeModel tube_from_rho(const std::string& text, const DomainBox& box, const TubeOptions& opt)
{
    TubeModel m = screen_rho(text, box, opt);
    if (!m.accepted()) {
        std::string msg;
        for (auto& f : m.failures()) msg += (msg.empty() ? "" : "; ") + f;
        throw HypothesisError(msg);
    }
    return m;
}

DomainBox default_profile_box() { return {{"t1", {0.5, 1.0}}, {"t2", {0.5, 1.0}}}; }

ScalarExpr ma_profile_solution(const std::string& g_text, const DomainBox& box)
{
    VariableTable t;
    t.declare("s", Reality::real);
    ScalarExpr g = parse(g_text, t);
    const TubeVars& v = tube_vars();
    ScalarExpr t1 = ScalarExpr::from_atom(v.t1), t2 = ScalarExpr::from_atom(v.t2);
    ScalarExpr rho = t2 * substitute(g, {{"s", t1 / t2}});
    ScalarExpr r11 = differentiate(differentiate(rho, v.t1), v.t1);
    ScalarExpr r12 = differentiate(differentiate(rho, v.t1), v.t2);
    ScalarExpr r22 = differentiate(differentiate(rho, v.t2), v.t2);
    ScalarExpr res = r11 * r22 - r12 * r12;
    if (!is_identically_zero(res, box, 16, 0, 1e-9))
        throw Error("profile solution fails the Monge-Ampere check: " + res.str());
    return rho;
}

const std::string& paper_example_text()
{
    static const std::string s = "((1 - 12*t1*t2)^(3/2) + 18*t1*t2 - 1)/(108*t2^2)";
    return s;
}

ScalarExpr paper_example_rho()
{
    VariableTable t;
    t.declare("t1", Reality::real);
    t.declare("t2", Reality::real);
    return parse(paper_example_text(), t);
}

DomainBox paper_example_box() { return {{"t1", {0.02, 0.08}}, {"t2", {0.02, 0.08}}}; }

std::vector<std::pair<double, double>> levi_points(const DomainBox& box, int count, uint64_t seed)
{
    std::vector<std::pair<double, double>> out;
    for (auto& p : sample_points({tube_vars().t1, tube_vars().t2}, box, count, seed))
        out.emplace_back(p["t1"].real(), p["t2"].real());
    return out;
}

std::vector<LeviSample> levi_rank_numeric(const TubeModel& model, const std::vector<std::pair<double, double>>& points,
                                          double tol)
{
    std::vector<LeviSample> out;
    const Interval& i1 = model.box.at("t1");
    const Interval& i2 = model.box.at("t2");
    for (auto [x1, x2] : points) {
        if (x1 < i1.lo || x1 > i1.hi || x2 < i2.lo || x2 > i2.hi)
            throw DomainError("point (" + std::to_string(x1) + ", " + std::to_string(x2) + ") outside the box");
        Point p{{"t1", x1}, {"t2", x2}};
        double h11 = evaluate(model.rho11, p).real();
        double h12 = evaluate(model.rho12, p).real();
        double h22 = evaluate(model.rho22, p).real();
        double mid = (h11 + h22) / 2, rad = std::hypot((h11 - h22) / 2, h12);
        double e1 = mid + rad, e2 = mid - rad;
        // the smaller root from the product avoids cancellation
        double det = h11 * h22 - h12 * h12;
        double big = std::abs(e1) >= std::abs(e2) ? e1 : e2;
        double small = big != 0 ? det / big : 0;
        LeviSample s{x1, x2, small, big, 0};
        double scale = std::abs(small) + std::abs(big);
        for (double e : {small, big})
            if (std::abs(e) > tol * scale) ++s.rank;
        out.push_back(s);
    }
    return out;
}

// ---------------------------------------------------------------- coframe

namespace {

const char* kVarLines = R"(
var t1 real
var t2 real
var u positive_real
var a unit_modulus
var b complex bb
var lam imaginary
)";

void add_jet_atoms(Chart& ch)
{
    for (auto n : {"rho", "rho_1", "rho_2", "rho_11", "rho_12", "rho_111", "rho_1111", "S", "S_1", "S_11"})
        ch.vars().add_atom(n, *jet_table().lookup(n));
}

bool has_gen(const Chart& ch, Word w, const char* name)
{
    int k = ch.find(name);
    return k >= 0 && (w >> k & 1);
}

// terms of f whose word contains one of names and, if with is given, also with
FormExpr drop_terms(const FormExpr& f, const std::vector<const char*>& names, const char* with = nullptr)
{
    FormExpr out(f.chart(), f.degree());
    for (auto& [w, s] : f.terms()) {
        bool hit = false;
        for (auto n : names) hit = hit || has_gen(f.chart(), w, n);
        if (with && !has_gen(f.chart(), w, with)) hit = false;
        if (!hit) out.add_term(w, s);
    }
    return out;
}

void add_form_check(Report& r, const std::string& name, const FormExpr& residual, json extra = json::object())
{
    extra["residual"] = residual.is_zero() ? "0" : residual.str();
    r.add(name, residual.is_zero(), extra);
}

}  // namespace

FormExpr TubeCoframe::in_C(const FormExpr& f) const { return rewrite_basis(f, *C, to_C); }
FormExpr TubeCoframe::d_in_C(const ScalarExpr& s) const { return in_C(L->d_scalar(s)); }
FormExpr TubeCoframe::d_in_C(const FormExpr& f) const { return in_C(L->d(f)); }

namespace {

TubeCoframe make_coframe()
{
    TubeCoframe cf;
    cf.L = load_chart(std::string(kVarLines) + R"(
gen dz1 pair dzb1
gen dz2 pair dzb2
gen mu self -1
gen du self
gen ell self -1
gen db pair dbb
gen dlam self -1
dvar t1 = dz1 + dzb1
dvar t2 = dz2 + dzb2
dvar u = du
dvar a = a*ell
dvar b = db
dvar bb = dbb
dvar lam = dlam
)");
    Chart& L = *cf.L;
    add_jet_atoms(L);
    for (auto n : {"dz1", "dzb1", "dz2", "dzb2", "du", "ell", "db", "dbb", "dlam"}) L.set_d(n, L.zero(2));
    L.set_d("mu", (L.d_scalar(R(1, 0)) ^ L.gen("dz1")) + (L.d_scalar(R(0, 1)) ^ L.gen("dz2")));
    L.finalize();

    cf.C = load_chart(std::string(kVarLines) + R"(
gen omega self -1
gen omega1 pair omega1b
gen theta2 pair theta2b
gen phi1 pair phi1b
gen phi2 pair phi2b
gen dlam aux
gen sigma pair sigmab
)");
    Chart& C = *cf.C;
    add_jet_atoms(C);
    auto fl = [&](const char* t) { return parse_form(t, L); };
    auto fc = [&](const char* t) { return parse_form(t, C); };

    cf.omega = fl("u*mu");
    cf.omega1 = fl("a*sqrt(u/rho_11)*(rho_11*dz1 + rho_12*dz2) + bb*u*mu");
    cf.theta2 = fl("-a^2*S*dz2");

    FormExpr eta2 = fc("-a^(-2)/S*theta2");
    FormExpr eta1 = fc("sqrt(rho_11/u)/a*(omega1 - bb*omega)");
    FormExpr dz1 = pow(R(2, 0), -1) * (eta1 - R(1, 1) * eta2);
    auto idx = [&](const char* n) { return L.index(n); };
    cf.to_C = {
        {idx("dz1"), dz1},
        {idx("dzb1"), conjugate_form(dz1)},
        {idx("dz2"), eta2},
        {idx("dzb2"), conjugate_form(eta2)},
        {idx("mu"), fc("omega/u")},
        {idx("du"), fc("u*(b*omega1 + bb*omega1b - lam*omega + phi2 + phi2b)")},
        {idx("ell"), fc("-a^(-2)/2*theta2 + a^2/2*theta2b + (3/2*b + rho_111/(2*a*sqrt(u*rho_11^3)))*omega1"
                        " - (3/2*bb + a*rho_111/(2*sqrt(u*rho_11^3)))*omega1b + 1/2*phi2 - 1/2*phi2b")},
        {idx("db"), fc("lam/2*omega1b - sigmab + phi1b")},
        {idx("dbb"), fc("-lam/2*omega1 - sigma + phi1")},
        {idx("dlam"), fc("dlam")},
    };

    Report& r = cf.checks;
    add_form_check(r, "omega image", cf.in_C(cf.omega) - C.gen("omega"));
    add_form_check(r, "omega1 image", cf.in_C(cf.omega1) - C.gen("omega1"));
    add_form_check(r, "theta2 image", cf.in_C(cf.theta2) - C.gen("theta2"));
    add_form_check(r, "d omega = -omega1^omega1b - omega^(phi2 + phi2b)",
                   cf.d_in_C(cf.omega) - fc(R"(-omega1/\omega1b - omega/\(phi2 + phi2b))"));
    FormExpr w1res = cf.d_in_C(cf.omega1) - fc(R"(theta2/\omega1b - omega1/\phi2 - omega/\phi1)");
    add_form_check(r, "d omega1 = theta2^omega1b - omega1^phi2 - omega^phi1 (mod omega)", reduce_mod(w1res, {"omega"}));
    add_form_check(r, "d omega1 = theta2^omega1b - omega1^phi2 - omega^phi1 (b = 0, sigma = 0)",
                   drop_terms(substitute_form(w1res, {{"b", ScalarExpr()}, {"bb", ScalarExpr()}}), {"sigma", "sigmab"}));

    FormExpr du = cf.to_C.at(idx("du")), ell = cf.to_C.at(idx("ell"));
    FormExpr phi2 = ell + ScalarExpr(kHalf) * ScalarExpr(pow(ScalarExpr::from_atom(tube_vars().u), -1)) * du +
                    fc("a^(-2)/2*theta2 - a^2/2*theta2b - (2*b + rho_111/(2*a*sqrt(u*rho_11^3)))*omega1"
                       " + (bb + a*rho_111/(2*sqrt(u*rho_11^3)))*omega1b + lam/2*omega");
    add_form_check(r, "phi2 definition", phi2 - C.gen("phi2"));
    FormExpr phi = ScalarExpr(pow(ScalarExpr::from_atom(tube_vars().u), -1)) * du - fc("b*omega1 + bb*omega1b - lam*omega");
    add_form_check(r, "Re phi2 = phi/2", ScalarExpr(kHalf) * (C.gen("phi2") + C.gen("phi2b") - phi));

    auto g0 = [&](const FormExpr& f) { return substitute_form(f, gamma0()); };
    add_form_check(r, "gamma0: du = phi2 + phi2b", g0(du) - fc("phi2 + phi2b"));
    add_form_check(r, "gamma0: da", g0(ell) - fc("-1/2*theta2 + 1/2*theta2b + rho_111/(2*sqrt(rho_11^3))*omega1"
                                                  " - rho_111/(2*sqrt(rho_11^3))*omega1b + 1/2*phi2 - 1/2*phi2b"));
    add_form_check(r, "gamma0: db = phi1b (sigma = 0)", drop_terms(g0(cf.to_C.at(idx("db"))), {"sigmab"}) - fc("phi1b"));

    FormExpr Theta2 = cf.d_in_C(cf.theta2) + fc(R"(theta2/\(phi2 - phi2b) - omega1/\phi1)");
    FormExpr Theta2b = cf.d_in_C(conjugate_form(cf.theta2)) + fc(R"(theta2b/\(phi2b - phi2) - omega1b/\phi1b)");
    add_form_check(r, "Theta2 conjugation consistency", conjugate_form(Theta2) - Theta2b);
    return cf;
}

}  // namespace

const TubeCoframe& build_coframe()
{
    static const TubeCoframe cf = make_coframe();
    return cf;
}

// ---------------------------------------------------------------- curvature

namespace {

struct Sampled {
    bool ok = true;
    int samples = 0;
    double max_rel = 0;
    json values = json::array();
};

// lhs and rhs (jet expressions) compared at seeded points after substituting the model's jets
Sampled compare_sampled(const TubeModel& m, const ScalarExpr& lhs, const ScalarExpr& rhs, const DomainBox& box,
                        int trials, uint64_t seed, double tol, int keep = 0)
{
    Sampled s;
    ScalarExpr l = m.concretize(lhs), r = m.concretize(rhs);
    auto vl = free_variables(l), vr = free_variables(r);
    std::vector<Variable> vars(vl);
    for (auto v : vr)
        if (std::find(vars.begin(), vars.end(), v) == vars.end()) vars.push_back(v);
    std::sort(vars.begin(), vars.end(), AtomLess());
    for (auto& p : sample_points(vars, box, trials * 4, seed)) {
        if (s.samples >= trials) break;
        try {
            cplx a = evaluate(l, p), b = evaluate(r, p);
            if (!std::isfinite(std::abs(a)) || !std::isfinite(std::abs(b))) continue;
            double den = std::max(std::abs(a), std::abs(b));
            double rel = den == 0 ? 0 : std::abs(a - b) / den;
            s.max_rel = std::max(s.max_rel, rel);
            if (!(rel <= tol)) s.ok = false;
            if (s.samples < keep) s.values.push_back({{"point", point_json(p)}, {"pipeline", cplx_json(a)},
                                                      {"printed", cplx_json(b)}});
            ++s.samples;
        } catch (const DomainError&) {
        }
    }
    if (s.samples == 0) s.ok = false;
    return s;
}

void add_printed_check(Report& rep, const std::string& name, const TubeModel& m, const ScalarExpr& pipeline,
                       const ScalarExpr& printed, const DomainBox& box, int trials, uint64_t seed, double tol)
{
    Stopwatch sw;
    bool exact = (pipeline - printed).is_zero();
    Sampled s = compare_sampled(m, pipeline, printed, box, trials, seed, tol);
    json d = {{"printed", printed.str()},
              {"exact_jet_identity", exact},
              {"samples", s.samples},
              {"max_relative_error", s.max_rel},
              {"tolerance", tol}};
    if (!exact) d["pipeline"] = pipeline.str();
    Status st = s.samples == 0 ? Status::inconclusive : (s.ok ? Status::pass : Status::fail);
    rep.add(name, st, d).seconds = sw.seconds();
}

ScalarExpr bracket(const ScalarExpr& X)
{
    const TubeVars& v = tube_vars();
    return q() * differentiate(X, v.t1) - differentiate(X, v.t2);
}

}  // namespace

CurvatureVerdict curvature_coefficients(const TubeCoframe& cf, const TubeModel& model, const TubeOptions& opt)
{
    CurvatureVerdict v;
    const Chart& C = *cf.C;
    FormExpr Theta2 = cf.d_in_C(cf.theta2) + parse_form(R"(theta2/\(phi2 - phi2b) - omega1/\phi1)", C);

    // auxiliary covectors may only appear wedged with omega
    {
        int bad = 0, aux = 0;
        for (auto& [w, s] : Theta2.terms())
            if (has_gen(C, w, "dlam") || has_gen(C, w, "sigma") || has_gen(C, w, "sigmab")) {
                ++aux;
                if (!has_gen(C, w, "omega")) ++bad;
            }
        v.checks.add("Theta2 auxiliary terms lie in omega", bad == 0, {{"auxiliary_terms", aux}, {"outside", bad}});
    }

    std::vector<std::string> w2b1 = {"theta2", "omega1b"}, w21 = {"theta2", "omega1"};
    v.theta2_2bar1 = coefficient(Theta2, w2b1);
    v.c = v.theta2_2bar1 / ScalarExpr(3);
    FormExpr th = C.gen("theta2"), w1 = C.gen("omega1"), w1b = C.gen("omega1b");
    FormExpr tilde = Theta2 - (cf.d_in_C(v.c) ^ w1) + ScalarExpr(2) * conjugate(v.c) * (th ^ w1) -
                     ScalarExpr(3) * v.c * (th ^ w1b);
    v.theta2_21_gamma0 = substitute(coefficient(Theta2, w21), gamma0());
    v.theta2_21_final = substitute(coefficient(tilde, w21), gamma0());

    {
        ScalarExpr bb = ScalarExpr::from_atom(tube_vars().bb);
        ScalarExpr shifted = substitute(v.theta2_2bar1, {{"bb", bb - v.c}}, false);
        ScalarExpr after = substitute(coefficient(tilde, w2b1), gamma0());
        v.checks.add("normalization removes Theta2_2bar1", shifted.is_zero() && after.is_zero(),
                     {{"shifted", shifted.str()}, {"tilde_2bar1_gamma0", after.str()}});
    }

    DomainBox fbox = fiber_box(model.box);
    const int k16 = 16;
    add_printed_check(v.checks, "Theta2_2bar1 (general fiber) matches printed", model, v.theta2_2bar1,
                      parse_jet("-a*S_1/(sqrt(u*rho_11)*S) + 3*bb + a*rho_111/sqrt(u*rho_11^3)"), fbox, k16, opt.seed,
                      opt.tol);
    ScalarExpr X = parse_jet("S_1/(sqrt(rho_11)*S)"), Y = parse_jet("rho_111/sqrt(rho_11^3)");
    add_printed_check(v.checks, "Theta2_21 on gamma0 matches printed", model, v.theta2_21_gamma0,
                      ScalarExpr() - X - Y, model.box, k16, opt.seed, opt.tol);
    ScalarExpr inv3S = pow(ScalarExpr(3) * Sk(0), -1);
    ScalarExpr common = inv3S * bracket(X) - inv3S * bracket(Y);
    add_printed_check(v.checks, "final Theta2_21 matches the expression through Theta2_21", model, v.theta2_21_final,
                      v.theta2_21_gamma0 + common - ScalarExpr(Qi(mpq_class(5, 6))) * X +
                          ScalarExpr(Qi(mpq_class(5, 6))) * Y,
                      model.box, k16, opt.seed, opt.tol);
    add_printed_check(v.checks, "final Theta2_21 matches the closed jet expression", model, v.theta2_21_final,
                      common - ScalarExpr(Qi(mpq_class(11, 6))) * X - ScalarExpr(Qi(mpq_class(1, 6))) * Y, model.box,
                      k16, opt.seed, opt.tol);

    ZeroTest z = zero_test(model.concretize(v.theta2_21_final), model.box, {opt.trials, opt.seed, 1e-9});
    v.is_final_zero = z.verdict;
    v.cartan_obstruction = z.verdict == ZeroVerdict::nonzero;
    v.flatness = z.verdict == ZeroVerdict::nonzero ? "not_flat"
                 : z.verdict == ZeroVerdict::zero  ? "necessary_condition_passed"
                                                   : "inconclusive";
    return v;
}

Report flatness_probe(const CurvatureVerdict& v)
{
    Report r;
    json d = {{"is_final_zero", to_string(v.is_final_zero)},
              {"cartan_obstruction", v.cartan_obstruction},
              {"flatness", v.flatness}};
    switch (v.is_final_zero) {
    case ZeroVerdict::nonzero:
        d["conclusion"] = "not flat; not locally CR-equivalent to the model; the parallelism is not a Cartan connection";
        r.add("flatness probe", Status::pass, d);
        break;
    case ZeroVerdict::zero:
        d["conclusion"] = "necessary condition passed; flatness NOT concluded";
        r.add("flatness probe", Status::pass, d);
        break;
    case ZeroVerdict::inconclusive:
        d["conclusion"] = "zero test inconclusive; no claim made";
        r.add("flatness probe", Status::inconclusive, d);
        break;
    }
    return r;
}

// ---------------------------------------------------------------- reports

namespace {

json hypothesis_json(const Hypothesis& h)
{
    json j = {{"status", to_string(h.status)}, {"details", h.details}};
    if (!h.reason.empty()) j["reason"] = h.reason;
    return j;
}

json sample_values(const TubeModel& m, const ScalarExpr& e, const DomainBox& box, int count, uint64_t seed)
{
    ScalarExpr c = m.concretize(e);
    json out = json::array();
    for (auto& p : sample_points(free_variables(c), box, count, seed)) {
        try {
            out.push_back({{"point", point_json(p)}, {"value", cplx_json(evaluate(c, p))}});
        } catch (const DomainError&) {
        }
    }
    return out;
}

}  // namespace

Report analyze_tube(const std::string& rho_text, const DomainBox& box, const TubeOptions& opt)
{
    VariableTable t;
    t.declare("t1", Reality::real);
    t.declare("t2", Reality::real);
    return analyze_tube(parse(rho_text, t), rho_text, box, opt);
}

Report analyze_tube(const ScalarExpr& rho, const std::string& rho_text, const DomainBox& box, const TubeOptions& opt)
{
    Report r;
    r.config = {{"rho", rho_text}, {"box", box_str(box)}, {"seed", opt.seed}, {"trials", opt.trials}};
    Stopwatch sw;
    TubeModel m = screen_rho(rho, rho_text, box, opt);
    json result;
    result["rho"] = m.rho.str();
    result["hypotheses"] = {{"ma", hypothesis_json(m.ma)},
                            {"positivity", hypothesis_json(m.positivity)},
                            {"twonondeg", hypothesis_json(m.twonondeg)}};
    auto hyp = [&](const std::string& name, const Hypothesis& h) {
        json d = h.details;
        if (!h.reason.empty()) d["reason"] = h.reason;
        r.add("hypothesis: " + name, h.status, d);
    };
    hyp("Monge-Ampere", m.ma);
    hyp("rho11 > 0", m.positivity);
    hyp("2-nondegeneracy", m.twonondeg);
    r.checks.back().seconds = sw.seconds();
    if (!m.accepted()) {
        std::string reason;
        for (auto& f : m.failures()) reason += (reason.empty() ? "" : "; ") + f;
        result["reason"] = reason;
        r.result = result;
        return r;
    }

    auto levi = levi_rank_numeric(m, levi_points(m.box, opt.levi_points, opt.seed), opt.levi_tol);
    json lj = json::array();
    bool rank1 = true;
    double worst = 0;
    for (auto& s : levi) {
        lj.push_back({{"t1", s.t1}, {"t2", s.t2}, {"eigenvalues", {s.eig_small, s.eig_large}}, {"rank", s.rank}});
        rank1 = rank1 && s.rank == 1;
        worst = std::max(worst, std::abs(s.eig_small) / (std::abs(s.eig_small) + std::abs(s.eig_large)));
    }
    result["levi"] = lj;
    r.add("Levi rank 1 at sampled points", rank1,
          {{"points", levi.size()}, {"max_relative_small_eigenvalue", worst}, {"tolerance", opt.levi_tol}});

    sw = Stopwatch();
    const TubeCoframe& cf = build_coframe();
    r.merge(cf.checks, "coframe: ");
    CurvatureVerdict v = curvature_coefficients(cf, m, opt);
    r.merge(v.checks, "curvature: ");
    r.merge(flatness_probe(v));
    r.checks.back().seconds = sw.seconds();

    DomainBox fbox = fiber_box(m.box);
    result["coefficients"] = {
        {"theta2_2bar1",
         {{"expression", v.theta2_2bar1.str()}, {"samples", sample_values(m, v.theta2_2bar1, fbox, 4, opt.seed)}}},
        {"theta2_21",
         {{"expression", v.theta2_21_gamma0.str()}, {"samples", sample_values(m, v.theta2_21_gamma0, m.box, 4, opt.seed)}}},
        {"theta2_21_final",
         {{"expression", v.theta2_21_final.str()},
          {"samples", sample_values(m, v.theta2_21_final, m.box, 4, opt.seed)}}},
    };
    result["verdict"] = {{"is_final_zero", to_string(v.is_final_zero)},
                         {"cartan_obstruction", v.cartan_obstruction},
                         {"flatness", v.flatness}};
    r.result = result;
    return r;
}

Report paper_example_report(const TubeOptions& opt)
{
    Stopwatch total;
    ScalarExpr rho = paper_example_rho();
    DomainBox box = paper_example_box();
    Report r = analyze_tube(rho, paper_example_text(), box, opt);
    TubeModel m = screen_rho(rho, paper_example_text(), box, opt);
    VariableTable t;
    t.declare("t1", Reality::real);
    t.declare("t2", Reality::real);
    auto closed = [&](const std::string& name, const ScalarExpr& got, const std::string& printed) {
        ScalarExpr p = parse(printed, t);
        ZeroTest z = zero_test(got - p, box, {16, opt.seed, 1e-9});
        r.add("example: " + name, z.verdict == ZeroVerdict::zero,
              {{"printed", printed}, {"verdict", to_string(z.verdict)}, {"max_residual", z.max_residual}});
    };
    closed("rho11 closed form", m.rho11, "(1 - 12*t1*t2)^(-1/2)");
    closed("S closed form", m.S, "(1 - sqrt(1 - 12*t1*t2))/(t2*sqrt(1 - 12*t1*t2))");

    if (m.accepted()) {
        Stopwatch sw;
        const TubeCoframe& cf = build_coframe();
        CurvatureVerdict v = curvature_coefficients(cf, m, opt);
        ScalarExpr printed = parse("-12*t2/((1 - 12*t1*t2)^(3/4)*(1 - sqrt(1 - 12*t1*t2)))", t);
        Sampled s = compare_sampled(m, v.theta2_21_final, printed, box, opt.trials, opt.seed, opt.tol, 4);
        r.add("example: final Theta2_21 matches the closed form", s.ok && s.samples == opt.trials,
              {{"printed", printed.str()},
               {"samples", s.samples},
               {"max_relative_error", s.max_rel},
               {"tolerance", opt.tol},
               {"values", s.values}})
            .seconds = sw.seconds();
        r.add("example: not flat, Cartan obstruction present",
              v.is_final_zero == ZeroVerdict::nonzero && v.cartan_obstruction,
              {{"is_final_zero", to_string(v.is_final_zero)}, {"flatness", v.flatness}});
    }
    double elapsed = total.seconds();
    r.add("example: runtime below 60 s", elapsed < 60, {{"limit_seconds", 60}}).seconds = elapsed;
    r.config["example"] = "builtin";
    return r;
}

Report profile_report(const std::string& g_text, const DomainBox& box, const TubeOptions& opt)
{
    ScalarExpr rho = ma_profile_solution(g_text, box);
    Report r;
    TubeModel m = screen_rho(rho, rho.str(), box, opt);
    ScalarExpr res = m.rho11 * m.rho22 - m.rho12 * m.rho12;
    r.add("profile: Monge-Ampere residual", res.is_zero() ? Status::pass : m.ma.status,
          {{"exact", res.is_zero()}, {"residual", res.str()}});
    if (!m.rho11.is_zero() && !m.S.is_zero()) {
        ZeroTest z = zero_test(m.S + pow(ScalarExpr::from_atom(tube_vars().t2), -1), m.box, {16, opt.seed, 1e-9});
        r.add("profile: S = -1/t2", z.verdict == ZeroVerdict::zero,
              {{"S", m.S.str()}, {"verdict", to_string(z.verdict)}});
    }
    Report a = analyze_tube(rho, rho.str(), box, opt);
    r.merge(a);
    r.result = a.result;
    r.result["g"] = g_text;
    r.config = a.config;
    r.config["g"] = g_text;
    return r;
}

}  // namespace crc
