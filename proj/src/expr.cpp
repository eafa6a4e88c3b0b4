#include "crc/expr.hpp"

#include "parser.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <mutex>
#include <random>
#include <set>
#include <sstream>
#include <unordered_map>

namespace crc {

// ---------------------------------------------------------------- basics

Qi Qi::inverse() const
{
    mpq_class n = re * re + im * im;
    if (sgn(n) == 0) throw DomainError("division by zero");
    return {re / n, -im / n};
}

std::string Qi::str() const
{
    if (sgn(im) == 0) return re.get_str();
    if (sgn(re) == 0) return im.get_str() + "*i";
    std::string s = re.get_str();
    s += sgn(im) > 0 ? "+" : "-";
    mpq_class a = abs(im);
    s += (a == 1 ? std::string("i") : a.get_str() + "*i");
    return s;
}

std::string to_string(Reality r)
{
    switch (r) {
    case Reality::real: return "real";
    case Reality::imaginary: return "imaginary";
    case Reality::unit_modulus: return "unit_modulus";
    case Reality::complex_paired: return "complex_paired";
    case Reality::positive_real: return "positive_real";
    }
    return "?";
}

std::string to_string(ZeroVerdict v)
{
    switch (v) {
    case ZeroVerdict::zero: return "zero";
    case ZeroVerdict::nonzero: return "nonzero";
    case ZeroVerdict::inconclusive: return "inconclusive";
    }
    return "?";
}

ParseError::ParseError(size_t off, const std::string& msg)
    : Error("syntax error at offset " + std::to_string(off) + ": " + msg), offset(off)
{
}

UndeclaredIdentifier::UndeclaredIdentifier(const std::string& n)
    : Error("undeclared identifier '" + n + "'"), name(n)
{
}

// ---------------------------------------------------------------- interning

namespace {

std::mutex& intern_mutex()
{
    static std::mutex m;
    return m;
}

std::unordered_map<std::string, std::unique_ptr<Atom>>& intern_table()
{
    static std::unordered_map<std::string, std::unique_ptr<Atom>> t;
    return t;
}

const Atom* intern(std::unique_ptr<Atom> a)
{
    std::lock_guard<std::mutex> lock(intern_mutex());
    auto& t = intern_table();
    auto it = t.find(a->key);
    if (it != t.end()) return it->second.get();
    const Atom* p = a.get();
    t.emplace(a->key, std::move(a));
    return p;
}

const Atom* const_atom(const mpq_class& r)
{
    auto a = std::make_unique<Atom>();
    a->kind = Atom::Kind::constant;
    a->cbase = r;
    a->key = "1c:" + r.get_str();
    a->name = r.get_str();
    a->positive = true;
    return intern(std::move(a));
}

const Atom* base_atom(const ScalarExpr& p)
{
    auto a = std::make_unique<Atom>();
    a->kind = Atom::Kind::base;
    a->key = "4b:(" + p.key() + ")";
    a->base = std::make_shared<const ScalarExpr>(p);
    a->positive = true;
    return intern(std::move(a));
}

const Atom* deriv_atom(const FunctionFamily& fam, const std::vector<int>& index)
{
    auto a = std::make_unique<Atom>();
    a->kind = Atom::Kind::deriv;
    std::string idx;
    for (int k : index) idx += std::to_string(k) + ",";
    a->key = "3d:" + fam.name() + ":" + idx;
    a->name = fam.atom_name(index);
    a->family = fam.shared_from_this();
    a->index = index;
    a->positive = fam.is_positive(index);
    return intern(std::move(a));
}

bool is_integer(const mpq_class& q) { return q.get_den() == 1; }

mpz_class floor_q(const mpq_class& q)
{
    mpz_class r;
    mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return r;
}

mpq_class rational_pow(const mpq_class& r, const mpz_class& n)
{
    if (!n.fits_slong_p()) throw Error("exponent too large");
    long k = n.get_si();
    unsigned long m = static_cast<unsigned long>(k < 0 ? -k : k);
    mpz_class num, den;
    mpz_pow_ui(num.get_mpz_t(), r.get_num_mpz_t(), m);
    mpz_pow_ui(den.get_mpz_t(), r.get_den_mpz_t(), m);
    if (k < 0) {
        if (num == 0) throw DomainError("division by zero");
        std::swap(num, den);
    }
    mpq_class q(num, den);
    q.canonicalize();
    return q;
}

Qi qi_pow(Qi c, long k)
{
    if (k < 0) {
        c = c.inverse();
        k = -k;
    }
    Qi r(1);
    while (k) {
        if (k & 1) r = r * c;
        c = c * c;
        k >>= 1;
    }
    return r;
}

// r^q for a positive rational r: exact coefficient and at most one constant atom factor.
std::pair<Qi, std::optional<Factor>> const_power(const mpq_class& r, const mpq_class& q)
{
    mpz_class n = floor_q(q);
    mpq_class f = q - mpq_class(n);
    Qi c(rational_pow(r, n));
    if (sgn(f) == 0) return {c, std::nullopt};
    mpz_class m = f.get_den();
    unsigned long mm = m.get_ui();
    mpz_class a, b;
    bool exa = mpz_root(a.get_mpz_t(), r.get_num_mpz_t(), mm) != 0;
    bool exb = mpz_root(b.get_mpz_t(), r.get_den_mpz_t(), mm) != 0;
    if (exa && exb) {
        mpq_class root(a, b);
        root.canonicalize();
        return {c * Qi(rational_pow(root, f.get_num())), std::nullopt};
    }
    return {c, Factor{const_atom(r), f}};
}

int atom_cmp(const Atom* a, const Atom* b)
{
    if (a == b) return 0;
    return a->key < b->key ? -1 : 1;
}

void sort_merge(Monomial& m)
{
    if (!std::is_sorted(m.begin(), m.end(), [](const Factor& x, const Factor& y) {
            return atom_cmp(x.first, y.first) < 0;
        }))
        std::sort(m.begin(), m.end(),
                  [](const Factor& x, const Factor& y) { return atom_cmp(x.first, y.first) < 0; });
    size_t w = 0;
    for (size_t r = 0; r < m.size(); ++r) {
        if (w > 0 && m[w - 1].first == m[r].first)
            m[w - 1].second += m[r].second;
        else if (w++ != r)
            m[w - 1] = std::move(m[r]);
    }
    m.resize(w);
}

Monomial merge_monomials(const Monomial& a, const Monomial& b)
{
    Monomial out;
    out.reserve(a.size() + b.size());
    size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        int c = atom_cmp(a[i].first, b[j].first);
        if (c < 0)
            out.push_back(a[i++]);
        else if (c > 0)
            out.push_back(b[j++]);
        else {
            out.emplace_back(a[i].first, a[i].second + b[j].second);
            ++i;
            ++j;
        }
    }
    for (; i < a.size(); ++i) out.push_back(a[i]);
    for (; j < b.size(); ++j) out.push_back(b[j]);
    return out;
}

bool needs_canon(const Monomial& m)
{
    for (auto& [a, e] : m) {
        if (sgn(e) == 0) return true;
        if (a->kind == Atom::Kind::constant) {
            if (e >= 1 || sgn(e) < 0) return true;
            if (!const_power(a->cbase, e).second) return true;
        }
        if (a->kind == Atom::Kind::base && e >= 1) return true;
    }
    return false;
}

void finish(std::vector<Term>& terms)
{
    std::sort(terms.begin(), terms.end(),
              [](const Term& x, const Term& y) { return monomial_less(x.mono, y.mono); });
    size_t w = 0;
    for (size_t r = 0; r < terms.size(); ++r) {
        if (w > 0 && terms[w - 1].mono == terms[r].mono)
            terms[w - 1].coeff = terms[w - 1].coeff + terms[r].coeff;
        else {
            if (w > 0 && terms[w - 1].coeff.is_zero()) --w;
            if (w != r) terms[w] = std::move(terms[r]);
            ++w;
        }
    }
    if (w > 0 && terms[w - 1].coeff.is_zero()) --w;
    terms.resize(w);
}

}  // namespace

bool monomial_less(const Monomial& a, const Monomial& b)
{
    size_t n = std::min(a.size(), b.size());
    for (size_t k = 0; k < n; ++k) {
        int c = atom_cmp(a[k].first, b[k].first);
        if (c != 0) return c < 0;
        if (a[k].second != b[k].second) return a[k].second < b[k].second;
    }
    return a.size() < b.size();
}

Variable intern_variable(const std::string& name, Reality r, const std::string& partner)
{
    auto a = std::make_unique<Atom>();
    a->kind = Atom::Kind::var;
    a->name = name;
    a->reality = r;
    a->partner = partner;
    a->key = "2v:" + name + "|" + to_string(r) + "|" + partner;
    a->positive = r == Reality::positive_real;
    return intern(std::move(a));
}

// ---------------------------------------------------------------- canonical form

namespace {

void canon_term(Monomial m, Qi c, std::vector<Term>& out);

ScalarExpr expand_power(const ScalarExpr& p, const mpz_class& n)
{
    ScalarExpr r(1);
    for (mpz_class k = 0; k < n; ++k) r = r * p;
    return r;
}

void canon_term(Monomial m, Qi c, std::vector<Term>& out)
{
    if (c.is_zero()) return;
    sort_merge(m);
    if (!needs_canon(m)) {
        out.push_back({std::move(m), std::move(c)});
        return;
    }
    Monomial kept;
    std::vector<std::pair<const Atom*, mpz_class>> expand;
    std::vector<Factor> extra;
    for (auto& [a, e] : m) {
        if (sgn(e) == 0) continue;
        if (a->kind == Atom::Kind::constant) {
            auto [k, f] = const_power(a->cbase, e);
            c = c * k;
            if (f) extra.push_back(*f);
            continue;
        }
        if (a->kind == Atom::Kind::base && e >= 1) {
            mpz_class n = floor_q(e);
            mpq_class rest = e - mpq_class(n);
            expand.emplace_back(a, n);
            if (sgn(rest) != 0) kept.emplace_back(a, rest);
            continue;
        }
        kept.emplace_back(a, e);
    }
    for (auto& f : extra) kept.push_back(f);
    sort_merge(kept);
    if (needs_canon(kept) && expand.empty()) {
        canon_term(std::move(kept), std::move(c), out);
        return;
    }
    if (expand.empty()) {
        out.push_back({std::move(kept), std::move(c)});
        return;
    }
    std::vector<Term> one;
    canon_term(std::move(kept), std::move(c), one);
    ScalarExpr x = ScalarExpr::from_terms(std::move(one));
    for (auto& [a, n] : expand) x = x * expand_power(*a->base, n);
    for (auto& t : x.terms()) out.push_back(t);
}

}  // namespace

ScalarExpr::ScalarExpr(long v)
{
    if (v != 0) terms_.push_back({{}, Qi(v)});
}

ScalarExpr::ScalarExpr(const Qi& c)
{
    if (!c.is_zero()) terms_.push_back({{}, c});
}

ScalarExpr ScalarExpr::from_atom(const Atom* a, const mpq_class& e)
{
    std::vector<Term> t;
    t.push_back({{Factor{a, e}}, Qi(1)});
    return from_terms(std::move(t));
}

ScalarExpr ScalarExpr::from_terms(std::vector<Term> terms)
{
    std::vector<Term> out;
    out.reserve(terms.size());
    for (auto& t : terms) canon_term(std::move(t.mono), std::move(t.coeff), out);
    finish(out);
    ScalarExpr r;
    r.terms_ = std::move(out);
    return r;
}

bool ScalarExpr::is_constant() const
{
    return terms_.empty() || (terms_.size() == 1 && terms_[0].mono.empty());
}

std::optional<Qi> ScalarExpr::constant_value() const
{
    if (terms_.empty()) return Qi(0);
    if (terms_.size() == 1 && terms_[0].mono.empty()) return terms_[0].coeff;
    return std::nullopt;
}

ScalarExpr operator+(const ScalarExpr& a, const ScalarExpr& b)
{
    if (a.terms_.empty()) return b;
    if (b.terms_.empty()) return a;
    ScalarExpr r;
    auto& out = r.terms_;
    out.reserve(a.terms_.size() + b.terms_.size());
    size_t i = 0, j = 0;
    while (i < a.terms_.size() && j < b.terms_.size()) {
        const Term& x = a.terms_[i];
        const Term& y = b.terms_[j];
        if (monomial_less(x.mono, y.mono)) {
            out.push_back(x);
            ++i;
        } else if (monomial_less(y.mono, x.mono)) {
            out.push_back(y);
            ++j;
        } else {
            Qi c = x.coeff + y.coeff;
            if (!c.is_zero()) out.push_back({x.mono, c});
            ++i;
            ++j;
        }
    }
    for (; i < a.terms_.size(); ++i) out.push_back(a.terms_[i]);
    for (; j < b.terms_.size(); ++j) out.push_back(b.terms_[j]);
    return r;
}

ScalarExpr operator-(const ScalarExpr& a)
{
    ScalarExpr r = a;
    for (auto& t : r.terms_) t.coeff = -t.coeff;
    return r;
}

ScalarExpr operator-(const ScalarExpr& a, const ScalarExpr& b) { return a + (-b); }

ScalarExpr operator*(const ScalarExpr& a, const ScalarExpr& b)
{
    if (a.terms_.empty() || b.terms_.empty()) return ScalarExpr();
    if (a.is_constant()) {
        const Qi& c = a.terms_[0].coeff;
        if (c.is_one()) return b;
        ScalarExpr r = b;
        for (auto& t : r.terms_) t.coeff = c * t.coeff;
        return r;
    }
    if (b.is_constant()) return b * a;
    std::vector<Term> raw;
    raw.reserve(a.terms_.size() * b.terms_.size());
    bool canon = false;
    for (auto& x : a.terms_)
        for (auto& y : b.terms_) {
            Monomial m = merge_monomials(x.mono, y.mono);
            if (!canon && needs_canon(m)) canon = true;
            raw.push_back({std::move(m), x.coeff * y.coeff});
        }
    if (canon) return ScalarExpr::from_terms(std::move(raw));
    finish(raw);
    ScalarExpr r;
    r.terms_ = std::move(raw);
    return r;
}

ScalarExpr operator/(const ScalarExpr& a, const ScalarExpr& b) { return a * pow(b, -1); }

bool operator==(const ScalarExpr& a, const ScalarExpr& b)
{
    if (a.terms_.size() != b.terms_.size()) return false;
    for (size_t k = 0; k < a.terms_.size(); ++k) {
        if (a.terms_[k].coeff != b.terms_[k].coeff) return false;
        if (a.terms_[k].mono != b.terms_[k].mono) return false;
    }
    return true;
}

// ---------------------------------------------------------------- powers

namespace {

mpq_class content_of(const ScalarExpr& e)
{
    mpz_class g = 0, l = 1;
    for (auto& t : e.terms())
        for (const mpq_class* q : {&t.coeff.re, &t.coeff.im}) {
            if (sgn(*q) == 0) continue;
            mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), q->get_num_mpz_t());
            mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), q->get_den_mpz_t());
        }
    mpz_class ag = abs(g);
    mpq_class c(ag, l);
    c.canonicalize();
    return c;
}

ScalarExpr base_power(const ScalarExpr& e, const mpq_class& q)
{
    mpq_class content = content_of(e);
    ScalarExpr p = e * ScalarExpr(Qi(1 / content));
    Qi sign(1);
    if (is_integer(q)) {
        const Qi& lead = p.terms().front().coeff;
        bool neg = sgn(lead.re) != 0 ? sgn(lead.re) < 0 : sgn(lead.im) < 0;
        if (neg) {
            p = -p;
            sign = qi_pow(Qi(-1), q.get_num().get_si());
        }
    }
    auto [k, f] = const_power(content, q);
    std::vector<Term> t;
    Monomial m{Factor{base_atom(p), q}};
    if (f) m.push_back(*f);
    t.push_back({std::move(m), k * sign});
    return ScalarExpr::from_terms(std::move(t));
}

}  // namespace

ScalarExpr pow(const ScalarExpr& e, const mpq_class& q)
{
    if (sgn(q) == 0) return ScalarExpr(1);
    if (e.is_zero()) {
        if (sgn(q) > 0) return ScalarExpr();
        throw DomainError("division by zero");
    }
    if (is_integer(q) && sgn(q) > 0) {
        mpz_class n = q.get_num();
        ScalarExpr r(1), b = e;
        while (n > 0) {
            if (mpz_odd_p(n.get_mpz_t())) r = r * b;
            n >>= 1;
            if (n > 0) b = b * b;
        }
        return r;
    }
    if (e.is_monomial()) {
        const Term& t = e.terms()[0];
        if (is_integer(q)) {
            std::vector<Term> out;
            Monomial m = t.mono;
            for (auto& f : m) f.second *= q;
            out.push_back({std::move(m), qi_pow(t.coeff, q.get_num().get_si())});
            return ScalarExpr::from_terms(std::move(out));
        }
        Monomial pos;
        Monomial rest;
        for (auto& f : t.mono) (f.first->positive ? pos : rest).push_back(f);
        bool coeff_pos = t.coeff.is_real() && sgn(t.coeff.re) > 0;
        Monomial m;
        Qi c(1);
        for (auto& f : pos) m.emplace_back(f.first, f.second * q);
        if (coeff_pos) {
            auto [k, f] = const_power(t.coeff.re, q);
            c = k;
            if (f) m.push_back(*f);
        }
        if (!rest.empty() || !coeff_pos) {
            std::vector<Term> rt;
            rt.push_back({rest, coeff_pos ? Qi(1) : t.coeff});
            ScalarExpr w = base_power(ScalarExpr::from_terms(std::move(rt)), q);
            std::vector<Term> out;
            out.push_back({std::move(m), c});
            return ScalarExpr::from_terms(std::move(out)) * w;
        }
        std::vector<Term> out;
        out.push_back({std::move(m), c});
        return ScalarExpr::from_terms(std::move(out));
    }
    return base_power(e, q);
}

ScalarExpr sqrt(const ScalarExpr& e) { return pow(e, mpq_class(1, 2)); }

// ---------------------------------------------------------------- printing

namespace {

std::string exp_str(const mpq_class& e)
{
    if (e == 1) return "";
    if (is_integer(e) && sgn(e) > 0) return "^" + e.get_str();
    return "^(" + e.get_str() + ")";
}

std::string render(const ScalarExpr& x, bool keys);

std::string factor_str(const Factor& f, bool keys)
{
    const Atom* a = f.first;
    switch (a->kind) {
    case Atom::Kind::var:
    case Atom::Kind::deriv:
        return (keys ? a->key : a->name) + exp_str(f.second);
    case Atom::Kind::constant: {
        std::string b = a->cbase.get_str();
        if (!is_integer(a->cbase)) b = "(" + b + ")";
        return b + exp_str(f.second);
    }
    case Atom::Kind::base:
        return "(" + render(*a->base, keys) + ")" + exp_str(f.second);
    }
    return "?";
}

std::string render(const ScalarExpr& x, bool keys)
{
    if (x.is_zero()) return "0";
    std::string out;
    bool first = true;
    for (auto& t : x.terms()) {
        Qi c = t.coeff;
        bool neg = false;
        if (sgn(c.im) == 0 || sgn(c.re) == 0) {
            neg = sgn(c.re) != 0 ? sgn(c.re) < 0 : sgn(c.im) < 0;
            if (neg) c = -c;
        }
        if (first)
            out += neg ? "-" : "";
        else
            out += neg ? " - " : " + ";
        first = false;
        std::vector<std::string> parts;
        if (sgn(c.im) == 0) {
            if (!c.is_one() || t.mono.empty()) parts.push_back(c.re.get_str());
        } else if (sgn(c.re) == 0) {
            if (c.im != 1) parts.push_back(c.im.get_str());
            parts.push_back("i");
        } else {
            parts.push_back("(" + c.str() + ")");
        }
        for (auto& f : t.mono) parts.push_back(factor_str(f, keys));
        for (size_t k = 0; k < parts.size(); ++k) {
            if (k) out += "*";
            out += parts[k];
        }
    }
    return out;
}

}  // namespace

std::string ScalarExpr::str() const { return render(*this, false); }
std::string ScalarExpr::key() const { return render(*this, true); }
std::string print(const ScalarExpr& e) { return e.str(); }

// ---------------------------------------------------------------- function families

std::string FunctionFamily::atom_name(const std::vector<int>& index) const
{
    std::string s = name_;
    bool any = false;
    for (size_t k = 0; k < index.size(); ++k)
        for (int r = 0; r < index[k]; ++r) {
            if (!any) s += "_";
            any = true;
            s += std::to_string(k + 1);
        }
    return s;
}

std::optional<ScalarExpr> FunctionFamily::derivative(const std::vector<int>& index, Variable v) const
{
    for (size_t k = 0; k < args_.size(); ++k)
        if (args_[k] == v) {
            auto idx = index;
            ++idx[k];
            return atom(idx);
        }
    return ScalarExpr();
}

ScalarExpr FunctionFamily::atom(const std::vector<int>& index) const
{
    if (index.size() != args_.size()) throw Error("derivative index arity mismatch for " + name_);
    return ScalarExpr::from_atom(deriv_atom(*this, index));
}

// ---------------------------------------------------------------- tables

Variable VariableTable::declare(const std::string& name, Reality r)
{
    if (name == "i" || name == "sqrt") throw Error("reserved identifier '" + name + "'");
    if (vars_.count(name) || atoms_.count(name)) throw Error("duplicate variable '" + name + "'");
    if (r == Reality::complex_paired) throw Error("use declare_pair for complex_paired variables");
    Variable v = intern_variable(name, r);
    vars_[name] = v;
    order_.push_back(v);
    return v;
}

Variable VariableTable::declare_pair(const std::string& name, const std::string& partner)
{
    for (auto* n : {&name, &partner}) {
        if (*n == "i" || *n == "sqrt") throw Error("reserved identifier '" + *n + "'");
        if (vars_.count(*n) || atoms_.count(*n)) throw Error("duplicate variable '" + *n + "'");
    }
    if (name == partner) throw Error("a conjugate pair needs two distinct names");
    Variable a = intern_variable(name, Reality::complex_paired, partner);
    Variable b = intern_variable(partner, Reality::complex_paired, name);
    vars_[name] = a;
    vars_[partner] = b;
    order_.push_back(a);
    order_.push_back(b);
    return a;
}

void VariableTable::add_atom(const std::string& name, const ScalarExpr& atom_expr)
{
    if (vars_.count(name) || atoms_.count(name)) throw Error("duplicate identifier '" + name + "'");
    atoms_[name] = atom_expr;
}

Variable VariableTable::find(const std::string& name) const
{
    auto it = vars_.find(name);
    return it == vars_.end() ? nullptr : it->second;
}

Variable VariableTable::get(const std::string& name) const
{
    Variable v = find(name);
    if (!v) throw UndeclaredIdentifier(name);
    return v;
}

std::optional<ScalarExpr> VariableTable::lookup(const std::string& name) const
{
    if (auto v = find(name)) return ScalarExpr::from_atom(v);
    auto it = atoms_.find(name);
    if (it != atoms_.end()) return it->second;
    return std::nullopt;
}

ScalarExpr VariableTable::operator[](const std::string& name) const
{
    auto e = lookup(name);
    if (!e) throw UndeclaredIdentifier(name);
    return *e;
}

// ---------------------------------------------------------------- parsing

namespace {

struct ScalarSem {
    using Value = ScalarExpr;
    const VariableTable& table;

    Value number(const mpq_class& q) { return ScalarExpr(Qi(q)); }
    Value imag_unit() { return ScalarExpr::imag_unit(); }
    Value ident(const std::string& name, size_t)
    {
        auto e = table.lookup(name);
        if (!e) throw UndeclaredIdentifier(name);
        return *e;
    }
    Value add(const Value& a, const Value& b) { return a + b; }
    Value sub(const Value& a, const Value& b) { return a - b; }
    Value mul(const Value& a, const Value& b) { return a * b; }
    Value div(const Value& a, const Value& b) { return a / b; }
    Value neg(const Value& a) { return -a; }
    Value wedge(const Value&, const Value&) { throw Error("wedge is not allowed in scalar expressions"); }
    Value pow(const Value& a, const mpq_class& q) { return crc::pow(a, q); }
    Value call(const std::string& f, const Value& a, size_t)
    {
        if (f == "sqrt") return crc::sqrt(a);
        throw Error("unknown function '" + f + "'");
    }
    std::optional<mpq_class> as_rational(const Value& v)
    {
        auto c = v.constant_value();
        if (!c || !c->is_real()) return std::nullopt;
        return c->re;
    }
};

}  // namespace

ScalarExpr parse(const std::string& text, const VariableTable& table)
{
    ScalarSem sem{table};
    detail::Parser<ScalarSem> p(text, sem);
    return p.parse_all();
}

VariableTable declare_free_as_real(const std::string& text, VariableTable table)
{
    for (;;) {
        try {
            parse(text, table);
            return table;
        } catch (const UndeclaredIdentifier& e) {
            table.declare(e.name, Reality::real);
        }
    }
}

ScalarExpr normalize(const ScalarExpr& e) { return e; }

// ---------------------------------------------------------------- calculus

namespace {

ScalarExpr atom_derivative(const Atom* a, Variable v)
{
    switch (a->kind) {
    case Atom::Kind::var:
        return a == v ? ScalarExpr(1) : ScalarExpr();
    case Atom::Kind::constant:
        return ScalarExpr();
    case Atom::Kind::base:
        return differentiate(*a->base, v);
    case Atom::Kind::deriv: {
        auto d = a->family->derivative(a->index, v);
        if (!d) throw Error("cannot resolve derivative of " + a->name + " with respect to " + v->name);
        return *d;
    }
    }
    return ScalarExpr();
}

}  // namespace

ScalarExpr differentiate(const ScalarExpr& e, Variable v)
{
    std::map<const Atom*, ScalarExpr, AtomLess> cache;
    ScalarExpr out;
    std::vector<Term> direct;
    for (auto& t : e.terms()) {
        for (size_t k = 0; k < t.mono.size(); ++k) {
            const Atom* a = t.mono[k].first;
            auto it = cache.find(a);
            if (it == cache.end()) it = cache.emplace(a, atom_derivative(a, v)).first;
            const ScalarExpr& da = it->second;
            if (da.is_zero()) continue;
            Monomial m = t.mono;
            m[k].second -= 1;
            Qi c = t.coeff * Qi(t.mono[k].second);
            if (da.is_constant()) {
                direct.push_back({std::move(m), c * *da.constant_value()});
            } else {
                std::vector<Term> one;
                one.push_back({std::move(m), c});
                out += ScalarExpr::from_terms(std::move(one)) * da;
            }
        }
    }
    return out + ScalarExpr::from_terms(std::move(direct));
}

namespace {

ScalarExpr conj_factor(const Factor& f)
{
    const Atom* a = f.first;
    const mpq_class& e = f.second;
    switch (a->kind) {
    case Atom::Kind::constant:
        return ScalarExpr::from_atom(a, e);
    case Atom::Kind::base:
        return pow(conjugate(*a->base), e);
    case Atom::Kind::deriv:
        return ScalarExpr::from_atom(a, e);
    case Atom::Kind::var:
        switch (a->reality) {
        case Reality::real:
        case Reality::positive_real:
            return ScalarExpr::from_atom(a, e);
        case Reality::imaginary: {
            if (!is_integer(e)) throw RealityError("fractional power of imaginary variable " + a->name);
            ScalarExpr s = ScalarExpr::from_atom(a, e);
            return mpz_odd_p(e.get_num_mpz_t()) ? -s : s;
        }
        case Reality::unit_modulus:
            return ScalarExpr::from_atom(a, -e);
        case Reality::complex_paired:
            return ScalarExpr::from_atom(intern_variable(a->partner, Reality::complex_paired, a->name), e);
        }
    }
    return ScalarExpr();
}

}  // namespace

ScalarExpr conjugate(const ScalarExpr& e)
{
    std::map<Factor, ScalarExpr, bool (*)(const Factor&, const Factor&)> cache(
        [](const Factor& x, const Factor& y) {
            int c = atom_cmp(x.first, y.first);
            return c != 0 ? c < 0 : x.second < y.second;
        });
    std::vector<Term> simple;
    ScalarExpr out;
    for (auto& t : e.terms()) {
        bool plain = true;
        for (auto& f : t.mono) {
            const Atom* a = f.first;
            if (a->kind == Atom::Kind::base ||
                (a->kind == Atom::Kind::var && a->reality != Reality::real &&
                 a->reality != Reality::positive_real)) {
                plain = false;
                break;
            }
        }
        if (plain) {
            simple.push_back({t.mono, t.coeff.conj()});
            continue;
        }
        ScalarExpr x(t.coeff.conj());
        for (auto& f : t.mono) {
            auto it = cache.find(f);
            if (it == cache.end()) it = cache.emplace(f, conj_factor(f)).first;
            x = x * it->second;
        }
        out += x;
    }
    return out + ScalarExpr::from_terms(std::move(simple));
}

// ---------------------------------------------------------------- evaluation

namespace {

struct Evaluator {
    const Point& point;
    std::map<const Atom*, cplx> cache;

    cplx bound(const std::string& name)
    {
        auto it = point.find(name);
        if (it == point.end()) throw Error("unbound variable '" + name + "'");
        return it->second;
    }

    cplx atom_value(const Atom* a)
    {
        auto it = cache.find(a);
        if (it != cache.end()) return it->second;
        cplx v;
        switch (a->kind) {
        case Atom::Kind::constant:
            v = a->cbase.get_d();
            break;
        case Atom::Kind::base:
            v = eval(*a->base);
            break;
        case Atom::Kind::deriv:
            v = bound(a->name);
            break;
        case Atom::Kind::var:
            v = bound(a->name);
            check_reality(a, v);
            break;
        }
        cache.emplace(a, v);
        return v;
    }

    void check_reality(const Atom* a, cplx v)
    {
        double s = 1 + std::abs(v);
        switch (a->reality) {
        case Reality::real:
            if (std::abs(v.imag()) > 1e-12 * s) throw RealityError(a->name + " must be real");
            break;
        case Reality::positive_real:
            if (std::abs(v.imag()) > 1e-12 * s || !(v.real() > 0))
                throw RealityError(a->name + " must be a positive real");
            break;
        case Reality::imaginary:
            if (std::abs(v.real()) > 1e-12 * s) throw RealityError(a->name + " must be imaginary");
            break;
        case Reality::unit_modulus:
            if (std::abs(std::abs(v) - 1) > 1e-9) throw RealityError(a->name + " must have modulus 1");
            break;
        case Reality::complex_paired: {
            auto it = point.find(a->partner);
            if (it != point.end() && std::abs(std::conj(v) - it->second) > 1e-9 * s)
                throw RealityError(a->name + " and " + a->partner + " must be conjugate");
            break;
        }
        }
    }

    static cplx ipow(cplx b, long k)
    {
        if (k < 0) {
            if (b == cplx(0)) throw DomainError("division by zero");
            b = 1.0 / b;
            k = -k;
        }
        cplx r = 1;
        while (k) {
            if (k & 1) r *= b;
            b *= b;
            k >>= 1;
        }
        return r;
    }

    cplx factor_value(const Factor& f)
    {
        cplx b = atom_value(f.first);
        const mpq_class& e = f.second;
        if (is_integer(e)) return ipow(b, e.get_num().get_si());
        if (!(b.real() > 0) || std::abs(b.imag()) > 1e-12 * std::abs(b.real()))
            throw DomainError("nonpositive base under fractional power");
        return std::pow(b.real(), e.get_d());
    }

    cplx term_value(const Term& t)
    {
        cplx v = t.coeff.to_complex();
        for (auto& f : t.mono) v *= factor_value(f);
        return v;
    }

    cplx eval(const ScalarExpr& e)
    {
        cplx s = 0;
        for (auto& t : e.terms()) s += term_value(t);
        return s;
    }
};

}  // namespace

cplx evaluate(const ScalarExpr& e, const Point& point)
{
    Evaluator ev{point, {}};
    return ev.eval(e);
}

double magnitude_scale(const ScalarExpr& e, const Point& point)
{
    Evaluator ev{point, {}};
    double s = 0;
    for (auto& t : e.terms()) s += std::abs(ev.term_value(t));
    return s;
}

// ---------------------------------------------------------------- substitution

ScalarExpr substitute(const ScalarExpr& e, const std::map<std::string, ScalarExpr>& bindings,
                      bool check_reality)
{
    if (check_reality) {
        for (auto& [name, val] : bindings) {
            for (auto* a : atoms_of(e)) {
                if (a->kind != Atom::Kind::var || a->name != name) continue;
                ScalarExpr cv = conjugate(val);
                switch (a->reality) {
                case Reality::real:
                case Reality::positive_real:
                    if (cv != val) throw RealityError("substitution for real variable " + name + " is not self-conjugate");
                    break;
                case Reality::imaginary:
                    if (cv != -val) throw RealityError("substitution for imaginary variable " + name + " is not imaginary");
                    break;
                case Reality::unit_modulus:
                    if (cv * val != ScalarExpr(1))
                        throw RealityError("substitution for unit-modulus variable " + name + " is not unimodular");
                    break;
                case Reality::complex_paired: {
                    auto it = bindings.find(a->partner);
                    if (it == bindings.end())
                        throw RealityError("substitution binds " + name + " but not its conjugate " + a->partner);
                    if (cv != it->second)
                        throw RealityError("substitutions for " + name + " and " + a->partner + " are not conjugate");
                    break;
                }
                }
                break;
            }
        }
    }
    std::map<const Atom*, ScalarExpr, AtomLess> cache;
    std::function<ScalarExpr(const Atom*)> sub_atom = [&](const Atom* a) -> ScalarExpr {
        auto it = cache.find(a);
        if (it != cache.end()) return it->second;
        ScalarExpr r;
        switch (a->kind) {
        case Atom::Kind::var:
        case Atom::Kind::deriv: {
            auto b = bindings.find(a->name);
            r = b != bindings.end() ? b->second : ScalarExpr::from_atom(a);
            break;
        }
        case Atom::Kind::constant:
            r = ScalarExpr::from_atom(a);
            break;
        case Atom::Kind::base:
            r = substitute(*a->base, bindings, false);
            break;
        }
        cache.emplace(a, r);
        return r;
    };
    ScalarExpr out;
    std::vector<Term> untouched;
    for (auto& t : e.terms()) {
        bool hit = false;
        for (auto& f : t.mono) {
            const Atom* a = f.first;
            if (a->kind == Atom::Kind::base || bindings.count(a->name)) {
                hit = true;
                break;
            }
        }
        if (!hit) {
            untouched.push_back(t);
            continue;
        }
        ScalarExpr x(t.coeff);
        for (auto& f : t.mono) x = x * pow(sub_atom(f.first), f.second);
        out += x;
    }
    return out + ScalarExpr::from_terms(std::move(untouched));
}

// ---------------------------------------------------------------- inspection

std::vector<const Atom*> atoms_of(const ScalarExpr& e)
{
    std::set<const Atom*, AtomLess> seen;
    std::function<void(const ScalarExpr&)> walk = [&](const ScalarExpr& x) {
        for (auto& t : x.terms())
            for (auto& f : t.mono)
                if (seen.insert(f.first).second && f.first->kind == Atom::Kind::base) walk(*f.first->base);
    };
    walk(e);
    return {seen.begin(), seen.end()};
}

std::vector<Variable> free_variables(const ScalarExpr& e)
{
    std::set<const Atom*, AtomLess> vars;
    for (auto* a : atoms_of(e)) {
        if (a->kind == Atom::Kind::var) vars.insert(a);
        if (a->kind == Atom::Kind::deriv)
            for (auto* v : a->family->args()) vars.insert(v);
    }
    return {vars.begin(), vars.end()};
}

// ---------------------------------------------------------------- zero testing

DomainBox parse_box(const std::string& text)
{
    DomainBox box;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto eq = item.find('=');
        auto colon = item.find(':');
        if (eq == std::string::npos || colon == std::string::npos || colon < eq)
            throw Error("malformed box entry '" + item + "' (expected name=lo:hi)");
        std::string name = item.substr(0, eq);
        name.erase(std::remove_if(name.begin(), name.end(), ::isspace), name.end());
        Interval iv;
        try {
            iv.lo = std::stod(item.substr(eq + 1, colon - eq - 1));
            iv.hi = std::stod(item.substr(colon + 1));
        } catch (const std::exception&) {
            throw Error("malformed box bounds in '" + item + "'");
        }
        if (!(iv.lo < iv.hi)) throw Error("empty box interval for '" + name + "'");
        box[name] = iv;
    }
    if (box.empty()) throw Error("empty box");
    return box;
}

std::string box_str(const DomainBox& box)
{
    std::ostringstream os;
    bool first = true;
    for (auto& [n, iv] : box) {
        if (!first) os << ",";
        first = false;
        os << n << "=" << iv.lo << ":" << iv.hi;
    }
    return os.str();
}

std::vector<Point> sample_points(const std::vector<Variable>& vars, const DomainBox& box, int count,
                                 uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    auto draw = [&](const Interval& iv) { return iv.lo + (iv.hi - iv.lo) * u01(rng); };
    auto interval = [&](Variable v) -> const Interval& {
        auto it = box.find(v->name);
        if (it == box.end() && v->reality == Reality::complex_paired) it = box.find(v->partner);
        if (it == box.end()) throw Error("box has no interval for variable '" + v->name + "'");
        return it->second;
    };
    std::vector<Point> pts;
    for (int k = 0; k < count; ++k) {
        Point p;
        for (Variable v : vars) {
            if (p.count(v->name)) continue;
            const Interval& iv = interval(v);
            switch (v->reality) {
            case Reality::real:
            case Reality::positive_real:
                p[v->name] = draw(iv);
                break;
            case Reality::imaginary:
                p[v->name] = cplx(0, draw(iv));
                break;
            case Reality::unit_modulus: {
                double th = draw(iv);
                p[v->name] = cplx(std::cos(th), std::sin(th));
                break;
            }
            case Reality::complex_paired: {
                double re = draw(iv), im = draw(iv);
                p[v->name] = cplx(re, im);
                p[v->partner] = cplx(re, -im);
                break;
            }
            }
        }
        pts.push_back(std::move(p));
    }
    return pts;
}

ZeroTest zero_test(const ScalarExpr& e, const DomainBox& box, const ZeroTestOptions& opt)
{
    ZeroTest r;
    if (e.is_zero()) {
        r.verdict = ZeroVerdict::zero;
        r.exact = true;
        return r;
    }
    if (e.is_constant()) {
        r.verdict = ZeroVerdict::nonzero;
        r.exact = true;
        return r;
    }
    for (auto* a : atoms_of(e))
        if (a->kind == Atom::Kind::deriv)
            throw Error("derivative atom " + a->name + " has no numeric value; substitute it first");
    auto vars = free_variables(e);
    int attempts = opt.trials * 4;
    auto pts = sample_points(vars, box, attempts, opt.seed);
    bool nonzero = false;
    for (auto& p : pts) {
        if (r.samples >= opt.trials) break;
        try {
            cplx v = evaluate(e, p);
            double s = magnitude_scale(e, p);
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag()) || !std::isfinite(s)) {
                ++r.failures;
                continue;
            }
            double res = std::abs(v) / (1 + s);
            r.max_residual = std::max(r.max_residual, res);
            if (res >= opt.tol) nonzero = true;
            ++r.samples;
        } catch (const DomainError&) {
            ++r.failures;
        } catch (const RealityError&) {
            ++r.failures;
        }
    }
    if (r.samples == 0)
        r.verdict = ZeroVerdict::inconclusive;
    else
        r.verdict = nonzero ? ZeroVerdict::nonzero : ZeroVerdict::zero;
    return r;
}

bool is_identically_zero(const ScalarExpr& e, const DomainBox& box, int trials, uint64_t seed, double tol)
{
    auto r = zero_test(e, box, {trials, seed, tol});
    if (r.verdict == ZeroVerdict::inconclusive)
        throw DomainError("zero test inconclusive: every sample hit a singularity");
    return r.verdict == ZeroVerdict::zero;
}

}  // namespace crc
