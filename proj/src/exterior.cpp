#include "crc/exterior.hpp"

#include "parser.hpp"

#include <algorithm>
#include <bit>
#include <set>
#include <sstream>

namespace crc {

namespace {

const Chart& same_chart(const FormExpr& a, const FormExpr& b)
{
    if (&a.chart() != &b.chart()) throw Error("forms belong to different charts");
    return a.chart();
}

Word odd_mask(const Chart& c)
{
    Word m = 0;
    for (int k = 0; k < c.size(); ++k)
        if (c.generator(k).degree % 2 == 1) m |= Word(1) << k;
    return m;
}

Word placeholder_mask(const Chart& c)
{
    Word m = 0;
    for (int k = 0; k < c.size(); ++k)
        if (c.generator(k).placeholder) m |= Word(1) << k;
    return m;
}

// sign of the shuffle a·b into chart order; 0 if a repeated odd generator kills it
int merge_sign(Word a, Word b, Word odd)
{
    if (a & b) {
        if ((a & b) & ~odd) throw Error("repeated placeholder in a wedge product");
        return 0;
    }
    Word ao = a & odd;
    int inv = 0;
    for (Word bo = b & odd; bo; bo &= bo - 1) {
        int y = std::countr_zero(bo);
        Word above = y == 63 ? 0 : ~((Word(2) << y) - 1);
        inv += std::popcount(ao & above);
    }
    return inv % 2 ? -1 : 1;
}

// sign of sorting a word given as a sequence of generator indices
int permutation_sign(const std::vector<int>& w, const Chart& c)
{
    int inv = 0;
    for (size_t i = 0; i < w.size(); ++i)
        for (size_t j = i + 1; j < w.size(); ++j)
            if (w[i] > w[j] && c.generator(w[i]).degree % 2 && c.generator(w[j]).degree % 2) ++inv;
    return inv % 2 ? -1 : 1;
}

}  // namespace

// ---------------------------------------------------------------- FormExpr

const Chart& FormExpr::chart() const
{
    if (!chart_) throw Error("form has no chart");
    return *chart_;
}

FormExpr FormExpr::scalar(const Chart& chart, const ScalarExpr& s)
{
    FormExpr f(chart, 0);
    f.add_term(0, s);
    return f;
}

ScalarExpr FormExpr::scalar_part() const
{
    auto it = terms_.find(0);
    return it == terms_.end() ? ScalarExpr() : it->second;
}

void FormExpr::add_term(Word w, const ScalarExpr& s)
{
    if (s.is_zero()) return;
    auto it = terms_.find(w);
    if (it == terms_.end()) {
        terms_.emplace(w, s);
        return;
    }
    it->second += s;
    if (it->second.is_zero()) terms_.erase(it);
}

FormExpr FormExpr::map_coefficients(const std::function<ScalarExpr(const ScalarExpr&)>& f) const
{
    FormExpr out(chart(), degree_);
    for (auto& [w, s] : terms_) out.add_term(w, f(s));
    return out;
}

FormExpr operator+(const FormExpr& a, const FormExpr& b)
{
    if (!a.has_chart()) return b;
    if (!b.has_chart()) return a;
    same_chart(a, b);
    if (a.degree_ != b.degree_) {
        if (a.is_zero()) return b;
        if (b.is_zero()) return a;
        throw Error("cannot add forms of degree " + std::to_string(a.degree_) + " and " +
                    std::to_string(b.degree_));
    }
    FormExpr r = a;
    for (auto& [w, s] : b.terms_) r.add_term(w, s);
    return r;
}

FormExpr operator-(const FormExpr& a)
{
    FormExpr r = a;
    for (auto& [w, s] : r.terms_) s = -s;
    return r;
}

FormExpr operator-(const FormExpr& a, const FormExpr& b) { return a + (-b); }

FormExpr operator*(const ScalarExpr& s, const FormExpr& f)
{
    FormExpr r(f.chart(), f.degree_);
    if (s.is_zero()) return r;
    for (auto& [w, c] : f.terms_) r.add_term(w, s * c);
    return r;
}

bool operator==(const FormExpr& a, const FormExpr& b)
{
    if (a.is_zero() && b.is_zero()) return true;
    return a.chart_ == b.chart_ && a.degree_ == b.degree_ && a.terms_ == b.terms_;
}

namespace {
bool needs_parens(const ScalarExpr& s) { return s.size() > 1; }
}  // namespace

std::string FormExpr::str() const
{
    if (terms_.empty()) return "0";
    std::string out;
    bool first = true;
    for (auto& [w, s] : terms_) {
        std::string coeff;
        bool neg = false;
        if (w != 0 && s == ScalarExpr(1)) {
        } else if (w != 0 && s == ScalarExpr(-1)) {
            neg = true;
        } else if (needs_parens(s)) {
            coeff = "(" + s.str() + ")";
        } else {
            coeff = s.str();
            if (coeff[0] == '-') {
                neg = true;
                coeff = coeff.substr(1);
            }
        }
        out += first ? (neg ? "-" : "") : (neg ? " - " : " + ");
        first = false;
        if (w == 0) {
            out += coeff;
            continue;
        }
        if (!coeff.empty()) out += coeff + "*";
        out += chart().word_str(w);
    }
    return out;
}

FormExpr wedge(const FormExpr& a, const FormExpr& b)
{
    if (!a.has_chart() || !b.has_chart()) throw Error("wedge of a chartless form");
    const Chart& c = same_chart(a, b);
    FormExpr r(c, a.degree() + b.degree());
    Word odd = odd_mask(c);
    for (auto& [wa, sa] : a.terms()) {
        for (auto& [wb, sb] : b.terms()) {
            int sg = merge_sign(wa, wb, odd);
            if (sg == 0) continue;
            ScalarExpr p = sa * sb;
            r.add_term(wa | wb, sg > 0 ? p : -p);
        }
    }
    return r;
}

// ---------------------------------------------------------------- Chart

int Chart::push(Generator g)
{
    if (gens_.size() >= 64) throw Error("a chart holds at most 64 generators");
    if (by_name_.count(g.name)) throw Error("duplicate generator '" + g.name + "'");
    if (vars_.lookup(g.name)) throw Error("generator '" + g.name + "' clashes with a variable");
    if (g.name == "i" || g.name == "sqrt") throw Error("reserved identifier '" + g.name + "'");
    int k = static_cast<int>(gens_.size());
    by_name_[g.name] = k;
    gens_.push_back(std::move(g));
    return k;
}

int Chart::add_self(const std::string& name, int sign)
{
    if (sign != 1 && sign != -1) throw Error("conjugation sign must be +1 or -1");
    Generator g;
    g.name = name;
    g.link = Generator::Link::self;
    g.sign = sign;
    return push(g);
}

int Chart::add_pair(const std::string& name, const std::string& partner)
{
    Generator g;
    g.name = name;
    g.link = Generator::Link::pair;
    Generator h;
    h.name = partner;
    h.link = Generator::Link::pair;
    int a = push(g);
    int b = push(h);
    gens_[a].partner = b;
    gens_[b].partner = a;
    return a;
}

int Chart::add_aux(const std::string& name)
{
    Generator g;
    g.name = name;
    return push(g);
}

int Chart::add_placeholder(const std::string& name, Generator::Link link, int sign, const std::string& partner)
{
    int k;
    if (link == Generator::Link::pair) {
        k = add_pair(name, partner);
        gens_[k].degree = gens_[k + 1].degree = 2;
        gens_[k].placeholder = gens_[k + 1].placeholder = true;
        return k;
    }
    k = link == Generator::Link::self ? add_self(name, sign) : add_aux(name);
    gens_[k].degree = 2;
    gens_[k].placeholder = true;
    return k;
}

int Chart::find(const std::string& name) const
{
    auto it = by_name_.find(name);
    return it == by_name_.end() ? -1 : it->second;
}

int Chart::index(const std::string& name) const
{
    int k = find(name);
    if (k < 0) throw Error("unknown generator '" + name + "'");
    return k;
}

const FormExpr& Chart::rule(int k) const
{
    auto it = rules_.find(k);
    if (it == rules_.end()) throw MissingRule("no d-rule for generator " + gens_.at(k).name);
    return it->second;
}

FormExpr Chart::gen(int k) const
{
    FormExpr f(*this, gens_.at(k).degree);
    f.add_term(Word(1) << k, ScalarExpr(1));
    return f;
}

FormExpr Chart::gen(const std::string& name) const { return gen(index(name)); }

void Chart::set_d(const std::string& name, const FormExpr& rule)
{
    int k = index(name);
    if (&rule.chart() != this) throw Error("d-rule for " + name + " belongs to another chart");
    if (!rule.is_zero() && rule.degree() != gens_[k].degree + 1)
        throw Error("d-rule for " + name + " has the wrong degree");
    FormExpr r = rule;
    if (r.is_zero()) r = zero(gens_[k].degree + 1);
    rules_[k] = r;
}

void Chart::set_d_conj(const std::string& name, const FormExpr& rule)
{
    set_d(name, rule);
    const Generator& g = gens_[index(name)];
    if (g.link == Generator::Link::pair)
        set_d(gens_[g.partner].name, conjugate_form(rule));
}

void Chart::set_scalar_d(Variable v, const FormExpr& rule)
{
    if (&rule.chart() != this) throw Error("d-rule for " + v->name + " belongs to another chart");
    if (!rule.is_zero() && rule.degree() != 1) throw Error("d-rule for " + v->name + " must be a 1-form");
    scalar_rules_[v] = rule.is_zero() ? zero(1) : rule;
}

void Chart::set_constant(Variable v) { scalar_rules_[v] = zero(1); }

void Chart::finalize(bool check)
{
    if (!check) return;
    Word ph = placeholder_mask(*this);
    for (auto& [k, r] : rules_) {
        bool has_ph = false;
        for (auto& [w, s] : r.terms())
            if (w & ph) has_ph = true;
        if (has_ph) continue;
        FormExpr dd;
        try {
            dd = d(r);
        } catch (const MissingRule&) {
            continue;
        }
        for (auto& [w, s] : dd.terms())
            if (!(w & ph)) throw Error("d(d " + gens_[k].name + ") does not vanish: " + dd.str());
    }
}

std::string Chart::word_str(Word w) const
{
    std::string s;
    for (Word x = w; x; x &= x - 1) {
        if (!s.empty()) s += "/\\";
        s += gens_[std::countr_zero(x)].name;
    }
    return s;
}

int Chart::word_degree(Word w) const
{
    int d = 0;
    for (Word x = w; x; x &= x - 1) d += gens_[std::countr_zero(x)].degree;
    return d;
}

FormExpr Chart::d_scalar(const ScalarExpr& s) const
{
    FormExpr out = zero(1);
    if (s.is_constant()) return out;
    for (Variable v : free_variables(s)) {
        auto it = scalar_rules_.find(v);
        if (it == scalar_rules_.end()) throw MissingRule("no d-rule for variable " + v->name);
        if (it->second.is_zero()) continue;
        ScalarExpr ds = differentiate(s, v);
        if (!ds.is_zero()) out += ds * it->second;
    }
    return out;
}

FormExpr Chart::d(const FormExpr& f) const
{
    if (&f.chart() != this) throw Error("form belongs to another chart");
    FormExpr out = zero(f.degree() + 1);
    for (auto& [w, s] : f.terms()) {
        FormExpr word = scalar(ScalarExpr(1));
        std::vector<int> idx;
        for (Word x = w; x; x &= x - 1) idx.push_back(std::countr_zero(x));
        FormExpr mono(*this, f.degree());
        mono.add_term(w, ScalarExpr(1));
        if (!s.is_constant()) out += wedge(d_scalar(s), mono);
        // Leibniz over the word
        FormExpr prefix = scalar(s);
        int sign = 1;
        for (size_t j = 0; j < idx.size(); ++j) {
            FormExpr suffix = scalar(ScalarExpr(1));
            for (size_t l = j + 1; l < idx.size(); ++l) suffix = wedge(suffix, gen(idx[l]));
            const FormExpr& r = rule(idx[j]);
            if (!r.is_zero()) {
                FormExpr t = wedge(wedge(prefix, r), suffix);
                out += sign > 0 ? t : -t;
            }
            prefix = wedge(prefix, gen(idx[j]));
            if (gens_[idx[j]].degree % 2) sign = -sign;
        }
    }
    return out;
}

FormExpr d(const FormExpr& f) { return f.chart().d(f); }

// ---------------------------------------------------------------- basis changes

FormExpr rewrite_basis(const FormExpr& f, const Chart& target, const std::map<int, FormExpr>& sub)
{
    FormExpr out(target, f.degree());
    for (auto& [w, s] : f.terms()) {
        FormExpr t = FormExpr::scalar(target, s);
        for (Word x = w; x; x &= x - 1) {
            int k = std::countr_zero(x);
            auto it = sub.find(k);
            if (it == sub.end())
                throw Error("incomplete substitution: no image for generator " + f.chart().generator(k).name);
            if (&it->second.chart() != &target) throw Error("substitution image in the wrong chart");
            t = wedge(t, it->second);
        }
        out += t;
    }
    return out;
}

FormExpr rewrite_partial(const FormExpr& f, const std::map<int, FormExpr>& sub)
{
    const Chart& c = f.chart();
    std::map<int, FormExpr> full = sub;
    for (auto& [w, s] : f.terms())
        for (Word x = w; x; x &= x - 1) {
            int k = std::countr_zero(x);
            if (!full.count(k)) full.emplace(k, c.gen(k));
        }
    return rewrite_basis(f, c, full);
}

std::map<int, FormExpr> invert_substitution(const Chart& chart, const std::map<int, FormExpr>& sub)
{
    std::vector<int> idx;
    auto note = [&](int k) {
        if (std::find(idx.begin(), idx.end(), k) == idx.end()) idx.push_back(k);
    };
    for (auto& [k, f] : sub) {
        if (chart.generator(k).degree != 1 || f.degree() != 1)
            throw Error("invert_substitution handles degree-1 generators only");
        note(k);
        for (auto& [w, s] : f.terms()) note(std::countr_zero(w));
    }
    std::sort(idx.begin(), idx.end());
    size_t n = idx.size();
    auto pos = [&](int k) { return static_cast<size_t>(std::find(idx.begin(), idx.end(), k) - idx.begin()); };
    // rows: new_i = sum_j M[i][j] old_j ; augmented with identity on the new side
    std::vector<std::vector<ScalarExpr>> M(n, std::vector<ScalarExpr>(2 * n));
    for (size_t i = 0; i < n; ++i) {
        auto it = sub.find(idx[i]);
        if (it == sub.end())
            M[i][i] = ScalarExpr(1);
        else
            for (auto& [w, s] : it->second.terms()) M[i][pos(std::countr_zero(w))] = s;
        M[i][n + i] = ScalarExpr(1);
    }
    auto rank = [](const ScalarExpr& s) {
        if (s.is_zero()) return 3;
        if (s.is_constant()) return 0;
        if (s.is_monomial()) return 1;
        return 2;
    };
    for (size_t col = 0; col < n; ++col) {
        size_t best = n;
        for (size_t r = col; r < n; ++r)
            if (rank(M[r][col]) < 3 && (best == n || rank(M[r][col]) < rank(M[best][col]))) best = r;
        if (best == n) throw Error("substitution is not invertible");
        std::swap(M[col], M[best]);
        ScalarExpr inv = pow(M[col][col], -1);
        for (auto& x : M[col]) x = x * inv;
        for (size_t r = 0; r < n; ++r) {
            if (r == col || M[r][col].is_zero()) continue;
            ScalarExpr fac = M[r][col];
            for (size_t j = 0; j < 2 * n; ++j)
                if (!M[col][j].is_zero()) M[r][j] -= fac * M[col][j];
        }
    }
    std::map<int, FormExpr> out;
    for (size_t i = 0; i < n; ++i) {
        FormExpr f = chart.zero(1);
        for (size_t j = 0; j < n; ++j)
            if (!M[i][n + j].is_zero()) f += M[i][n + j] * chart.gen(idx[j]);
        out.emplace(idx[i], f);
    }
    return out;
}

// ---------------------------------------------------------------- extraction

ScalarExpr coefficient(const FormExpr& f, const std::vector<int>& word)
{
    const Chart& c = f.chart();
    Word w = 0;
    int deg = 0;
    for (int k : word) {
        if (k < 0 || k >= c.size()) throw Error("malformed word: generator index out of range");
        if (c.generator(k).link == Generator::Link::aux && !c.generator(k).placeholder)
            throw Error("malformed word: auxiliary generator " + c.generator(k).name);
        if (w & (Word(1) << k)) throw Error("malformed word: repeated generator " + c.generator(k).name);
        w |= Word(1) << k;
        deg += c.generator(k).degree;
    }
    if (deg != f.degree() && !f.is_zero()) throw Error("malformed word: degree does not match the form");
    auto it = f.terms().find(w);
    if (it == f.terms().end()) return ScalarExpr();
    return permutation_sign(word, c) > 0 ? it->second : -it->second;
}

ScalarExpr coefficient(const FormExpr& f, const std::vector<std::string>& word)
{
    std::vector<int> idx;
    for (auto& n : word) idx.push_back(f.chart().index(n));
    return coefficient(f, idx);
}

FormExpr reduce_mod(const FormExpr& f, const std::vector<int>& ideal)
{
    Word m = 0;
    for (int k : ideal) {
        if (f.chart().generator(k).degree != 1) throw Error("ideal members must be degree-1 generators");
        m |= Word(1) << k;
    }
    FormExpr out(f.chart(), f.degree());
    for (auto& [w, s] : f.terms())
        if (!(w & m)) out.add_term(w, s);
    return out;
}

FormExpr reduce_mod(const FormExpr& f, const std::vector<std::string>& ideal)
{
    std::vector<int> idx;
    for (auto& n : ideal) idx.push_back(f.chart().index(n));
    return reduce_mod(f, idx);
}

FormExpr conjugate_form(const FormExpr& f)
{
    const Chart& c = f.chart();
    FormExpr out(c, f.degree());
    for (auto& [w, s] : f.terms()) {
        FormExpr t = c.scalar(conjugate(s));
        for (Word x = w; x; x &= x - 1) {
            const Generator& g = c.generator(std::countr_zero(x));
            switch (g.link) {
            case Generator::Link::aux:
                throw Error("auxiliary generator " + g.name + " has no conjugate");
            case Generator::Link::self: {
                FormExpr gi = c.gen(std::countr_zero(x));
                t = wedge(t, g.sign > 0 ? gi : -gi);
                break;
            }
            case Generator::Link::pair:
                t = wedge(t, c.gen(g.partner));
                break;
            }
        }
        out += t;
    }
    return out;
}

FormExpr substitute_form(const FormExpr& f, const std::map<std::string, ScalarExpr>& bindings, bool check_reality)
{
    return f.map_coefficients([&](const ScalarExpr& s) { return substitute(s, bindings, check_reality); });
}

// ---------------------------------------------------------------- parsing

namespace {

struct FormSem {
    using Value = FormExpr;
    const Chart& chart;

    Value number(const mpq_class& q) { return chart.scalar(ScalarExpr(Qi(q))); }
    Value imag_unit() { return chart.scalar(ScalarExpr::imag_unit()); }
    Value ident(const std::string& name, size_t)
    {
        int k = chart.find(name);
        if (k >= 0) return chart.gen(k);
        auto e = chart.vars().lookup(name);
        if (!e) throw UndeclaredIdentifier(name);
        return chart.scalar(*e);
    }
    Value add(const Value& a, const Value& b) { return a + b; }
    Value sub(const Value& a, const Value& b) { return a - b; }
    Value mul(const Value& a, const Value& b)
    {
        if (a.degree() == 0) return a.scalar_part() * b;
        if (b.degree() == 0) return b.scalar_part() * a;
        throw Error("use /\\ to multiply forms of positive degree");
    }
    Value div(const Value& a, const Value& b)
    {
        if (b.degree() != 0) throw Error("division by a form of positive degree");
        return crc::pow(b.scalar_part(), -1) * a;
    }
    Value neg(const Value& a) { return -a; }
    Value wedge(const Value& a, const Value& b) { return crc::wedge(a, b); }
    Value pow(const Value& a, const mpq_class& q)
    {
        if (a.degree() != 0) throw Error("power of a form of positive degree");
        return chart.scalar(crc::pow(a.scalar_part(), q));
    }
    Value call(const std::string& f, const Value& a, size_t)
    {
        if (f != "sqrt") throw Error("unknown function '" + f + "'");
        if (a.degree() != 0) throw Error("sqrt of a form of positive degree");
        return chart.scalar(crc::sqrt(a.scalar_part()));
    }
    std::optional<mpq_class> as_rational(const Value& v)
    {
        if (v.degree() != 0) return std::nullopt;
        auto c = v.scalar_part().constant_value();
        if (!c || !c->is_real()) return std::nullopt;
        return c->re;
    }
};

}  // namespace

FormExpr parse_form(const std::string& text, const Chart& chart)
{
    FormSem sem{chart};
    detail::Parser<FormSem> p(text, sem);
    return p.parse_all();
}

// ---------------------------------------------------------------- chart files

namespace {

std::vector<std::string> split_ws(const std::string& s)
{
    std::istringstream is(s);
    std::vector<std::string> out;
    std::string w;
    while (is >> w) out.push_back(w);
    return out;
}

Reality reality_of(const std::string& s)
{
    if (s == "real") return Reality::real;
    if (s == "imaginary") return Reality::imaginary;
    if (s == "unit_modulus") return Reality::unit_modulus;
    if (s == "positive_real") return Reality::positive_real;
    throw Error("unknown reality tag '" + s + "'");
}

int sign_of(const std::vector<std::string>& w, size_t at)
{
    if (w.size() <= at) return 1;
    if (w[at] == "+1" || w[at] == "1") return 1;
    if (w[at] == "-1") return -1;
    throw Error("conjugation sign must be +1 or -1");
}

}  // namespace

std::unique_ptr<Chart> load_chart(const std::string& text, bool check)
{
    auto chart = std::make_unique<Chart>();
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    std::vector<std::pair<int, std::string>> drules, vrules;
    std::vector<std::pair<int, std::string>> consts;
    while (std::getline(is, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        auto w = split_ws(line);
        if (w.empty()) continue;
        try {
            const std::string& kw = w[0];
            if (kw == "var") {
                if (w.size() == 4 && w[2] == "complex")
                    chart->vars().declare_pair(w[1], w[3]);
                else if (w.size() == 3)
                    chart->vars().declare(w[1], reality_of(w[2]));
                else
                    throw Error("expected 'var NAME TAG' or 'var NAME complex PARTNER'");
            } else if (kw == "const") {
                if (w.size() < 2) throw Error("expected 'const NAME...'");
                for (size_t k = 1; k < w.size(); ++k) consts.emplace_back(lineno, w[k]);
            } else if (kw == "gen" || kw == "placeholder") {
                if (w.size() < 3) throw Error("expected '" + kw + " NAME self|pair|aux ...'");
                Generator::Link link;
                if (w[2] == "self")
                    link = Generator::Link::self;
                else if (w[2] == "pair")
                    link = Generator::Link::pair;
                else if (w[2] == "aux")
                    link = Generator::Link::aux;
                else
                    throw Error("unknown generator link '" + w[2] + "'");
                if (link == Generator::Link::pair && w.size() != 4) throw Error("pair needs a partner name");
                if (kw == "placeholder") {
                    chart->add_placeholder(w[1], link, link == Generator::Link::self ? sign_of(w, 3) : 1,
                                           link == Generator::Link::pair ? w[3] : "");
                } else if (link == Generator::Link::self) {
                    chart->add_self(w[1], sign_of(w, 3));
                } else if (link == Generator::Link::pair) {
                    chart->add_pair(w[1], w[3]);
                } else {
                    chart->add_aux(w[1]);
                }
            } else if (kw == "d" || kw == "dvar") {
                auto eq = line.find('=');
                if (w.size() < 4 || w[2] != "=" || eq == std::string::npos)
                    throw Error("expected '" + kw + " NAME = EXPR'");
                (kw == "d" ? drules : vrules).emplace_back(lineno, w[1] + "\n" + line.substr(eq + 1));
            } else {
                throw Error("unknown keyword '" + kw + "'");
            }
        } catch (const Error& e) {
            throw Error("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    auto body = [](const std::string& s) {
        auto nl = s.find('\n');
        return std::make_pair(s.substr(0, nl), s.substr(nl + 1));
    };
    try {
        for (auto& [ln, name] : consts) {
            lineno = ln;
            chart->set_constant(chart->vars().get(name));
        }
        for (auto& [ln, s] : vrules) {
            lineno = ln;
            auto [name, expr] = body(s);
            chart->set_scalar_d(chart->vars().get(name), parse_form(expr, *chart));
        }
        std::set<int> explicit_rules;
        for (auto& [ln, s] : drules) explicit_rules.insert(chart->index(body(s).first));
        for (auto& [ln, s] : drules) {
            lineno = ln;
            auto [name, expr] = body(s);
            FormExpr r = parse_form(expr, *chart);
            const Generator& g = chart->generator(chart->index(name));
            if (g.link == Generator::Link::pair && !explicit_rules.count(g.partner))
                chart->set_d_conj(name, r);
            else
                chart->set_d(name, r);
        }
    } catch (const Error& e) {
        throw Error("line " + std::to_string(lineno) + ": " + e.what());
    }
    chart->finalize(check);
    return chart;
}

}  // namespace crc
