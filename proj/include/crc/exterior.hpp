#pragma once

#include "crc/expr.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace crc {

class Chart;

using Word = uint64_t;  // bit k set = generator k present

// Graded exterior-algebra element over a chart. Terms are keyed by the set of
// generators, read in chart order.
class FormExpr {
public:
    FormExpr() = default;
    FormExpr(const Chart& chart, int degree) : chart_(&chart), degree_(degree) {}

    static FormExpr scalar(const Chart& chart, const ScalarExpr& s);

    const Chart& chart() const;
    bool has_chart() const { return chart_ != nullptr; }
    int degree() const { return degree_; }
    const std::map<Word, ScalarExpr>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    // coefficient of the degree-0 part
    ScalarExpr scalar_part() const;

    // adds s * word; the word must already be in chart order
    void add_term(Word w, const ScalarExpr& s);

    FormExpr map_coefficients(const std::function<ScalarExpr(const ScalarExpr&)>& f) const;

    friend FormExpr operator+(const FormExpr& a, const FormExpr& b);
    friend FormExpr operator-(const FormExpr& a, const FormExpr& b);
    friend FormExpr operator-(const FormExpr& a);
    friend FormExpr operator*(const ScalarExpr& s, const FormExpr& f);
    friend FormExpr operator*(const FormExpr& f, const ScalarExpr& s) { return s * f; }
    FormExpr& operator+=(const FormExpr& b) { return *this = *this + b; }
    FormExpr& operator-=(const FormExpr& b) { return *this = *this - b; }

    friend bool operator==(const FormExpr& a, const FormExpr& b);
    friend bool operator!=(const FormExpr& a, const FormExpr& b) { return !(a == b); }

    std::string str() const;

private:
    const Chart* chart_ = nullptr;
    int degree_ = 0;
    std::map<Word, ScalarExpr> terms_;
};

FormExpr wedge(const FormExpr& a, const FormExpr& b);
inline FormExpr operator^(const FormExpr& a, const FormExpr& b) { return wedge(a, b); }

struct Generator {
    enum class Link { self, pair, aux };
    std::string name;
    int degree = 1;
    Link link = Link::aux;
    int sign = 1;      // self: conj(g) = sign * g
    int partner = -1;  // pair
    bool placeholder = false;
};

struct MissingRule : Error {
    using Error::Error;
};

class Chart {
public:
    Chart() = default;
    Chart(const Chart&) = delete;
    Chart& operator=(const Chart&) = delete;

    VariableTable& vars() { return vars_; }
    const VariableTable& vars() const { return vars_; }

    int add_self(const std::string& name, int sign = 1);
    int add_pair(const std::string& name, const std::string& partner);  // returns the first
    int add_aux(const std::string& name);
    // degree-2 curvature placeholder; link as for ordinary generators
    int add_placeholder(const std::string& name, Generator::Link link, int sign = 1,
                        const std::string& partner = "");

    void set_d(const std::string& gen, const FormExpr& rule);
    // sets the rule and, for a paired or self-conjugate generator, the conjugate rule
    void set_d_conj(const std::string& gen, const FormExpr& rule);
    void set_scalar_d(Variable v, const FormExpr& rule);
    void set_constant(Variable v);
    // Checks d(d g) = 0 on every generator whose rule has no placeholder, ignoring
    // placeholder terms of the result. Generators whose second derivative needs a
    // missing rule are skipped. With check = false nothing is verified.
    void finalize(bool check = true);

    int size() const { return static_cast<int>(gens_.size()); }
    const Generator& generator(int k) const { return gens_.at(k); }
    int index(const std::string& name) const;  // throws
    int find(const std::string& name) const;   // -1 if absent
    bool has_rule(int k) const { return rules_.count(k) != 0; }
    const FormExpr& rule(int k) const;

    FormExpr gen(const std::string& name) const;
    FormExpr gen(int k) const;
    FormExpr scalar(const ScalarExpr& s) const { return FormExpr::scalar(*this, s); }
    FormExpr zero(int degree) const { return FormExpr(*this, degree); }
    FormExpr var(const std::string& name) const { return scalar(vars_[name]); }

    FormExpr d(const FormExpr& f) const;
    FormExpr d_scalar(const ScalarExpr& s) const;

    std::string word_str(Word w) const;
    int word_degree(Word w) const;

private:
    int push(Generator g);
    VariableTable vars_;
    std::vector<Generator> gens_;
    std::map<std::string, int> by_name_;
    std::map<int, FormExpr> rules_;
    std::map<Variable, FormExpr, AtomLess> scalar_rules_;
};

FormExpr d(const FormExpr& f);

// Substitutes a degree-1 form for every generator present in f. Images may
// live in another chart; unmapped generators present in f are an error.
FormExpr rewrite_basis(const FormExpr& f, const Chart& target, const std::map<int, FormExpr>& sub);
// rewrite within the same chart; generators absent from sub map to themselves
FormExpr rewrite_partial(const FormExpr& f, const std::map<int, FormExpr>& sub);

// Inverse of an invertible linear substitution of degree-1 generators (same chart).
// Generators absent from sub are treated as fixed.
std::map<int, FormExpr> invert_substitution(const Chart& chart, const std::map<int, FormExpr>& sub);

// Coefficient at a word given in any order; the permutation sign is applied so
// that coefficient(x * g1^g2, {g1, g2}) == x.
ScalarExpr coefficient(const FormExpr& f, const std::vector<int>& word);
ScalarExpr coefficient(const FormExpr& f, const std::vector<std::string>& word);

FormExpr reduce_mod(const FormExpr& f, const std::vector<int>& ideal);
FormExpr reduce_mod(const FormExpr& f, const std::vector<std::string>& ideal);

FormExpr conjugate_form(const FormExpr& f);

FormExpr substitute_form(const FormExpr& f, const std::map<std::string, ScalarExpr>& bindings,
                         bool check_reality = true);

// Form grammar: the scalar grammar plus generator names and `/\` for wedge.
FormExpr parse_form(const std::string& text, const Chart& chart);

// Declarative chart loader, see docs/chart_format.md.
// check = false skips the d(d g) = 0 test (used for mutated charts).
std::unique_ptr<Chart> load_chart(const std::string& text, bool check = true);

}  // namespace crc
