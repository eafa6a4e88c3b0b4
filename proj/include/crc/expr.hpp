#pragma once

#include <gmpxx.h>

#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace crc {

using cplx = std::complex<double>;

// Exact element of Q(i).
struct Qi {
    mpq_class re{0}, im{0};

    Qi() = default;
    Qi(long v) : re(v) {}
    Qi(mpq_class r) : re(std::move(r)) {}
    Qi(mpq_class r, mpq_class i) : re(std::move(r)), im(std::move(i)) {}

    bool is_zero() const { return sgn(re) == 0 && sgn(im) == 0; }
    bool is_one() const { return re == 1 && sgn(im) == 0; }
    bool is_real() const { return sgn(im) == 0; }
    Qi conj() const { return {re, -im}; }
    Qi inverse() const;
    cplx to_complex() const { return {re.get_d(), im.get_d()}; }
    std::string str() const;

    friend Qi operator+(const Qi& a, const Qi& b) { return {a.re + b.re, a.im + b.im}; }
    friend Qi operator-(const Qi& a, const Qi& b) { return {a.re - b.re, a.im - b.im}; }
    friend Qi operator-(const Qi& a) { return {-a.re, -a.im}; }
    friend Qi operator*(const Qi& a, const Qi& b)
    {
        return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }
    friend Qi operator/(const Qi& a, const Qi& b) { return a * b.inverse(); }
    friend bool operator==(const Qi& a, const Qi& b) { return a.re == b.re && a.im == b.im; }
    friend bool operator!=(const Qi& a, const Qi& b) { return !(a == b); }
};

enum class Reality { real, imaginary, unit_modulus, complex_paired, positive_real };
std::string to_string(Reality r);

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ParseError : Error {
    size_t offset;
    ParseError(size_t off, const std::string& msg);
};
struct UndeclaredIdentifier : Error {
    std::string name;
    explicit UndeclaredIdentifier(const std::string& n);
};
struct DomainError : Error {
    using Error::Error;
};
struct RealityError : Error {
    using Error::Error;
};

class ScalarExpr;
class FunctionFamily;

// Interned atom. Pointer identity is structural identity.
struct Atom {
    enum class Kind { var, base, constant, deriv };
    Kind kind;
    std::string key;   // structural key, also the ordering key
    std::string name;  // display name (var / deriv)
    Reality reality = Reality::real;
    std::string partner;                      // complex_paired
    std::shared_ptr<const ScalarExpr> base;   // base: the expression under the power
    mpq_class cbase;                          // constant: positive rational base
    std::shared_ptr<const FunctionFamily> family;
    std::vector<int> index;                   // deriv multi-index
    bool positive = false;                    // known to be > 0 wherever defined
};

using Variable = const Atom*;

struct AtomLess {
    bool operator()(const Atom* a, const Atom* b) const { return a != b && a->key < b->key; }
};

using Factor = std::pair<const Atom*, mpq_class>;
using Monomial = std::vector<Factor>;  // sorted by AtomLess, nonzero exponents

bool monomial_less(const Monomial& a, const Monomial& b);

struct Term {
    Monomial mono;
    Qi coeff;
};

class ScalarExpr {
public:
    ScalarExpr() = default;
    ScalarExpr(long v);
    ScalarExpr(const Qi& c);
    static ScalarExpr from_atom(const Atom* a, const mpq_class& e = 1);
    static ScalarExpr from_terms(std::vector<Term> terms);  // canonicalizes
    static ScalarExpr imag_unit() { return ScalarExpr(Qi(0, 1)); }

    const std::vector<Term>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const;
    std::optional<Qi> constant_value() const;
    bool is_monomial() const { return terms_.size() == 1; }
    size_t size() const { return terms_.size(); }

    friend ScalarExpr operator+(const ScalarExpr& a, const ScalarExpr& b);
    friend ScalarExpr operator-(const ScalarExpr& a, const ScalarExpr& b);
    friend ScalarExpr operator-(const ScalarExpr& a);
    friend ScalarExpr operator*(const ScalarExpr& a, const ScalarExpr& b);
    friend ScalarExpr operator/(const ScalarExpr& a, const ScalarExpr& b);
    ScalarExpr& operator+=(const ScalarExpr& b) { return *this = *this + b; }
    ScalarExpr& operator-=(const ScalarExpr& b) { return *this = *this - b; }
    ScalarExpr& operator*=(const ScalarExpr& b) { return *this = *this * b; }

    friend bool operator==(const ScalarExpr& a, const ScalarExpr& b);
    friend bool operator!=(const ScalarExpr& a, const ScalarExpr& b) { return !(a == b); }

    std::string str() const;
    std::string key() const;

private:
    std::vector<Term> terms_;  // sorted by monomial_less, nonzero coefficients
};

// Opaque function with derivative atoms d^index f. Subclasses resolve
// derivatives that are tied together by relations.
class FunctionFamily : public std::enable_shared_from_this<FunctionFamily> {
public:
    FunctionFamily(std::string name, std::vector<Variable> args)
        : name_(std::move(name)), args_(std::move(args)) {}
    virtual ~FunctionFamily() = default;

    const std::string& name() const { return name_; }
    const std::vector<Variable>& args() const { return args_; }

    virtual std::string atom_name(const std::vector<int>& index) const;
    virtual bool is_positive(const std::vector<int>&) const { return false; }
    // d/dv of the atom; nullopt when it cannot be resolved
    virtual std::optional<ScalarExpr> derivative(const std::vector<int>& index, Variable v) const;

    ScalarExpr atom(const std::vector<int>& index) const;

private:
    std::string name_;
    std::vector<Variable> args_;
};

ScalarExpr pow(const ScalarExpr& e, const mpq_class& exponent);
ScalarExpr sqrt(const ScalarExpr& e);

class VariableTable {
public:
    Variable declare(const std::string& name, Reality r);
    // declares both members of a conjugate pair, returns the first
    Variable declare_pair(const std::string& name, const std::string& partner);
    void add_atom(const std::string& name, const ScalarExpr& atom_expr);

    Variable get(const std::string& name) const;  // throws UndeclaredIdentifier
    Variable find(const std::string& name) const; // nullptr if absent
    std::optional<ScalarExpr> lookup(const std::string& name) const;
    ScalarExpr operator[](const std::string& name) const;
    const std::vector<Variable>& variables() const { return order_; }

private:
    std::map<std::string, Variable> vars_;
    std::map<std::string, ScalarExpr> atoms_;
    std::vector<Variable> order_;
};

Variable intern_variable(const std::string& name, Reality r, const std::string& partner = "");

ScalarExpr parse(const std::string& text, const VariableTable& table);
// Adds every identifier of `text` missing from `table` as a real variable.
VariableTable declare_free_as_real(const std::string& text, VariableTable table);
std::string print(const ScalarExpr& e);

ScalarExpr differentiate(const ScalarExpr& e, Variable v);
ScalarExpr conjugate(const ScalarExpr& e);
ScalarExpr normalize(const ScalarExpr& e);

using Point = std::map<std::string, cplx>;
cplx evaluate(const ScalarExpr& e, const Point& point);
// Sum of |term| at the point; the scale used by zero testing.
double magnitude_scale(const ScalarExpr& e, const Point& point);

// bindings keyed by variable or atom display name
ScalarExpr substitute(const ScalarExpr& e, const std::map<std::string, ScalarExpr>& bindings,
                      bool check_reality = true);

std::vector<Variable> free_variables(const ScalarExpr& e);
std::vector<const Atom*> atoms_of(const ScalarExpr& e);

struct Interval {
    double lo = 0, hi = 0;
};
using DomainBox = std::map<std::string, Interval>;
DomainBox parse_box(const std::string& text);
std::string box_str(const DomainBox& box);

enum class ZeroVerdict { zero, nonzero, inconclusive };
std::string to_string(ZeroVerdict v);

struct ZeroTest {
    ZeroVerdict verdict = ZeroVerdict::inconclusive;
    bool exact = false;       // decided structurally
    int samples = 0;          // successful evaluations
    int failures = 0;         // domain errors skipped
    double max_residual = 0;  // max |value| / (1 + scale)
};

struct ZeroTestOptions {
    int trials = 16;
    uint64_t seed = 0;
    double tol = 1e-9;
};

// Seeded sample points in the box, one per trial, for the given variables.
std::vector<Point> sample_points(const std::vector<Variable>& vars, const DomainBox& box,
                                 int count, uint64_t seed);

ZeroTest zero_test(const ScalarExpr& e, const DomainBox& box, const ZeroTestOptions& opt = {});
bool is_identically_zero(const ScalarExpr& e, const DomainBox& box, int trials = 16,
                         uint64_t seed = 0, double tol = 1e-9);

}  // namespace crc
