#pragma once

#include "crc/exterior.hpp"
#include "crc/report.hpp"

#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace crc {

// Tube hypersurfaces Re z3 = rho(t1, t2), t_k = z_k + conj(z_k).
//
// The coframe pipeline runs over the jet of a generic Monge-Ampere solution:
// atoms rho, rho_1, rho_2, rho_11, rho_111, ..., rho_12 and S, S_1, S_11, ...
// (S = (rho_12/rho_11)_1), with every t2-derivative resolved through the
// Monge-Ampere relations. A concrete rho enters only through its jets.

struct HypothesisError : Error {
    using Error::Error;
};

struct TubeOptions {
    int trials = 32;
    uint64_t seed = 0;
    double tol = 1e-8;      // relative tolerance for sampled comparisons
    int levi_points = 16;
    double levi_tol = 1e-10;
};

// Variables shared by every tube computation.
struct TubeVars {
    Variable t1, t2, u, a, b, bb, lam;
};
const TubeVars& tube_vars();

// jet atom d1^i d2^j rho, resolved to the canonical jet atoms
ScalarExpr rho_jet(int i, int j);
// d1^k S
ScalarExpr s_jet(int k);
// t1, t2, u, a, b/bb, lam and the jet atoms rho_1 ... S_11 by name
const VariableTable& jet_table();

struct Hypothesis {
    Status status = Status::inconclusive;
    std::string reason;
    nlohmann::json details = nlohmann::json::object();
};

class TubeModel {
public:
    std::string rho_text;
    ScalarExpr rho;
    DomainBox box;  // t1, t2
    ScalarExpr rho11, rho12, rho22, S;
    Hypothesis ma, positivity, twonondeg;

    bool accepted() const;
    std::vector<std::string> failures() const;

    // the jet atoms of e replaced by the derivatives of rho
    ScalarExpr concretize(const ScalarExpr& e) const;

    std::shared_ptr<std::map<std::string, ScalarExpr>> jet_cache = std::make_shared<std::map<std::string, ScalarExpr>>();
};

// Parses rho over {t1, t2} and evaluates the three hypotheses on box
// without throwing on a failed hypothesis.
TubeModel screen_rho(const std::string& text, const DomainBox& box, const TubeOptions& opt = {});
TubeModel screen_rho(const ScalarExpr& rho, const std::string& text, const DomainBox& box,
                     const TubeOptions& opt = {});
// As screen_rho, but throws HypothesisError naming the failed hypotheses.
TubeModel tube_from_rho(const std::string& text, const DomainBox& box, const TubeOptions& opt = {});

DomainBox default_profile_box();  // t1, t2 in [0.5, 1]
// rho = t2 g(t1/t2) for g given in the variable s; the Monge-Ampere residual
// is verified to vanish before returning.
ScalarExpr ma_profile_solution(const std::string& g_text, const DomainBox& box = default_profile_box());

ScalarExpr paper_example_rho();
const std::string& paper_example_text();
DomainBox paper_example_box();

// Hessian eigenvalues at each point; rank counts |eig| > tol * (|e1| + |e2|).
struct LeviSample {
    double t1 = 0, t2 = 0;
    double eig_small = 0, eig_large = 0;
    int rank = 0;
};
std::vector<LeviSample> levi_rank_numeric(const TubeModel& model, const std::vector<std::pair<double, double>>& points,
                                          double tol = 1e-10);
std::vector<std::pair<double, double>> levi_points(const DomainBox& box, int count, uint64_t seed);

// Charts: "L" carries dz1, dz2 (and conjugates), mu, du, ell = da/a, db, dbb, dlam;
// "C" carries omega, omega1, theta2, phi1, phi2 (and conjugates), the
// auxiliary dlam and the pair sigma/sigmab.
struct TubeCoframe {
    std::unique_ptr<Chart> L, C;
    FormExpr omega, omega1, theta2;       // in L
    std::map<int, FormExpr> to_C;         // L generator -> form in C
    Report checks;                        // structure identities

    FormExpr in_C(const FormExpr& f) const;  // rewrite an L form into C
    FormExpr d_in_C(const ScalarExpr& s) const;
    FormExpr d_in_C(const FormExpr& f) const;
};
// Built once over the generic jet.
const TubeCoframe& build_coframe();

struct CurvatureVerdict {
    ScalarExpr theta2_2bar1;      // general fiber
    ScalarExpr c;
    ScalarExpr theta2_21_gamma0;
    ScalarExpr theta2_21_final;   // on gamma0
    ZeroVerdict is_final_zero = ZeroVerdict::inconclusive;
    bool cartan_obstruction = false;
    std::string flatness;         // "not_flat", "necessary_condition_passed" or "inconclusive"
    Report checks;
};

// Jet-level coefficients with the printed-formula comparisons; the model
// supplies the concrete jets for sampling and the zero test.
CurvatureVerdict curvature_coefficients(const TubeCoframe& cf, const TubeModel& model, const TubeOptions& opt = {});

Report flatness_probe(const CurvatureVerdict& v);

// Whole pipelines behind the CLI.
Report analyze_tube(const std::string& rho_text, const DomainBox& box, const TubeOptions& opt = {});
Report analyze_tube(const ScalarExpr& rho, const std::string& rho_text, const DomainBox& box,
                    const TubeOptions& opt = {});
Report paper_example_report(const TubeOptions& opt = {});
Report profile_report(const std::string& g_text, const DomainBox& box, const TubeOptions& opt = {});

}  // namespace crc
