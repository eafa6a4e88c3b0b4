#pragma once

#include "crc/exterior.hpp"
#include "crc/model.hpp"
#include "crc/report.hpp"

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace crc {

// flat: curvatures zero; opaque: degree-2 placeholders Theta2/Theta2b, Phi1/Phi1b,
// Phi2 (imaginary), Psi (imaginary); expanded: the normalized expansions with
// named coefficient symbols.
enum class CurvatureMode { flat, opaque, expanded };
std::string to_string(CurvatureMode m);
CurvatureMode curvature_mode_from_string(const std::string& s);

struct Curvatures {
    FormExpr Theta2, Phi1, Phi2, Psi;
};

// Generators omega, omega1, omega1b, theta2, theta2b, phi1, phi1b, phi2,
// phi2b, psi. Scalars B/Bb, Lam, A/Ab are constants. In expanded mode each
// coefficient symbol X has d X = dX, an auxiliary covector.
struct AbstractP2Chart {
    std::unique_ptr<Chart> chart;
    CurvatureMode mode = CurvatureMode::flat;
    Curvatures curvature;  // the curvature forms installed in the d-rules
};

// bindings are applied to the expanded coefficients before the rules are set
AbstractP2Chart build_chart(CurvatureMode mode, const std::map<std::string, ScalarExpr>& bindings = {});

// d(d g) for the six coframe generators; MissingRule in opaque mode. The expanded coefficients are independent symbols,
// so these residuals are the differential relations among them.
std::map<std::string, FormExpr> bianchi_residuals(const AbstractP2Chart& p2);

// Expanded-mode coefficient symbols, conjugate partners included.
std::vector<std::string> coefficient_symbols();

struct Coframe {
    FormExpr omega, omega1, theta2, phi1, phi2, psi;
};
Coframe base_coframe(const Chart& chart);
Coframe hatted_coframe(const Chart& chart, const std::vector<LinearFormula>& h2 = printed_h2_formulas());

// Theta2, Phi1, Phi2, Psi of a coframe by their defining formulas.
Curvatures curvatures_of(const Coframe& f);
FormExpr curvature_of(const Coframe& f, const std::string& which);

Report verify_gauge_shifts();
Report verify_equivariance(const std::string& B = "B", const std::string& Lam = "Lam");
Report verify_cartan_criterion();
// "shifts", "equivariance", "cartan", or "flat"
Report run_dga_suite(const std::string& suite);

}  // namespace crc
