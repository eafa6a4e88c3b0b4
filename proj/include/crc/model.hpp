#pragma once

#include "crc/exterior.hpp"
#include "crc/report.hpp"

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace crc {

// Matrices are indexed from 0 in code; reports and docs use 1-based (row, col).
using Matrix5 = std::array<std::array<ScalarExpr, 5>, 5>;

Matrix5 identity5();
Matrix5 operator*(const Matrix5& a, const Matrix5& b);
Matrix5 operator+(const Matrix5& a, const Matrix5& b);
Matrix5 operator-(const Matrix5& a, const Matrix5& b);
Matrix5 transpose(const Matrix5& m);
Matrix5 conjugate(const Matrix5& m);
ScalarExpr det(const Matrix5& m);
Matrix5 inverse(const Matrix5& m);  // DomainError when singular
bool is_zero(const Matrix5& m);
std::string str(const Matrix5& m);

struct FormMatrix {
    std::array<std::array<FormExpr, 5>, 5> e;
    FormExpr& operator()(int i, int j) { return e[i - 1][j - 1]; }  // 1-based
    const FormExpr& operator()(int i, int j) const { return e[i - 1][j - 1]; }
};

FormMatrix operator*(const Matrix5& h, const FormMatrix& m);
FormMatrix operator*(const FormMatrix& m, const Matrix5& h);
FormMatrix wedge(const FormMatrix& a, const FormMatrix& b);
FormMatrix d(const FormMatrix& m);
FormMatrix operator-(const FormMatrix& a, const FormMatrix& b);

struct BilinearMatrices {
    Matrix5 S, T, J;
};
BilinearMatrices bilinear_matrices();

// delta and rho_alg must be imaginary (conj(x) = -x exactly), else RealityError.
Matrix5 algebra_element(const ScalarExpr& alpha, const ScalarExpr& beta, const ScalarExpr& gamma,
                        const ScalarExpr& sigma, const ScalarExpr& delta, const ScalarExpr& rho_alg);

struct AlgebraParams {
    ScalarExpr alpha, beta, gamma, sigma, delta, rho_alg;
};
// Reads the parameters off m; nullopt unless m has exactly the algebra pattern.
std::optional<AlgebraParams> algebra_parameters(const Matrix5& m);

Matrix5 subgroup_h1(const ScalarExpr& A);
Matrix5 subgroup_h2(const ScalarExpr& B, const ScalarExpr& Lambda);
// (B, Lambda) with m == subgroup_h2(B, Lambda), or nullopt
std::optional<std::pair<ScalarExpr, ScalarExpr>> h2_parameters(const Matrix5& m);

// Model chart in the text format of load_chart: generators theta, theta1,
// theta1b, theta2, theta2b, phi1, phi1b, phi2, phi2b, psi with the
// Maurer-Cartan structure equations as d-rules.
const std::string& model_chart_text();
const Chart& model_chart();

// The form-valued matrix over the generator names
// {theta, theta1, theta2, phi1, phi2, psi} (and their "b" conjugates) of chart.
FormMatrix mc_pattern(const Chart& chart, const std::array<std::string, 6>& names);
FormMatrix maurer_cartan(const Chart& chart = model_chart());

// d(MC) - MC^MC on every entry; one check per entry plus a summary.
Report verify_structure_equations(const Chart& chart = model_chart());

// A printed linear formula target = sum coeff * generator. Coefficients use the
// scalar grammar over B, Bb, Lam, A, Ab.
struct LinearFormula {
    std::string target;
    std::vector<std::pair<std::string, std::string>> terms;  // (coefficient, generator)
};
// sum of parsed coefficient * generator over chart
FormExpr linear_form(const Chart& chart, const LinearFormula& lf);
std::vector<LinearFormula> printed_h2_formulas();
std::vector<LinearFormula> printed_h1_formulas();

// Chart with omega, omega1, omega1b, theta2, theta2b, phi1, phi1b, phi2,
// phi2b, psi and the scalars B/Bb (pair), Lam (imaginary), A/Ab (pair).
const Chart& adjoint_chart();

Report verify_adjoint_transforms(const std::vector<LinearFormula>& h2 = printed_h2_formulas(),
                                 const std::vector<LinearFormula>& h1 = printed_h1_formulas());

// z on the hypersurface orbit Gamma_{side}; side is +1 or -1. Throws on z = 0.
bool gamma_membership(const std::array<cplx, 5>& z, int side, double tol = 1e-10);

}  // namespace crc
