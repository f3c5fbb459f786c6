#pragma once

#include <array>

#include "qteleport/types.hpp"

// Filtering normal form: the SLOCC filters bringing a two-qubit state to its
// unique Bell-diagonal form, with success probability and Bell spectrum.
namespace qtel {

struct CorrelationMatrix {
    Mat3r t;  // t(i,j) = Tr(rho sigma_i x sigma_j), entries in [-1, 1]
};

CorrelationMatrix correlation_matrix(const DensityMatrix& rho);

// SU(2) lift of a proper rotation R (det +1), with the covering convention
// R(i,k) = 1/2 Tr(sigma_i U sigma_k U^dag). Unique up to overall sign.
Mat2 so3_to_su2(const Mat3r& r);

struct SinkhornResult {
    DensityMatrix rho_mm;  // marginal-equalized state (both marginals I/2)
    LocalOperator A;       // accumulated A-side filter, max singular value 1
    LocalOperator B;       // accumulated B-side filter, max singular value 1
    double success_prob;   // Tr((A x B) rho (A x B)^dag)
    int iterations;        // alternation rounds used
    double residual;       // final max-norm marginal distance from I/2
};

// Alternating marginal-equalization: A-side filter (2 rho_A)^{-1/2}, then
// B-side (2 rho_B)^{-1/2}, until both marginals are I/2 within tol in
// max-norm. Two robustness refinements on top of plain alternation (plain
// alternation stalls near the degenerate class at ~1e-7 residuals):
//   * every iterate is clipped back onto the PSD cone, and
//   * each round may take the filter pair to a power 2^k (largest power that
//     still shrinks the spectral marginal residual), which collapses the
//     slow geometric tail of nearly-pure states.
// Throws DegenerateNormalForm when a marginal eigenvalue drops below rd_tol
// (quasi-distillable class: no full-rank normal form exists) and SolverError
// when max_iter rounds do not reach tol.
SinkhornResult sinkhorn_filter_iteration(const DensityMatrix& rho,
                                         double tol = 1e-10,
                                         int max_iter = 10000,
                                         double rd_tol = 1e-12);

struct BellDiagResult {
    Mat2 U, V;             // local unitaries applied as (U x V) rho (U x V)^dag
    DensityMatrix rho_bd;  // Bell-diagonal state
    std::array<double, 4> coeffs;  // Bell weights, descending
};

// Diagonalizes the correlation matrix by a signed SVD with both factors in
// SO(3) (determinant signs absorbed into the singular values), lifts the
// rotations through the SU(2) double cover, and reorders the Bell weights by
// a further local-unitary pair so the largest weight sits on psi+.
// Requires both marginals equal to I/2 within 1e-8.
BellDiagResult bell_diagonalize(const DensityMatrix& rho_mm);

struct NormalFormResult {
    DensityMatrix rho_nf;
    LocalOperator filter_A;
    LocalOperator filter_B;
    double success_prob;
    std::array<double, 4> bell_coefficients;  // descending, sum 1
    double fidelity_nf;  // <psi+| rho_nf |psi+> = largest Bell weight
    bool separable;      // set when the normal form is not entangled
    int iterations;
};

// sinkhorn_filter_iteration followed by bell_diagonalize. Entangled inputs
// give fidelity_nf > 1/2 = (1 + C(rho_nf))/2; separable full-rank inputs
// give a valid normal form with fidelity_nf <= 1/2 and the separable flag.
NormalFormResult normal_form(const DensityMatrix& rho, double tol = 1e-10,
                             int max_iter = 10000);

}  // namespace qtel
