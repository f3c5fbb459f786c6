#pragma once

#include "qteleport/types.hpp"

// The central convex program: maximize F* = 1/2 - Tr(X rho^Gamma) over
// Hermitian X with 0 <= X <= I and X^Gamma <= I/2, its dual (robustness)
// program minimize 1/2 + Tr(Z)/2 with Z >= 0 and (rho+Z)^Gamma >= 0, the
// optimal-filter extraction from the rank-1 maximizer, analytic bounds, and
// the closed-form one-parameter test family.
namespace qtel {

struct FstarSolution {
    double fstar;            // in [1/2, 1]
    Mat4 x_opt;              // Hermitian maximizer
    double rank_gap;         // second-largest eigenvalue of x_opt
    LocalOperator filter_A;  // optimal one-sided filter (identity when no_filter)
    bool no_filter;          // optimum is X ~ 0 (separable input)
    bool filter_unitary;     // filter is unitary up to scale: filtering vacuous
    double duality_gap;      // certified from feasible primal and dual points
    int iterations;          // Newton steps spent (primal + internal dual)
    double feasibility_margin;      // min eigenvalue margin over all blocks
    double auto_constraint_margin;  // lambda_min(X^Gamma) + 1/2 (unenforced bound)
};

struct DualSolution {
    double g;           // 1/2 + Tr(z)/2
    Mat4 z;             // PSD slack
    double mixing_p;    // Tr(z)/(1+Tr(z))
    DensityMatrix rho_z;    // normalized mixing state z/Tr(z) (I/4 when z ~ 0)
    DensityMatrix rho_mix;  // (1-p) rho + p rho_z, PPT by feasibility
    int iterations;
    double feasibility_margin;
};

// Barrier interior-point solve; tol is the certified duality-gap target
// (default 1e-8). The returned gap is measured between this primal point and
// an independently solved feasible dual point, both pushed strictly inside
// their cones before certification. Throws SolverError if the certified gap
// exceeds tol.
FstarSolution solve_primal(const DensityMatrix& rho, double tol = 1e-8);
DualSolution solve_dual(const DensityMatrix& rho, double tol = 1e-8);

// Principal-eigenpair filter identification. The cost identity
// K = 1/2 - <psi+|(C x I) rho^Gamma (C^dag x I)|psi+> with C = B^dag sy A
// writes the program's objective as Tr(X rho^Gamma) for the rank-1 matrix
// X = (C^dag x I)|psi+><psi+|(C x I); matching the principal eigenvector v of
// x_opt gives C^dag = sqrt(2 lambda) reshape_rowmajor(v) and, with B = I, the
// protocol filter A = sigma_y C. Returned phase-normalized (largest entry
// real positive) and rescaled to max singular value 1; second return value is
// the rank-1 defect (second-largest eigenvalue). Throws on ~zero input.
std::pair<LocalOperator, double> extract_filter(const Mat4& x_opt);

// true iff the second-largest eigenvalue is below tol (rank <= 1).
bool verify_rank_one(const Mat4& x_opt, double tol = 1e-6);

struct BoundsReport {
    double lower;         // 1/2 (1 + N / (1 + sqrt(1 - (N/C)^2)))
    double upper;         // (1 + N)/2
    double intermediate;  // tighter lower bound using C(v_minus) directly
    PureState v_minus;    // eigenvector of rho^Gamma at the lowest eigenvalue
    double c_vminus;      // concurrence of v_minus
    bool separable;       // bounds degenerate to 1/2
};

BoundsReport fstar_bounds(const DensityMatrix& rho);

// rho(F) = F |psi+><psi+| + (1-F) |01><01| for 1/3 <= F <= 1.
DensityMatrix family_state(double F);

// Closed form: 1/2 (1 + F^2 / (4(1-F))) for F <= 2/3, F above.
double family_fstar(double F);

// diag(F/(2(1-F)), 1) for F < 2/3; identity with trivial=true for F >= 2/3.
struct FamilyFilter {
    LocalOperator a;
    bool trivial;
};
FamilyFilter family_filter(double F);

}  // namespace qtel
