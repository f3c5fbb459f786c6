#pragma once

#include "qteleport/types.hpp"

// Dense linear-algebra kernel for the 2x2 / 4x4 matrices of the problem:
// tensor products, partial transpose/trace on party B conventions, Hermitian
// eigendecompositions, magic-basis transform and state validation.
namespace qtel {

// Tensor product with index (2i+k, 2j+l) = a(i,j) * b(k,l).
Mat4 kron(const Mat2& a, const Mat2& b);

// Partial transpose on party B: out[(i,l),(k,j)] = in[(i,j),(k,l)].
Mat4 partial_transpose_B(const Mat4& rho);

// Partial traces; trace_out_B keeps party A and vice versa.
Mat2 partial_trace_B(const Mat4& rho);
Mat2 partial_trace_A(const Mat4& rho);

// Eigendecomposition of a Hermitian matrix, eigenvalues ascending,
// eigenvectors orthonormal columns. Throws ValidationError when the input
// is not Hermitian within herm_tol.
struct Eig4 {
    Eigen::Vector4d w;
    Mat4 V;
};
struct Eig2 {
    Eigen::Vector2d w;
    Mat2 V;
};
Eig4 herm_eig(const Mat4& h, double herm_tol = 1e-10);
Eig2 herm_eig(const Mat2& h, double herm_tol = 1e-10);

// M^dag rho M with M the magic basis. Bell-diagonal states become real and
// diagonal under this transform.
Mat4 magic_transform(const Mat4& rho);

// Checks Hermiticity (1e-10 entrywise), unit trace (1e-10) and
// positive semidefiniteness (smallest eigenvalue >= -tol). The tolerance
// scales all three checks so CLI ingestion can loosen them together.
DensityMatrix validate_density(const Mat4& m, double tol = 1e-10);

// Checks the operator-norm bound (largest singular value <= 1 + 1e-12).
LocalOperator validate_local_operator(const Mat2& m);

// Largest singular value of a 2x2 matrix.
double operator_norm(const Mat2& m);

// Eigenvalue clip to the PSD cone followed by trace renormalization. Used by
// the normal-form iteration to stop rounding noise from seeding a negative
// eigenvalue (which the alternation amplifies instead of damping).
Mat4 psd_clip(const Mat4& rho);

}  // namespace qtel
