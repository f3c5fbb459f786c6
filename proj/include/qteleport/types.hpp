#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

// Core conventions used by every module:
//   * two-qubit basis order |00>, |01>, |10>, |11>, first tensor factor = party A
//   * partial transpose always acts on party B
//   * Bell kets: psi+ = (|00>+|11>)/s2, psi- = (|00>-|11>)/s2,
//                phi+ = (|01>+|10>)/s2, phi- = (|01>-|10>)/s2
//   * magic basis e1 = psi+, e2 = i psi-, e3 = i phi+, e4 = phi-
namespace qtel {

using cplx = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using Mat4 = Eigen::Matrix4cd;
using Vec4 = Eigen::Vector4cd;
using Mat3r = Eigen::Matrix3d;
using Vec3r = Eigen::Vector3d;

// ---- error taxonomy; the CLI maps these onto its exit codes ----

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Input failed a structural invariant (not Hermitian, trace != 1, ...).
struct ValidationError : Error {
    using Error::Error;
};

// An iterative solver failed to reach its target accuracy.
struct SolverError : Error {
    using Error::Error;
};

// The filtering normal form does not exist for this state (rank-deficient
// marginal encountered: the degenerate / quasi-distillable class).
struct DegenerateNormalForm : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

// ---- validated value types ----

// 4x4 Hermitian, unit-trace, PSD two-qubit state. Construct via
// validate_density() so the invariants are actually checked.
struct DensityMatrix {
    Mat4 mat;
};

// 2x2 filter with operator norm <= 1 (a valid SLOCC element).
struct LocalOperator {
    Mat2 mat;
};

// Length-4 unit vector.
struct PureState {
    Vec4 vec;
};

// ---- fixed operators ----

// Pauli matrices; index 0 = identity, 1..3 = x, y, z.
const Mat2& pauli(int i);

// Bell kets in the convention above; index 0..3 = psi+, psi-, phi+, phi-.
const Vec4& bell_ket(int k);

// Magic-basis change matrix M (columns e1..e4). M is unitary and maximally
// entangled states are exactly the states with real coordinates M^dag psi.
const Mat4& magic_basis();

inline Mat4 proj(const Vec4& v) { return v * v.adjoint(); }

}  // namespace qtel
