#include "qteleport/qmat.hpp"

#include <cmath>

namespace qtel {

namespace {
constexpr cplx kI{0.0, 1.0};
const double kS2 = 1.0 / std::sqrt(2.0);
}  // namespace

const Mat2& pauli(int i) {
    static const Mat2 ops[4] = {
        (Mat2() << 1, 0, 0, 1).finished(),
        (Mat2() << 0, 1, 1, 0).finished(),
        (Mat2() << 0, -kI, kI, 0).finished(),
        (Mat2() << 1, 0, 0, -1).finished(),
    };
    if (i < 0 || i > 3) throw Error("pauli index out of range");
    return ops[i];
}

const Vec4& bell_ket(int k) {
    static const Vec4 kets[4] = {
        (Vec4() << kS2, 0, 0, kS2).finished(),    // psi+
        (Vec4() << kS2, 0, 0, -kS2).finished(),   // psi-
        (Vec4() << 0, kS2, kS2, 0).finished(),    // phi+
        (Vec4() << 0, kS2, -kS2, 0).finished(),   // phi-
    };
    if (k < 0 || k > 3) throw Error("bell ket index out of range");
    return kets[k];
}

const Mat4& magic_basis() {
    static const Mat4 m = [] {
        Mat4 out;
        out.col(0) = bell_ket(0);
        out.col(1) = kI * bell_ket(1).eval();
        out.col(2) = kI * bell_ket(2).eval();
        out.col(3) = bell_ket(3);
        return out;
    }();
    return m;
}

Mat4 kron(const Mat2& a, const Mat2& b) {
    Mat4 out;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
    return out;
}

Mat4 partial_transpose_B(const Mat4& rho) {
    Mat4 out;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k)
                for (int l = 0; l < 2; ++l)
                    out(2 * i + l, 2 * k + j) = rho(2 * i + j, 2 * k + l);
    return out;
}

Mat2 partial_trace_B(const Mat4& rho) {
    Mat2 out;
    for (int i = 0; i < 2; ++i)
        for (int k = 0; k < 2; ++k)
            out(i, k) = rho(2 * i, 2 * k) + rho(2 * i + 1, 2 * k + 1);
    return out;
}

Mat2 partial_trace_A(const Mat4& rho) {
    Mat2 out;
    for (int j = 0; j < 2; ++j)
        for (int l = 0; l < 2; ++l) out(j, l) = rho(j, l) + rho(2 + j, 2 + l);
    return out;
}

Eig4 herm_eig(const Mat4& h, double herm_tol) {
    if ((h - h.adjoint()).cwiseAbs().maxCoeff() > herm_tol)
        throw ValidationError("herm_eig: input is not Hermitian");
    Eigen::SelfAdjointEigenSolver<Mat4> es(0.5 * (h + h.adjoint()));
    if (es.info() != Eigen::Success) throw SolverError("herm_eig: 4x4 eigensolver failed");
    return {es.eigenvalues(), es.eigenvectors()};
}

Eig2 herm_eig(const Mat2& h, double herm_tol) {
    if ((h - h.adjoint()).cwiseAbs().maxCoeff() > herm_tol)
        throw ValidationError("herm_eig: input is not Hermitian");
    Eigen::SelfAdjointEigenSolver<Mat2> es(0.5 * (h + h.adjoint()));
    if (es.info() != Eigen::Success) throw SolverError("herm_eig: 2x2 eigensolver failed");
    return {es.eigenvalues(), es.eigenvectors()};
}

Mat4 magic_transform(const Mat4& rho) {
    const Mat4& m = magic_basis();
    return m.adjoint() * rho * m;
}

DensityMatrix validate_density(const Mat4& m, double tol) {
    const double herm = (m - m.adjoint()).cwiseAbs().maxCoeff();
    if (herm > tol)
        throw ValidationError("density matrix is not Hermitian (violation " +
                              std::to_string(herm) + ")");
    const double tr_err = std::abs(m.trace() - cplx(1.0, 0.0));
    if (tr_err > tol)
        throw ValidationError("density matrix trace differs from 1 by " +
                              std::to_string(tr_err));
    Eigen::SelfAdjointEigenSolver<Mat4> es(0.5 * (m + m.adjoint()));
    if (es.eigenvalues()(0) < -tol)
        throw ValidationError("density matrix has negative eigenvalue " +
                              std::to_string(es.eigenvalues()(0)));
    return DensityMatrix{m};
}

double operator_norm(const Mat2& m) {
    // largest singular value via the 2x2 Hermitian Gram matrix
    Eigen::SelfAdjointEigenSolver<Mat2> es(m.adjoint() * m);
    return std::sqrt(std::max(0.0, es.eigenvalues()(1)));
}

LocalOperator validate_local_operator(const Mat2& m) {
    const double sv = operator_norm(m);
    if (sv > 1.0 + 1e-12)
        throw ValidationError("local operator norm " + std::to_string(sv) +
                              " exceeds 1");
    return LocalOperator{m};
}

Mat4 psd_clip(const Mat4& rho) {
    Eigen::SelfAdjointEigenSolver<Mat4> es(0.5 * (rho + rho.adjoint()));
    if (es.eigenvalues()(0) >= 0.0) return rho;
    Eigen::Vector4d w = es.eigenvalues().cwiseMax(0.0);
    Mat4 out = es.eigenvectors() * w.asDiagonal() * es.eigenvectors().adjoint();
    return out / out.trace().real();
}

}  // namespace qtel
