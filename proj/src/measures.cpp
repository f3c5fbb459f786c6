#include "qteleport/measures.hpp"

#include <algorithm>
#include <cmath>

#include "qteleport/qmat.hpp"

namespace qtel {

namespace {
constexpr double kEntangleTol = 1e-10;
}

std::pair<double, PureState> singlet_fraction(const DensityMatrix& rho) {
    const Mat4 r = magic_transform(rho.mat);
    const Eigen::Matrix4d re = 0.5 * (r.real() + r.real().transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(re);
    const double f = es.eigenvalues()(3);
    // real coordinates in the magic basis <=> maximally entangled state
    const Vec4 psi = magic_basis() * es.eigenvectors().col(3).cast<cplx>();
    return {f, PureState{psi}};
}

double concurrence(const DensityMatrix& rho) {
    Eig4 e = herm_eig(rho.mat);
    // kill eigen-dust before the square root: sqrt(1e-16) = 1e-8 would leak
    // into the Wootters lambdas of every rank-deficient state
    Eigen::Vector4d w = e.w;
    for (int i = 0; i < 4; ++i) w(i) = w(i) > 1e-13 ? std::sqrt(w(i)) : 0.0;
    const Mat4 sqrt_rho = e.V * w.asDiagonal() * e.V.adjoint();
    const Mat4 yy = kron(pauli(2), pauli(2));
    // M M^dag = sqrt(rho) rho_tilde sqrt(rho), so the Wootters lambdas are
    // the singular values of M; the SVD keeps the small ones at machine
    // precision where a second eigensolve-plus-sqrt would amplify noise
    const Mat4 m = sqrt_rho * yy * sqrt_rho.transpose();
    Eigen::JacobiSVD<Mat4> svd(m);
    const Eigen::Vector4d lam = svd.singularValues();  // descending
    return std::max(0.0, lam(0) - lam(1) - lam(2) - lam(3));
}

double negativity(const DensityMatrix& rho) {
    Eig4 e = herm_eig(partial_transpose_B(rho.mat));
    return 2.0 * std::max(0.0, -e.w(0));
}

bool is_entangled(const DensityMatrix& rho) {
    Eig4 e = herm_eig(partial_transpose_B(rho.mat));
    return e.w(0) < -kEntangleTol;
}

double teleport_fidelity_from_F(double F) {
    if (F < 0.25 - 1e-12 || F > 1.0 + 1e-12)
        throw ValidationError("singlet fraction outside [1/4, 1]");
    return (2.0 * F + 1.0) / 3.0;
}

MeasureReport analyze(const DensityMatrix& rho) {
    auto [f, psi] = singlet_fraction(rho);
    const double lam_min = herm_eig(partial_transpose_B(rho.mat)).w(0);
    MeasureReport rep;
    rep.singlet_fraction = f;
    rep.achieving_me_state = psi;
    rep.concurrence = concurrence(rho);
    rep.negativity = negativity(rho);
    rep.entangled = lam_min < -kEntangleTol;
    rep.near_boundary = std::abs(lam_min) <= kEntangleTol;
    rep.teleport_fidelity = teleport_fidelity_from_F(f);
    return rep;
}

}  // namespace qtel
