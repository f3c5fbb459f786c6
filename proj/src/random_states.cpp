#include "qteleport/random_states.hpp"

#include <cmath>
#include <numbers>

#include "qteleport/measures.hpp"
#include "qteleport/qmat.hpp"

namespace qtel {

double Rng::uniform() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double th = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(th);
    has_spare_ = true;
    return r * std::cos(th);
}

cplx Rng::cnormal() {
    const double re = normal();
    const double im = normal();
    return {re, im};
}

Mat2 Rng::su2() {
    double q[4];
    double n2 = 0.0;
    do {
        n2 = 0.0;
        for (double& v : q) {
            v = normal();
            n2 += v * v;
        }
    } while (n2 < 1e-12);
    const double s = 1.0 / std::sqrt(n2);
    const double a = q[0] * s, b = q[1] * s, c = q[2] * s, d = q[3] * s;
    Mat2 u;
    u << cplx(a, b), cplx(c, d), cplx(-c, d), cplx(a, -b);
    return u;
}

DensityMatrix Rng::density(int rank) {
    if (rank < 1 || rank > 4)
        throw ValidationError("random density: rank must be 1..4");
    Eigen::Matrix<cplx, 4, Eigen::Dynamic> g(4, rank);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < rank; ++j) g(i, j) = cnormal();
    Mat4 m = g * g.adjoint();
    m = 0.5 * (m + m.adjoint()).eval();
    m /= m.trace().real();
    return validate_density(m);
}

PureState Rng::pure() {
    Vec4 v;
    for (int i = 0; i < 4; ++i) v(i) = cnormal();
    v.normalize();
    return PureState{v};
}

LocalOperator Rng::filter() {
    Mat2 g;
    double nrm = 0.0;
    do {
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) g(i, j) = cnormal();
        nrm = operator_norm(g);
    } while (nrm < 1e-12);
    return LocalOperator{Mat2(g / nrm)};
}

DensityMatrix Rng::entangled(int rank, int max_tries) {
    for (int t = 0; t < max_tries; ++t) {
        DensityMatrix rho = density(rank);
        if (is_entangled(rho)) return rho;
    }
    throw SolverError("random entangled: rejection sampling exhausted");
}

}  // namespace qtel
