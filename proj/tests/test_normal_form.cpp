#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "qteleport/measures.hpp"
#include "qteleport/normal_form.hpp"
#include "qteleport/qmat.hpp"
#include "qteleport/random_states.hpp"

using namespace qtel;
using Catch::Approx;

namespace {

DensityMatrix werner(double p) {
    return validate_density(
        Mat4(p * proj(bell_ket(0)) + (1.0 - p) * 0.25 * Mat4::Identity()));
}

double bell_offdiag(const Mat4& m) {
    Mat4 bb;
    for (int k = 0; k < 4; ++k) bb.col(k) = bell_ket(k);
    const Mat4 in_bell = bb.adjoint() * m * bb;
    double worst = 0.0;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c)
            if (r != c) worst = std::max(worst, std::abs(in_bell(r, c)));
    return worst;
}

double marginal_dist(const Mat4& m) {
    return std::max(
        (partial_trace_A(m) - 0.5 * Mat2::Identity()).cwiseAbs().maxCoeff(),
        (partial_trace_B(m) - 0.5 * Mat2::Identity()).cwiseAbs().maxCoeff());
}

}  // namespace

TEST_CASE("correlation matrix of psi+ is diag(1,-1,1)", "[normal-form]") {
    const CorrelationMatrix t =
        correlation_matrix(validate_density(proj(bell_ket(0))));
    Mat3r expect;
    expect << 1, 0, 0, 0, -1, 0, 0, 0, 1;
    REQUIRE((t.t - expect).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("so3_to_su2 round-trips through the adjoint map", "[normal-form]") {
    Rng rng(12);
    for (int i = 0; i < 20; ++i) {
        const Mat2 u = rng.su2();
        Mat3r r;
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                r(a, b) =
                    0.5 *
                    (pauli(a + 1) * u * pauli(b + 1) * u.adjoint()).trace().real();
        const Mat2 v = so3_to_su2(r);
        // lift is defined up to global sign
        const double d = std::min((v - u).cwiseAbs().maxCoeff(),
                                  (v + u).cwiseAbs().maxCoeff());
        REQUIRE(d < 1e-9);
    }
    REQUIRE_THROWS_AS(so3_to_su2(Mat3r(2.0 * Mat3r::Identity())),
                      ValidationError);
}

TEST_CASE("Werner states are their own normal form", "[normal-form]") {
    const NormalFormResult nf = normal_form(werner(0.6));
    CHECK(nf.fidelity_nf == Approx(0.7).margin(1e-9));
    CHECK(nf.bell_coefficients[0] == Approx(0.7).margin(1e-9));
    CHECK(nf.bell_coefficients[1] == Approx(0.1).margin(1e-9));
    CHECK(nf.bell_coefficients[3] == Approx(0.1).margin(1e-9));
    CHECK((nf.rho_nf.mat - werner(0.6).mat).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(nf.success_prob == Approx(1.0).margin(1e-8));
    CHECK_FALSE(nf.separable);
}

TEST_CASE("Bell state passes through untouched", "[normal-form]") {
    const NormalFormResult nf =
        normal_form(validate_density(proj(bell_ket(0))));
    CHECK(nf.bell_coefficients[0] == Approx(1.0).margin(1e-10));
    CHECK(nf.fidelity_nf == Approx(1.0).margin(1e-10));
    CHECK(nf.success_prob == Approx(1.0).margin(1e-9));
}

TEST_CASE("rank-deficient marginals are the degenerate class", "[normal-form]") {
    Vec4 v00 = Vec4::Zero();
    v00(0) = 1.0;
    REQUIRE_THROWS_AS(normal_form(validate_density(proj(v00))),
                      DegenerateNormalForm);
}

TEST_CASE("product states normalize to the maximally mixed state",
          "[normal-form]") {
    Mat2 a = Mat2::Zero(), b = Mat2::Zero();
    a(0, 0) = 0.7;
    a(1, 1) = 0.3;
    b(0, 0) = 0.6;
    b(1, 1) = 0.4;
    const NormalFormResult nf = normal_form(validate_density(kron(a, b)));
    CHECK(nf.separable);
    for (int k = 0; k < 4; ++k)
        CHECK(nf.bell_coefficients[k] == Approx(0.25).margin(1e-9));
    CHECK((nf.rho_nf.mat - 0.25 * Mat4::Identity()).cwiseAbs().maxCoeff() <
          1e-8);
}

TEST_CASE("family state lands on a valid Bell-diagonal form", "[normal-form]") {
    const DensityMatrix rho = [] {
        Vec4 v01 = Vec4::Zero();
        v01(1) = 1.0;
        return validate_density(
            Mat4(0.4 * proj(bell_ket(0)) + 0.6 * proj(v01)));
    }();
    const NormalFormResult nf = normal_form(rho);
    CHECK(bell_offdiag(nf.rho_nf.mat) < 1e-8);
    CHECK(marginal_dist(nf.rho_nf.mat) < 1e-9);
    CHECK(nf.fidelity_nf > 0.5);
    CHECK(nf.fidelity_nf ==
          Approx(0.5 * (1.0 + concurrence(nf.rho_nf))).margin(1e-9));
    CHECK(concurrence(nf.rho_nf) >= 0.4 - 1e-9);
    CHECK(nf.success_prob > 0.0);
    CHECK(nf.success_prob <= 1.0 + 1e-12);
    CHECK_FALSE(nf.separable);
}

TEST_CASE("normal form invariants on random entangled states",
          "[normal-form][property]") {
    Rng rng(814);
    for (int i = 0; i < 60; ++i) {
        const DensityMatrix rho = rng.entangled(4);
        const NormalFormResult nf = normal_form(rho);

        CHECK(bell_offdiag(nf.rho_nf.mat) < 1e-8);
        CHECK(marginal_dist(nf.rho_nf.mat) < 1e-8);
        CHECK(nf.bell_coefficients[0] >= nf.bell_coefficients[1]);
        CHECK(nf.bell_coefficients[1] >= nf.bell_coefficients[2]);
        CHECK(nf.bell_coefficients[2] >= nf.bell_coefficients[3]);
        CHECK(nf.fidelity_nf ==
              Approx(nf.bell_coefficients[0]).margin(1e-10));
        CHECK(nf.fidelity_nf > 0.5);

        // the accumulated filters reproduce the normal form
        const Mat4 ab = kron(nf.filter_A.mat, nf.filter_B.mat);
        Mat4 acc = ab * rho.mat * ab.adjoint();
        const double p = acc.trace().real();
        CHECK(nf.success_prob == Approx(p).margin(1e-10));
        acc /= p;
        CHECK((acc - nf.rho_nf.mat).cwiseAbs().maxCoeff() < 1e-8);

        // filters are admissible SLOCC elements
        CHECK(operator_norm(nf.filter_A.mat) <= 1.0 + 1e-10);
        CHECK(operator_norm(nf.filter_B.mat) <= 1.0 + 1e-10);

        CHECK(concurrence(nf.rho_nf) >= concurrence(rho) - 1e-9);
    }
}

TEST_CASE("normal form is idempotent", "[normal-form]") {
    Rng rng(303);
    for (int i = 0; i < 8; ++i) {
        const NormalFormResult nf = normal_form(rng.entangled(4));
        const NormalFormResult nf2 = normal_form(nf.rho_nf);
        CHECK((nf2.rho_nf.mat - nf.rho_nf.mat).cwiseAbs().maxCoeff() < 1e-7);
        CHECK(nf2.success_prob == Approx(1.0).margin(1e-7));
    }
}

TEST_CASE("bell_diagonalize wants equalized marginals", "[normal-form]") {
    // rho(0.4) has marginal diag(0.8, 0.2) on A: not in this routine's domain
    Vec4 v01 = Vec4::Zero();
    v01(1) = 1.0;
    const DensityMatrix biased = validate_density(
        Mat4(0.4 * proj(bell_ket(0)) + 0.6 * proj(v01)));
    REQUIRE_THROWS_AS(bell_diagonalize(biased), ValidationError);
    REQUIRE_NOTHROW(bell_diagonalize(werner(0.2)));
}

TEST_CASE("bell_diagonalize recovers scrambled Bell weights", "[normal-form]") {
    Rng rng(55);
    const double w[4] = {0.45, 0.30, 0.15, 0.10};
    Mat4 bd = Mat4::Zero();
    for (int k = 0; k < 4; ++k) bd += w[k] * proj(bell_ket(k));
    for (int i = 0; i < 10; ++i) {
        const Mat4 uv = kron(rng.su2(), rng.su2());
        const DensityMatrix scr =
            validate_density(Mat4(uv * bd * uv.adjoint()), 1e-8);
        const BellDiagResult r = bell_diagonalize(scr);
        CHECK(bell_offdiag(r.rho_bd.mat) < 1e-9);
        for (int k = 0; k < 4; ++k)
            CHECK(r.coeffs[k] == Approx(w[k]).margin(1e-9));
        // the lift really is the map that Bell-diagonalizes the input
        const Mat4 lift = kron(r.U, r.V);
        CHECK((lift * scr.mat * lift.adjoint() - r.rho_bd.mat)
                  .cwiseAbs()
                  .maxCoeff() < 1e-9);
    }
}
