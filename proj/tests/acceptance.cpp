// Acceptance gate for the optimal-teleportation library. Each numbered
// criterion prints exactly one PASS/FAIL line with the measured extreme; the
// process exit code is the number of failed criteria. Tolerances are pinned
// here on purpose -- do not silently relax them.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "qteleport/fstar.hpp"
#include "qteleport/measures.hpp"
#include "qteleport/normal_form.hpp"
#include "qteleport/qmat.hpp"
#include "qteleport/random_states.hpp"
#include "qteleport/teleport.hpp"

using namespace qtel;

namespace {

int g_failures = 0;

// Criterion 10 is a side condition on every program solved while running the
// other criteria: the unenforced bound X^Gamma >= -I/2 must hold anyway.
double g_min_auto_margin = 1e300;
long g_solve_count = 0;

FstarSolution solve(const DensityMatrix& rho) {
    FstarSolution s = solve_primal(rho);
    g_min_auto_margin = std::min(g_min_auto_margin, s.auto_constraint_margin);
    ++g_solve_count;
    return s;
}

void report(int idx, bool pass, const std::string& detail) {
    std::printf("[%2d] %s  %s\n", idx, pass ? "PASS" : "FAIL",
                detail.c_str());
    if (!pass) ++g_failures;
}

template <typename Fn>
void criterion(int idx, Fn body) {
    try {
        auto [pass, detail] = body();
        report(idx, pass, detail);
    } catch (const std::exception& e) {
        report(idx, false, std::string("exception: ") + e.what());
    }
}

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

double lambda_min_pt(const DensityMatrix& rho) {
    return herm_eig(partial_transpose_B(rho.mat)).w(0);
}

// Both evaluations of the protocol cost, written out independently of the
// library's own cross-check.
double k_direct(const DensityMatrix& rho, const Mat2& a, const Mat2& b) {
    const Mat4 ab = kron(a, b);
    const Mat4 s = ab * rho.mat * ab.adjoint();
    const double p = s.trace().real();
    return (bell_ket(0).adjoint() * s * bell_ket(0))(0).real() +
           0.5 * (1.0 - p);
}

double k_via_pt(const DensityMatrix& rho, const Mat2& a, const Mat2& b) {
    const Mat2 c = b.adjoint() * pauli(2) * a;
    const Mat4 ci = kron(c, Mat2::Identity());
    const Mat4 g = partial_transpose_B(rho.mat);
    return 0.5 - (bell_ket(0).adjoint() * ci * g * ci.adjoint() *
                  bell_ket(0))(0)
                     .real();
}

Mat4 bell_basis() {
    Mat4 b;
    for (int k = 0; k < 4; ++k) b.col(k) = bell_ket(k);
    return b;
}

// ---- criteria ----

std::pair<bool, std::string> c1_family_line() {
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    for (int k = 0; k <= 12; ++k) {
        const double F = 0.35 + 0.05 * k;
        const double expect =
            F < 2.0 / 3.0 ? 0.5 * (1.0 + F * F / (4.0 * (1.0 - F))) : F;
        const FstarSolution s = solve(family_state(F));
        worst = std::max(worst, std::abs(s.fstar - expect));
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    const bool ok = worst < 1e-6 && secs < 10.0;
    return {ok, "family closed form, 13 points: max |err| = " + num(worst) +
                    ", " + num(secs) + " s"};
}

std::pair<bool, std::string> c2_filter_shape() {
    double worst = 0.0;
    for (int k = 0; k <= 6; ++k) {
        const double F = 0.35 + 0.05 * k;  // inside (1/3, 2/3)
        const FstarSolution s = solve(family_state(F));
        // scale/phase normalization: divide by the (1,1) entry, which the
        // target matrix diag(F/(2(1-F)), 1) makes its largest
        const cplx pivot = s.filter_A.mat(1, 1);
        if (std::abs(pivot) < 1e-12)
            return {false, "filter pivot vanished at F = " + num(F)};
        const Mat2 a = s.filter_A.mat / pivot;
        const double d00 = F / (2.0 * (1.0 - F));
        worst = std::max(worst, std::abs(a(0, 0) - d00) / d00);
        worst = std::max(worst, std::abs(a(1, 1) - 1.0));
        worst = std::max(worst, std::abs(a(0, 1)));
        worst = std::max(worst, std::abs(a(1, 0)));
    }
    return {worst < 1e-4,
            "filter vs diag(F/(2(1-F)), 1): max rel err = " + num(worst)};
}

std::pair<bool, std::string> c3_strong_duality() {
    Rng rng(12345);
    double worst_gap = 0.0, worst_feas = 1e300;
    for (int i = 0; i < 100; ++i) {
        const DensityMatrix rho = rng.density(4);
        const FstarSolution p = solve(rho);
        const DualSolution d = solve_dual(rho);
        worst_gap = std::max(worst_gap, std::abs(p.fstar - d.g));
        worst_feas = std::min({worst_feas, p.feasibility_margin,
                               d.feasibility_margin});
    }
    const bool ok = worst_gap < 1e-6 && worst_feas > -1e-8;
    return {ok, "100 rank-4 states: max |primal-dual| = " + num(worst_gap) +
                    ", min feasibility margin = " + num(worst_feas)};
}

std::pair<bool, std::string> c4_dichotomy() {
    Rng rng(42);
    int npt = 0;
    double worst_npt = 1e300, worst_ppt = 0.0, closest = 1e300;
    for (int i = 0; i < 500; ++i) {
        const DensityMatrix rho = rng.density(1 + i % 4);
        const double lmin = lambda_min_pt(rho);
        closest = std::min(closest, std::abs(lmin));
        const FstarSolution s = solve(rho);
        if (lmin < -1e-11) {
            ++npt;
            worst_npt = std::min(worst_npt, s.fstar - 0.5);
        } else {
            worst_ppt = std::max(worst_ppt, std::abs(s.fstar - 0.5));
        }
    }
    const bool ok = worst_npt > 1e-7 && worst_ppt < 1e-7;
    return {ok, "500 states (" + std::to_string(npt) +
                    " NPT): min NPT excess = " + num(worst_npt) +
                    ", max PPT deviation = " + num(worst_ppt) +
                    ", closest PT eigenvalue " + num(closest)};
}

std::pair<bool, std::string> c5_bound_sandwich() {
    Rng rng(7);
    double worst_lo = 1e300, worst_hi = 1e300;
    for (int i = 0; i < 500; ++i) {
        const DensityMatrix rho = rng.entangled(1 + i % 4);
        const double n = negativity(rho);
        const double c = concurrence(rho);
        const double r = std::min(1.0, n / c);
        const double lower =
            0.5 * (1.0 + n / (1.0 + std::sqrt(std::max(0.0, 1.0 - r * r))));
        const double upper = 0.5 * (1.0 + n);
        const FstarSolution s = solve(rho);
        worst_lo = std::min(worst_lo, s.fstar - lower);
        worst_hi = std::min(worst_hi, upper - s.fstar);
    }
    const bool ok = worst_lo > -1e-7 && worst_hi > -1e-7;
    return {ok, "500 entangled states: min slack lower = " + num(worst_lo) +
                    ", upper = " + num(worst_hi)};
}

std::pair<bool, std::string> c6_filter_oracle() {
    Rng rng(99);
    double worst_reach = 1e300, worst_excess = -1e300;
    for (int i = 0; i < 25; ++i) {
        const DensityMatrix rho = rng.entangled(1 + i % 4);
        const FstarSolution s = solve(rho);
        const FilterSearch fs =
            max_k_over_filters(rho, 100000, 99u + static_cast<unsigned>(i));
        worst_reach = std::min(worst_reach, fs.best_k - (s.fstar - 1e-3));
        worst_excess = std::max(worst_excess, fs.best_k - s.fstar);
    }
    const bool ok = worst_reach >= 0.0 && worst_excess <= 1e-8;
    return {ok, "25 states x 1e5 filters: min margin above F*-1e-3 = " +
                    num(worst_reach) +
                    ", max excess over F* = " + num(worst_excess)};
}

std::pair<bool, std::string> c7_cost_identity() {
    Rng rng(5);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const DensityMatrix rho = rng.density(1 + i % 4);
        const Mat2 a = rng.filter().mat;
        const Mat2 b = rng.filter().mat;
        worst = std::max(worst,
                         std::abs(k_direct(rho, a, b) - k_via_pt(rho, a, b)));
        k_cost(rho, LocalOperator{a}, LocalOperator{b});  // throws on drift
    }
    return {worst < 1e-10,
            "1e4 random (rho, A, B): max |K_op - K_pt| = " + num(worst)};
}

std::pair<bool, std::string> c8_teleport_identity() {
    Rng rng(314);
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
        const DensityMatrix rho = rng.density(1 + i % 4);
        const double f = singlet_fraction(rho).first;
        const double av = average_fidelity(lu_align(rho).rho_aligned);
        worst = std::max(worst, std::abs(av - (2.0 * f + 1.0) / 3.0));
    }
    const double bell_f =
        average_fidelity(validate_density(proj(bell_ket(0))));
    const double mixed_f = average_fidelity(
        validate_density(Mat4(0.25 * Mat4::Identity())));
    const double locc_f =
        bloch_image(family_state(0.4), Preprocessing::LOCC, 8, 0)
            .avg_fidelity;
    const bool ok = worst < 1e-9 && std::abs(bell_f - 1.0) < 1e-12 &&
                    std::abs(mixed_f - 0.5) < 1e-12 &&
                    std::abs(locc_f - 31.0 / 45.0) < 1e-6;
    return {ok, "200 aligned states: max |f - (2F+1)/3| = " + num(worst) +
                    "; Bell " + num(bell_f) + ", I/4 " + num(mixed_f) +
                    ", LOCC family " + num(locc_f) + " (31/45 = " +
                    num(31.0 / 45.0) + ")"};
}

std::pair<bool, std::string> c9_normal_form() {
    Rng rng(11);
    const Mat4 bb = bell_basis();
    double worst_off = 0.0, worst_marg = 0.0, worst_fid = 0.0;
    double worst_above = 1e300, worst_mono = 1e300;
    for (int i = 0; i < 200; ++i) {
        const DensityMatrix rho = rng.entangled(4);
        const NormalFormResult nf = normal_form(rho);
        const Mat4 in_bell = bb.adjoint() * nf.rho_nf.mat * bb;
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c)
                if (r != c)
                    worst_off =
                        std::max(worst_off, std::abs(in_bell(r, c)));
        const Mat2 half = 0.5 * Mat2::Identity();
        worst_marg = std::max(
            {worst_marg,
             (partial_trace_B(nf.rho_nf.mat) - half).cwiseAbs().maxCoeff(),
             (partial_trace_A(nf.rho_nf.mat) - half).cwiseAbs().maxCoeff()});
        const double c_nf = concurrence(nf.rho_nf);
        worst_fid = std::max(worst_fid,
                             std::abs(nf.fidelity_nf - 0.5 * (1.0 + c_nf)));
        worst_above = std::min(worst_above, nf.fidelity_nf - 0.5);
        worst_mono = std::min(worst_mono, c_nf - concurrence(rho));
    }
    const bool ok = worst_off < 1e-8 && worst_marg < 1e-8 &&
                    worst_fid < 1e-8 && worst_above > 0.0 &&
                    worst_mono > -1e-9;
    return {ok, "200 entangled full-rank states: off-diag " + num(worst_off) +
                    ", marginals " + num(worst_marg) + ", |F-(1+C)/2| " +
                    num(worst_fid) + ", min F-1/2 = " + num(worst_above) +
                    ", min dC = " + num(worst_mono)};
}

std::pair<bool, std::string> c10_auto_constraint() {
    const bool ok = g_solve_count > 0 && g_min_auto_margin > -1e-8;
    return {ok, "min (lambda_min(X^Gamma) + 1/2) over " +
                    std::to_string(g_solve_count) +
                    " solves = " + num(g_min_auto_margin)};
}

}  // namespace

int main() {
    criterion(1, c1_family_line);
    criterion(2, c2_filter_shape);
    criterion(3, c3_strong_duality);
    criterion(4, c4_dichotomy);
    criterion(5, c5_bound_sandwich);
    criterion(6, c6_filter_oracle);
    criterion(7, c7_cost_identity);
    criterion(8, c8_teleport_identity);
    criterion(9, c9_normal_form);
    criterion(10, c10_auto_constraint);
    std::printf("%s: %d/10 criteria passed\n",
                g_failures == 0 ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL",
                10 - g_failures);
    return g_failures;
}
