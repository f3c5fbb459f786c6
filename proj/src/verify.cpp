#include "qteleport/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "qteleport/fstar.hpp"
#include "qteleport/measures.hpp"
#include "qteleport/normal_form.hpp"
#include "qteleport/qmat.hpp"
#include "qteleport/random_states.hpp"
#include "qteleport/state_io.hpp"
#include "qteleport/teleport.hpp"
#include "qteleport/types.hpp"

namespace qtel {

namespace {

std::string sci(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

struct Session {
    Rng rng;
    VerifyReport* report;

    Session(unsigned seed, VerifyReport* r) : rng(seed), report(r) {}

    void capture(const DensityMatrix& rho) {
        if (report->failing_state_json.empty())
            report->failing_state_json = state_to_json(rho);
    }
};

// worst-case accumulator: check passes iff max observed <= bound
struct Worst {
    double value = -std::numeric_limits<double>::infinity();
    void note(double x) { value = std::max(value, x); }
    bool ok(double bound) const { return value <= bound; }
};

CheckResult result(const std::string& name, const Worst& w, double bound) {
    return {name, w.ok(bound),
            "worst " + sci(w.value) + " vs bound " + sci(bound)};
}

double psi_plus_overlap(const Mat4& m) {
    const Vec4 psi = bell_ket(0);
    return (psi.adjoint() * m * psi)(0).real();
}

Mat4 bell_basis_matrix() {
    Mat4 b;
    for (int k = 0; k < 4; ++k) b.col(k) = bell_ket(k);
    return b;
}

DensityMatrix random_bell_diagonal(Rng& rng, bool force_entangled) {
    double w[4];
    if (force_entangled) {
        w[0] = 0.502 + 0.49 * rng.uniform();
        double rest[3], tot = 0.0;
        for (double& r : rest) {
            r = -std::log(std::max(rng.uniform(), 1e-300));
            tot += r;
        }
        for (int i = 0; i < 3; ++i) w[i + 1] = (1.0 - w[0]) * rest[i] / tot;
    } else {
        double tot = 0.0;
        for (double& r : w) {
            r = -std::log(std::max(rng.uniform(), 1e-300));
            tot += r;
        }
        for (double& r : w) r /= tot;
    }
    Mat4 m = Mat4::Zero();
    for (int k = 0; k < 4; ++k) m += w[k] * proj(bell_ket(k));
    return validate_density(m);
}

DensityMatrix random_product_mixture(Rng& rng, int terms) {
    Mat4 m = Mat4::Zero();
    double w[4], tot = 0.0;
    for (int t = 0; t < terms; ++t) {
        w[t] = -std::log(std::max(rng.uniform(), 1e-300));
        tot += w[t];
    }
    for (int t = 0; t < terms; ++t) {
        Eigen::Vector2cd a, b;
        for (int i = 0; i < 2; ++i) {
            a(i) = rng.cnormal();
            b(i) = rng.cnormal();
        }
        a.normalize();
        b.normalize();
        m += (w[t] / tot) * kron(Mat2(a * a.adjoint()), Mat2(b * b.adjoint()));
    }
    return validate_density(m);
}

DensityMatrix random_separable(Rng& rng) {
    for (int t = 0; t < 10000; ++t) {
        DensityMatrix rho = rng.density(4);
        if (!is_entangled(rho)) return rho;
    }
    throw SolverError("verify: could not sample a separable state");
}

// ---- qmat ----

void check_qmat(Session& s, int n, VerifyReport& rep) {
    Worst pt_resid, eig_sum, magic_neg;
    int worst_negcount = 0;
    for (int i = 0; i < n; ++i) {
        const DensityMatrix rho = s.rng.density(1 + i % 4);
        const Mat4 g = partial_transpose_B(rho.mat);
        pt_resid.note((partial_transpose_B(g) - rho.mat).cwiseAbs().maxCoeff());
        pt_resid.note((g - g.adjoint()).cwiseAbs().maxCoeff());
        pt_resid.note(std::abs(g.trace().real() - 1.0));
        const Eig4 e = herm_eig(g);
        eig_sum.note(std::abs(e.w.sum() - 1.0));
        int neg = 0;
        for (int k = 0; k < 4; ++k)
            if (e.w(k) < -1e-10) ++neg;
        worst_negcount = std::max(worst_negcount, neg);
        if (neg > 1) s.capture(rho);
        Eigen::Matrix4d re = magic_transform(rho.mat).real();
        re = 0.5 * (re + re.transpose()).eval();
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(re);
        magic_neg.note(-es.eigenvalues()(0));
        if (!pt_resid.ok(1e-12) || !eig_sum.ok(1e-12) || !magic_neg.ok(1e-12))
            s.capture(rho);
    }
    rep.checks.push_back(
        result("qmat.partial-transpose-involution", pt_resid, 1e-12));
    rep.checks.push_back(result("qmat.gamma-trace-preserved", eig_sum, 1e-12));
    rep.checks.push_back({"qmat.gamma-negative-eigencount", worst_negcount <= 1,
                          "worst count " + std::to_string(worst_negcount) +
                              " vs bound 1"});
    rep.checks.push_back(result("qmat.magic-real-part-psd", magic_neg, 1e-12));
}

// ---- measures ----

void check_measures(Session& s, int n, VerifyReport& rep) {
    Worst f_vs_c, f_vs_n, iff_gap;
    for (int i = 0; i < n; ++i) {
        const DensityMatrix rho = s.rng.density(1 + i % 4);
        const MeasureReport r = analyze(rho);
        f_vs_c.note(r.singlet_fraction - 0.5 * (1.0 + r.concurrence));
        f_vs_n.note(r.singlet_fraction - 0.5 * (1.0 + r.negativity));
        // C and N vanish together: a clear signal in one implies the other
        if (r.negativity > 1e-8 && r.concurrence <= 0.0) iff_gap.note(1.0);
        if (r.concurrence > 1e-8 && !r.entangled) iff_gap.note(1.0);
        if (!r.entangled && !r.near_boundary && r.negativity > 1e-10)
            iff_gap.note(r.negativity);
        if (!f_vs_c.ok(1e-9) || !f_vs_n.ok(1e-9) || !iff_gap.ok(0.0))
            s.capture(rho);
    }
    rep.checks.push_back(result("measures.f-le-half-1-plus-c", f_vs_c, 1e-9));
    rep.checks.push_back(result("measures.f-le-half-1-plus-n", f_vs_n, 1e-9));
    rep.checks.push_back(
        result("measures.entanglement-iff-consistency", iff_gap, 0.0));

    Worst bd_eq;
    for (int i = 0; i < n / 2 + 1; ++i) {
        const DensityMatrix rho = random_bell_diagonal(s.rng, true);
        const MeasureReport r = analyze(rho);
        bd_eq.note(
            std::abs(r.singlet_fraction - 0.5 * (1.0 + r.concurrence)));
        if (!bd_eq.ok(1e-9)) s.capture(rho);
    }
    rep.checks.push_back(
        result("measures.bell-diagonal-equality", bd_eq, 1e-9));

    Worst lu_drift;
    for (int i = 0; i < n / 2 + 1; ++i) {
        const DensityMatrix rho = s.rng.density(4);
        const Mat4 uv = kron(s.rng.su2(), s.rng.su2());
        const DensityMatrix rho2 =
            validate_density(Mat4(uv * rho.mat * uv.adjoint()), 1e-8);
        const MeasureReport a = analyze(rho), b = analyze(rho2);
        lu_drift.note(std::abs(a.singlet_fraction - b.singlet_fraction));
        lu_drift.note(std::abs(a.concurrence - b.concurrence));
        lu_drift.note(std::abs(a.negativity - b.negativity));
        if (!lu_drift.ok(1e-9)) s.capture(rho);
    }
    rep.checks.push_back(
        result("measures.local-unitary-invariance", lu_drift, 1e-9));

    Worst prod;
    for (int i = 0; i < n / 2 + 1; ++i) {
        const DensityMatrix rho = random_product_mixture(s.rng, 1 + i % 4);
        const MeasureReport r = analyze(rho);
        prod.note(r.concurrence);
        prod.note(r.negativity);
        if (r.entangled) prod.note(1.0);
        if (!prod.ok(1e-9)) s.capture(rho);
    }
    rep.checks.push_back(
        result("measures.product-mixtures-unentangled", prod, 1e-9));
}

// ---- normal form ----

void check_normal_form(Session& s, int n, VerifyReport& rep) {
    const Mat4 bb = bell_basis_matrix();
    Worst offdiag, marg, fid_eq, fid_above_half, filt, cmono, idem;
    for (int i = 0; i < n / 2 + 1; ++i) {
        const DensityMatrix rho = s.rng.entangled(4);
        const NormalFormResult nf = normal_form(rho);
        const Mat4 in_bell = bb.adjoint() * nf.rho_nf.mat * bb;
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c)
                if (r != c) offdiag.note(std::abs(in_bell(r, c)));
        marg.note((partial_trace_A(nf.rho_nf.mat) - 0.5 * Mat2::Identity())
                      .cwiseAbs()
                      .maxCoeff());
        marg.note((partial_trace_B(nf.rho_nf.mat) - 0.5 * Mat2::Identity())
                      .cwiseAbs()
                      .maxCoeff());
        const double c_nf = concurrence(nf.rho_nf);
        fid_eq.note(std::abs(nf.fidelity_nf - 0.5 * (1.0 + c_nf)));
        fid_eq.note(std::abs(nf.fidelity_nf - psi_plus_overlap(nf.rho_nf.mat)));
        fid_above_half.note(0.5 - nf.fidelity_nf);  // must stay < 0
        const Mat4 ab = kron(nf.filter_A.mat, nf.filter_B.mat);
        Mat4 acc = ab * rho.mat * ab.adjoint();
        acc /= acc.trace().real();
        filt.note((acc - nf.rho_nf.mat).cwiseAbs().maxCoeff());
        cmono.note(concurrence(rho) - c_nf);  // must stay <= 1e-9
        if (nf.separable) fid_above_half.note(1.0);
        if (i % 8 == 0) {
            const NormalFormResult nf2 = normal_form(nf.rho_nf);
            idem.note((nf2.rho_nf.mat - nf.rho_nf.mat).cwiseAbs().maxCoeff());
        }
        if (!offdiag.ok(1e-8) || !marg.ok(1e-8) || !fid_eq.ok(1e-8) ||
            !fid_above_half.ok(-1e-12) || !filt.ok(1e-8) || !cmono.ok(1e-9) ||
            !idem.ok(1e-7))
            s.capture(rho);
    }
    rep.checks.push_back(
        result("normal-form.bell-diagonal-residual", offdiag, 1e-8));
    rep.checks.push_back(
        result("normal-form.maximally-mixed-marginals", marg, 1e-8));
    rep.checks.push_back(
        result("normal-form.fidelity-identity", fid_eq, 1e-8));
    rep.checks.push_back(result("normal-form.entangled-fidelity-above-half",
                                fid_above_half, -1e-12));
    rep.checks.push_back(
        result("normal-form.filter-accumulation", filt, 1e-8));
    rep.checks.push_back(
        result("normal-form.concurrence-monotone", cmono, 1e-9));
    rep.checks.push_back(result("normal-form.idempotence", idem, 1e-7));

    Worst sep_flag;
    for (int i = 0; i < n / 8 + 1; ++i) {
        const DensityMatrix rho = random_separable(s.rng);
        try {
            const NormalFormResult nf = normal_form(rho);
            if (!nf.separable || is_entangled(nf.rho_nf)) {
                sep_flag.note(1.0);
                s.capture(rho);
            }
        } catch (const DegenerateNormalForm&) {
            // rank-deficient marginal during iteration: legitimate refusal
        }
    }
    rep.checks.push_back(
        result("normal-form.separable-iff", sep_flag, 0.0));
}

// ---- fstar ----

void check_fstar(Session& s, int n, VerifyReport& rep) {
    Worst gap, f_lb, dich, sandwich, feas, auto_m, cross;
    for (int i = 0; i < n / 2 + 1; ++i) {
        const DensityMatrix rho = s.rng.density(2 + i % 3);
        FstarSolution sol;
        try {
            sol = solve_primal(rho);
        } catch (const SolverError&) {
            gap.note(1.0);
            s.capture(rho);
            continue;
        }
        gap.note(std::abs(sol.duality_gap));
        f_lb.note(singlet_fraction(rho).first - sol.fstar);  // <= 1e-8
        feas.note(-sol.feasibility_margin);
        auto_m.note(-sol.auto_constraint_margin);
        const bool ent = is_entangled(rho);
        if (ent && sol.fstar <= 0.5 + 1e-7) dich.note(1.0);
        if (!ent && std::abs(sol.fstar - 0.5) > 1e-7)
            dich.note(std::abs(sol.fstar - 0.5));
        if (sol.fstar < 0.5 - 1e-10) dich.note(0.5 - sol.fstar);
        if (ent) {
            const BoundsReport b = fstar_bounds(rho);
            sandwich.note(b.lower - sol.fstar);
            sandwich.note(sol.fstar - b.upper);
        }
        if (i % 4 == 0) {
            const DualSolution d = solve_dual(rho);
            cross.note(std::abs(sol.fstar - d.g));
            feas.note(-d.feasibility_margin);
        }
        if (!gap.ok(1e-6) || !f_lb.ok(1e-8) || !dich.ok(0.0) ||
            !sandwich.ok(1e-7) || !feas.ok(1e-8) || !auto_m.ok(1e-8) ||
            !cross.ok(1e-6))
            s.capture(rho);
    }
    rep.checks.push_back(result("fstar.strong-duality-gap", gap, 1e-6));
    rep.checks.push_back(result("fstar.above-singlet-fraction", f_lb, 1e-8));
    rep.checks.push_back(result("fstar.entanglement-dichotomy", dich, 0.0));
    rep.checks.push_back(result("fstar.bound-sandwich", sandwich, 1e-7));
    rep.checks.push_back(result("fstar.certificate-feasibility", feas, 1e-8));
    rep.checks.push_back(
        result("fstar.automatic-constraint", auto_m, 1e-8));
    rep.checks.push_back(
        result("fstar.primal-dual-cross-check", cross, 1e-6));

    Worst fam;
    for (int k = 0; k <= 12; ++k) {
        const double F = 0.35 + 0.05 * k;
        const DensityMatrix rho = family_state(F);
        const FstarSolution sol = solve_primal(rho);
        fam.note(std::abs(sol.fstar - family_fstar(F)));
        if (!fam.ok(1e-6)) s.capture(rho);
    }
    rep.checks.push_back(result("fstar.family-closed-form", fam, 1e-6));

    Worst bd;
    for (int i = 0; i < 5; ++i) {
        const DensityMatrix rho = random_bell_diagonal(s.rng, true);
        const FstarSolution sol = solve_primal(rho);
        // entangled Bell-diagonal states saturate both sandwich bounds
        bd.note(std::abs(sol.fstar - singlet_fraction(rho).first));
        if (!bd.ok(1e-6)) s.capture(rho);
    }
    rep.checks.push_back(
        result("fstar.bell-diagonal-no-gain", bd, 1e-6));
}

void check_filter_oracle(Session& s, int n, VerifyReport& rep) {
    Worst above, below;
    const int states = std::max(3, n / 40);
    for (int i = 0; i < states; ++i) {
        const DensityMatrix rho = s.rng.entangled(2 + i % 3);
        const FstarSolution sol = solve_primal(rho);
        const FilterSearch fs = max_k_over_filters(
            rho, 20000, static_cast<unsigned>(1000 + 7 * i));
        above.note(fs.best_k - sol.fstar);   // never exceeds
        below.note(sol.fstar - fs.best_k);   // reaches within 1e-3
        if (!above.ok(1e-8) || !below.ok(1e-3)) s.capture(rho);
    }
    rep.checks.push_back(
        result("fstar.sampled-filters-never-exceed", above, 1e-8));
    rep.checks.push_back(
        result("fstar.sampled-filters-reach-optimum", below, 1e-3));
}

// ---- teleport ----

void check_teleport(Session& s, int n, VerifyReport& rep) {
    Worst master;
    const int triples = 50 * n;
    for (int i = 0; i < triples; ++i) {
        const DensityMatrix rho = s.rng.density(1 + i % 4);
        try {
            k_cost(rho, s.rng.filter(), s.rng.filter());
        } catch (const Error&) {
            master.note(1.0);
            s.capture(rho);
        }
    }
    // spot identities: identity filters give the psi+ overlap; a zero filter
    // forces the coin-flip value 1/2
    {
        const DensityMatrix rho = s.rng.density(4);
        const LocalOperator id{Mat2::Identity()}, zero{Mat2::Zero()};
        master.note(std::abs(k_cost(rho, id, id) - psi_plus_overlap(rho.mat)) -
                    1e-12);
        master.note(std::abs(k_cost(rho, zero, id) - 0.5) - 1e-14);
    }
    rep.checks.push_back(
        result("teleport.k-cost-master-convention", master, 0.0));

    Worst align, avg_id;
    for (int i = 0; i < n / 2 + 1; ++i) {
        const DensityMatrix rho = s.rng.density(1 + i % 4);
        const double f = singlet_fraction(rho).first;
        const LuAlignResult la = lu_align(rho);
        align.note(std::abs(psi_plus_overlap(la.rho_aligned.mat) - f));
        avg_id.note(std::abs(average_fidelity(la.rho_aligned) -
                             (2.0 * f + 1.0) / 3.0));
        if (!align.ok(1e-9) || !avg_id.ok(1e-9)) s.capture(rho);
    }
    rep.checks.push_back(result("teleport.lu-align-overlap", align, 1e-9));
    rep.checks.push_back(
        result("teleport.average-fidelity-identity", avg_id, 1e-9));

    Worst unital;
    for (int i = 0; i < n / 8 + 1; ++i) {
        const DensityMatrix rho = random_bell_diagonal(s.rng, false);
        unital.note(teleport_channel(rho).c.norm());
        if (!unital.ok(1e-9)) s.capture(rho);
    }
    rep.checks.push_back(
        result("teleport.unital-for-mixed-marginals", unital, 1e-9));

    Worst norms;
    for (int i = 0; i < 4; ++i) {
        const DensityMatrix rho = s.rng.density(4);
        const ChannelImage img =
            bloch_image(rho, Preprocessing::LU, 128, 17 + i);
        for (const auto& p : img.samples)
            norms.note(std::sqrt(p[3] * p[3] + p[4] * p[4] + p[5] * p[5]) -
                       1.0);
        if (!norms.ok(1e-9)) s.capture(rho);
    }
    rep.checks.push_back(
        result("teleport.bloch-outputs-inside-sphere", norms, 1e-9));

    Worst proto;
    for (int i = 0; i < n / 8 + 1; ++i) {
        const DensityMatrix rho = s.rng.entangled(4);
        const FstarSolution sol = solve_primal(rho);
        if (sol.no_filter) continue;
        const ProtocolOutcome po = build_protocol(rho, sol.filter_A);
        const auto [f, psi] = singlet_fraction(po.rho_f);
        const double ol = std::norm((po.chi.vec.adjoint() * psi.vec)(0));
        proto.note(std::abs(ol - 0.5));
        proto.note(std::abs(po.k_value -
                            k_cost(rho, sol.filter_A,
                                   LocalOperator{Mat2::Identity()})));
        proto.note(po.k_value - sol.fstar - 1e-8);  // protocol can't beat F*
        proto.note(sol.fstar - po.k_value - 1e-5);  // and optimal one attains
        if (!proto.ok(1e-9)) s.capture(rho);
    }
    rep.checks.push_back(
        result("teleport.protocol-consistency", proto, 1e-9));
}

// ---- io ----

void check_io(Session& s, int n, VerifyReport& rep) {
    Worst rt;
    for (int i = 0; i < n / 4 + 1; ++i) {
        const DensityMatrix rho = s.rng.density(1 + i % 4);
        const DensityMatrix back = parse_state_json(state_to_json(rho));
        rt.note((back.mat - rho.mat).cwiseAbs().maxCoeff());
        const MeasureReport a = analyze(rho), b = analyze(back);
        rt.note(std::abs(a.singlet_fraction - b.singlet_fraction));
        rt.note(std::abs(a.concurrence - b.concurrence));
        rt.note(std::abs(a.negativity - b.negativity));
        if (!rt.ok(1e-12)) s.capture(rho);
    }
    rep.checks.push_back(result("io.state-roundtrip", rt, 1e-12));
}

}  // namespace

VerifyReport run_verification(int n_states, unsigned seed) {
    if (n_states < 1) throw ValidationError("verify: n_states must be >= 1");
    VerifyReport rep;
    Session s(seed, &rep);

    using Fn = void (*)(Session&, int, VerifyReport&);
    const Fn suites[] = {check_qmat,   check_measures,      check_normal_form,
                         check_fstar,  check_filter_oracle, check_teleport,
                         check_io};
    for (Fn fn : suites) {
        try {
            fn(s, n_states, rep);
        } catch (const Error& e) {
            rep.checks.push_back(
                {"suite-exception", false, std::string(e.what())});
        }
    }
    for (const auto& c : rep.checks)
        if (!c.passed) rep.all_passed = false;
    return rep;
}

}  // namespace qtel
