#include "qteleport/fstar.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "qteleport/measures.hpp"
#include "qteleport/qmat.hpp"

namespace qtel {

namespace {

using Vec16 = Eigen::Matrix<double, 16, 1>;
using Mat16 = Eigen::Matrix<double, 16, 16>;

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kIpmTol = 1e-10;  // internal complementarity target
constexpr double kBarrierMu = 10.0;

// Orthonormal Hermitian basis B_k = (sigma_i x sigma_j)/2, k = 4i + j, with
// <B_k, B_l> = delta_kl. Real coordinates in this basis turn the matrix
// program into a 16-variable barrier problem; partial transpose on B is the
// diagonal sign map B_k^Gamma = gsign_k B_k (only sigma_y flips).
const std::array<Mat4, 16>& basis() {
    static const std::array<Mat4, 16> b = [] {
        std::array<Mat4, 16> out;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                out[4 * i + j] = 0.5 * kron(pauli(i), pauli(j));
        return out;
    }();
    return b;
}

const Vec16& gsign() {
    static const Vec16 g = [] {
        Vec16 out;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) out(4 * i + j) = (j == 2) ? -1.0 : 1.0;
        return out;
    }();
    return g;
}

Vec16 to_vec(const Mat4& h) {
    Vec16 x;
    for (int k = 0; k < 16; ++k) x(k) = (basis()[k] * h).trace().real();
    return x;
}

Mat4 to_mat(const Vec16& x) {
    Mat4 h = Mat4::Zero();
    for (int k = 0; k < 16; ++k) h += x(k) * basis()[k];
    return h;
}

// One log-det barrier block M_b(x); dM_b/dx_k = svec_k * B_k.
struct Block {
    std::function<Mat4(const Vec16&)> eval;
    Vec16 svec;
};

struct BarrierProblem {
    Vec16 c;
    std::vector<Block> blocks;

    double phi(const Vec16& x) const {
        double out = 0.0;
        for (const auto& b : blocks) {
            Eigen::LLT<Mat4> llt(b.eval(x));
            if (llt.info() != Eigen::Success) return kInf;
            for (int d = 0; d < 4; ++d)
                out -= 2.0 * std::log(llt.matrixL()(d, d).real());
        }
        return out;
    }

    void grad_hess(const Vec16& x, Vec16& g, Mat16& h) const {
        g.setZero();
        h.setZero();
        for (const auto& b : blocks) {
            const Mat4 m = b.eval(x);
            Eigen::LLT<Mat4> llt(m);
            const Mat4 minv = llt.solve(Mat4::Identity());
            std::array<Mat4, 16> tb;
            for (int k = 0; k < 16; ++k) {
                tb[k] = minv * basis()[k];
                g(k) -= b.svec(k) * tb[k].trace().real();
            }
            for (int k = 0; k < 16; ++k) {
                const Mat4 tkmi = tb[k] * minv;
                for (int l = k; l < 16; ++l) {
                    // trace(tkmi * B_l) without forming the product
                    const double v =
                        b.svec(k) * b.svec(l) *
                        (tkmi.array() * basis()[l].transpose().array()).sum().real();
                    h(k, l) += v;
                    if (l != k) h(l, k) += v;
                }
            }
        }
    }
};

struct CenterResult {
    Vec16 x;
    double decrement;
    int steps;
};

// Damped Newton centering of t*c.x + phi(x). Full steps inside the quadratic
// basin; outside it, backtracking on the merit shift
//    t*(c.dx)*s + phi(x + s dx) - phi(x)
// which stays well conditioned at large t where the plain merit loses the
// decrement to rounding in t*c.x.
CenterResult newton_center(const BarrierProblem& prob, Vec16 x, double t,
                           double dec_tol = 1e-10, int max_nt = 80) {
    double dec_prev = kInf;
    double dec = 0.0;
    Vec16 g;
    Mat16 h;
    int steps = 0;
    for (; steps < max_nt; ++steps) {
        prob.grad_hess(x, g, h);
        const Vec16 gt = t * prob.c + g;
        Vec16 dx = h.ldlt().solve(-gt);
        if (!dx.allFinite())
            dx = h.completeOrthogonalDecomposition().solve(-gt);
        const double lam2 = std::max(-gt.dot(dx), 0.0);
        dec = std::sqrt(lam2);
        if (dec <= dec_tol) return {x, dec, steps};
        if (dec < 0.25) {
            const Vec16 xn = x + dx;
            if (std::isfinite(prob.phi(xn))) {
                // stalled full steps at the rounding floor: accept and leave
                if (dec > 0.5 * dec_prev && dec < 1e-7) return {xn, dec, steps + 1};
                x = xn;
                dec_prev = dec;
                continue;
            }
        }
        const double phi0 = prob.phi(x);
        const double cdx = prob.c.dot(dx);
        double s = 1.0;
        bool moved = false;
        while (s > 1e-16) {
            const Vec16 xn = x + s * dx;
            const double dfn = t * cdx * s + (prob.phi(xn) - phi0);
            if (std::isfinite(dfn) && dfn < -0.25 * s * lam2) {
                x = xn;
                moved = true;
                break;
            }
            s *= 0.5;
        }
        if (!moved) return {x, dec, steps + 1};
        dec_prev = dec;
    }
    return {x, dec, steps};
}

struct CoreResult {
    Vec16 x;
    int steps;
};

// nu = total barrier dimension: 12 for the primal (3 blocks), 8 for the dual.
CoreResult barrier_solve(const BarrierProblem& prob, Vec16 x, double nu) {
    int steps = 0;
    double t = 1.0;
    while (nu / t > kIpmTol) {
        auto c = newton_center(prob, x, t);
        x = c.x;
        steps += c.steps;
        t *= kBarrierMu;
    }
    auto c = newton_center(prob, x, t);
    return {c.x, steps + c.steps};
}

BarrierProblem primal_problem(const Mat4& rho_gamma) {
    BarrierProblem p;
    p.c = to_vec(rho_gamma);  // minimize Tr(X rho^Gamma)
    const Vec16 ones = Vec16::Ones();
    p.blocks.push_back({[](const Vec16& x) { return to_mat(x); }, ones});
    p.blocks.push_back(
        {[](const Vec16& x) { return Mat4(Mat4::Identity() - to_mat(x)); }, -ones});
    p.blocks.push_back({[](const Vec16& x) {
                            return Mat4(0.5 * Mat4::Identity() -
                                        to_mat(gsign().cwiseProduct(x)));
                        },
                        -gsign()});
    return p;
}

BarrierProblem dual_problem(const Mat4& rho_gamma) {
    BarrierProblem p;
    p.c = to_vec(Mat4::Identity()) / 2.0;  // minimize Tr(Z)/2
    p.blocks.push_back({[](const Vec16& z) { return to_mat(z); }, Vec16::Ones()});
    p.blocks.push_back({[rho_gamma](const Vec16& z) {
                            return Mat4(rho_gamma +
                                        to_mat(gsign().cwiseProduct(z)));
                        },
                        gsign()});
    return p;
}

CoreResult primal_core(const Mat4& rho_gamma) {
    return barrier_solve(primal_problem(rho_gamma),
                         to_vec(Mat4(Mat4::Identity() / 4.0)), 12.0);
}

CoreResult dual_core(const Mat4& rho_gamma) {
    return barrier_solve(dual_problem(rho_gamma), to_vec(Mat4::Identity()), 8.0);
}

// Strict-feasibility projection before certification: blend toward a deep
// interior anchor until every eigenvalue margin is nonnegative.
struct ProjectedPrimal {
    Mat4 x;
    double margin;
    double auto_margin;
};

ProjectedPrimal project_primal(Mat4 x) {
    auto margins = [](const Mat4& m) {
        const Mat4 mg = partial_transpose_B(m);
        Eigen::SelfAdjointEigenSolver<Mat4> ex(m), eg(mg);
        const double lo = ex.eigenvalues()(0), hi = ex.eigenvalues()(3);
        const double glo = eg.eigenvalues()(0), ghi = eg.eigenvalues()(3);
        return std::array<double, 4>{lo, 1.0 - hi, 0.5 - ghi, glo + 0.5};
    };
    auto m = margins(x);
    const double viol =
        std::max({0.0, -m[0], -m[1], -m[2]});  // enforced blocks only
    if (viol > 0.0) {
        // anchor I/4 has margin 1/4 in every enforced block
        const double alpha = std::min(1.0, (4.0 * viol) / (1.0 + 4.0 * viol) *
                                               (1.0 + 1e-3) + 1e-15);
        x = ((1.0 - alpha) * x + alpha * 0.25 * Mat4::Identity()).eval();
        m = margins(x);
    }
    return {x, std::min({m[0], m[1], m[2]}), m[3]};
}

struct ProjectedDual {
    Mat4 z;
    double margin;
};

ProjectedDual project_dual(Mat4 z, const Mat4& rho_gamma) {
    auto margins = [&rho_gamma](const Mat4& m) {
        Eigen::SelfAdjointEigenSolver<Mat4> ez(m);
        Eigen::SelfAdjointEigenSolver<Mat4> ep(
            Mat4(rho_gamma + partial_transpose_B(m)));
        return std::array<double, 2>{ez.eigenvalues()(0), ep.eigenvalues()(0)};
    };
    auto m = margins(z);
    const double viol = std::max({0.0, -m[0], -m[1]});
    if (viol > 0.0) {
        // anchor Z = I: lambda_min(Z) = 1, lambda_min(rho^Gamma + I) >= 1/2
        const double alpha =
            std::min(1.0, viol / (0.5 + viol) * (1.0 + 1e-3) + 1e-15);
        z = ((1.0 - alpha) * z + alpha * Mat4::Identity()).eval();
        m = margins(z);
    }
    return {z, std::min(m[0], m[1])};
}

}  // namespace

FstarSolution solve_primal(const DensityMatrix& rho, double tol) {
    const Mat4 rg = partial_transpose_B(rho.mat);
    const CoreResult pr = primal_core(rg);
    const CoreResult du = dual_core(rg);

    const ProjectedPrimal px = project_primal(to_mat(pr.x));
    const ProjectedDual pz = project_dual(to_mat(du.x), rg);
    const double fstar = 0.5 - (px.x * rg).trace().real();
    const double g = 0.5 + 0.5 * pz.z.trace().real();
    const double gap = g - fstar;
    if (!(std::abs(gap) < tol))
        throw SolverError("duality gap " + std::to_string(gap) +
                          " above tolerance");

    FstarSolution out;
    out.fstar = fstar;
    out.x_opt = px.x;
    out.duality_gap = gap;
    out.iterations = pr.steps + du.steps;
    out.feasibility_margin = px.margin;
    out.auto_constraint_margin = px.auto_margin;

    Eig4 e = herm_eig(px.x);
    out.rank_gap = e.w(2);
    if (e.w(3) < 1e-8) {
        out.no_filter = true;
        out.filter_A = LocalOperator{Mat2::Identity()};
        out.filter_unitary = true;
    } else {
        out.no_filter = false;
        auto [a, resid] = extract_filter(px.x);
        (void)resid;
        out.filter_A = a;
        Eigen::JacobiSVD<Mat2> svd(a.mat);
        out.filter_unitary =
            svd.singularValues()(1) > (1.0 - 1e-6) * svd.singularValues()(0);
    }
    return out;
}

DualSolution solve_dual(const DensityMatrix& rho, double tol) {
    const Mat4 rg = partial_transpose_B(rho.mat);
    const CoreResult du = dual_core(rg);
    const CoreResult pr = primal_core(rg);

    const ProjectedDual pz = project_dual(to_mat(du.x), rg);
    const ProjectedPrimal px = project_primal(to_mat(pr.x));
    const double fstar = 0.5 - (px.x * rg).trace().real();
    const double g = 0.5 + 0.5 * pz.z.trace().real();
    if (!(std::abs(g - fstar) < tol))
        throw SolverError("duality gap " + std::to_string(g - fstar) +
                          " above tolerance");

    DualSolution out;
    out.g = g;
    out.z = pz.z;
    out.iterations = du.steps + pr.steps;
    out.feasibility_margin = pz.margin;
    const double trz = pz.z.trace().real();
    out.mixing_p = trz / (1.0 + trz);
    out.rho_z = (trz > 1e-12)
                    ? validate_density(Mat4(pz.z / trz), 1e-8)
                    : DensityMatrix{Mat4(0.25 * Mat4::Identity())};
    out.rho_mix = validate_density(Mat4((rho.mat + pz.z) / (1.0 + trz)), 1e-8);
    return out;
}

std::pair<LocalOperator, double> extract_filter(const Mat4& x_opt) {
    Eig4 e = herm_eig(x_opt);
    const double lam = e.w(3);
    if (lam < 1e-12)
        throw ValidationError("extract_filter: matrix is zero (no filter)");
    const Vec4 v = e.V.col(3);
    Mat2 c_dag;  // C^dag = sqrt(2 lambda) reshape_rowmajor(v)
    c_dag << v(0), v(1), v(2), v(3);
    c_dag *= std::sqrt(2.0 * lam);
    Mat2 a = pauli(2) * c_dag.adjoint();  // A = sigma_y C with B = I
    // phase normalization: largest-modulus entry real positive
    int bi = 0, bj = 0;
    double best = -1.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            if (std::abs(a(i, j)) > best) {
                best = std::abs(a(i, j));
                bi = i;
                bj = j;
            }
    if (best > 0.0) a *= std::conj(a(bi, bj)) / std::abs(a(bi, bj));
    a /= operator_norm(a);
    return {LocalOperator{a}, e.w(2)};
}

bool verify_rank_one(const Mat4& x_opt, double tol) {
    Eig4 e = herm_eig(x_opt);
    return e.w(2) < tol;
}

BoundsReport fstar_bounds(const DensityMatrix& rho) {
    Eig4 e = herm_eig(partial_transpose_B(rho.mat));
    const Vec4 v = e.V.col(0);
    BoundsReport out;
    out.v_minus = PureState{v};
    const Mat4 yy = kron(pauli(2), pauli(2));
    out.c_vminus = std::min(1.0, std::abs((v.transpose() * yy * v)(0)));

    const double n = 2.0 * std::max(0.0, -e.w(0));
    const double c = concurrence(rho);
    if (n <= 1e-10 || c <= 1e-10) {
        out.separable = true;
        out.lower = out.upper = out.intermediate = 0.5;
        return out;
    }
    out.separable = false;
    const double ratio = std::min(1.0, n / c);
    out.lower = 0.5 * (1.0 + n / (1.0 + std::sqrt(1.0 - ratio * ratio)));
    out.upper = 0.5 * (1.0 + n);
    out.intermediate =
        0.5 * (1.0 + n / (1.0 + std::sqrt(std::max(
                                    0.0, 1.0 - out.c_vminus * out.c_vminus))));
    return out;
}

DensityMatrix family_state(double F) {
    if (F < 1.0 / 3.0 - 1e-12 || F > 1.0 + 1e-12)
        throw ValidationError("family parameter outside [1/3, 1]");
    Vec4 v01 = Vec4::Zero();
    v01(1) = 1.0;
    const Mat4 m = F * proj(bell_ket(0)) + (1.0 - F) * proj(v01);
    return validate_density(m);
}

double family_fstar(double F) {
    if (F < 1.0 / 3.0 - 1e-12 || F > 1.0 + 1e-12)
        throw ValidationError("family parameter outside [1/3, 1]");
    if (F >= 2.0 / 3.0) return F;
    return 0.5 * (1.0 + F * F / (4.0 * (1.0 - F)));
}

FamilyFilter family_filter(double F) {
    if (F < 1.0 / 3.0 - 1e-12 || F > 1.0 + 1e-12)
        throw ValidationError("family parameter outside [1/3, 1]");
    if (F >= 2.0 / 3.0) return {LocalOperator{Mat2::Identity()}, true};
    Mat2 a = Mat2::Zero();
    a(0, 0) = F / (2.0 * (1.0 - F));
    a(1, 1) = 1.0;
    return {LocalOperator{a}, false};
}

}  // namespace qtel
