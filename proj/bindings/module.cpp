// Python surface: thin dict-returning wrappers over the C++ library. Matrices
// cross the boundary as numpy arrays (complex128 for states and operators);
// every structured result becomes a plain dict so the module has no Python
// class of its own to version.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>

#include "qteleport/fstar.hpp"
#include "qteleport/measures.hpp"
#include "qteleport/normal_form.hpp"
#include "qteleport/qmat.hpp"
#include "qteleport/random_states.hpp"
#include "qteleport/state_io.hpp"
#include "qteleport/teleport.hpp"
#include "qteleport/verify.hpp"

namespace py = pybind11;
using namespace qtel;

namespace {

DensityMatrix as_state(const Mat4& m, double tol) {
    return validate_density(m, tol);
}

Preprocessing parse_mode(const std::string& mode) {
    if (mode == "LU") return Preprocessing::LU;
    if (mode == "LOCC") return Preprocessing::LOCC;
    if (mode == "SLOCC") return Preprocessing::SLOCC;
    throw ValidationError("unknown preprocessing mode '" + mode +
                          "' (expected LU, LOCC or SLOCC)");
}

py::dict measure_dict(const MeasureReport& r) {
    py::dict d;
    d["singlet_fraction"] = r.singlet_fraction;
    d["psi_max"] = Vec4(r.achieving_me_state.vec);
    d["concurrence"] = r.concurrence;
    d["negativity"] = r.negativity;
    d["entangled"] = r.entangled;
    d["near_boundary"] = r.near_boundary;
    d["teleport_fidelity"] = r.teleport_fidelity;
    return d;
}

py::dict fstar_dict(const FstarSolution& s) {
    py::dict d;
    d["fstar"] = s.fstar;
    d["fstar_fidelity"] = teleport_fidelity_from_F(s.fstar);
    d["x_opt"] = Mat4(s.x_opt);
    d["rank_gap"] = s.rank_gap;
    d["filter_a"] = Mat2(s.filter_A.mat);
    d["no_filter"] = s.no_filter;
    d["filter_unitary"] = s.filter_unitary;
    d["duality_gap"] = s.duality_gap;
    d["iterations"] = s.iterations;
    d["feasibility_margin"] = s.feasibility_margin;
    d["auto_constraint_margin"] = s.auto_constraint_margin;
    return d;
}

py::dict dual_dict(const DualSolution& s) {
    py::dict d;
    d["dual_value"] = s.g;
    d["z"] = Mat4(s.z);
    d["mixing_p"] = s.mixing_p;
    d["rho_z"] = Mat4(s.rho_z.mat);
    d["rho_mix"] = Mat4(s.rho_mix.mat);
    d["iterations"] = s.iterations;
    d["feasibility_margin"] = s.feasibility_margin;
    return d;
}

py::dict channel_dict(const ChannelImage& img) {
    py::dict d;
    d["m"] = Mat3r(img.m);
    d["c"] = Vec3r(img.c);
    d["avg_fidelity"] = img.avg_fidelity;
    Eigen::MatrixXd samples(static_cast<Eigen::Index>(img.samples.size()), 6);
    for (Eigen::Index i = 0; i < samples.rows(); ++i)
        for (int j = 0; j < 6; ++j) samples(i, j) = img.samples[i][j];
    d["samples"] = samples;
    return d;
}

}  // namespace

PYBIND11_MODULE(qteleport, m) {
    m.doc() = "Two-qubit entanglement measures, the optimal teleportation "
              "fidelity program with certificates, local-filtering normal "
              "forms and teleportation-channel simulation.";
    m.attr("__version__") = "1.0.0";

    // Base first so the specific translators below are tried before it.
    py::register_exception<Error>(m, "QtelError", PyExc_RuntimeError);
    py::register_exception<IoError>(m, "IoError", PyExc_RuntimeError);
    py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);
    py::register_exception<DegenerateNormalForm>(m, "DegenerateNormalForm",
                                                 PyExc_RuntimeError);
    py::register_exception<ValidationError>(m, "ValidationError",
                                            PyExc_ValueError);

    m.def(
        "analyze",
        [](const Mat4& rho, double tol) {
            return measure_dict(analyze(as_state(rho, tol)));
        },
        py::arg("rho"), py::arg("tol") = 1e-10,
        "All entanglement measures of a 4x4 density matrix as a dict.");

    m.def(
        "singlet_fraction",
        [](const Mat4& rho) {
            return singlet_fraction(as_state(rho, 1e-10)).first;
        },
        py::arg("rho"));
    m.def(
        "concurrence",
        [](const Mat4& rho) { return concurrence(as_state(rho, 1e-10)); },
        py::arg("rho"));
    m.def(
        "negativity",
        [](const Mat4& rho) { return negativity(as_state(rho, 1e-10)); },
        py::arg("rho"));

    m.def(
        "solve_fstar",
        [](const Mat4& rho, double tol) {
            return fstar_dict(solve_primal(as_state(rho, 1e-10), tol));
        },
        py::arg("rho"), py::arg("tol") = 1e-8,
        "Certified maximal singlet fraction over trace-preserving LOCC.");

    m.def(
        "solve_dual",
        [](const Mat4& rho, double tol) {
            return dual_dict(solve_dual(as_state(rho, 1e-10), tol));
        },
        py::arg("rho"), py::arg("tol") = 1e-8,
        "Robustness-side certificate: mixing weight and separable mixture.");

    m.def(
        "fstar_bounds",
        [](const Mat4& rho) {
            const BoundsReport b = fstar_bounds(as_state(rho, 1e-10));
            py::dict d;
            d["lower"] = b.lower;
            d["upper"] = b.upper;
            d["intermediate"] = b.intermediate;
            d["v_minus"] = Vec4(b.v_minus.vec);
            d["c_vminus"] = b.c_vminus;
            d["separable"] = b.separable;
            return d;
        },
        py::arg("rho"));

    m.def(
        "normal_form",
        [](const Mat4& rho, double tol, int max_iter) {
            const NormalFormResult nf =
                normal_form(as_state(rho, 1e-10), tol, max_iter);
            py::dict d;
            d["rho_nf"] = Mat4(nf.rho_nf.mat);
            d["filter_A"] = Mat2(nf.filter_A.mat);
            d["filter_B"] = Mat2(nf.filter_B.mat);
            d["success_prob"] = nf.success_prob;
            d["bell_coefficients"] = nf.bell_coefficients;
            d["fidelity_nf"] = nf.fidelity_nf;
            d["separable"] = nf.separable;
            d["iterations"] = nf.iterations;
            return d;
        },
        py::arg("rho"), py::arg("tol") = 1e-10, py::arg("max_iter") = 10000,
        "Bell-diagonal filtering normal form with the achieving filters.");

    m.def(
        "k_cost",
        [](const Mat4& rho, const Mat2& a, const Mat2& b) {
            return k_cost(as_state(rho, 1e-10), LocalOperator{a},
                          LocalOperator{b});
        },
        py::arg("rho"), py::arg("a"), py::arg("b"),
        "Protocol cost K of the filter pair (a, b), cross-checked "
        "internally against its partial-transpose form.");

    m.def(
        "build_protocol",
        [](const Mat4& rho, const Mat2& a) {
            const ProtocolOutcome po =
                build_protocol(as_state(rho, 1e-10), LocalOperator{a});
            py::dict d;
            d["success_prob"] = po.success_prob;
            d["rho_f"] = Mat4(po.rho_f.mat);
            d["chi"] = Vec4(po.chi.vec);
            d["k_value"] = po.k_value;
            return d;
        },
        py::arg("rho"), py::arg("a"));

    m.def(
        "lu_align",
        [](const Mat4& rho) {
            const LuAlignResult la = lu_align(as_state(rho, 1e-10));
            py::dict d;
            d["rho_aligned"] = Mat4(la.rho_aligned.mat);
            d["U"] = Mat2(la.U);
            d["V"] = Mat2(la.V);
            return d;
        },
        py::arg("rho"));

    m.def(
        "teleport_channel",
        [](const Mat4& rho) {
            return channel_dict(teleport_channel(as_state(rho, 1e-10)));
        },
        py::arg("rho"));

    m.def(
        "average_fidelity",
        [](const Mat4& rho) {
            return average_fidelity(as_state(rho, 1e-10));
        },
        py::arg("rho"));

    m.def(
        "bloch_image",
        [](const Mat4& rho, const std::string& mode, int n_samples,
           unsigned seed) {
            return channel_dict(bloch_image(as_state(rho, 1e-10),
                                            parse_mode(mode), n_samples,
                                            seed));
        },
        py::arg("rho"), py::arg("mode") = "LU", py::arg("n_samples") = 500,
        py::arg("seed") = 0u,
        "Bloch-sphere image of the teleportation channel after LU, LOCC or "
        "SLOCC preprocessing; samples is an (n, 6) array of direction/image "
        "rows.");

    m.def(
        "max_k_over_filters",
        [](const Mat4& rho, int n_samples, unsigned seed) {
            const FilterSearch fs =
                max_k_over_filters(as_state(rho, 1e-10), n_samples, seed);
            py::dict d;
            d["best_k"] = fs.best_k;
            d["best_a"] = Mat2(fs.best_a.mat);
            d["evaluations"] = fs.evaluations;
            return d;
        },
        py::arg("rho"), py::arg("n_samples"), py::arg("seed") = 0u);

    m.def("family_state",
          [](double F) { return Mat4(family_state(F).mat); }, py::arg("F"),
          "rho(F) = F |psi+><psi+| + (1-F)|01><01|.");
    m.def("family_fstar", &family_fstar, py::arg("F"));
    m.def(
        "family_filter",
        [](double F) {
            const FamilyFilter ff = family_filter(F);
            py::dict d;
            d["a"] = Mat2(ff.a.mat);
            d["trivial"] = ff.trivial;
            return d;
        },
        py::arg("F"));

    m.def(
        "random_density",
        [](int rank, std::uint64_t seed) {
            Rng rng(seed);
            return Mat4(rng.density(rank).mat);
        },
        py::arg("rank") = 4, py::arg("seed") = 0,
        "Hilbert-Schmidt random density matrix of the given rank.");

    m.def(
        "state_to_json",
        [](const Mat4& rho) { return state_to_json(as_state(rho, 1e-10)); },
        py::arg("rho"));
    m.def(
        "parse_state_json",
        [](const std::string& text, double tol) {
            return Mat4(parse_state_json(text, tol).mat);
        },
        py::arg("text"), py::arg("tol") = 1e-10);

    m.def(
        "run_verification",
        [](int n_states, std::uint64_t seed) {
            const VerifyReport r = run_verification(n_states, seed);
            py::list checks;
            for (const auto& c : r.checks) {
                py::dict e;
                e["name"] = c.name;
                e["passed"] = c.passed;
                e["detail"] = c.detail;
                checks.append(e);
            }
            py::dict d;
            d["all_passed"] = r.all_passed;
            d["checks"] = checks;
            return d;
        },
        py::arg("n_states") = 200, py::arg("seed") = 1234,
        "Self-contained invariant sweep; mirrors the CLI verify command.");
}
