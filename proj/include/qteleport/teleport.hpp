#pragma once

// Physical layer: the filter-protocol cost function, the trace-preserving
// one-way LOCC protocol (filter + separable failure branch), local-unitary
// alignment, the standard teleportation channel induced by a two-qubit
// resource, and Bloch-sphere image sampling.

#include <array>
#include <vector>

#include "qteleport/types.hpp"

namespace qtel {

// Protocol cost
//
//   K = 1/2 - <psi+| (C x I) rho^Gamma (C^dag x I) |psi+>,   C = B^dag sy A,
//
// evaluated together with the direct operational form
//
//   K = <psi+| (A x B) rho (A x B)^dag |psi+> + (1 - p)/2,
//   p = Tr[(A x B) rho (A x B)^dag].
//
// The two must agree to 1e-10; a mismatch signals a convention bug upstream
// (basis order, partial-transpose side, Bell labeling) and throws.
double k_cost(const DensityMatrix& rho, const LocalOperator& a,
              const LocalOperator& b);

struct LuAlignResult {
    DensityMatrix rho_aligned;  // (U x V) rho (U x V)^dag
    Mat2 U;
    Mat2 V;
};

// Local unitaries rotating the maximally entangled state closest to rho onto
// |psi+> = (|00> + |11>)/sqrt(2), so that <psi+|rho_aligned|psi+> = F(rho).
LuAlignResult lu_align(const DensityMatrix& rho);

struct ProtocolOutcome {
    double success_prob = 0.0;  // p = Tr[(a x I) rho (a x I)^dag]
    DensityMatrix rho_f;        // normalized filtered state
    PureState chi;              // product state prepared on failure
    double k_value = 0.0;       // p F(rho_f) + (1 - p)/2
};

// One-way protocol: Alice applies filter `a`; on success Bob does nothing,
// on failure both prepare the product state chi = (U^dag x V^dag)|00> where
// (U, V) align rho_f. chi has overlap 1/2 with the entangled state achieving
// F(rho_f), so the failure branch contributes fidelity 1/2.
ProtocolOutcome build_protocol(const DensityMatrix& rho,
                               const LocalOperator& a);

struct ChannelImage {
    Mat3r m = Mat3r::Zero();  // Bloch map: v -> m v + c
    Vec3r c = Vec3r::Zero();
    double avg_fidelity = 0.0;  // 1/2 + tr(m)/6, exact sphere average
    // (input direction nx,ny,nz, output ox,oy,oz) pairs; empty unless sampled
    std::vector<std::array<double, 6>> samples;
};

// Exact simulation of the standard teleportation protocol with `resource` as
// the shared pair: Bell measurement on (input, A) with Pauli corrections
// psi+ -> I, psi- -> sz, phi+ -> sx, phi- -> sx sz on B. The induced map is
// affine on Bloch vectors; m and c are extracted from basis inputs.
ChannelImage teleport_channel(const DensityMatrix& resource);

// 1/2 + tr(m)/6 of the channel above; equals (2 <psi+|rho|psi+> + 1)/3.
double average_fidelity(const DensityMatrix& resource);

struct FilterSearch {
    double best_k = 0.5;
    LocalOperator best_a{Mat2::Identity()};
    long evaluations = 0;
};

// Brute-force maximization of k_cost(rho, a, I) over random operator-norm-1
// filters, followed by stochastic local refinement with shrinking step sizes.
// Serves as an independent lower-bound oracle for the optimal-fidelity
// program: its result can approach but never exceed F*.
FilterSearch max_k_over_filters(const DensityMatrix& rho, int n_samples,
                                unsigned seed);

enum class Preprocessing { LU, LOCC, SLOCC };

// Teleportation image of the Bloch sphere after local preprocessing of the
// resource: LU alignment, the trace-preserving filter protocol averaged over
// its two branches (LOCC), or the filtering normal form conditioned on
// success (SLOCC). Directions are a deterministic Fibonacci lattice; `seed`
// only rotates the lattice around the z axis.
ChannelImage bloch_image(const DensityMatrix& resource, Preprocessing mode,
                         int n_samples, unsigned seed);

}  // namespace qtel
