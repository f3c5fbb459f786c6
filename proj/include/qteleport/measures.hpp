#pragma once

#include "qteleport/types.hpp"

// Scalar entanglement and fidelity functionals of a two-qubit state.
namespace qtel {

struct MeasureReport {
    double singlet_fraction;   // in [1/4, 1]
    PureState achieving_me_state;
    double concurrence;        // in [0, 1]
    double negativity;         // in [0, 1]
    bool entangled;            // two-qubit PPT criterion
    bool near_boundary;        // |lambda_min(rho^Gamma)| within the threshold
    double teleport_fidelity;  // (2F+1)/3
};

// Maximal overlap with a maximally entangled state, via the largest
// eigenvalue of the real part of the magic-basis transform; also returns the
// achieving maximally entangled state.
std::pair<double, PureState> singlet_fraction(const DensityMatrix& rho);

// Wootters concurrence. The spectrum of rho*(sy x sy)*conj(rho)*(sy x sy) is
// obtained from the Hermitian matrix sqrt(rho)*rho_tilde*sqrt(rho) so only a
// Hermitian eigensolver is needed.
double concurrence(const DensityMatrix& rho);

// N = 2 * max(0, -lambda_min(rho^Gamma)); 1 for Bell states.
double negativity(const DensityMatrix& rho);

// Peres criterion, exact for two qubits: lambda_min(rho^Gamma) < -1e-10.
bool is_entangled(const DensityMatrix& rho);

// f = (2F+1)/3; throws on F outside [1/4, 1].
double teleport_fidelity_from_F(double F);

MeasureReport analyze(const DensityMatrix& rho);

}  // namespace qtel
