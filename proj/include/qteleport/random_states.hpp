#pragma once

// Deterministic random ensembles used by the CLI, the verification suite and
// the tests. Everything is driven by a self-contained mt19937_64 stream so a
// given seed reproduces byte-identical output across platforms (no
// std::distribution types, whose sequences differ between standard
// libraries).

#include <cstdint>
#include <random>

#include "qteleport/types.hpp"

namespace qtel {

class Rng {
   public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    // uniform in [0, 1) with 53-bit resolution
    double uniform();

    // standard normal via Box-Muller, one spare cached
    double normal();

    // complex with independent standard-normal parts
    cplx cnormal();

    // Haar-distributed SU(2) element from a normalized quaternion
    Mat2 su2();

    // Hilbert-Schmidt-induced random density matrix of the given rank:
    // G G^dag / Tr(G G^dag) with G a 4 x rank Ginibre block (rank = 4 gives
    // the flat Hilbert-Schmidt measure)
    DensityMatrix density(int rank = 4);

    // random pure state, uniform on the sphere
    PureState pure();

    // Ginibre 2x2 rescaled to unit operator norm (a valid filter)
    LocalOperator filter();

    // rejection-sample density(rank) until NPT
    DensityMatrix entangled(int rank = 4, int max_tries = 10000);

   private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace qtel
