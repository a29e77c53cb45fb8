#pragma once

#include "retnqs/hamiltonian/fcidump.hpp"
#include "retnqs/hamiltonian/pauli.hpp"
#include "retnqs/hamiltonian/qubit_hamiltonian.hpp"

#include <cstddef>
#include <vector>

namespace retnqs::ham {

inline constexpr double default_prune_threshold = 1e-12;

/// Qubit index of spatial orbital p with spin 0 (up) or 1 (down). Both spins
/// of an orbital sit on adjacent qubits.
constexpr auto spin_orbital(std::size_t p, std::size_t spin) noexcept -> std::size_t { return 2 * p + spin; }

struct LadderOp {
    std::size_t mode = 0;
    bool creation = false;
};

/// coefficient * (product of ladder operators in written order)
struct FermionTerm {
    double coefficient = 0.0;
    std::vector<LadderOp> ops;
};

/// Jordan-Wigner image of a single ladder operator:
/// a_p = (X_p + iY_p)/2 Z_{<p}, a_p^dagger = (X_p - iY_p)/2 Z_{<p}.
auto jordan_wigner(LadderOp op) -> SymplecticSum;

/// Jordan-Wigner image of a fermionic operator sum with like terms combined
/// and |coefficient| < prune dropped.
auto jordan_wigner(std::vector<FermionTerm> const& terms, std::size_t n_qubits,
                   double prune = default_prune_threshold) -> std::vector<PauliTerm>;

/// H = E_core + sum h1[p][q] a+_{p s} a_{q s} + 1/2 sum (pq|rs) a+_{p s} a+_{r t} a_{s t} a_{q s},
/// mapped to qubits with interleaved spin ordering.
auto second_quantize_jw(MolecularIntegrals const& mi, double prune = default_prune_threshold)
    -> QubitHamiltonian;

} // namespace retnqs::ham
