#include "retnqs/hamiltonian/jordan_wigner.hpp"

#include "retnqs/util/errors.hpp"

#include <cmath>

namespace retnqs::ham {

auto jordan_wigner(LadderOp op) -> SymplecticSum
{
    if (op.mode >= 64) { throw DimensionError{"fermionic mode index exceeds 63"}; }
    auto const bit = std::uint64_t{1} << op.mode;
    auto const string = bit - 1; // Z on all lower modes
    // iY_p = -X_p Z_p in monomial form, so a_p = (X_p - X_p Z_p)/2 Z_{<p}.
    auto const sign = op.creation ? 0.5 : -0.5;
    return SymplecticSum{{{bit, string, {0.5, 0.0}}, {bit, string | bit, {sign, 0.0}}}};
}

auto jordan_wigner(std::vector<FermionTerm> const& terms, std::size_t n_qubits, double prune)
    -> std::vector<PauliTerm>
{
    SymplecticSum total;
    for (auto const& term : terms) {
        SymplecticSum product{{{0, 0, {term.coefficient, 0.0}}}};
        for (auto const& op : term.ops) {
            if (op.mode >= n_qubits) {
                throw DimensionError{"mode " + std::to_string(op.mode) + " outside " + std::to_string(n_qubits)
                                     + " qubits"};
            }
            product = product.times(jordan_wigner(op));
        }
        total.append(product);
    }
    return total.to_pauli_terms(n_qubits, prune);
}

auto second_quantize_jw(MolecularIntegrals const& mi, double prune) -> QubitHamiltonian
{
    auto const n_orb = mi.n_orbitals();
    auto const n_qubits = 2 * n_orb;
    if (n_qubits > 64) { throw DimensionError{"at most 32 spatial orbitals are supported"}; }

    std::vector<SymplecticSum> create(n_qubits);
    std::vector<SymplecticSum> annihilate(n_qubits);
    for (std::size_t k = 0; k < n_qubits; ++k) {
        create[k] = jordan_wigner(LadderOp{k, true});
        annihilate[k] = jordan_wigner(LadderOp{k, false});
    }

    constexpr double skip = 1e-15;
    SymplecticSum total;
    for (std::size_t p = 0; p < n_orb; ++p) {
        for (std::size_t q = 0; q < n_orb; ++q) {
            auto const h = mi.h1(p, q);
            if (std::abs(h) < skip) { continue; }
            for (std::size_t s = 0; s < 2; ++s) {
                auto term = create[spin_orbital(p, s)].times(annihilate[spin_orbital(q, s)]);
                term.scale(h);
                total.append(term);
            }
        }
    }
    for (std::size_t p = 0; p < n_orb; ++p) {
        for (std::size_t q = 0; q < n_orb; ++q) {
            for (std::size_t r = 0; r < n_orb; ++r) {
                for (std::size_t s = 0; s < n_orb; ++s) {
                    auto const v = 0.5 * mi.h2(p, q, r, s);
                    if (std::abs(v) < skip) { continue; }
                    for (std::size_t sigma = 0; sigma < 2; ++sigma) {
                        for (std::size_t tau = 0; tau < 2; ++tau) {
                            auto const i = spin_orbital(p, sigma);
                            auto const j = spin_orbital(r, tau);
                            auto const k = spin_orbital(s, tau);
                            auto const l = spin_orbital(q, sigma);
                            if (i == j || k == l) { continue; } // a+a+ or aa on one mode vanishes
                            auto term = create[i].times(create[j]).times(annihilate[k]).times(annihilate[l]);
                            term.scale(v);
                            total.append(term);
                        }
                    }
                }
            }
        }
        total.combine(); // bound memory growth
    }

    auto const terms = total.to_pauli_terms(n_qubits, prune);
    return QubitHamiltonian{n_qubits, mi.n_electrons(), mi.ms2(), terms, mi.core_energy()};
}

} // namespace retnqs::ham
