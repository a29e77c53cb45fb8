#pragma once

#include <complex>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace retnqs::ham {

/// Computational-basis state: bit k is the occupancy of qubit k.
using SpinConfiguration = std::uint64_t;

/// Real multiple of a Pauli string; ops[k] in {I,X,Y,Z} acts on qubit k.
struct PauliTerm {
    double coefficient = 0.0;
    std::string ops;
};

/// Bit-flip / sign-flip encoding of a Pauli string.
struct PauliMasks {
    std::uint64_t flip = 0; // X or Y
    std::uint64_t sign = 0; // Y or Z
    int y_count = 0;
};

auto to_masks(std::string const& ops) -> PauliMasks;
auto to_string(PauliMasks const& masks, std::size_t n_qubits) -> std::string;

/// Operator sum of monomials c * X^x Z^z (no phase normalization). Used to
/// multiply out Jordan-Wigner images before converting to Hermitian Paulis.
class SymplecticSum {
  public:
    struct Monomial {
        std::uint64_t x = 0;
        std::uint64_t z = 0;
        std::complex<double> c;
    };

    SymplecticSum() = default;
    explicit SymplecticSum(std::vector<Monomial> terms) : terms_{std::move(terms)} {}

    auto terms() const noexcept -> std::vector<Monomial> const& { return terms_; }
    void add(Monomial m) { terms_.push_back(m); }
    void append(SymplecticSum const& other);
    void scale(std::complex<double> factor);

    /// Operator product this * rhs.
    auto times(SymplecticSum const& rhs) const -> SymplecticSum;

    /// Merges equal monomials (sorted, deterministic order).
    void combine();

    /// Converts to real Pauli terms, dropping |coefficient| < prune. Throws
    /// NumericalError if a combined coefficient has an imaginary part above
    /// `imag_tol` (the operator is not Hermitian).
    auto to_pauli_terms(std::size_t n_qubits, double prune, double imag_tol = 1e-10) const
        -> std::vector<PauliTerm>;

  private:
    std::vector<Monomial> terms_;
};

struct PauliFileHeader {
    std::size_t n_qubits = 0;
    std::size_t n_electrons = 0;
    int ms2 = 0;
};

/// "n_qubits n_electrons [ms2]" header, then "coefficient<TAB>pauli_string" lines.
void write_pauli_text(std::ostream& out, PauliFileHeader const& header, std::vector<PauliTerm> const& terms);
auto read_pauli_text(std::istream& in, PauliFileHeader& header) -> std::vector<PauliTerm>;

} // namespace retnqs::ham
