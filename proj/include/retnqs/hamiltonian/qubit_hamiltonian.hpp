#pragma once

#include "retnqs/hamiltonian/pauli.hpp"

#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

namespace retnqs::ham {

/// Pauli term with a given flip mask, in sign-mask form.
struct SignTerm {
    double coefficient = 0.0;
    std::uint64_t sign_mask = 0;
    int y_count = 0;
    /// coefficient * i^y_count * (-1)^{|sign & flip|}: multiplying by
    /// (-1)^{|sign & x|} yields <x|P|x ^ flip>.
    double row_coefficient = 0.0;
};

struct FlipGroup {
    std::uint64_t flip_mask = 0;
    std::vector<SignTerm> terms;
};

struct Connection {
    SpinConfiguration config = 0;
    double value = 0.0;
};

/// Real qubit Hamiltonian stored as Pauli terms grouped by unique flip mask.
/// Immutable after construction.
class QubitHamiltonian {
  public:
    QubitHamiltonian() = default;
    /// Identity terms are folded into the offset. Throws ConfigError for
    /// terms with an odd number of Y operators (complex matrix elements).
    QubitHamiltonian(std::size_t n_qubits, std::size_t n_electrons, int ms2, std::vector<PauliTerm> const& terms,
                     double identity_offset = 0.0);

    static auto load(std::filesystem::path const& path) -> QubitHamiltonian;
    void save(std::filesystem::path const& path) const;

    auto n_qubits() const noexcept -> std::size_t { return n_qubits_; }
    auto n_electrons() const noexcept -> std::size_t { return n_electrons_; }
    auto ms2() const noexcept -> int { return ms2_; }
    auto n_up() const noexcept -> std::size_t;
    auto n_down() const noexcept -> std::size_t;
    auto identity_offset() const noexcept -> double { return offset_; }

    auto groups() const noexcept -> std::vector<FlipGroup> const& { return groups_; }
    /// Number of non-identity Pauli terms plus one for a nonzero offset.
    auto term_count() const noexcept -> std::size_t;
    auto flip_mask_count() const noexcept -> std::size_t { return groups_.size(); }

    /// <x|H|y>; zero when x ^ y is not a stored flip mask.
    auto matrix_element(SpinConfiguration x, SpinConfiguration y) const -> double;

    /// Nonzero entries of row x: one per flip mask whose summed coefficient
    /// exceeds 1e-14 in magnitude. Diagonal entry first when present.
    auto connected(SpinConfiguration x) const -> std::vector<Connection>;
    void connected(SpinConfiguration x, std::vector<Connection>& out) const;

    auto to_pauli_terms() const -> std::vector<PauliTerm>;

  private:
    std::size_t n_qubits_ = 0;
    std::size_t n_electrons_ = 0;
    int ms2_ = 0;
    double offset_ = 0.0;
    std::vector<FlipGroup> groups_; // sorted by flip mask; mask 0 first
};

/// Same as QubitHamiltonian::matrix_element but validates lengths of the
/// supplied bitstrings (e.g. "0101").
auto matrix_element(QubitHamiltonian const& h, std::string const& x, std::string const& y) -> double;

/// Bitstring helpers, qubit 0 first.
auto config_from_string(std::string const& bits) -> SpinConfiguration;
auto config_to_string(SpinConfiguration x, std::size_t n_qubits) -> std::string;

} // namespace retnqs::ham
