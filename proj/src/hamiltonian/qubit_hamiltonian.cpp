#include "retnqs/hamiltonian/qubit_hamiltonian.hpp"

#include "retnqs/util/errors.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <map>

namespace retnqs::ham {

namespace {

auto parity_sign(std::uint64_t bits) noexcept -> double { return (std::popcount(bits) & 1) != 0 ? -1.0 : 1.0; }

constexpr double connection_cutoff = 1e-14;

} // namespace

QubitHamiltonian::QubitHamiltonian(std::size_t n_qubits, std::size_t n_electrons, int ms2,
                                   std::vector<PauliTerm> const& terms, double identity_offset)
    : n_qubits_{n_qubits}
    , n_electrons_{n_electrons}
    , ms2_{ms2}
    , offset_{identity_offset}
{
    if (n_qubits == 0 || n_qubits > 64) { throw ConfigError{"n_qubits must lie in [1, 64]"}; }
    if (n_electrons > n_qubits) { throw ConfigError{"more electrons than qubits"}; }
    auto const n = static_cast<long>(n_electrons);
    if (std::abs(ms2) > n || (n + ms2) % 2 != 0) { throw ConfigError{"MS2 inconsistent with electron count"}; }

    std::map<std::uint64_t, std::map<std::uint64_t, SignTerm>> by_flip;
    for (auto const& t : terms) {
        if (t.ops.size() != n_qubits) {
            throw DimensionError{"Pauli string '" + t.ops + "' does not have " + std::to_string(n_qubits) + " qubits"};
        }
        auto const m = to_masks(t.ops);
        if (m.y_count % 2 != 0) {
            throw ConfigError{"Pauli term " + t.ops + " has an odd number of Y operators; only real "
                              "Hamiltonians are supported"};
        }
        if (m.flip == 0 && m.sign == 0) {
            offset_ += t.coefficient;
            continue;
        }
        auto& slot = by_flip[m.flip][m.sign];
        slot.coefficient += t.coefficient;
        slot.sign_mask = m.sign;
        slot.y_count = m.y_count;
    }
    for (auto& [flip, signs] : by_flip) {
        FlipGroup g{flip, {}};
        for (auto& [sign, term] : signs) {
            if (term.coefficient == 0.0) { continue; }
            auto const i_power = (term.y_count / 2) % 2 != 0 ? -1.0 : 1.0;
            term.row_coefficient = term.coefficient * i_power * parity_sign(sign & flip);
            g.terms.push_back(term);
        }
        if (!g.terms.empty()) { groups_.push_back(std::move(g)); }
    }
}

auto QubitHamiltonian::n_up() const noexcept -> std::size_t
{
    return static_cast<std::size_t>((static_cast<long>(n_electrons_) + ms2_) / 2);
}

auto QubitHamiltonian::n_down() const noexcept -> std::size_t
{
    return static_cast<std::size_t>((static_cast<long>(n_electrons_) - ms2_) / 2);
}

auto QubitHamiltonian::term_count() const noexcept -> std::size_t
{
    std::size_t n = offset_ != 0.0 ? 1 : 0;
    for (auto const& g : groups_) { n += g.terms.size(); }
    return n;
}

auto QubitHamiltonian::matrix_element(SpinConfiguration x, SpinConfiguration y) const -> double
{
    auto const flip = x ^ y;
    double value = flip == 0 ? offset_ : 0.0;
    auto const it = std::lower_bound(groups_.begin(), groups_.end(), flip,
                                     [](FlipGroup const& g, std::uint64_t f) { return g.flip_mask < f; });
    if (it == groups_.end() || it->flip_mask != flip) { return value; }
    for (auto const& t : it->terms) { value += t.row_coefficient * parity_sign(t.sign_mask & x); }
    return value;
}

void QubitHamiltonian::connected(SpinConfiguration x, std::vector<Connection>& out) const
{
    out.clear();
    bool diagonal_done = false;
    for (auto const& g : groups_) {
        double value = g.flip_mask == 0 ? offset_ : 0.0;
        if (g.flip_mask == 0) { diagonal_done = true; }
        for (auto const& t : g.terms) { value += t.row_coefficient * parity_sign(t.sign_mask & x); }
        if (std::abs(value) >= connection_cutoff) { out.push_back({x ^ g.flip_mask, value}); }
    }
    if (!diagonal_done && std::abs(offset_) >= connection_cutoff) {
        out.insert(out.begin(), Connection{x, offset_});
    }
}

auto QubitHamiltonian::connected(SpinConfiguration x) const -> std::vector<Connection>
{
    std::vector<Connection> out;
    connected(x, out);
    return out;
}

auto QubitHamiltonian::to_pauli_terms() const -> std::vector<PauliTerm>
{
    std::vector<PauliTerm> out;
    if (offset_ != 0.0) { out.push_back({offset_, std::string(n_qubits_, 'I')}); }
    for (auto const& g : groups_) {
        for (auto const& t : g.terms) {
            out.push_back({t.coefficient, to_string(PauliMasks{g.flip_mask, t.sign_mask, t.y_count}, n_qubits_)});
        }
    }
    return out;
}

auto QubitHamiltonian::load(std::filesystem::path const& path) -> QubitHamiltonian
{
    std::ifstream in{path};
    if (!in) { throw ParseError{"cannot open Pauli file '" + path.string() + "'", 0}; }
    PauliFileHeader header;
    auto const terms = read_pauli_text(in, header);
    return QubitHamiltonian{header.n_qubits, header.n_electrons, header.ms2, terms};
}

void QubitHamiltonian::save(std::filesystem::path const& path) const
{
    std::ofstream out{path};
    if (!out) { throw std::runtime_error{"cannot write Pauli file '" + path.string() + "'"}; }
    write_pauli_text(out, {n_qubits_, n_electrons_, ms2_}, to_pauli_terms());
}

auto config_from_string(std::string const& bits) -> SpinConfiguration
{
    if (bits.size() > 64) { throw DimensionError{"bitstrings are limited to 64 qubits"}; }
    SpinConfiguration x = 0;
    for (std::size_t k = 0; k < bits.size(); ++k) {
        if (bits[k] == '1') {
            x |= SpinConfiguration{1} << k;
        } else if (bits[k] != '0') {
            throw ConfigError{"invalid bitstring '" + bits + "'"};
        }
    }
    return x;
}

auto config_to_string(SpinConfiguration x, std::size_t n_qubits) -> std::string
{
    std::string s(n_qubits, '0');
    for (std::size_t k = 0; k < n_qubits; ++k) {
        if (((x >> k) & 1U) != 0) { s[k] = '1'; }
    }
    return s;
}

auto matrix_element(QubitHamiltonian const& h, std::string const& x, std::string const& y) -> double
{
    if (x.size() != h.n_qubits() || y.size() != h.n_qubits()) {
        throw DimensionError{"matrix_element: configurations must have " + std::to_string(h.n_qubits()) + " qubits"};
    }
    return h.matrix_element(config_from_string(x), config_from_string(y));
}

} // namespace retnqs::ham
