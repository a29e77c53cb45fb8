#pragma once

#include "retnqs/ansatz/config.hpp"
#include "retnqs/hamiltonian/pauli.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace retnqs::ansatz {

using ham::SpinConfiguration;

/// Orbital tokens in sampling order: position j holds orbital L-1-j, encoded
/// as 2*up + down.
using OrbitalSequence = std::vector<std::uint8_t>;

/// Throws ConfigError for odd n_qubits.
auto encode(SpinConfiguration x, std::size_t n_qubits) -> OrbitalSequence;
auto decode(std::span<std::uint8_t const> tokens) -> SpinConfiguration;

inline constexpr auto token_up(std::size_t token) noexcept -> std::size_t { return token >> 1U; }
inline constexpr auto token_down(std::size_t token) noexcept -> std::size_t { return token & 1U; }

/// Running electron counts of a prefix.
struct PrefixCounts {
    std::size_t up = 0;
    std::size_t down = 0;
    std::size_t length = 0;

    void push(std::size_t token) noexcept
    {
        up += token_up(token);
        down += token_down(token);
        ++length;
    }
};

/// Which next tokens keep the prefix completable to the target sector.
auto feasible_tokens(SystemInfo const& sys, PrefixCounts const& prefix) -> std::array<std::uint8_t, vocab_size>;

/// Whether x has exactly n_up and n_down electrons.
auto in_sector(SystemInfo const& sys, SpinConfiguration x) -> bool;

/// All configurations in the sector, ascending.
auto sector_configs(SystemInfo const& sys) -> std::vector<SpinConfiguration>;

} // namespace retnqs::ansatz
