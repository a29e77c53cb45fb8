#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace retnqs::ansatz {

enum class Kind { retnet, transformer, made };

auto parse_kind(std::string_view name) -> Kind;
auto to_string(Kind kind) -> std::string;

inline constexpr std::size_t vocab_size = 4;
/// Token id of the start symbol prepended to every modulus input.
inline constexpr std::size_t start_token = 4;

struct AnsatzConfig {
    Kind kind = Kind::retnet;
    std::size_t n_block = 1;
    std::size_t d_model = 16;
    std::size_t d_retn = 16;
    std::size_t d_ff = 64;
    std::size_t n_heads = 4;
    std::vector<std::size_t> phase_hidden{64, 64};
    std::vector<std::size_t> made_hidden{64, 64};

    /// Throws ConfigError.
    void validate() const;
    auto head_dim() const noexcept -> std::size_t { return d_retn / n_heads; }
};

/// Number of qubits and the spin sector the ansatz is constrained to.
struct SystemInfo {
    std::size_t n_qubits = 0;
    std::size_t n_up = 0;
    std::size_t n_down = 0;

    void validate() const;
    auto n_orbitals() const noexcept -> std::size_t { return n_qubits / 2; }
};

/// Fixed per-head retention decay: 1 - 2^(-5-i).
auto head_decay(std::size_t head) -> double;

} // namespace retnqs::ansatz
