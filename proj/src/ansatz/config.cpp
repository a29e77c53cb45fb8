#include "retnqs/ansatz/config.hpp"

#include "retnqs/util/errors.hpp"

#include <cmath>

namespace retnqs::ansatz {

auto parse_kind(std::string_view name) -> Kind
{
    if (name == "retnet") { return Kind::retnet; }
    if (name == "transformer") { return Kind::transformer; }
    if (name == "made") { return Kind::made; }
    throw ConfigError{"unknown ansatz kind '" + std::string{name} + "' (expected retnet, transformer or made)"};
}

auto to_string(Kind kind) -> std::string
{
    switch (kind) {
    case Kind::retnet: return "retnet";
    case Kind::transformer: return "transformer";
    case Kind::made: return "made";
    }
    return "unknown";
}

void AnsatzConfig::validate() const
{
    for (auto h : phase_hidden) {
        if (h == 0) { throw ConfigError{"phase_hidden widths must be positive"}; }
    }
    if (kind == Kind::made) {
        for (auto h : made_hidden) {
            if (h == 0) { throw ConfigError{"made_hidden widths must be positive"}; }
        }
        return;
    }
    if (n_block == 0 || d_model == 0 || d_retn == 0 || d_ff == 0 || n_heads == 0) {
        throw ConfigError{"n_block, d_model, d_retn, d_ff and n_heads must be positive"};
    }
    if (d_retn % n_heads != 0) {
        throw ConfigError{"d_retn (" + std::to_string(d_retn) + ") must be divisible by n_heads ("
                          + std::to_string(n_heads) + ")"};
    }
    if (kind == Kind::retnet && head_dim() % 2 != 0) {
        throw ConfigError{"retention head width d_retn/n_heads must be even for the rotary encoding"};
    }
}

void SystemInfo::validate() const
{
    if (n_qubits == 0 || n_qubits % 2 != 0) {
        throw ConfigError{"the ansatz pairs qubits into orbitals: n_qubits must be even and positive, got "
                          + std::to_string(n_qubits)};
    }
    if (n_qubits > 64) { throw ConfigError{"at most 64 qubits are supported"}; }
    if (n_up > n_orbitals() || n_down > n_orbitals()) {
        throw ConfigError{"spin sector (" + std::to_string(n_up) + ", " + std::to_string(n_down)
                          + ") does not fit " + std::to_string(n_orbitals()) + " orbitals"};
    }
}

auto head_decay(std::size_t head) -> double { return 1.0 - std::pow(2.0, -5.0 - static_cast<double>(head)); }

} // namespace retnqs::ansatz
