#pragma once

#include "retnqs/ansatz/config.hpp"
#include "retnqs/hamiltonian/qubit_hamiltonian.hpp"
#include "retnqs/vmc/train.hpp"

#include <filesystem>
#include <string>

namespace retnqs::cli {

struct RunConfig {
    std::filesystem::path hamiltonian;
    std::filesystem::path output_dir = "runs/out";
    ansatz::AnsatzConfig ansatz;
    vmc::TrainConfig train;
    /// Compute the exact ground energy for the summary when feasible.
    bool oracle = true;

    /// Throws ConfigError (missing files, inconsistent values); returns warnings.
    auto validate() const -> std::vector<std::string>;
};

/// Reads a TOML run configuration. Relative paths resolve against the
/// directory of the file. Unknown keys are rejected.
auto load_run_config(std::filesystem::path const& path) -> RunConfig;
auto parse_run_config(std::string const& text, std::filesystem::path const& base_dir) -> RunConfig;

/// Turns off annealing (beta = 0 throughout).
void disable_vna(RunConfig& cfg);

/// Loads an FCIDUMP (mapped with Jordan-Wigner) or a Pauli text file,
/// distinguished by content.
auto load_hamiltonian(std::filesystem::path const& path) -> ham::QubitHamiltonian;
auto is_fcidump(std::filesystem::path const& path) -> bool;

} // namespace retnqs::cli
