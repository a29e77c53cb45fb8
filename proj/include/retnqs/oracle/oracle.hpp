#pragma once

// Exact reference computations for small systems.

#include "retnqs/ansatz/ansatz.hpp"
#include "retnqs/hamiltonian/fcidump.hpp"
#include "retnqs/hamiltonian/qubit_hamiltonian.hpp"

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace retnqs::oracle {

using ham::QubitHamiltonian;
using ham::SpinConfiguration;

struct Sector {
    std::size_t n_up = 0;
    std::size_t n_down = 0;
};

/// Amplitudes over an explicit list of basis configurations (ascending).
struct DenseState {
    std::vector<SpinConfiguration> basis;
    std::vector<std::complex<double>> amplitudes;

    auto norm() const -> double;
};

enum class Solver { automatic, dense, lanczos };

struct GroundState {
    double energy = 0.0;
    DenseState state;
    Solver solver = Solver::dense;
    std::size_t iterations = 0;
    double residual = 0.0;
};

/// Largest basis handed to the dense eigensolver under Solver::automatic.
inline constexpr std::size_t dense_basis_limit = 1024;

/// All 2^n configurations or those of one particle-number sector.
auto basis_configs(std::size_t n_qubits, std::optional<Sector> sector) -> std::vector<SpinConfiguration>;

/// Full 2^n x 2^n matrix; refuses n > 12.
auto dense_matrix(QubitHamiltonian const& h) -> Eigen::MatrixXd;
/// H projected onto `basis`.
auto projected_matrix(QubitHamiltonian const& h, std::span<SpinConfiguration const> basis) -> Eigen::MatrixXd;

struct LanczosOptions {
    double tolerance = 1e-10;
    std::size_t max_iterations = 5000;
    std::size_t krylov_dim = 120;
};

/// Lowest eigenpair, optionally restricted to a sector. Dense for small
/// bases (n <= 12), restarted Lanczos otherwise (n <= 20). Throws
/// NumericalError with the residual when Lanczos does not converge.
auto ground_state(QubitHamiltonian const& h, std::optional<Sector> sector = std::nullopt,
                  Solver solver = Solver::automatic, LanczosOptions const& opts = {}) -> GroundState;

/// <psi|H|psi> / <psi|psi> for a state on any basis (entries outside it are zero).
auto exact_expectation(QubitHamiltonian const& h, DenseState const& psi) -> double;
/// -sum p log p of |psi|^2, normalized, with 0 log 0 = 0.
auto exact_entropy(DenseState const& psi) -> double;

/// Amplitudes of the ansatz over its particle-number sector (its full support).
auto enumerate_state(ansatz::Ansatz const& model) -> DenseState;
/// Amplitudes over all 2^n configurations; refuses n > 16.
auto enumerate_full_state(ansatz::Ansatz const& model) -> DenseState;
auto exact_expectation(QubitHamiltonian const& h, ansatz::Ansatz const& model) -> double;
auto exact_entropy(ansatz::Ansatz const& model) -> double;

/// Central-difference gradient of f at x.
auto fd_gradient(std::function<double(std::span<double const>)> const& f, std::span<double const> x,
                 double step = 1e-4) -> std::vector<double>;
/// Central differences of f over the flattened ansatz parameters.
auto fd_gradient(ansatz::Ansatz const& model, std::function<double(ansatz::Ansatz const&)> const& f,
                 double step = 1e-4) -> std::vector<double>;

/// Fermionic ladder operators as dense 2^n matrices, mode order = qubit order,
/// with the parity of lower occupied modes as sign.
auto creation_matrix(std::size_t mode, std::size_t n_modes) -> Eigen::MatrixXd;
auto annihilation_matrix(std::size_t mode, std::size_t n_modes) -> Eigen::MatrixXd;

/// Second-quantized molecular Hamiltonian built from ladder matrices
/// (interleaved spin orbitals); refuses more than 8 spin orbitals.
auto dense_fermionic_hamiltonian(ham::MolecularIntegrals const& mi) -> Eigen::MatrixXd;

} // namespace retnqs::oracle
