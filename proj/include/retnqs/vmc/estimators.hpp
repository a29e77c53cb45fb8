#pragma once

#include "retnqs/ansatz/ansatz.hpp"
#include "retnqs/hamiltonian/qubit_hamiltonian.hpp"
#include "retnqs/nn/parameters.hpp"
#include "retnqs/sampler/sampler.hpp"

#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace retnqs::vmc {

using ansatz::LogAmplitude;
using ham::QubitHamiltonian;
using ham::SpinConfiguration;
using sampler::SampleSet;

/// Batched log-amplitude evaluation.
using AmplitudeFn = std::function<std::vector<LogAmplitude>(std::span<SpinConfiguration const>)>;

inline constexpr std::size_t default_flip_batch_count = 8;

/// l(x) = sum_x' <x|H|x'> psi(x')/psi(x) for every sample. Amplitudes of the
/// distinct connected configurations are evaluated once, split into
/// `flip_batch_count` batches. Throws NumericalError when a sample has zero
/// amplitude.
auto local_energies(QubitHamiltonian const& h, std::span<SpinConfiguration const> samples, AmplitudeFn const& amp,
                    std::size_t flip_batch_count = default_flip_batch_count) -> std::vector<std::complex<double>>;
auto local_energy(QubitHamiltonian const& h, SpinConfiguration x, AmplitudeFn const& amp,
                  std::size_t flip_batch_count = default_flip_batch_count) -> std::complex<double>;

/// Amplitude function backed by an ansatz.
auto amplitude_fn(ansatz::Ansatz const& model, ansatz::EvalMode mode = ansatz::EvalMode::automatic) -> AmplitudeFn;

struct EnergyEstimate {
    double mean = 0.0;
    double variance = 0.0;     ///< count-weighted population variance of Re l
    double imag_mean = 0.0;    ///< diagnostic
    std::uint64_t n_eff = 0;   ///< draws behind the estimate
    std::uint64_t step = 0;

    auto standard_error() const -> double;
};

auto energy_estimate(std::span<std::uint64_t const> counts, std::span<std::complex<double> const> locals,
                     std::uint64_t step = 0) -> EnergyEstimate;
auto energy_estimate(SampleSet const& s, std::span<std::complex<double> const> locals, std::uint64_t step = 0)
    -> EnergyEstimate;

struct GradientResult {
    nn::Gradients grads;
    /// Count-weighted mean of Re l + 2 beta logmod: the regularized loss.
    double loss = 0.0;
    double baseline = 0.0; ///< the baseline actually used
    std::vector<double> log_modulus;
};

/// Weighted estimator 2 Re E[(l + beta (1 + 2 logmod) - b) grad log psi*]
/// using one differentiable forward/backward pass over the given configs.
/// `weights` are the sampling probabilities (count / total, or exact
/// probabilities under enumeration). A missing baseline means the loss of
/// this very batch. Throws NumericalError on non-finite weights.
auto vna_gradient(ansatz::Ansatz const& model, std::span<SpinConfiguration const> configs,
                  std::span<double const> weights, std::span<std::complex<double> const> locals, double beta,
                  std::optional<double> baseline) -> GradientResult;
auto vna_gradient(ansatz::Ansatz const& model, SampleSet const& s, std::span<std::complex<double> const> locals,
                  double beta, std::optional<double> baseline) -> GradientResult;

/// Refresh rule for the baseline: every `interval` steps during the first
/// 90% of training, every step afterwards.
auto baseline_due(std::uint64_t step, std::uint64_t total_steps, std::uint64_t interval) -> bool;

inline constexpr double best_energy_z = 1.645;

/// Replaces `best` with `est` when best.mean > est.mean + z * SE(est).
/// Returns whether it was replaced.
auto best_energy_update(std::optional<EnergyEstimate>& best, EnergyEstimate const& est) -> bool;

} // namespace retnqs::vmc
