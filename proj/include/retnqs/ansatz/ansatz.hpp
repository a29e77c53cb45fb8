#pragma once

#include "retnqs/ansatz/config.hpp"
#include "retnqs/ansatz/encoding.hpp"
#include "retnqs/ansatz/modulus.hpp"
#include "retnqs/nn/parameters.hpp"
#include "retnqs/nn/tape.hpp"

#include <complex>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace retnqs::ansatz {

enum class EvalMode { automatic, parallel, recurrent };

/// log<x|psi> = log_modulus + i phase. Configurations outside the support
/// have feasible == false and log_modulus == -inf; check the flag before
/// doing arithmetic with it.
struct LogAmplitude {
    double log_modulus = 0.0;
    double phase = 0.0;
    bool feasible = true;

    auto value() const -> std::complex<double>;
    auto probability() const -> double;
};

class Ansatz {
  public:
    /// Parameters are initialized deterministically from `seed`.
    Ansatz(AnsatzConfig config, SystemInfo system, std::uint64_t seed = 0);
    Ansatz(Ansatz const& other);
    auto operator=(Ansatz const& other) -> Ansatz&;
    Ansatz(Ansatz&&) noexcept = default;
    auto operator=(Ansatz&&) noexcept -> Ansatz& = default;
    ~Ansatz();

    auto config() const noexcept -> AnsatzConfig const& { return config_; }
    auto system() const noexcept -> SystemInfo const& { return system_; }
    auto n_orbitals() const noexcept -> std::size_t { return system_.n_orbitals(); }
    auto parameters() const noexcept -> nn::ParameterStore const& { return store_; }
    auto parameters() noexcept -> nn::ParameterStore& { return store_; }
    auto n_params() const noexcept -> std::size_t { return store_.count(); }
    /// Projection and feedforward weights of the modulus trunk.
    auto trunk_weight_count() const -> std::size_t;

    /// Recurrent evaluation is available for RetNet only; automatic picks it there.
    auto resolve(EvalMode mode) const -> EvalMode;

    /// Records every parameter as a tape leaf, in store order.
    auto bind(Tape& tape) const -> std::vector<Var>;

    struct Trace {
        Var log_modulus;              ///< [batch], zero for infeasible rows
        Var phase;                    ///< [batch]
        std::vector<std::uint8_t> feasible;
    };
    /// Parallel forward pass recorded on `tape`.
    auto forward(Tape& tape, std::span<Var const> params, std::span<SpinConfiguration const> configs) const
        -> Trace;
    auto forward(Tape& tape, std::span<SpinConfiguration const> configs) const -> Trace;

    auto log_amplitudes(std::span<SpinConfiguration const> configs, EvalMode mode = EvalMode::automatic) const
        -> std::vector<LogAmplitude>;
    auto log_amplitude(SpinConfiguration x, EvalMode mode = EvalMode::automatic) const -> LogAmplitude;

    /// Masked conditionals along each configuration's own token sequence,
    /// shape [batch*L x 4].
    auto conditionals(std::span<SpinConfiguration const> configs, EvalMode mode = EvalMode::automatic) const
        -> Tensor;

    /// Sampling frontier node: a prefix of tokens with its running counts and,
    /// for recurrent RetNet evaluation, the state after consuming it.
    struct Prefix {
        OrbitalSequence tokens;
        PrefixCounts counts;
        std::optional<RetentionState> state;
    };
    auto root_prefix(EvalMode mode = EvalMode::automatic) const -> Prefix;
    /// Masked next-token distribution for each prefix, shape [n x 4]. In
    /// recurrent mode the prefix states advance past the last input, so a
    /// child made by appending a token can reuse a copy of the state.
    auto next_conditionals(std::span<Prefix> prefixes, EvalMode mode = EvalMode::automatic) const -> Tensor;

    auto retnet() const noexcept -> RetNetModulus const*;

  private:
    auto tokens_of(std::span<SpinConfiguration const> configs) const -> std::vector<std::uint8_t>;
    auto masks_of(std::span<std::uint8_t const> tokens, std::size_t batch) const -> std::vector<std::uint8_t>;
    auto log_amplitudes_chunk(std::span<SpinConfiguration const> configs, EvalMode mode) const
        -> std::vector<LogAmplitude>;

    AnsatzConfig config_;
    SystemInfo system_;
    nn::ParameterStore store_;
    std::unique_ptr<ModulusNetwork> modulus_;
    std::unique_ptr<PhaseNetwork> phase_;
};

} // namespace retnqs::ansatz
