#pragma once

// Modulus networks (per-position 4-way logits) and the phase network.
//
// Every network registers its parameters in a shared ParameterStore at
// construction and reads them back through a vector of tape leaves (one per
// store entry) during a forward pass.

#include "retnqs/ansatz/config.hpp"
#include "retnqs/hamiltonian/pauli.hpp"
#include "retnqs/nn/parameters.hpp"
#include "retnqs/nn/tape.hpp"

#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace retnqs::ansatz {

using nn::ParameterStore;
using nn::Tape;
using nn::Tensor;
using nn::Var;

/// Logits for every position of every sequence, given the actual tokens.
/// Position j may depend only on tokens[0..j-1].
class ModulusNetwork {
  public:
    virtual ~ModulusNetwork() = default;

    /// tokens: batch * n_seq values in [0, 4). Returns [batch*n_seq x 4].
    virtual auto logits(Tape& tape, std::span<Var const> params, std::span<std::uint8_t const> tokens,
                        std::size_t batch) const -> Var = 0;

    /// Weights of the attention/retention projections and feedforward layers.
    virtual auto trunk_weight_count(ParameterStore const& store) const -> std::size_t = 0;
};

/// Parameter indices of one pre-LN decoder block.
struct BlockParams {
    std::size_t ln1_gamma, ln1_beta;
    std::size_t wq, wk, wv;
    std::size_t wg; // retnet only
    std::size_t wo;
    std::size_t ln2_gamma, ln2_beta;
    std::size_t ff1_w, ff1_b, ff2_w, ff2_b;
};

/// Shared embedding, block stack and output head of the sequence models.
class DecoderTrunk {
  public:
    DecoderTrunk(AnsatzConfig const& cfg, std::size_t n_seq, ParameterStore& store, std::mt19937_64& rng,
                 bool gated);

    auto config() const noexcept -> AnsatzConfig const& { return cfg_; }
    auto n_seq() const noexcept -> std::size_t { return n_seq_; }
    auto blocks() const noexcept -> std::vector<BlockParams> const& { return blocks_; }

    /// [start, t_0 .. t_{L-2}] for each sequence, embedded with positions.
    auto embed(Tape& tape, std::span<Var const> params, std::span<std::uint8_t const> tokens,
               std::size_t batch) const -> Var;
    auto feedforward(Tape& tape, std::span<Var const> params, BlockParams const& b, Var x) const -> Var;
    auto head(Tape& tape, std::span<Var const> params, Var x) const -> Var;
    auto weight_count(ParameterStore const& store) const -> std::size_t;

    std::size_t embed_table = 0;
    std::size_t pos_table = 0;
    std::size_t final_gamma = 0, final_beta = 0;
    std::size_t head_w = 0, head_b = 0;

  private:
    AnsatzConfig cfg_;
    std::size_t n_seq_;
    std::vector<BlockParams> blocks_;
};

/// Per block, per head d_k x d_k memory matrices plus the next position.
struct RetentionState {
    std::size_t position = 0;
    std::vector<double> memory;

    friend auto operator==(RetentionState const&, RetentionState const&) -> bool = default;
};

class RetNetModulus final : public ModulusNetwork {
  public:
    RetNetModulus(AnsatzConfig const& cfg, std::size_t n_seq, ParameterStore& store, std::mt19937_64& rng);

    auto logits(Tape& tape, std::span<Var const> params, std::span<std::uint8_t const> tokens,
                std::size_t batch) const -> Var override;
    auto trunk_weight_count(ParameterStore const& store) const -> std::size_t override;

    /// Output of the multi-scale retention sublayer for normalized input h.
    auto multiscale(Tape& tape, std::span<Var const> params, BlockParams const& b, Var h) const -> Var;

    auto initial_state() const -> RetentionState;
    /// Consumes one input token (start_token or 0..3) per state, advancing it.
    /// Returns next-token logits [states x 4].
    auto step(ParameterStore const& store, std::span<RetentionState* const> states,
              std::span<std::size_t const> inputs) const -> Tensor;

  private:
    DecoderTrunk trunk_;
};

class TransformerModulus final : public ModulusNetwork {
  public:
    TransformerModulus(AnsatzConfig const& cfg, std::size_t n_seq, ParameterStore& store,
                       std::mt19937_64& rng);

    auto logits(Tape& tape, std::span<Var const> params, std::span<std::uint8_t const> tokens,
                std::size_t batch) const -> Var override;
    auto trunk_weight_count(ParameterStore const& store) const -> std::size_t override;

  private:
    DecoderTrunk trunk_;
};

/// Masked autoencoder over one-hot orbital tokens.
class MadeModulus final : public ModulusNetwork {
  public:
    MadeModulus(AnsatzConfig const& cfg, std::size_t n_seq, ParameterStore& store, std::mt19937_64& rng);

    auto logits(Tape& tape, std::span<Var const> params, std::span<std::uint8_t const> tokens,
                std::size_t batch) const -> Var override;
    auto trunk_weight_count(ParameterStore const& store) const -> std::size_t override;

    auto masks() const noexcept -> std::vector<Tensor> const& { return masks_; }

  private:
    std::size_t n_seq_;
    std::vector<std::size_t> weights_;
    std::vector<std::size_t> biases_;
    std::vector<Tensor> masks_;
};

/// Feedforward phase on the +-1 spin string: GELU hidden layers, linear output.
class PhaseNetwork {
  public:
    PhaseNetwork(AnsatzConfig const& cfg, std::size_t n_qubits, ParameterStore& store, std::mt19937_64& rng);

    /// Returns shape [batch].
    auto forward(Tape& tape, std::span<Var const> params, std::span<ham::SpinConfiguration const> configs) const
        -> Var;

  private:
    std::size_t n_qubits_;
    std::vector<std::size_t> weights_;
    std::vector<std::size_t> biases_;
};

auto make_modulus(AnsatzConfig const& cfg, std::size_t n_seq, ParameterStore& store, std::mt19937_64& rng)
    -> std::unique_ptr<ModulusNetwork>;

} // namespace retnqs::ansatz
