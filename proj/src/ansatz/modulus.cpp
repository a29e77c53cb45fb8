#include "retnqs/ansatz/modulus.hpp"

#include "retnqs/nn/ops.hpp"
#include "retnqs/util/errors.hpp"

#include <numbers>

namespace retnqs::ansatz {

namespace {

auto add_matrix(ParameterStore& store, std::string const& name, std::size_t fan_in, std::size_t fan_out,
                std::mt19937_64& rng) -> std::size_t
{
    return store.add(name, nn::xavier_uniform(fan_in, fan_out, rng));
}

auto add_vector(ParameterStore& store, std::string const& name, std::size_t n, double fill) -> std::size_t
{
    return store.add(name, Tensor{{n}, fill});
}

auto shifted_inputs(std::span<std::uint8_t const> tokens, std::size_t batch, std::size_t n_seq)
    -> std::vector<std::size_t>
{
    if (tokens.size() != batch * n_seq) {
        throw DimensionError{"expected " + std::to_string(batch * n_seq) + " tokens, got "
                             + std::to_string(tokens.size())};
    }
    std::vector<std::size_t> ids(tokens.size());
    for (std::size_t b = 0; b < batch; ++b) {
        ids[b * n_seq] = start_token;
        for (std::size_t j = 1; j < n_seq; ++j) { ids[b * n_seq + j] = tokens[b * n_seq + j - 1]; }
    }
    return ids;
}

} // namespace

DecoderTrunk::DecoderTrunk(AnsatzConfig const& cfg, std::size_t n_seq, ParameterStore& store,
                           std::mt19937_64& rng, bool gated)
    : cfg_{cfg}, n_seq_{n_seq}
{
    auto const d = cfg.d_model;
    embed_table = add_matrix(store, "embed", vocab_size + 1, d, rng);
    pos_table = add_matrix(store, "pos", n_seq, d, rng);
    for (std::size_t l = 0; l < cfg.n_block; ++l) {
        auto const p = "block" + std::to_string(l) + ".";
        BlockParams b{};
        b.ln1_gamma = add_vector(store, p + "ln1.gamma", d, 1.0);
        b.ln1_beta = add_vector(store, p + "ln1.beta", d, 0.0);
        b.wq = add_matrix(store, p + "wq", d, cfg.d_retn, rng);
        b.wk = add_matrix(store, p + "wk", d, cfg.d_retn, rng);
        b.wv = add_matrix(store, p + "wv", d, cfg.d_retn, rng);
        b.wg = gated ? add_matrix(store, p + "wg", d, cfg.d_retn, rng) : 0;
        b.wo = add_matrix(store, p + "wo", cfg.d_retn, d, rng);
        b.ln2_gamma = add_vector(store, p + "ln2.gamma", d, 1.0);
        b.ln2_beta = add_vector(store, p + "ln2.beta", d, 0.0);
        b.ff1_w = add_matrix(store, p + "ff1.w", d, cfg.d_ff, rng);
        b.ff1_b = add_vector(store, p + "ff1.b", cfg.d_ff, 0.0);
        b.ff2_w = add_matrix(store, p + "ff2.w", cfg.d_ff, d, rng);
        b.ff2_b = add_vector(store, p + "ff2.b", d, 0.0);
        blocks_.push_back(b);
    }
    final_gamma = add_vector(store, "final_ln.gamma", d, 1.0);
    final_beta = add_vector(store, "final_ln.beta", d, 0.0);
    head_w = add_matrix(store, "head.w", d, vocab_size, rng);
    head_b = add_vector(store, "head.b", vocab_size, 0.0);
}

auto DecoderTrunk::embed(Tape& tape, std::span<Var const> params, std::span<std::uint8_t const> tokens,
                         std::size_t batch) const -> Var
{
    (void)tape;
    auto x = nn::embedding(params[embed_table], shifted_inputs(tokens, batch, n_seq_));
    return nn::add_positional(x, params[pos_table], n_seq_);
}

auto DecoderTrunk::feedforward(Tape& tape, std::span<Var const> params, BlockParams const& b, Var x) const -> Var
{
    (void)tape;
    auto h = nn::layer_norm(x, params[b.ln2_gamma], params[b.ln2_beta]);
    h = nn::gelu(nn::linear(h, params[b.ff1_w], params[b.ff1_b]));
    h = nn::linear(h, params[b.ff2_w], params[b.ff2_b]);
    return nn::add(x, h);
}

auto DecoderTrunk::head(Tape& tape, std::span<Var const> params, Var x) const -> Var
{
    (void)tape;
    auto h = nn::layer_norm(x, params[final_gamma], params[final_beta]);
    return nn::linear(h, params[head_w], params[head_b]);
}

auto DecoderTrunk::weight_count(ParameterStore const& store) const -> std::size_t
{
    std::size_t n = 0;
    for (auto const& b : blocks_) {
        for (auto i : {b.wq, b.wk, b.wv, b.wo, b.ff1_w, b.ff2_w}) { n += store.value(i).size(); }
        if (b.wg != 0) { n += store.value(b.wg).size(); }
    }
    return n;
}

TransformerModulus::TransformerModulus(AnsatzConfig const& cfg, std::size_t n_seq, ParameterStore& store,
                                       std::mt19937_64& rng)
    : trunk_{cfg, n_seq, store, rng, false}
{
}

auto TransformerModulus::logits(Tape& tape, std::span<Var const> params, std::span<std::uint8_t const> tokens,
                                std::size_t batch) const -> Var
{
    auto const& cfg = trunk_.config();
    auto const dk = cfg.head_dim();
    auto const n_seq = trunk_.n_seq();
    auto x = trunk_.embed(tape, params, tokens, batch);
    for (auto const& b : trunk_.blocks()) {
        auto h = nn::layer_norm(x, params[b.ln1_gamma], params[b.ln1_beta]);
        auto q = nn::linear(h, params[b.wq]);
        auto k = nn::linear(h, params[b.wk]);
        auto v = nn::linear(h, params[b.wv]);
        std::vector<Var> heads;
        for (std::size_t i = 0; i < cfg.n_heads; ++i) {
            heads.push_back(nn::causal_attention(nn::slice_cols(q, i * dk, dk), nn::slice_cols(k, i * dk, dk),
                                                 nn::slice_cols(v, i * dk, dk), n_seq));
        }
        auto y = cfg.n_heads == 1 ? heads.front() : nn::concat_cols(heads);
        x = nn::add(x, nn::linear(y, params[b.wo]));
        x = trunk_.feedforward(tape, params, b, x);
    }
    return trunk_.head(tape, params, x);
}

auto TransformerModulus::trunk_weight_count(ParameterStore const& store) const -> std::size_t
{
    return trunk_.weight_count(store);
}

MadeModulus::MadeModulus(AnsatzConfig const& cfg, std::size_t n_seq, ParameterStore& store,
                         std::mt19937_64& rng)
    : n_seq_{n_seq}
{
    // Connectivity degrees: inputs and outputs of position j carry j+1,
    // hidden units cycle through 1..L-1.
    auto const width = vocab_size * n_seq;
    std::vector<std::size_t> in_degree(width);
    for (std::size_t u = 0; u < width; ++u) { in_degree[u] = u / vocab_size + 1; }
    auto const cycle = std::max<std::size_t>(1, n_seq - 1);

    std::vector<std::size_t> prev = in_degree;
    auto layers = cfg.made_hidden;
    layers.push_back(width);
    for (std::size_t l = 0; l < layers.size(); ++l) {
        auto const last = l + 1 == layers.size();
        std::vector<std::size_t> degree(layers[l]);
        for (std::size_t u = 0; u < layers[l]; ++u) { degree[u] = last ? u / vocab_size + 1 : 1 + (u % cycle); }
        Tensor mask{{prev.size(), layers[l]}};
        for (std::size_t i = 0; i < prev.size(); ++i) {
            for (std::size_t o = 0; o < layers[l]; ++o) {
                auto const connected = last ? degree[o] > prev[i] : degree[o] >= prev[i];
                mask.at(i, o) = connected ? 1.0 : 0.0;
            }
        }
        auto w = nn::xavier_uniform(prev.size(), layers[l], rng);
        for (std::size_t i = 0; i < w.size(); ++i) { w[i] *= mask[i]; }
        weights_.push_back(store.add("made.l" + std::to_string(l) + ".w", std::move(w)));
        biases_.push_back(add_vector(store, "made.l" + std::to_string(l) + ".b", layers[l], 0.0));
        masks_.push_back(std::move(mask));
        prev = std::move(degree);
    }
}

auto MadeModulus::logits(Tape& tape, std::span<Var const> params, std::span<std::uint8_t const> tokens,
                         std::size_t batch) const -> Var
{
    if (tokens.size() != batch * n_seq_) { throw DimensionError{"made: token count does not match batch"}; }
    auto const width = vocab_size * n_seq_;
    Tensor onehot{{batch, width}};
    for (std::size_t b = 0; b < batch; ++b) {
        for (std::size_t j = 0; j < n_seq_; ++j) { onehot.at(b, j * vocab_size + tokens[b * n_seq_ + j]) = 1.0; }
    }
    auto h = tape.constant(std::move(onehot));
    for (std::size_t l = 0; l < weights_.size(); ++l) {
        auto w = nn::mul(params[weights_[l]], tape.constant(masks_[l]));
        h = nn::linear(h, w, params[biases_[l]]);
        if (l + 1 < weights_.size()) { h = nn::gelu(h); }
    }
    return nn::reshape(h, {batch * n_seq_, vocab_size});
}

auto MadeModulus::trunk_weight_count(ParameterStore const& store) const -> std::size_t
{
    std::size_t n = 0;
    for (auto i : weights_) { n += store.value(i).size(); }
    return n;
}

PhaseNetwork::PhaseNetwork(AnsatzConfig const& cfg, std::size_t n_qubits, ParameterStore& store,
                           std::mt19937_64& rng)
    : n_qubits_{n_qubits}
{
    auto fan_in = n_qubits;
    auto widths = cfg.phase_hidden;
    widths.push_back(1);
    for (std::size_t l = 0; l < widths.size(); ++l) {
        auto const p = "phase.l" + std::to_string(l) + ".";
        weights_.push_back(add_matrix(store, p + "w", fan_in, widths[l], rng));
        biases_.push_back(add_vector(store, p + "b", widths[l], 0.0));
        fan_in = widths[l];
    }
}

auto PhaseNetwork::forward(Tape& tape, std::span<Var const> params,
                           std::span<ham::SpinConfiguration const> configs) const -> Var
{
    auto const batch = configs.size();
    Tensor spins{{batch, n_qubits_}};
    for (std::size_t b = 0; b < batch; ++b) {
        for (std::size_t q = 0; q < n_qubits_; ++q) { spins.at(b, q) = ((configs[b] >> q) & 1U) != 0 ? 1.0 : -1.0; }
    }
    auto h = tape.constant(std::move(spins));
    for (std::size_t l = 0; l < weights_.size(); ++l) {
        h = nn::linear(h, params[weights_[l]], params[biases_[l]]);
        if (l + 1 < weights_.size()) { h = nn::gelu(h); }
    }
    return nn::reshape(h, {batch});
}

auto make_modulus(AnsatzConfig const& cfg, std::size_t n_seq, ParameterStore& store, std::mt19937_64& rng)
    -> std::unique_ptr<ModulusNetwork>
{
    switch (cfg.kind) {
    case Kind::retnet: return std::make_unique<RetNetModulus>(cfg, n_seq, store, rng);
    case Kind::transformer: return std::make_unique<TransformerModulus>(cfg, n_seq, store, rng);
    case Kind::made: return std::make_unique<MadeModulus>(cfg, n_seq, store, rng);
    }
    throw ConfigError{"unknown ansatz kind"};
}

} // namespace retnqs::ansatz
