#include "retnqs/ansatz/ansatz.hpp"

#include "retnqs/nn/kernels.hpp"
#include "retnqs/nn/ops.hpp"
#include "retnqs/util/errors.hpp"
#include "retnqs/util/parallel.hpp"
#include "retnqs/util/rng.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace retnqs::ansatz {

namespace {
constexpr std::size_t inference_chunk = 2048;
constexpr double neg_inf = -std::numeric_limits<double>::infinity();

auto wrap_phase(double phi) -> double
{
    auto const r = std::remainder(phi, 2.0 * std::numbers::pi);
    return r >= std::numbers::pi ? r - 2.0 * std::numbers::pi : r;
}
} // namespace

auto LogAmplitude::value() const -> std::complex<double>
{
    if (!feasible) { return {0.0, 0.0}; }
    return std::polar(std::exp(log_modulus), phase);
}

auto LogAmplitude::probability() const -> double { return feasible ? std::exp(2.0 * log_modulus) : 0.0; }

Ansatz::Ansatz(AnsatzConfig config, SystemInfo system, std::uint64_t seed)
    : config_{std::move(config)}, system_{system}
{
    config_.validate();
    system_.validate();
    auto rng = derive_stream(seed, {0x616e7361747a});
    modulus_ = make_modulus(config_, system_.n_orbitals(), store_, rng);
    phase_ = std::make_unique<PhaseNetwork>(config_, system_.n_qubits, store_, rng);
}

Ansatz::Ansatz(Ansatz const& other) : Ansatz{other.config_, other.system_, 0} { store_ = other.store_; }

auto Ansatz::operator=(Ansatz const& other) -> Ansatz&
{
    if (this != &other) { *this = Ansatz{other}; }
    return *this;
}

Ansatz::~Ansatz() = default;

auto Ansatz::trunk_weight_count() const -> std::size_t { return modulus_->trunk_weight_count(store_); }

auto Ansatz::resolve(EvalMode mode) const -> EvalMode
{
    if (mode == EvalMode::automatic) {
        return config_.kind == Kind::retnet ? EvalMode::recurrent : EvalMode::parallel;
    }
    if (mode == EvalMode::recurrent && config_.kind != Kind::retnet) {
        throw UsageError{"recurrent evaluation requires the retnet ansatz, not " + to_string(config_.kind)};
    }
    return mode;
}

auto Ansatz::retnet() const noexcept -> RetNetModulus const*
{
    return dynamic_cast<RetNetModulus const*>(modulus_.get());
}

auto Ansatz::bind(Tape& tape) const -> std::vector<Var>
{
    std::vector<Var> params;
    params.reserve(store_.size());
    for (std::size_t i = 0; i < store_.size(); ++i) { params.push_back(tape.parameter(store_, i)); }
    return params;
}

auto Ansatz::tokens_of(std::span<SpinConfiguration const> configs) const -> std::vector<std::uint8_t>
{
    auto const n_seq = n_orbitals();
    std::vector<std::uint8_t> tokens(configs.size() * n_seq);
    for (std::size_t b = 0; b < configs.size(); ++b) {
        auto const seq = encode(configs[b], system_.n_qubits);
        std::copy(seq.begin(), seq.end(), tokens.begin() + static_cast<std::ptrdiff_t>(b * n_seq));
    }
    return tokens;
}

auto Ansatz::masks_of(std::span<std::uint8_t const> tokens, std::size_t batch) const -> std::vector<std::uint8_t>
{
    auto const n_seq = n_orbitals();
    std::vector<std::uint8_t> masks(batch * n_seq * vocab_size);
    for (std::size_t b = 0; b < batch; ++b) {
        PrefixCounts counts;
        for (std::size_t j = 0; j < n_seq; ++j) {
            auto const ok = feasible_tokens(system_, counts);
            std::copy(ok.begin(), ok.end(), masks.begin() + static_cast<std::ptrdiff_t>((b * n_seq + j) * vocab_size));
            counts.push(tokens[b * n_seq + j]);
        }
    }
    return masks;
}

auto Ansatz::forward(Tape& tape, std::span<Var const> params, std::span<SpinConfiguration const> configs) const
    -> Trace
{
    if (configs.empty()) { throw DimensionError{"ansatz forward: empty batch"}; }
    auto const batch = configs.size();
    auto const n_seq = n_orbitals();
    auto tokens = tokens_of(configs);
    auto masks = masks_of(tokens, batch);

    Trace trace;
    trace.feasible.resize(batch);
    for (std::size_t b = 0; b < batch; ++b) { trace.feasible[b] = in_sector(system_, configs[b]) ? 1 : 0; }

    auto logits = modulus_->logits(tape, params, tokens, batch);
    std::vector<std::size_t> targets(tokens.begin(), tokens.end());
    auto log_prob = nn::sequence_log_prob(logits, std::move(masks), std::move(targets), n_seq);
    Tensor half{{batch}, 0.5};
    trace.log_modulus = nn::mul(log_prob, tape.constant(std::move(half)));
    trace.phase = phase_->forward(tape, params, configs);
    return trace;
}

auto Ansatz::forward(Tape& tape, std::span<SpinConfiguration const> configs) const -> Trace
{
    auto params = bind(tape);
    return forward(tape, params, configs);
}

auto Ansatz::log_amplitudes_chunk(std::span<SpinConfiguration const> configs, EvalMode mode) const
    -> std::vector<LogAmplitude>
{
    auto const batch = configs.size();
    auto const n_seq = n_orbitals();
    std::vector<LogAmplitude> out(batch);
    Tape tape{Tape::Mode::inference};
    auto params = bind(tape);
    auto phase = phase_->forward(tape, params, configs);

    auto probs = conditionals(configs, mode);
    auto tokens = tokens_of(configs);
    for (std::size_t b = 0; b < batch; ++b) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n_seq && acc != neg_inf; ++j) {
            auto const p = probs.at(b * n_seq + j, tokens[b * n_seq + j]);
            acc = p > 0.0 ? acc + std::log(p) : neg_inf;
        }
        out[b].feasible = acc != neg_inf && in_sector(system_, configs[b]);
        out[b].log_modulus = out[b].feasible ? 0.5 * acc : neg_inf;
        out[b].phase = wrap_phase(phase.value()[b]);
    }
    return out;
}

auto Ansatz::log_amplitudes(std::span<SpinConfiguration const> configs, EvalMode mode) const
    -> std::vector<LogAmplitude>
{
    mode = resolve(mode);
    std::vector<LogAmplitude> out(configs.size());
    auto const n_chunks = (configs.size() + inference_chunk - 1) / inference_chunk;
    parallel_for(n_chunks, default_worker_count(), [&](std::size_t begin, std::size_t end) {
        for (auto c = begin; c < end; ++c) {
            auto const lo = c * inference_chunk;
            auto const n = std::min(inference_chunk, configs.size() - lo);
            auto part = log_amplitudes_chunk(configs.subspan(lo, n), mode);
            std::copy(part.begin(), part.end(), out.begin() + static_cast<std::ptrdiff_t>(lo));
        }
    });
    return out;
}

auto Ansatz::log_amplitude(SpinConfiguration x, EvalMode mode) const -> LogAmplitude
{
    return log_amplitudes(std::span{&x, 1}, mode).front();
}

auto Ansatz::conditionals(std::span<SpinConfiguration const> configs, EvalMode mode) const -> Tensor
{
    mode = resolve(mode);
    auto const batch = configs.size();
    auto const n_seq = n_orbitals();
    if (batch == 0) { throw DimensionError{"conditionals: empty batch"}; }
    auto tokens = tokens_of(configs);
    auto masks = masks_of(tokens, batch);
    Tensor probs{{batch * n_seq, vocab_size}};

    auto normalize = [&](std::size_t row, std::span<double const> logits) {
        std::span<std::uint8_t const> feasible{masks.data() + row * vocab_size, vocab_size};
        // A row with nothing feasible follows an infeasible token and stays zero.
        nn::kernels::masked_softmax_row(logits, feasible, probs.row(row));
    };

    if (mode == EvalMode::parallel) {
        Tape tape{Tape::Mode::inference};
        auto params = bind(tape);
        auto logits = modulus_->logits(tape, params, tokens, batch);
        for (std::size_t r = 0; r < batch * n_seq; ++r) { normalize(r, logits.value().row(r)); }
        return probs;
    }

    auto const* net = retnet();
    std::vector<RetentionState> states(batch, net->initial_state());
    std::vector<RetentionState*> handles(batch);
    for (std::size_t b = 0; b < batch; ++b) { handles[b] = &states[b]; }
    std::vector<std::size_t> inputs(batch, start_token);
    for (std::size_t j = 0; j < n_seq; ++j) {
        auto logits = net->step(store_, handles, inputs);
        for (std::size_t b = 0; b < batch; ++b) {
            normalize(b * n_seq + j, logits.row(b));
            inputs[b] = tokens[b * n_seq + j];
        }
    }
    return probs;
}

auto Ansatz::root_prefix(EvalMode mode) const -> Prefix
{
    Prefix root;
    if (resolve(mode) == EvalMode::recurrent) { root.state = retnet()->initial_state(); }
    return root;
}

auto Ansatz::next_conditionals(std::span<Prefix> prefixes, EvalMode mode) const -> Tensor
{
    mode = resolve(mode);
    auto const n = prefixes.size();
    auto const n_seq = n_orbitals();
    Tensor logits;
    if (mode == EvalMode::recurrent) {
        std::vector<RetentionState*> handles(n);
        std::vector<std::size_t> inputs(n);
        for (std::size_t i = 0; i < n; ++i) {
            auto& p = prefixes[i];
            if (!p.state || p.state->position != p.tokens.size()) {
                throw UsageError{"next_conditionals: prefix has no recurrent state matching its length"};
            }
            handles[i] = &*p.state;
            inputs[i] = p.tokens.empty() ? start_token : p.tokens.back();
        }
        logits = retnet()->step(store_, handles, inputs);
    } else {
        std::vector<std::uint8_t> tokens(n * n_seq, 0);
        for (std::size_t i = 0; i < n; ++i) {
            std::copy(prefixes[i].tokens.begin(), prefixes[i].tokens.end(),
                      tokens.begin() + static_cast<std::ptrdiff_t>(i * n_seq));
        }
        Tape tape{Tape::Mode::inference};
        auto params = bind(tape);
        auto all = modulus_->logits(tape, params, tokens, n);
        logits = Tensor{{n, vocab_size}};
        for (std::size_t i = 0; i < n; ++i) {
            auto const src = all.value().row(i * n_seq + prefixes[i].tokens.size());
            std::copy(src.begin(), src.end(), logits.row(i).begin());
        }
    }

    Tensor probs{{n, vocab_size}};
    for (std::size_t i = 0; i < n; ++i) {
        if (prefixes[i].tokens.size() >= n_seq) { throw UsageError{"next_conditionals: prefix already complete"}; }
        auto const ok = feasible_tokens(system_, prefixes[i].counts);
        if (!nn::kernels::masked_softmax_row(logits.row(i), ok, probs.row(i))) {
            throw std::logic_error{"next_conditionals: prefix has no feasible continuation"};
        }
    }
    return probs;
}

} // namespace retnqs::ansatz
