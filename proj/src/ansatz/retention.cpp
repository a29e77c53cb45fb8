#include "retnqs/ansatz/modulus.hpp"

#include "retnqs/nn/kernels.hpp"
#include "retnqs/nn/ops.hpp"
#include "retnqs/util/errors.hpp"

namespace retnqs::ansatz {

namespace k = nn::kernels;

RetNetModulus::RetNetModulus(AnsatzConfig const& cfg, std::size_t n_seq, ParameterStore& store,
                             std::mt19937_64& rng)
    : trunk_{cfg, n_seq, store, rng, true}
{
}

auto RetNetModulus::multiscale(Tape& tape, std::span<Var const> params, BlockParams const& b, Var h) const -> Var
{
    (void)tape;
    auto const& cfg = trunk_.config();
    auto const dk = cfg.head_dim();
    auto const n_seq = trunk_.n_seq();
    auto q = nn::rotary(nn::linear(h, params[b.wq]), n_seq, dk);
    auto kk = nn::rotary(nn::linear(h, params[b.wk]), n_seq, dk);
    auto v = nn::linear(h, params[b.wv]);
    std::vector<Var> heads;
    for (std::size_t i = 0; i < cfg.n_heads; ++i) {
        heads.push_back(nn::retention(nn::slice_cols(q, i * dk, dk), nn::slice_cols(kk, i * dk, dk),
                                      nn::slice_cols(v, i * dk, dk), n_seq, head_decay(i)));
    }
    auto y = cfg.n_heads == 1 ? heads.front() : nn::concat_cols(heads);
    y = nn::group_norm(y, cfg.n_heads);
    auto gate = nn::swish(nn::linear(h, params[b.wg]));
    return nn::linear(nn::mul(gate, y), params[b.wo]);
}

auto RetNetModulus::logits(Tape& tape, std::span<Var const> params, std::span<std::uint8_t const> tokens,
                           std::size_t batch) const -> Var
{
    auto x = trunk_.embed(tape, params, tokens, batch);
    for (auto const& b : trunk_.blocks()) {
        auto h = nn::layer_norm(x, params[b.ln1_gamma], params[b.ln1_beta]);
        x = nn::add(x, multiscale(tape, params, b, h));
        x = trunk_.feedforward(tape, params, b, x);
    }
    return trunk_.head(tape, params, x);
}

auto RetNetModulus::trunk_weight_count(ParameterStore const& store) const -> std::size_t
{
    return trunk_.weight_count(store);
}

auto RetNetModulus::initial_state() const -> RetentionState
{
    auto const& cfg = trunk_.config();
    auto const dk = cfg.head_dim();
    return RetentionState{0, std::vector<double>(cfg.n_block * cfg.n_heads * dk * dk, 0.0)};
}

auto RetNetModulus::step(ParameterStore const& store, std::span<RetentionState* const> states,
                         std::span<std::size_t const> inputs) const -> Tensor
{
    auto const& cfg = trunk_.config();
    auto const n = states.size();
    if (inputs.size() != n) { throw DimensionError{"retnet step: one input per state required"}; }
    auto const d = cfg.d_model;
    auto const dk = cfg.head_dim();
    auto const& embed = store.value(trunk_.embed_table);
    auto const& pos = store.value(trunk_.pos_table);

    Tensor x{{n, d}};
    for (std::size_t r = 0; r < n; ++r) {
        auto const t = states[r]->position;
        if (t >= trunk_.n_seq()) { throw UsageError{"retnet step: state already consumed the full sequence"}; }
        if (inputs[r] > start_token) { throw DimensionError{"retnet step: input token out of range"}; }
        for (std::size_t c = 0; c < d; ++c) { x.at(r, c) = embed.at(inputs[r], c) + pos.at(t, c); }
    }

    Tensor h{{n, d}};
    std::vector<double> rstd(cfg.n_heads);
    auto const& blocks = trunk_.blocks();
    for (std::size_t l = 0; l < blocks.size(); ++l) {
        auto const& b = blocks[l];
        for (std::size_t r = 0; r < n; ++r) {
            k::layer_norm_row(x.row(r), h.row(r), store.value(b.ln1_gamma).data(), store.value(b.ln1_beta).data());
        }
        auto q = k::linear(h, store.value(b.wq), nullptr);
        auto kt = k::linear(h, store.value(b.wk), nullptr);
        auto v = k::linear(h, store.value(b.wv), nullptr);
        Tensor y{{n, cfg.d_retn}};
        for (std::size_t r = 0; r < n; ++r) {
            auto const t = states[r]->position;
            k::rotate_row(q.row(r), t, dk);
            k::rotate_row(kt.row(r), t, dk);
            for (std::size_t i = 0; i < cfg.n_heads; ++i) {
                auto* s = states[r]->memory.data() + (l * cfg.n_heads + i) * dk * dk;
                auto const gamma = head_decay(i);
                auto const* ki = kt.raw() + r * cfg.d_retn + i * dk;
                auto const* vi = v.raw() + r * cfg.d_retn + i * dk;
                auto const* qi = q.raw() + r * cfg.d_retn + i * dk;
                auto* yi = y.raw() + r * cfg.d_retn + i * dk;
                for (std::size_t a = 0; a < dk; ++a) {
                    for (std::size_t c = 0; c < dk; ++c) { s[a * dk + c] = gamma * s[a * dk + c] + ki[a] * vi[c]; }
                }
                for (std::size_t c = 0; c < dk; ++c) {
                    double acc = 0.0;
                    for (std::size_t a = 0; a < dk; ++a) { acc += qi[a] * s[a * dk + c]; }
                    yi[c] = acc;
                }
            }
            k::group_norm_row(y.row(r), y.row(r), cfg.n_heads, rstd);
        }
        auto gate = k::linear(h, store.value(b.wg), nullptr);
        for (std::size_t i = 0; i < y.size(); ++i) { y[i] *= k::swish(gate[i]); }
        auto o = k::linear(y, store.value(b.wo), nullptr);
        for (std::size_t i = 0; i < x.size(); ++i) { x[i] += o[i]; }

        for (std::size_t r = 0; r < n; ++r) {
            k::layer_norm_row(x.row(r), h.row(r), store.value(b.ln2_gamma).data(), store.value(b.ln2_beta).data());
        }
        auto f = k::linear(h, store.value(b.ff1_w), &store.value(b.ff1_b));
        for (auto& e : f.data()) { e = k::gelu(e); }
        auto f2 = k::linear(f, store.value(b.ff2_w), &store.value(b.ff2_b));
        for (std::size_t i = 0; i < x.size(); ++i) { x[i] += f2[i]; }
    }
    for (std::size_t r = 0; r < n; ++r) {
        k::layer_norm_row(x.row(r), h.row(r), store.value(trunk_.final_gamma).data(),
                          store.value(trunk_.final_beta).data());
        ++states[r]->position;
    }
    return k::linear(h, store.value(trunk_.head_w), &store.value(trunk_.head_b));
}

} // namespace retnqs::ansatz
