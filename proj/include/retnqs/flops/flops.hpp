#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace retnqs::flops {

/// Leading-order model dimensions for a stack of identical blocks.
struct ModelDims {
    std::uint64_t n_block = 1;
    std::uint64_t d_model = 16;
    std::uint64_t d_retn = 16;
    std::uint64_t d_ff = 64;
    std::uint64_t n_seq = 1;

    void validate() const;
};

enum class Form { retnet_parallel, retnet_recurrent, transformer };

auto parse_form(std::string_view name) -> Form;
auto to_string(Form form) -> std::string;

/// Trunk parameters: QKV (3 d_model d_retn), two post-retention projections
/// (2 d_model d_retn) and the feedforward pair (2 d_model d_ff) per block.
auto param_count(ModelDims const& d) -> std::uint64_t;

/// Forward-pass FLOPs for one token. Nonlinearities, biases and
/// normalizations are ignored.
auto flops_per_token(ModelDims const& d, Form form) -> std::uint64_t;

/// Sequence length above which recurrent retention needs fewer FLOPs per
/// token than attention: (5 d_retn^2 + 2 d_model d_retn) / (4 d_retn).
auto crossover_seq_len(ModelDims const& d) -> double;

} // namespace retnqs::flops
