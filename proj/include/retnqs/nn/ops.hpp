#pragma once

// Differentiable primitives recorded on a Tape. Sequence-aware ops treat a
// [batch*n_seq x d] matrix as `batch` consecutive sequences of n_seq rows.

#include "retnqs/nn/tape.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace retnqs::nn {

auto linear(Var x, Var w, std::optional<Var> bias = std::nullopt) -> Var;
auto add(Var a, Var b) -> Var;
auto mul(Var a, Var b) -> Var;
auto reshape(Var x, std::vector<std::size_t> shape) -> Var;

auto swish(Var x) -> Var;
auto gelu(Var x) -> Var;
/// scale * tanh(x)
auto scaled_tanh(Var x, double scale) -> Var;

/// Row-wise softmax over the last axis (no masking).
auto softmax(Var x) -> Var;
auto layer_norm(Var x, Var gamma, Var beta) -> Var;
/// Non-affine normalization of `groups` equal channel groups per row.
auto group_norm(Var x, std::size_t groups) -> Var;

/// Rotary position encoding on every head of width head_dim; the position
/// of row r is r % n_seq.
auto rotary(Var x, std::size_t n_seq, std::size_t head_dim) -> Var;

/// Parallel retention (Q K^T . D) V for a single head, D_ts = gamma^(t-s) for s <= t.
auto retention(Var q, Var k, Var v, std::size_t n_seq, double gamma) -> Var;

/// Causal scaled dot-product attention for a single head.
auto causal_attention(Var q, Var k, Var v, std::size_t n_seq) -> Var;

/// Rows of `table` selected by `ids`.
auto embedding(Var table, std::vector<std::size_t> ids) -> Var;
/// x[r] += table[r % n_seq]
auto add_positional(Var x, Var table, std::size_t n_seq) -> Var;

auto slice_cols(Var x, std::size_t start, std::size_t count) -> Var;
auto concat_cols(std::span<Var const> parts) -> Var;

/// Sum over each sequence of log softmax(logits)[target] where the softmax is
/// restricted to feasible entries. Rows whose target is infeasible contribute
/// zero; the caller tracks such sequences separately.
///
/// logits: [batch*n_seq x V]; feasible: batch*n_seq*V flags; targets: batch*n_seq.
/// Result shape: [batch].
auto sequence_log_prob(Var logits, std::vector<std::uint8_t> feasible,
                       std::vector<std::size_t> targets, std::size_t n_seq) -> Var;

} // namespace retnqs::nn
