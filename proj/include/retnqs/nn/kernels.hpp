#pragma once

// Raw numerical kernels shared by the differentiable tape ops and the
// recurrent inference path, so both evaluate identical arithmetic.

#include "retnqs/nn/tensor.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>

namespace retnqs::nn::kernels {

inline constexpr double layer_norm_eps = 1e-10;
inline constexpr double group_norm_eps = 1e-5;

/// C = A * B for row-major A [m x k], B [k x n].
void matmul(double const* a, double const* b, double* c, std::size_t m, std::size_t k, std::size_t n);
/// C += A^T * B for A [m x k], B [m x n], C [k x n].
void matmul_tn_acc(double const* a, double const* b, double* c, std::size_t m, std::size_t k,
                   std::size_t n);
/// C += A * B^T for A [m x n], B [k x n], C [m x k].
void matmul_nt_acc(double const* a, double const* b, double* c, std::size_t m, std::size_t n,
                   std::size_t k);

/// y = x W (+ bias). x: [rows x d_in], W: [d_in x d_out].
auto linear(Tensor const& x, Tensor const& w, Tensor const* bias) -> Tensor;

inline auto sigmoid(double x) noexcept -> double { return 1.0 / (1.0 + std::exp(-x)); }
inline auto swish(double x) noexcept -> double { return x * sigmoid(x); }
inline auto swish_grad(double x) noexcept -> double
{
    auto const s = sigmoid(x);
    return s * (1.0 + x * (1.0 - s));
}

// Exact (erf) GELU.
inline auto gelu(double x) noexcept -> double
{
    return 0.5 * x * (1.0 + std::erf(x * (0.5 * std::numbers::sqrt2)));
}
inline auto gelu_grad(double x) noexcept -> double
{
    auto const cdf = 0.5 * (1.0 + std::erf(x * (0.5 * std::numbers::sqrt2)));
    auto const pdf = std::exp(-0.5 * x * x) * 0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2;
    return cdf + x * pdf;
}

/// Normalizes `in` to zero mean / unit variance, then applies the affine map.
/// Returns the reciprocal standard deviation.
auto layer_norm_row(std::span<double const> in, std::span<double> out,
                    std::span<double const> gamma, std::span<double const> beta) -> double;

/// Non-affine normalization of each of `groups` contiguous channel groups.
/// Writes the reciprocal standard deviation of each group to `rstd`.
void group_norm_row(std::span<double const> in, std::span<double> out, std::size_t groups,
                    std::span<double> rstd);

/// Rotary frequency of channel pair `k` for a head of width `head_dim`.
inline auto rotary_frequency(std::size_t k, std::size_t head_dim) -> double
{
    return std::pow(10000.0, -2.0 * static_cast<double>(k) / static_cast<double>(head_dim));
}

/// Rotates consecutive channel pairs of every head by angle position * theta_k.
/// `inverse` applies the transpose rotation (used by the backward pass).
void rotate_row(std::span<double> row, std::size_t position, std::size_t head_dim, bool inverse = false);

/// Softmax over the feasible entries of a row of logits; masked entries are
/// exactly zero. Returns false when no entry is feasible.
auto masked_softmax_row(std::span<double const> logits, std::span<std::uint8_t const> feasible,
                        std::span<double> probs) -> bool;

} // namespace retnqs::nn::kernels
