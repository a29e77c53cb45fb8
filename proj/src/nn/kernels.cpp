#include "retnqs/nn/kernels.hpp"

#include "retnqs/util/errors.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <limits>

namespace retnqs::nn::kernels {

namespace {
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<RowMatrix const>;
using Map = Eigen::Map<RowMatrix>;
} // namespace

void matmul(double const* a, double const* b, double* c, std::size_t m, std::size_t k, std::size_t n)
{
    auto const A = ConstMap(a, static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(k));
    auto const B = ConstMap(b, static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(n));
    Map(c, static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n)).noalias() = A * B;
}

void matmul_tn_acc(double const* a, double const* b, double* c, std::size_t m, std::size_t k,
                   std::size_t n)
{
    auto const A = ConstMap(a, static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(k));
    auto const B = ConstMap(b, static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
    Map(c, static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(n)).noalias() += A.transpose() * B;
}

void matmul_nt_acc(double const* a, double const* b, double* c, std::size_t m, std::size_t n,
                   std::size_t k)
{
    auto const A = ConstMap(a, static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
    auto const B = ConstMap(b, static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(n));
    Map(c, static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(k)).noalias() += A * B.transpose();
}

auto linear(Tensor const& x, Tensor const& w, Tensor const* bias) -> Tensor
{
    if (w.rank() != 2 || x.cols() != w.shape()[0]) {
        throw DimensionError{"linear: input " + x.shape_string() + " incompatible with weight "
                             + w.shape_string()};
    }
    auto const rows = x.rows();
    auto const d_out = w.shape()[1];
    if (bias != nullptr && bias->size() != d_out) {
        throw DimensionError{"linear: bias " + bias->shape_string() + " does not match output width "
                             + std::to_string(d_out)};
    }
    Tensor y{{rows, d_out}};
    matmul(x.raw(), w.raw(), y.raw(), rows, x.cols(), d_out);
    if (bias != nullptr) {
        for (std::size_t r = 0; r < rows; ++r) {
            auto out = y.row(r);
            for (std::size_t c = 0; c < d_out; ++c) { out[c] += (*bias)[c]; }
        }
    }
    return y;
}

auto layer_norm_row(std::span<double const> in, std::span<double> out,
                    std::span<double const> gamma, std::span<double const> beta) -> double
{
    auto const n = static_cast<double>(in.size());
    double mean = 0.0;
    for (auto v : in) { mean += v; }
    mean /= n;
    double var = 0.0;
    for (auto v : in) { var += (v - mean) * (v - mean); }
    var /= n;
    auto const rstd = 1.0 / std::sqrt(var + layer_norm_eps);
    for (std::size_t i = 0; i < in.size(); ++i) {
        out[i] = (in[i] - mean) * rstd * gamma[i] + beta[i];
    }
    return rstd;
}

void group_norm_row(std::span<double const> in, std::span<double> out, std::size_t groups,
                    std::span<double> rstd)
{
    auto const width = in.size() / groups;
    for (std::size_t g = 0; g < groups; ++g) {
        auto const src = in.subspan(g * width, width);
        auto dst = out.subspan(g * width, width);
        double mean = 0.0;
        for (auto v : src) { mean += v; }
        mean /= static_cast<double>(width);
        double var = 0.0;
        for (auto v : src) { var += (v - mean) * (v - mean); }
        var /= static_cast<double>(width);
        rstd[g] = 1.0 / std::sqrt(var + group_norm_eps);
        for (std::size_t i = 0; i < width; ++i) { dst[i] = (src[i] - mean) * rstd[g]; }
    }
}

void rotate_row(std::span<double> row, std::size_t position, std::size_t head_dim, bool inverse)
{
    auto const n_heads = row.size() / head_dim;
    auto const sign = inverse ? -1.0 : 1.0;
    for (std::size_t k = 0; k < head_dim / 2; ++k) {
        auto const angle = sign * static_cast<double>(position) * rotary_frequency(k, head_dim);
        auto const c = std::cos(angle);
        auto const s = std::sin(angle);
        for (std::size_t h = 0; h < n_heads; ++h) {
            auto& re = row[h * head_dim + 2 * k];
            auto& im = row[h * head_dim + 2 * k + 1];
            auto const a = re;
            auto const b = im;
            re = a * c - b * s;
            im = a * s + b * c;
        }
    }
}

auto masked_softmax_row(std::span<double const> logits, std::span<std::uint8_t const> feasible,
                        std::span<double> probs) -> bool
{
    auto max_logit = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < logits.size(); ++i) {
        if (feasible[i] != 0) { max_logit = std::max(max_logit, logits[i]); }
    }
    if (max_logit == -std::numeric_limits<double>::infinity()) {
        std::fill(probs.begin(), probs.end(), 0.0);
        return false;
    }
    double z = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        probs[i] = feasible[i] != 0 ? std::exp(logits[i] - max_logit) : 0.0;
        z += probs[i];
    }
    for (auto& p : probs) { p /= z; }
    return true;
}

} // namespace retnqs::nn::kernels
