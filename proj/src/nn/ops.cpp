#include "retnqs/nn/ops.hpp"

#include "retnqs/nn/kernels.hpp"
#include "retnqs/util/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace retnqs::nn {

namespace {

void require_same_shape(Tensor const& a, Tensor const& b, char const* op)
{
    if (!a.same_shape(b)) {
        throw DimensionError{std::string{op} + ": shape " + a.shape_string() + " vs " + b.shape_string()};
    }
}

void require_sequences(Tensor const& x, std::size_t n_seq, char const* op)
{
    if (n_seq == 0 || x.rows() % n_seq != 0) {
        throw DimensionError{std::string{op} + ": " + std::to_string(x.rows())
                             + " rows do not split into sequences of length " + std::to_string(n_seq)};
    }
}

template <class F, class G>
auto elementwise(Var x, F&& f, G&& df) -> Var
{
    auto const& in = x.value();
    Tensor out{in.shape()};
    for (std::size_t i = 0; i < in.size(); ++i) { out[i] = f(in[i]); }
    return x.tape->record(std::move(out), {x}, [x, df](Tape& tape, std::size_t self) {
        auto const& g = tape.grad(self);
        auto const& in = tape.value(x);
        auto* dx = tape.grad_sink(x.id);
        for (std::size_t i = 0; i < in.size(); ++i) { (*dx)[i] += g[i] * df(in[i]); }
    });
}

auto decay_table(std::size_t n_seq, double gamma) -> std::vector<double>
{
    std::vector<double> powers(n_seq);
    for (std::size_t d = 0; d < n_seq; ++d) { powers[d] = std::pow(gamma, static_cast<double>(d)); }
    return powers;
}

auto dot(double const* a, double const* b, std::size_t n) -> double
{
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) { s += a[i] * b[i]; }
    return s;
}

} // namespace

auto linear(Var x, Var w, std::optional<Var> bias) -> Var
{
    auto y = kernels::linear(x.value(), w.value(), bias ? &bias->value() : nullptr);
    std::vector<Var> parents{x, w};
    if (bias) { parents.push_back(*bias); }
    return x.tape->record(std::move(y), parents, [x, w, bias](Tape& tape, std::size_t self) {
        auto const& g = tape.grad(self);
        auto const& xv = tape.value(x);
        auto const& wv = tape.value(w);
        auto const rows = xv.rows();
        auto const d_in = xv.cols();
        auto const d_out = wv.cols();
        if (auto* dx = tape.grad_sink(x.id)) {
            kernels::matmul_nt_acc(g.raw(), wv.raw(), dx->raw(), rows, d_out, d_in);
        }
        if (auto* dw = tape.grad_sink(w.id)) {
            kernels::matmul_tn_acc(xv.raw(), g.raw(), dw->raw(), rows, d_in, d_out);
        }
        if (bias) {
            if (auto* db = tape.grad_sink(bias->id)) {
                for (std::size_t r = 0; r < rows; ++r) {
                    for (std::size_t c = 0; c < d_out; ++c) { (*db)[c] += g.at(r, c); }
                }
            }
        }
    });
}

auto add(Var a, Var b) -> Var
{
    require_same_shape(a.value(), b.value(), "add");
    Tensor out = a.value();
    for (std::size_t i = 0; i < out.size(); ++i) { out[i] += b.value()[i]; }
    return a.tape->record(std::move(out), {a, b}, [a, b](Tape& tape, std::size_t self) {
        auto const& g = tape.grad(self);
        for (auto id : {a.id, b.id}) {
            if (auto* d = tape.grad_sink(id)) {
                for (std::size_t i = 0; i < g.size(); ++i) { (*d)[i] += g[i]; }
            }
        }
    });
}

auto mul(Var a, Var b) -> Var
{
    require_same_shape(a.value(), b.value(), "mul");
    Tensor out = a.value();
    for (std::size_t i = 0; i < out.size(); ++i) { out[i] *= b.value()[i]; }
    return a.tape->record(std::move(out), {a, b}, [a, b](Tape& tape, std::size_t self) {
        auto const& g = tape.grad(self);
        auto const& av = tape.value(a);
        auto const& bv = tape.value(b);
        if (auto* da = tape.grad_sink(a.id)) {
            for (std::size_t i = 0; i < g.size(); ++i) { (*da)[i] += g[i] * bv[i]; }
        }
        if (auto* db = tape.grad_sink(b.id)) {
            for (std::size_t i = 0; i < g.size(); ++i) { (*db)[i] += g[i] * av[i]; }
        }
    });
}

auto reshape(Var x, std::vector<std::size_t> shape) -> Var
{
    auto out = x.value().reshaped(std::move(shape));
    return x.tape->record(std::move(out), {x}, [x](Tape& tape, std::size_t self) {
        auto const& g = tape.grad(self);
        auto* dx = tape.grad_sink(x.id);
        for (std::size_t i = 0; i < g.size(); ++i) { (*dx)[i] += g[i]; }
    });
}

auto swish(Var x) -> Var
{
    return elementwise(x, kernels::swish, kernels::swish_grad);
}

auto gelu(Var x) -> Var
{
    return elementwise(x, kernels::gelu, kernels::gelu_grad);
}

auto scaled_tanh(Var x, double scale) -> Var
{
    return elementwise(
        x, [scale](double v) { return scale * std::tanh(v); },
        [scale](double v) {
            auto const t = std::tanh(v);
            return scale * (1.0 - t * t);
        });
}

auto softmax(Var x) -> Var
{
    auto const& in = x.value();
    Tensor out{in.shape()};
    std::vector<std::uint8_t> all(in.cols(), 1);
    for (std::size_t r = 0; r < in.rows(); ++r) { kernels::masked_softmax_row(in.row(r), all, out.row(r)); }
    return x.tape->record(std::move(out), {x}, [x](Tape& tape, std::size_t self) {
        auto const& g = tape.grad(self);
        auto const& p = tape.value(self);
        auto* dx = tape.grad_sink(x.id);
        for (std::size_t r = 0; r < p.rows(); ++r) {
            auto const pr = p.row(r);
            auto const gr = g.row(r);
            double s = 0.0;
            for (std::size_t c = 0; c < pr.size(); ++c) { s += pr[c] * gr[c]; }
            for (std::size_t c = 0; c < pr.size(); ++c) { dx->at(r, c) += pr[c] * (gr[c] - s); }
        }
    });
}

auto layer_norm(Var x, Var gamma, Var beta) -> Var
{
    auto const& in = x.value();
    if (gamma.value().size() != in.cols() || beta.value().size() != in.cols()) {
        throw DimensionError{"layer_norm: affine parameters do not match width " + std::to_string(in.cols())};
    }
    Tensor out{in.shape()};
    for (std::size_t r = 0; r < in.rows(); ++r) {
        kernels::layer_norm_row(in.row(r), out.row(r), gamma.value().data(), beta.value().data());
    }
    return x.tape->record(std::move(out), {x, gamma, beta}, [x, gamma, beta](Tape& tape, std::size_t self) {
        auto const& g = tape.grad(self);
        auto const& in = tape.value(x);
        auto const& gv = tape.value(gamma);
        auto* dx = tape.grad_sink(x.id);
        auto* dgamma = tape.grad_sink(gamma.id);
        auto* dbeta = tape.grad_sink(beta.id);
        auto const n = in.cols();
        std::vector<double> xhat(n);
        std::vector<double> gy(n);
        for (std::size_t r = 0; r < in.rows(); ++r) {
            auto const row = in.row(r);
            double mean = 0.0;
            for (auto v : row) { mean += v; }
            mean /= static_cast<double>(n);
            double var = 0.0;
            for (auto v : row) { var += (v - mean) * (v - mean); }
            var /= static_cast<double>(n);
            auto const rstd = 1.0 / std::sqrt(var + kernels::layer_norm_eps);
            double mean_gy = 0.0;
            double mean_gyx = 0.0;
            for (std::size_t c = 0; c < n; ++c) {
                xhat[c] = (row[c] - mean) * rstd;
                gy[c] = g.at(r, c) * gv[c];
                mean_gy += gy[c];
                mean_gyx += gy[c] * xhat[c];
                if (dgamma) { (*dgamma)[c] += g.at(r, c) * xhat[c]; }
                if (dbeta) { (*dbeta)[c] += g.at(r, c); }
            }
            mean_gy /= static_cast<double>(n);
            mean_gyx /= static_cast<double>(n);
            if (dx) {
                for (std::size_t c = 0; c < n; ++c) {
                    dx->at(r, c) += rstd * (gy[c] - mean_gy - xhat[c] * mean_gyx);
                }
            }
        }
    });
}

auto group_norm(Var x, std::size_t groups) -> Var
{
    auto const& in = x.value();
    if (groups == 0 || in.cols() % groups != 0) {
        throw DimensionError{"group_norm: " + std::to_string(groups) + " groups do not divide "
                             + std::to_string(in.cols()) + " channels"};
    }
    Tensor out{in.shape()};
    std::vector<double> rstd(groups);
    for (std::size_t r = 0; r < in.rows(); ++r) { kernels::group_norm_row(in.row(r), out.row(r), groups, rstd); }
    return x.tape->record(std::move(out), {x}, [x, groups](Tape& tape, std::size_t self) {
        auto const& g = tape.grad(self);
        auto const& in = tape.value(x);
        auto const& xhat = tape.value(self);
        auto* dx = tape.grad_sink(x.id);
        if (dx == nullptr) { return; }
        auto const width = in.cols() / groups;
        for (std::size_t r = 0; r < in.rows(); ++r) {
            auto const row = in.row(r);
            for (std::size_t grp = 0; grp < groups; ++grp) {
                auto const off = grp * width;
                double mean = 0.0;
                for (std::size_t c = 0; c < width; ++c) { mean += row[off + c]; }
                mean /= static_cast<double>(width);
                double var = 0.0;
                for (std::size_t c = 0; c < width; ++c) { var += (row[off + c] - mean) * (row[off + c] - mean); }
                var /= static_cast<double>(width);
                auto const rstd = 1.0 / std::sqrt(var + kernels::group_norm_eps);
                double mean_g = 0.0;
                double mean_gx = 0.0;
                for (std::size_t c = 0; c < width; ++c) {
                    mean_g += g.at(r, off + c);
                    mean_gx += g.at(r, off + c) * xhat.at(r, off + c);
                }
                mean_g /= static_cast<double>(width);
                mean_gx /= static_cast<double>(width);
                for (std::size_t c = 0; c < width; ++c) {
                    dx->at(r, off + c) += rstd * (g.at(r, off + c) - mean_g - xhat.at(r, off + c) * mean_gx);
                }
            }
        }
    });
}

auto rotary(Var x, std::size_t n_seq, std::size_t head_dim) -> Var
{
    auto const& in = x.value();
    require_sequences(in, n_seq, "rotary");
    if (head_dim == 0 || head_dim % 2 != 0 || in.cols() % head_dim != 0) {
        throw DimensionError{"rotary: head width " + std::to_string(head_dim)
                             + " must be even and divide " + std::to_string(in.cols())};
    }
    Tensor out = in;
    for (std::size_t r = 0; r < out.rows(); ++r) { kernels::rotate_row(out.row(r), r % n_seq, head_dim); }
    return x.tape->record(std::move(out), {x}, [x, n_seq, head_dim](Tape& tape, std::size_t self) {
        Tensor g = tape.grad(self);
        auto* dx = tape.grad_sink(x.id);
        for (std::size_t r = 0; r < g.rows(); ++r) {
            kernels::rotate_row(g.row(r), r % n_seq, head_dim, true);
        }
        for (std::size_t i = 0; i < g.size(); ++i) { (*dx)[i] += g[i]; }
    });
}

auto retention(Var q, Var k, Var v, std::size_t n_seq, double gamma) -> Var
{
    auto const& qv = q.value();
    auto const& kv = k.value();
    auto const& vv = v.value();
    require_same_shape(qv, kv, "retention");
    require_sequences(qv, n_seq, "retention");
    if (vv.rows() != qv.rows()) { throw DimensionError{"retention: value rows differ from query rows"}; }
    if (gamma < 0.0 || gamma > 1.0) { throw ConfigError{"retention: decay must lie in [0, 1]"}; }
    auto const dk = qv.cols();
    auto const dv = vv.cols();
    auto const batch = qv.rows() / n_seq;
    auto const decay = decay_table(n_seq, gamma);
    Tensor out{{qv.rows(), dv}};
    for (std::size_t b = 0; b < batch; ++b) {
        auto const base = b * n_seq;
        for (std::size_t t = 0; t < n_seq; ++t) {
            auto* o = out.raw() + (base + t) * dv;
            for (std::size_t s = 0; s <= t; ++s) {
                auto const w = decay[t - s] * dot(qv.raw() + (base + t) * dk, kv.raw() + (base + s) * dk, dk);
                auto const* vs = vv.raw() + (base + s) * dv;
                for (std::size_t c = 0; c < dv; ++c) { o[c] += w * vs[c]; }
            }
        }
    }
    return q.tape->record(std::move(out), {q, k, v}, [q, k, v, n_seq, decay](Tape& tape, std::size_t self) {
        auto const& g = tape.grad(self);
        auto const& qv = tape.value(q);
        auto const& kv = tape.value(k);
        auto const& vv = tape.value(v);
        auto* dq = tape.grad_sink(q.id);
        auto* dk_ = tape.grad_sink(k.id);
        auto* dv_ = tape.grad_sink(v.id);
        auto const dk = qv.cols();
        auto const dv = vv.cols();
        auto const batch = qv.rows() / n_seq;
        for (std::size_t b = 0; b < batch; ++b) {
            auto const base = b * n_seq;
            for (std::size_t t = 0; t < n_seq; ++t) {
                auto const* gt = g.raw() + (base + t) * dv;
                auto const* qt = qv.raw() + (base + t) * dk;
                for (std::size_t s = 0; s <= t; ++s) {
                    auto const* ks = kv.raw() + (base + s) * dk;
                    auto const* vs = vv.raw() + (base + s) * dv;
                    auto const d_score = decay[t - s] * dot(gt, vs, dv);
                    if (dq) {
                        auto* dqt = dq->raw() + (base + t) * dk;
                        for (std::size_t c = 0; c < dk; ++c) { dqt[c] += d_score * ks[c]; }
                    }
                    if (dk_) {
                        auto* dks = dk_->raw() + (base + s) * dk;
                        for (std::size_t c = 0; c < dk; ++c) { dks[c] += d_score * qt[c]; }
                    }
                    if (dv_) {
                        auto const w = decay[t - s] * dot(qt, ks, dk);
                        auto* dvs = dv_->raw() + (base + s) * dv;
                        for (std::size_t c = 0; c < dv; ++c) { dvs[c] += w * gt[c]; }
                    }
                }
            }
        }
    });
}

auto causal_attention(Var q, Var k, Var v, std::size_t n_seq) -> Var
{
    auto const& qv = q.value();
    auto const& kv = k.value();
    auto const& vv = v.value();
    require_same_shape(qv, kv, "causal_attention");
    require_sequences(qv, n_seq, "causal_attention");
    if (vv.rows() != qv.rows()) { throw DimensionError{"causal_attention: value rows differ from query rows"}; }
    auto const dk = qv.cols();
    auto const dv = vv.cols();
    auto const scale = 1.0 / std::sqrt(static_cast<double>(dk));
    auto const batch = qv.rows() / n_seq;

    // Attention weights, stored per (sequence, t, s<=t) for the backward pass.
    Tensor weights{{batch * n_seq, n_seq}};
    Tensor out{{qv.rows(), dv}};
    for (std::size_t b = 0; b < batch; ++b) {
        auto const base = b * n_seq;
        for (std::size_t t = 0; t < n_seq; ++t) {
            auto a = weights.row(base + t);
            auto max_s = -std::numeric_limits<double>::infinity();
            for (std::size_t s = 0; s <= t; ++s) {
                a[s] = scale * dot(qv.raw() + (base + t) * dk, kv.raw() + (base + s) * dk, dk);
                max_s = std::max(max_s, a[s]);
            }
            double z = 0.0;
            for (std::size_t s = 0; s <= t; ++s) {
                a[s] = std::exp(a[s] - max_s);
                z += a[s];
            }
            auto* o = out.raw() + (base + t) * dv;
            for (std::size_t s = 0; s <= t; ++s) {
                a[s] /= z;
                auto const* vs = vv.raw() + (base + s) * dv;
                for (std::size_t c = 0; c < dv; ++c) { o[c] += a[s] * vs[c]; }
            }
        }
    }
    auto const w_id = q.tape->constant(std::move(weights)).id;
    return q.tape->record(std::move(out), {q, k, v}, [q, k, v, n_seq, scale, w_id](Tape& tape, std::size_t self) {
        auto const& g = tape.grad(self);
        auto const& qv = tape.value(q);
        auto const& kv = tape.value(k);
        auto const& vv = tape.value(v);
        auto const& weights = tape.value(w_id);
        auto* dq = tape.grad_sink(q.id);
        auto* dk_ = tape.grad_sink(k.id);
        auto* dv_ = tape.grad_sink(v.id);
        auto const dk = qv.cols();
        auto const dv = vv.cols();
        auto const batch = qv.rows() / n_seq;
        std::vector<double> da(n_seq);
        for (std::size_t b = 0; b < batch; ++b) {
            auto const base = b * n_seq;
            for (std::size_t t = 0; t < n_seq; ++t) {
                auto const a = weights.row(base + t);
                auto const* gt = g.raw() + (base + t) * dv;
                double weighted = 0.0;
                for (std::size_t s = 0; s <= t; ++s) {
                    da[s] = dot(gt, vv.raw() + (base + s) * dv, dv);
                    weighted += a[s] * da[s];
                    if (dv_) {
                        auto* dvs = dv_->raw() + (base + s) * dv;
                        for (std::size_t c = 0; c < dv; ++c) { dvs[c] += a[s] * gt[c]; }
                    }
                }
                for (std::size_t s = 0; s <= t; ++s) {
                    auto const ds = scale * a[s] * (da[s] - weighted);
                    if (dq) {
                        auto* dqt = dq->raw() + (base + t) * dk;
                        auto const* ks = kv.raw() + (base + s) * dk;
                        for (std::size_t c = 0; c < dk; ++c) { dqt[c] += ds * ks[c]; }
                    }
                    if (dk_) {
                        auto* dks = dk_->raw() + (base + s) * dk;
                        auto const* qt = qv.raw() + (base + t) * dk;
                        for (std::size_t c = 0; c < dk; ++c) { dks[c] += ds * qt[c]; }
                    }
                }
            }
        }
    });
}

auto embedding(Var table, std::vector<std::size_t> ids) -> Var
{
    auto const& tv = table.value();
    auto const d = tv.cols();
    Tensor out{{ids.size(), d}};
    for (std::size_t r = 0; r < ids.size(); ++r) {
        if (ids[r] >= tv.rows()) {
            throw DimensionError{"embedding: id " + std::to_string(ids[r]) + " outside table of "
                                 + std::to_string(tv.rows()) + " rows"};
        }
        std::copy_n(tv.raw() + ids[r] * d, d, out.raw() + r * d);
    }
    return table.tape->record(std::move(out), {table}, [table, ids = std::move(ids)](Tape& tape, std::size_t self) {
        auto const& g = tape.grad(self);
        auto* dt = tape.grad_sink(table.id);
        auto const d = g.cols();
        for (std::size_t r = 0; r < ids.size(); ++r) {
            for (std::size_t c = 0; c < d; ++c) { dt->at(ids[r], c) += g.at(r, c); }
        }
    });
}

auto add_positional(Var x, Var table, std::size_t n_seq) -> Var
{
    auto const& xv = x.value();
    auto const& tv = table.value();
    require_sequences(xv, n_seq, "add_positional");
    if (tv.rows() < n_seq || tv.cols() != xv.cols()) {
        throw DimensionError{"add_positional: table " + tv.shape_string() + " too small for "
                             + std::to_string(n_seq) + " positions of width " + std::to_string(xv.cols())};
    }
    Tensor out = xv;
    for (std::size_t r = 0; r < out.rows(); ++r) {
        auto const p = tv.row(r % n_seq);
        auto o = out.row(r);
        for (std::size_t c = 0; c < o.size(); ++c) { o[c] += p[c]; }
    }
    return x.tape->record(std::move(out), {x, table}, [x, table, n_seq](Tape& tape, std::size_t self) {
        auto const& g = tape.grad(self);
        if (auto* dx = tape.grad_sink(x.id)) {
            for (std::size_t i = 0; i < g.size(); ++i) { (*dx)[i] += g[i]; }
        }
        if (auto* dt = tape.grad_sink(table.id)) {
            for (std::size_t r = 0; r < g.rows(); ++r) {
                for (std::size_t c = 0; c < g.cols(); ++c) { dt->at(r % n_seq, c) += g.at(r, c); }
            }
        }
    });
}

auto slice_cols(Var x, std::size_t start, std::size_t count) -> Var
{
    auto const& xv = x.value();
    if (start + count > xv.cols() || count == 0) {
        throw DimensionError{"slice_cols: [" + std::to_string(start) + ", " + std::to_string(start + count)
                             + ") outside " + std::to_string(xv.cols()) + " columns"};
    }
    Tensor out{{xv.rows(), count}};
    for (std::size_t r = 0; r < xv.rows(); ++r) {
        std::copy_n(xv.raw() + r * xv.cols() + start, count, out.raw() + r * count);
    }
    return x.tape->record(std::move(out), {x}, [x, start, count](Tape& tape, std::size_t self) {
        auto const& g = tape.grad(self);
        auto* dx = tape.grad_sink(x.id);
        for (std::size_t r = 0; r < g.rows(); ++r) {
            for (std::size_t c = 0; c < count; ++c) { dx->at(r, start + c) += g.at(r, c); }
        }
    });
}

auto concat_cols(std::span<Var const> parts) -> Var
{
    if (parts.empty()) { throw DimensionError{"concat_cols: nothing to concatenate"}; }
    auto const rows = parts.front().value().rows();
    std::size_t total = 0;
    for (auto const& p : parts) {
        if (p.value().rows() != rows) { throw DimensionError{"concat_cols: row counts differ"}; }
        total += p.value().cols();
    }
    Tensor out{{rows, total}};
    std::size_t offset = 0;
    for (auto const& p : parts) {
        auto const& pv = p.value();
        for (std::size_t r = 0; r < rows; ++r) {
            std::copy_n(pv.raw() + r * pv.cols(), pv.cols(), out.raw() + r * total + offset);
        }
        offset += pv.cols();
    }
    std::vector<Var> owned(parts.begin(), parts.end());
    return parts.front().tape->record(std::move(out), parts, [owned](Tape& tape, std::size_t self) {
        auto const& g = tape.grad(self);
        std::size_t offset = 0;
        for (auto const& p : owned) {
            auto const width = tape.value(p).cols();
            if (auto* dp = tape.grad_sink(p.id)) {
                for (std::size_t r = 0; r < g.rows(); ++r) {
                    for (std::size_t c = 0; c < width; ++c) { dp->at(r, c) += g.at(r, offset + c); }
                }
            }
            offset += width;
        }
    });
}

auto sequence_log_prob(Var logits, std::vector<std::uint8_t> feasible, std::vector<std::size_t> targets,
                       std::size_t n_seq) -> Var
{
    auto const& lv = logits.value();
    require_sequences(lv, n_seq, "sequence_log_prob");
    auto const vocab = lv.cols();
    if (feasible.size() != lv.size() || targets.size() != lv.rows()) {
        throw DimensionError{"sequence_log_prob: mask/targets do not match logits " + lv.shape_string()};
    }
    auto const batch = lv.rows() / n_seq;
    // Probabilities are kept for the backward pass.
    Tensor probs{lv.shape()};
    Tensor out{{batch}};
    for (std::size_t r = 0; r < lv.rows(); ++r) {
        auto const mask = std::span<std::uint8_t const>{feasible}.subspan(r * vocab, vocab);
        if (targets[r] >= vocab) { throw DimensionError{"sequence_log_prob: target outside vocabulary"}; }
        if (!kernels::masked_softmax_row(lv.row(r), mask, probs.row(r)) || mask[targets[r]] == 0) {
            std::fill(probs.row(r).begin(), probs.row(r).end(), 0.0);
            continue;
        }
        out[r / n_seq] += std::log(probs.at(r, targets[r]));
    }
    auto const probs_id = logits.tape->constant(std::move(probs)).id;
    return logits.tape->record(
        std::move(out), {logits},
        [logits, probs_id, targets = std::move(targets), n_seq](Tape& tape, std::size_t self) {
            auto const& g = tape.grad(self);
            auto const& p = tape.value(probs_id);
            auto* dl = tape.grad_sink(logits.id);
            for (std::size_t r = 0; r < p.rows(); ++r) {
                auto const t = targets[r];
                if (p.at(r, t) == 0.0) { continue; }
                auto const gb = g[r / n_seq];
                for (std::size_t c = 0; c < p.cols(); ++c) {
                    dl->at(r, c) += gb * ((c == t ? 1.0 : 0.0) - p.at(r, c));
                }
            }
        });
}

} // namespace retnqs::nn
