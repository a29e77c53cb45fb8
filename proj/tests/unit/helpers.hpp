#pragma once

#include "retnqs/nn/parameters.hpp"
#include "retnqs/nn/tape.hpp"
#include "retnqs/nn/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace test_support {

using retnqs::nn::ParameterStore;
using retnqs::nn::Tape;
using retnqs::nn::Tensor;
using retnqs::nn::Var;

inline auto random_tensor(std::vector<std::size_t> shape, std::mt19937_64& rng, double scale = 1.0) -> Tensor
{
    std::normal_distribution<double> normal{0.0, scale};
    Tensor t{std::move(shape)};
    for (auto& v : t.data()) { v = normal(rng); }
    return t;
}

/// max |a - b| / max(max |b|, floor)
inline auto relative_error(std::span<double const> a, std::span<double const> b, double floor = 1e-8) -> double
{
    double diff = 0.0;
    double scale = floor;
    for (std::size_t i = 0; i < a.size(); ++i) {
        diff = std::max(diff, std::abs(a[i] - b[i]));
        scale = std::max(scale, std::abs(b[i]));
    }
    return diff / scale;
}

inline auto max_abs_diff(std::span<double const> a, std::span<double const> b) -> double
{
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) { d = std::max(d, std::abs(a[i] - b[i])); }
    return d;
}

/// Builds out = f(inputs) on a fresh tape and returns the scalar <seed, out>.
using OpFn = std::function<Var(Tape&, std::vector<Var> const&)>;

inline auto seeded_value(ParameterStore const& store, OpFn const& f, Tensor const& seed) -> double
{
    Tape tape{Tape::Mode::inference};
    std::vector<Var> in;
    for (std::size_t i = 0; i < store.size(); ++i) { in.push_back(tape.parameter(store, i)); }
    auto out = f(tape, in);
    double s = 0.0;
    for (std::size_t i = 0; i < seed.size(); ++i) { s += seed[i] * out.value()[i]; }
    return s;
}

/// Reverse-mode gradient of <seed, f(inputs)> against central differences,
/// written out here rather than borrowed from the library.
inline auto gradient_check(ParameterStore store, OpFn const& f, std::mt19937_64& rng, double h = 1e-4) -> double
{
    Tape tape;
    std::vector<Var> in;
    for (std::size_t i = 0; i < store.size(); ++i) { in.push_back(tape.parameter(store, i)); }
    auto out = f(tape, in);
    auto seed = random_tensor(out.value().shape(), rng);
    auto grads = retnqs::nn::zero_gradients(store);
    std::pair<Var, Tensor> seeds[] = {{out, seed}};
    tape.backward(seeds, grads);

    std::vector<double> analytic;
    std::vector<double> numeric;
    for (std::size_t p = 0; p < store.size(); ++p) {
        for (std::size_t i = 0; i < store.value(p).size(); ++i) {
            auto const x0 = store.value(p)[i];
            store.value(p)[i] = x0 + h;
            auto const up = seeded_value(store, f, seed);
            store.value(p)[i] = x0 - h;
            auto const down = seeded_value(store, f, seed);
            store.value(p)[i] = x0;
            numeric.push_back((up - down) / (2.0 * h));
            analytic.push_back(grads[p][i]);
        }
    }
    return relative_error(analytic, numeric);
}

inline auto fixture(std::string const& name) -> std::string { return std::string{RETNQS_FIXTURE_DIR} + "/" + name; }

} // namespace test_support
