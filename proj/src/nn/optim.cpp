#include "retnqs/nn/optim.hpp"

#include "retnqs/util/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace retnqs::nn {

void adam_step(ParameterStore& store, Gradients const& grads, double lr, AdamConfig const& cfg)
{
    if (grads.size() != store.size()) {
        throw DimensionError{"adam_step: got " + std::to_string(grads.size()) + " gradients for "
                             + std::to_string(store.size()) + " parameters"};
    }
    for (std::size_t i = 0; i < store.size(); ++i) {
        if (!grads[i].same_shape(store.value(i))) {
            throw DimensionError{"adam_step: gradient " + grads[i].shape_string()
                                 + " does not match parameter '" + store.name(i) + "' "
                                 + store.value(i).shape_string()};
        }
        if (!grads[i].all_finite()) {
            auto const bad = std::count_if(grads[i].data().begin(), grads[i].data().end(),
                                           [](double g) { return !std::isfinite(g); });
            std::ostringstream msg;
            msg << "adam_step aborted: " << bad << " non-finite gradient entries in '"
                << store.name(i) << "' at step " << store.step();
            throw NumericalError{msg.str()};
        }
    }

    auto const t = static_cast<double>(store.step() + 1);
    auto const correction1 = 1.0 - std::pow(cfg.beta1, t);
    auto const correction2 = 1.0 - std::pow(cfg.beta2, t);
    for (std::size_t i = 0; i < store.size(); ++i) {
        auto& e = store.entry(i);
        auto const g = grads[i].data();
        auto m = e.m.data();
        auto v = e.v.data();
        auto x = e.value.data();
        for (std::size_t j = 0; j < x.size(); ++j) {
            m[j] = cfg.beta1 * m[j] + (1.0 - cfg.beta1) * g[j];
            v[j] = cfg.beta2 * v[j] + (1.0 - cfg.beta2) * g[j] * g[j];
            auto const m_hat = m[j] / correction1;
            auto const v_hat = v[j] / correction2;
            x[j] -= lr * m_hat / (std::sqrt(v_hat) + cfg.eps);
        }
    }
    store.set_step(store.step() + 1);
}

auto ScheduleConfig::validate() const -> std::vector<std::string>
{
    if (total_steps == 0) { throw ConfigError{"schedule: total_steps must be positive"}; }
    if (!(min_lr <= base_lr) || min_lr < 0.0) {
        throw ConfigError{"schedule: require 0 <= min_lr <= base_lr"};
    }
    if (warmup_frac < 0.0 || warmup_frac > 1.0) {
        throw ConfigError{"schedule: warmup_frac must lie in [0, 1]"};
    }
    if (anneal_start_frac < 0.0 || anneal_start_frac >= 1.0) {
        throw ConfigError{"schedule: anneal_start_frac must lie in [0, 1)"};
    }
    if (beta0 < 0.0) { throw ConfigError{"schedule: beta0 must be non-negative"}; }
    std::vector<std::string> warnings;
    if (anneal_exponent <= 1.0) {
        warnings.emplace_back("anneal_exponent r <= 1: the annealing schedule is no longer "
                              "superlinear early in training");
    }
    return warnings;
}

auto lr_at(ScheduleConfig const& cfg, std::uint64_t t) -> double
{
    auto const T = static_cast<double>(cfg.total_steps);
    auto const step = std::min(static_cast<double>(t), T);
    auto const warmup = cfg.warmup_frac * T;
    if (step < warmup) { return cfg.base_lr * step / warmup; }
    auto const window = T - warmup;
    if (window <= 0.0) { return cfg.min_lr; }
    auto const progress = (step - warmup) / window;
    return cfg.min_lr
           + 0.5 * (cfg.base_lr - cfg.min_lr) * (1.0 + std::cos(std::numbers::pi * progress));
}

auto beta_at(ScheduleConfig const& cfg, std::uint64_t t) -> double
{
    auto const T = static_cast<double>(cfg.total_steps);
    auto const step = std::min(static_cast<double>(t), T);
    auto const start = cfg.anneal_start_frac * T;
    if (step < start) { return cfg.beta0; }
    auto const window = T - start;
    auto const remaining = std::clamp(1.0 - (step - start) / window, 0.0, 1.0);
    return cfg.beta0 * std::pow(remaining, cfg.anneal_exponent);
}

} // namespace retnqs::nn
