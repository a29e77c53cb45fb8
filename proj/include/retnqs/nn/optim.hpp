#pragma once

#include "retnqs/nn/parameters.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace retnqs::nn {

struct AdamConfig {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/// One bias-corrected Adam update. Throws NumericalError (leaving the store
/// untouched) if any gradient entry is non-finite or shapes disagree.
void adam_step(ParameterStore& store, Gradients const& grads, double lr, AdamConfig const& cfg = {});

/// Learning-rate and annealing-temperature schedules over T training steps.
struct ScheduleConfig {
    double base_lr = 2.5e-3;
    double min_lr = 5e-8;
    double warmup_frac = 0.04;
    std::uint64_t total_steps = 25000;
    double anneal_exponent = 4.0;
    double anneal_start_frac = 0.04;
    double beta0 = 1.0;

    /// Throws ConfigError for inconsistent values. Soft problems (r <= 1)
    /// are returned as warnings.
    auto validate() const -> std::vector<std::string>;
};

/// Linear warmup to base_lr, then cosine decay reaching min_lr at T.
auto lr_at(ScheduleConfig const& cfg, std::uint64_t t) -> double;

/// beta0 until the annealing window opens, then (1 - t'/T')^r; zero at T.
auto beta_at(ScheduleConfig const& cfg, std::uint64_t t) -> double;

} // namespace retnqs::nn
