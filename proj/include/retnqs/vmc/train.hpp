#pragma once

#include "retnqs/ansatz/ansatz.hpp"
#include "retnqs/nn/optim.hpp"
#include "retnqs/sampler/sampler.hpp"
#include "retnqs/vmc/estimators.hpp"

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace retnqs::vmc {

struct TrainConfig {
    nn::ScheduleConfig schedule;
    nn::AdamConfig adam;
    sampler::SampleScheduleConfig sampling;
    std::size_t flip_batch_count = default_flip_batch_count;
    std::uint64_t baseline_interval = 10;
    std::uint64_t seed = 0;
    /// Save a checkpoint every this many steps (0: never) and on abort.
    std::uint64_t checkpoint_every = 0;
    std::filesystem::path checkpoint_path;

    /// Throws ConfigError; returns soft warnings.
    auto validate() const -> std::vector<std::string>;
};

struct StepRecord {
    std::uint64_t step = 0;
    double energy = 0.0;
    double variance = 0.0;
    std::size_t n_unique = 0;
    std::uint64_t total_draws = 0;
    double beta = 0.0;
    double lr = 0.0;
    double best_energy = 0.0;
    double wall_ms = 0.0;
};

/// One JSON object on a single line (no trailing newline).
auto to_json_line(StepRecord const& r) -> std::string;

struct TrainResult {
    EnergyEstimate best;
    EnergyEstimate last;
    double baseline = 0.0;
    std::uint64_t steps = 0;
    double wall_seconds = 0.0;
    std::vector<std::string> warnings;
};

/// Runs schedule.total_steps optimization steps on `model` in place.
/// Non-finite losses or gradients abort with NumericalError after writing the
/// last good parameters to checkpoint_path (when set).
auto train(QubitHamiltonian const& h, ansatz::Ansatz& model, TrainConfig const& cfg,
           std::function<void(StepRecord const&)> const& on_step = {}) -> TrainResult;

} // namespace retnqs::vmc
