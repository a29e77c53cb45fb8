#include "retnqs/vmc/train.hpp"

#include "retnqs/ansatz/checkpoint.hpp"
#include "retnqs/util/errors.hpp"
#include "retnqs/util/rng.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>

namespace retnqs::vmc {

auto TrainConfig::validate() const -> std::vector<std::string>
{
    auto warnings = schedule.validate();
    sampling.validate();
    if (flip_batch_count == 0) { throw ConfigError{"flip_batch_count must be at least 1"}; }
    if (baseline_interval == 0) { throw ConfigError{"baseline_interval must be at least 1"}; }
    if (checkpoint_every > 0 && checkpoint_path.empty()) {
        throw ConfigError{"checkpoint_every is set but no checkpoint path was given"};
    }
    return warnings;
}

auto to_json_line(StepRecord const& r) -> std::string
{
    nlohmann::json j{{"step", r.step},       {"energy", r.energy}, {"variance", r.variance},
                     {"n_unique", r.n_unique}, {"total_draws", r.total_draws}, {"beta", r.beta},
                     {"lr", r.lr},           {"best_energy", r.best_energy}, {"wall_ms", r.wall_ms}};
    return j.dump();
}

auto train(QubitHamiltonian const& h, ansatz::Ansatz& model, TrainConfig const& cfg,
           std::function<void(StepRecord const&)> const& on_step) -> TrainResult
{
    TrainResult result;
    result.warnings = cfg.validate();
    auto const& sys = model.system();
    if (sys.n_qubits != h.n_qubits()) {
        throw ConfigError{"ansatz has " + std::to_string(sys.n_qubits) + " qubits but the Hamiltonian has "
                          + std::to_string(h.n_qubits())};
    }
    if (sys.n_up != h.n_up() || sys.n_down != h.n_down()) {
        throw ConfigError{"ansatz spin sector differs from the Hamiltonian's electron counts"};
    }

    using clock = std::chrono::steady_clock;
    auto const t0 = clock::now();
    auto const total = cfg.schedule.total_steps;
    auto const amp = amplitude_fn(model);
    sampler::SamplerOptions sopts;
    sopts.prune_singletons = cfg.sampling.prune_singletons;

    std::optional<EnergyEstimate> best;
    double baseline = 0.0;
    bool have_baseline = false;
    ansatz::CheckpointMeta meta;

    auto save = [&](std::uint64_t step) {
        if (cfg.checkpoint_path.empty()) { return; }
        meta.step = step;
        meta.baseline = baseline;
        meta.has_best = best.has_value();
        meta.best_energy = best ? best->mean : 0.0;
        ansatz::save_checkpoint(cfg.checkpoint_path, model, meta);
    };

    for (std::uint64_t t = 0; t < total; ++t) {
        auto const step_start = clock::now();
        auto const n_draws = sampler::sample_count_at(cfg.sampling, t, total);
        auto raw = sampler::sample(model, n_draws, derive_key(cfg.seed, {t}), sopts, &result.warnings);
        auto samples = sampler::prune_and_cap(raw, cfg.sampling, &result.warnings);

        auto const beta = nn::beta_at(cfg.schedule, t);
        auto const lr = nn::lr_at(cfg.schedule, t);
        try {
            auto locals = local_energies(h, samples.configs, amp, cfg.flip_batch_count);
            auto est = energy_estimate(samples, locals, t);
            if (!std::isfinite(est.mean) || !std::isfinite(est.variance)) {
                throw NumericalError{"non-finite energy estimate at step " + std::to_string(t)};
            }
            std::optional<double> b;
            if (have_baseline && !baseline_due(t, total, cfg.baseline_interval)) { b = baseline; }
            auto grad = vna_gradient(model, samples, locals, beta, b);
            if (!std::isfinite(grad.loss)) {
                throw NumericalError{"non-finite loss at step " + std::to_string(t)};
            }
            baseline = grad.baseline;
            have_baseline = true;
            nn::adam_step(model.parameters(), grad.grads, lr, cfg.adam);
            best_energy_update(best, est);
            result.last = est;
        } catch (NumericalError const&) {
            save(t);
            throw;
        }

        if (on_step) {
            StepRecord rec;
            rec.step = t;
            rec.energy = result.last.mean;
            rec.variance = result.last.variance;
            rec.n_unique = samples.size();
            rec.total_draws = samples.total_draws;
            rec.beta = beta;
            rec.lr = lr;
            rec.best_energy = best->mean;
            rec.wall_ms = std::chrono::duration<double, std::milli>(clock::now() - step_start).count();
            on_step(rec);
        }
        result.steps = t + 1;
        if (cfg.checkpoint_every > 0 && (t + 1) % cfg.checkpoint_every == 0) { save(t + 1); }
    }

    if (best) { result.best = *best; }
    result.baseline = baseline;
    result.wall_seconds = std::chrono::duration<double>(clock::now() - t0).count();
    if (!cfg.checkpoint_path.empty()) { save(result.steps); }
    return result;
}

} // namespace retnqs::vmc
