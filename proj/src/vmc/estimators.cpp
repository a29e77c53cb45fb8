#include "retnqs/nn/tape.hpp"
#include "retnqs/util/errors.hpp"
#include "retnqs/vmc/estimators.hpp"

#include <cmath>
#include <sstream>

namespace retnqs::vmc {

auto EnergyEstimate::standard_error() const -> double
{
    return n_eff == 0 ? 0.0 : std::sqrt(variance / static_cast<double>(n_eff));
}

auto energy_estimate(std::span<std::uint64_t const> counts, std::span<std::complex<double> const> locals,
                     std::uint64_t step) -> EnergyEstimate
{
    if (counts.empty()) { throw ConfigError{"energy estimate of an empty sample set"}; }
    if (counts.size() != locals.size()) { throw DimensionError{"energy estimate: counts and locals differ in length"}; }
    EnergyEstimate est;
    est.step = step;
    double sum = 0.0;
    double sum_im = 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        est.n_eff += counts[i];
        sum += static_cast<double>(counts[i]) * locals[i].real();
        sum_im += static_cast<double>(counts[i]) * locals[i].imag();
    }
    auto const total = static_cast<double>(est.n_eff);
    est.mean = sum / total;
    est.imag_mean = sum_im / total;
    double var = 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        auto const d = locals[i].real() - est.mean;
        var += static_cast<double>(counts[i]) * d * d;
    }
    est.variance = var / total;
    return est;
}

auto energy_estimate(SampleSet const& s, std::span<std::complex<double> const> locals, std::uint64_t step)
    -> EnergyEstimate
{
    return energy_estimate(s.counts, locals, step);
}

auto vna_gradient(ansatz::Ansatz const& model, std::span<SpinConfiguration const> configs,
                  std::span<double const> weights, std::span<std::complex<double> const> locals, double beta,
                  std::optional<double> baseline) -> GradientResult
{
    auto const n = configs.size();
    if (n == 0) { throw ConfigError{"gradient of an empty sample set"}; }
    if (weights.size() != n || locals.size() != n) { throw DimensionError{"vna_gradient: inputs differ in length"}; }
    if (beta < 0.0) { throw ConfigError{"vna_gradient: beta must be non-negative"}; }

    nn::Tape tape;
    auto trace = model.forward(tape, configs);
    auto const& logmod = trace.log_modulus.value();

    GradientResult out;
    out.log_modulus.assign(logmod.data().begin(), logmod.data().end());
    for (std::size_t i = 0; i < n; ++i) {
        if (trace.feasible[i] == 0) { throw NumericalError{"vna_gradient: sample outside the ansatz support"}; }
        out.loss += weights[i] * (locals[i].real() + 2.0 * beta * logmod[i]);
    }
    out.baseline = baseline.value_or(out.loss);

    nn::Tensor seed_mod{{n}};
    nn::Tensor seed_phase{{n}};
    for (std::size_t i = 0; i < n; ++i) {
        auto const w = weights[i];
        auto const centered = locals[i].real() + beta * (1.0 + 2.0 * logmod[i]) - out.baseline;
        seed_mod[i] = 2.0 * w * centered;
        seed_phase[i] = 2.0 * w * locals[i].imag();
        if (!std::isfinite(seed_mod[i]) || !std::isfinite(seed_phase[i])) {
            std::ostringstream msg;
            msg << "non-finite gradient weight for sample " << i << ": local energy " << locals[i]
                << ", log-modulus " << logmod[i] << ", weight " << w << ", beta " << beta << ", baseline "
                << out.baseline;
            throw NumericalError{msg.str()};
        }
    }

    out.grads = nn::zero_gradients(model.parameters());
    std::pair<nn::Var, nn::Tensor> seeds[] = {{trace.log_modulus, std::move(seed_mod)},
                                              {trace.phase, std::move(seed_phase)}};
    tape.backward(seeds, out.grads);
    return out;
}

auto vna_gradient(ansatz::Ansatz const& model, SampleSet const& s, std::span<std::complex<double> const> locals,
                  double beta, std::optional<double> baseline) -> GradientResult
{
    if (s.total_draws == 0) { throw ConfigError{"gradient of an empty sample set"}; }
    std::vector<double> weights(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        weights[i] = static_cast<double>(s.counts[i]) / static_cast<double>(s.total_draws);
    }
    return vna_gradient(model, s.configs, weights, locals, beta, baseline);
}

auto baseline_due(std::uint64_t step, std::uint64_t total_steps, std::uint64_t interval) -> bool
{
    if (interval == 0) { throw ConfigError{"baseline interval must be at least 1"}; }
    if (static_cast<double>(step) >= 0.9 * static_cast<double>(total_steps)) { return true; }
    return step % interval == 0;
}

auto best_energy_update(std::optional<EnergyEstimate>& best, EnergyEstimate const& est) -> bool
{
    if (!best || best->mean > est.mean + best_energy_z * est.standard_error()) {
        best = est;
        return true;
    }
    return false;
}

} // namespace retnqs::vmc
