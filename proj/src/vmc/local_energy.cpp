#include "retnqs/util/errors.hpp"
#include "retnqs/util/parallel.hpp"
#include "retnqs/vmc/estimators.hpp"

#include <algorithm>
#include <cmath>

namespace retnqs::vmc {

auto local_energies(QubitHamiltonian const& h, std::span<SpinConfiguration const> samples, AmplitudeFn const& amp,
                    std::size_t flip_batch_count) -> std::vector<std::complex<double>>
{
    if (flip_batch_count == 0) { throw ConfigError{"flip_batch_count must be at least 1"}; }
    auto const n = samples.size();
    std::vector<std::vector<ham::Connection>> rows(n);
    parallel_for(n, default_worker_count(), [&](std::size_t begin, std::size_t end) {
        for (auto i = begin; i < end; ++i) { h.connected(samples[i], rows[i]); }
    });

    std::vector<SpinConfiguration> unique(samples.begin(), samples.end());
    for (auto const& row : rows) {
        for (auto const& c : row) { unique.push_back(c.config); }
    }
    std::sort(unique.begin(), unique.end());
    unique.erase(std::unique(unique.begin(), unique.end()), unique.end());

    std::vector<LogAmplitude> amps(unique.size());
    auto const batches = std::min(flip_batch_count, std::max<std::size_t>(1, unique.size()));
    auto const per_batch = (unique.size() + batches - 1) / batches;
    for (std::size_t b = 0; b < batches; ++b) {
        auto const lo = b * per_batch;
        if (lo >= unique.size()) { break; }
        auto const count = std::min(per_batch, unique.size() - lo);
        auto part = amp(std::span{unique}.subspan(lo, count));
        if (part.size() != count) { throw DimensionError{"amplitude function returned the wrong batch size"}; }
        std::copy(part.begin(), part.end(), amps.begin() + static_cast<std::ptrdiff_t>(lo));
    }
    auto lookup = [&](SpinConfiguration x) -> LogAmplitude const& {
        auto it = std::lower_bound(unique.begin(), unique.end(), x);
        return amps[static_cast<std::size_t>(it - unique.begin())];
    };

    std::vector<std::complex<double>> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto const& ax = lookup(samples[i]);
        if (!ax.feasible || !std::isfinite(ax.log_modulus)) {
            throw NumericalError{"local energy requested for a configuration with zero amplitude"};
        }
        std::complex<double> acc = 0.0;
        for (auto const& c : rows[i]) {
            auto const& ay = lookup(c.config);
            if (!ay.feasible) { continue; }
            acc += c.value * std::exp(std::complex<double>{ay.log_modulus - ax.log_modulus, ay.phase - ax.phase});
        }
        out[i] = acc;
    }
    return out;
}

auto local_energy(QubitHamiltonian const& h, SpinConfiguration x, AmplitudeFn const& amp,
                  std::size_t flip_batch_count) -> std::complex<double>
{
    return local_energies(h, std::span{&x, 1}, amp, flip_batch_count).front();
}

auto amplitude_fn(ansatz::Ansatz const& model, ansatz::EvalMode mode) -> AmplitudeFn
{
    return [&model, mode](std::span<SpinConfiguration const> xs) { return model.log_amplitudes(xs, mode); };
}

} // namespace retnqs::vmc
