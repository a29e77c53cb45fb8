#pragma once

#include "retnqs/ansatz/ansatz.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace retnqs::sampler {

using ansatz::SpinConfiguration;

/// Unique configurations with multiplicities, ascending by configuration.
struct SampleSet {
    std::vector<SpinConfiguration> configs;
    std::vector<std::uint64_t> counts;
    std::uint64_t total_draws = 0; ///< sum of counts
    std::uint64_t requested_draws = 0;
    std::uint64_t seed = 0;

    auto size() const noexcept -> std::size_t { return configs.size(); }
    auto empty() const noexcept -> bool { return configs.empty(); }
};

struct SampleScheduleConfig {
    std::uint64_t n_start = 1000;
    std::uint64_t n_end = 1000000;
    std::size_t unique_cap = 8000;
    bool prune_singletons = true;

    void validate() const;
};

struct SamplerOptions {
    /// Drop prefixes drawn exactly once at every stage.
    bool prune_singletons = false;
    ansatz::EvalMode mode = ansatz::EvalMode::automatic;
};

/// Exact autoregressive draws from |psi|^2 by breadth-first multinomial
/// splitting. Deterministic in (parameters, n_draws, seed), independent of
/// the worker count. If per-stage pruning removes every prefix the draw is
/// repeated without pruning and a message is appended to `warnings`.
auto sample(ansatz::Ansatz const& model, std::uint64_t n_draws, std::uint64_t seed, SamplerOptions const& opts = {},
            std::vector<std::string>* warnings = nullptr) -> SampleSet;

/// Optionally removes count-1 configurations, then keeps the `unique_cap`
/// largest counts (ties: smaller configuration first).
auto prune_and_cap(SampleSet const& s, SampleScheduleConfig const& cfg, std::vector<std::string>* warnings = nullptr)
    -> SampleSet;

/// Draw count at step t of T: geometric ramp from n_start to n_end reached at 0.9 T.
auto sample_count_at(SampleScheduleConfig const& cfg, std::uint64_t t, std::uint64_t total_steps) -> std::uint64_t;

/// Lines "bitstring count", qubit 0 first.
void write_samples(std::ostream& out, SampleSet const& s, std::size_t n_qubits);

} // namespace retnqs::sampler
