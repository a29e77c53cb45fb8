#include "retnqs/sampler/sampler.hpp"

#include "retnqs/hamiltonian/qubit_hamiltonian.hpp"
#include "retnqs/util/errors.hpp"
#include "retnqs/util/parallel.hpp"
#include "retnqs/util/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <random>

namespace retnqs::sampler {

namespace {

constexpr std::size_t expand_chunk = 1024;

struct Node {
    ansatz::Ansatz::Prefix prefix;
    std::uint64_t count = 0;
    std::uint64_t code = 0; // base-4 prefix digits
};

/// Splits n among the categories of p (which sums to 1) using sequential binomials.
auto multinomial(std::uint64_t n, std::span<double const> p, std::mt19937_64& rng) -> std::array<std::uint64_t, 4>
{
    std::array<std::uint64_t, 4> out{};
    auto remaining = n;
    double mass = 1.0;
    for (std::size_t t = 0; t < p.size() && remaining > 0; ++t) {
        if (p[t] <= 0.0) { continue; }
        auto const last = std::all_of(p.begin() + static_cast<std::ptrdiff_t>(t) + 1, p.end(),
                                      [](double q) { return q <= 0.0; });
        if (last) {
            out[t] = remaining;
            break;
        }
        auto const q = std::clamp(p[t] / mass, 0.0, 1.0);
        std::binomial_distribution<std::uint64_t> dist{remaining, q};
        out[t] = dist(rng);
        remaining -= out[t];
        mass -= p[t];
    }
    return out;
}

auto draw(ansatz::Ansatz const& model, std::uint64_t n_draws, std::uint64_t seed, ansatz::EvalMode mode, bool prune)
    -> SampleSet
{
    auto const n_seq = model.n_orbitals();
    std::vector<Node> frontier;
    frontier.push_back(Node{model.root_prefix(mode), n_draws, 0});

    for (std::size_t j = 0; j < n_seq && !frontier.empty(); ++j) {
        // Children of each node land in a fixed slot so the result does not
        // depend on how the frontier is split across workers.
        std::vector<std::array<std::uint64_t, 4>> splits(frontier.size());
        auto const n_chunks = (frontier.size() + expand_chunk - 1) / expand_chunk;
        parallel_for(n_chunks, default_worker_count(), [&](std::size_t begin, std::size_t end) {
            std::vector<ansatz::Ansatz::Prefix> batch;
            for (auto c = begin; c < end; ++c) {
                auto const lo = c * expand_chunk;
                auto const hi = std::min(frontier.size(), lo + expand_chunk);
                batch.clear();
                for (auto i = lo; i < hi; ++i) { batch.push_back(std::move(frontier[i].prefix)); }
                auto probs = model.next_conditionals(batch, mode);
                for (auto i = lo; i < hi; ++i) {
                    frontier[i].prefix = std::move(batch[i - lo]);
                    auto rng = derive_stream(seed, {j, frontier[i].code});
                    splits[i] = multinomial(frontier[i].count, probs.row(i - lo), rng);
                }
            }
        });

        std::vector<Node> next;
        for (std::size_t i = 0; i < frontier.size(); ++i) {
            for (std::size_t t = 0; t < ansatz::vocab_size; ++t) {
                auto const c = splits[i][t];
                if (c == 0 || (prune && c == 1)) { continue; }
                Node child{frontier[i].prefix, c, frontier[i].code * 4 + t};
                child.prefix.tokens.push_back(static_cast<std::uint8_t>(t));
                child.prefix.counts.push(t);
                next.push_back(std::move(child));
            }
        }
        frontier = std::move(next);
    }

    SampleSet out;
    out.seed = seed;
    out.requested_draws = n_draws;
    std::vector<std::pair<SpinConfiguration, std::uint64_t>> items;
    items.reserve(frontier.size());
    for (auto const& node : frontier) { items.emplace_back(ansatz::decode(node.prefix.tokens), node.count); }
    std::sort(items.begin(), items.end());
    for (auto const& [x, c] : items) {
        out.configs.push_back(x);
        out.counts.push_back(c);
        out.total_draws += c;
    }
    return out;
}

} // namespace

void SampleScheduleConfig::validate() const
{
    if (n_start == 0 || n_end < n_start) { throw ConfigError{"sample schedule needs 1 <= n_start <= n_end"}; }
    if (unique_cap == 0) { throw ConfigError{"unique_cap must be at least 1"}; }
}

auto sample(ansatz::Ansatz const& model, std::uint64_t n_draws, std::uint64_t seed, SamplerOptions const& opts,
            std::vector<std::string>* warnings) -> SampleSet
{
    if (n_draws == 0) { throw ConfigError{"sample: n_draws must be at least 1"}; }
    auto s = draw(model, n_draws, seed, opts.mode, opts.prune_singletons);
    if (s.empty()) {
        if (warnings != nullptr) {
            warnings->push_back("singleton pruning removed every prefix at " + std::to_string(n_draws)
                                + " draws; using the unpruned sample");
        }
        s = draw(model, n_draws, seed, opts.mode, false);
    }
    return s;
}

auto prune_and_cap(SampleSet const& s, SampleScheduleConfig const& cfg, std::vector<std::string>* warnings)
    -> SampleSet
{
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (!cfg.prune_singletons || s.counts[i] > 1) { keep.push_back(i); }
    }
    if (keep.empty() && !s.empty()) {
        if (warnings != nullptr) { warnings->push_back("singleton pruning removed every sample; keeping them"); }
        keep.resize(s.size());
        std::iota(keep.begin(), keep.end(), std::size_t{0});
    }
    if (keep.size() > cfg.unique_cap) {
        std::stable_sort(keep.begin(), keep.end(), [&](std::size_t a, std::size_t b) {
            if (s.counts[a] != s.counts[b]) { return s.counts[a] > s.counts[b]; }
            return s.configs[a] < s.configs[b];
        });
        keep.resize(cfg.unique_cap);
        std::sort(keep.begin(), keep.end());
    }
    SampleSet out;
    out.seed = s.seed;
    out.requested_draws = s.requested_draws;
    for (auto i : keep) {
        out.configs.push_back(s.configs[i]);
        out.counts.push_back(s.counts[i]);
        out.total_draws += s.counts[i];
    }
    return out;
}

auto sample_count_at(SampleScheduleConfig const& cfg, std::uint64_t t, std::uint64_t total_steps) -> std::uint64_t
{
    auto const ramp_end = 0.9 * static_cast<double>(total_steps);
    auto const tt = static_cast<double>(t);
    if (total_steps == 0 || tt >= ramp_end) { return cfg.n_end; }
    auto const frac = tt / ramp_end;
    auto const lo = std::log(static_cast<double>(cfg.n_start));
    auto const hi = std::log(static_cast<double>(cfg.n_end));
    auto const n = std::llround(std::exp(lo + frac * (hi - lo)));
    return std::clamp<std::uint64_t>(static_cast<std::uint64_t>(n), cfg.n_start, cfg.n_end);
}

void write_samples(std::ostream& out, SampleSet const& s, std::size_t n_qubits)
{
    for (std::size_t i = 0; i < s.size(); ++i) {
        out << ham::config_to_string(s.configs[i], n_qubits) << ' ' << s.counts[i] << '\n';
    }
}

} // namespace retnqs::sampler
