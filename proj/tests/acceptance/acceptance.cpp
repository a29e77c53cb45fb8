// Acceptance checks. Each criterion prints one PASS/FAIL line; the exit code
// is nonzero if any requested criterion fails.
//
//   acceptance [criterion ...]    criteria: 1 2 3 4 5 6a 6b 6c 7 8 9 (default: all fast ones)

#include "retnqs/ansatz/ansatz.hpp"
#include "retnqs/cli/run_config.hpp"
#include "retnqs/flops/flops.hpp"
#include "retnqs/hamiltonian/fcidump.hpp"
#include "retnqs/hamiltonian/jordan_wigner.hpp"
#include "retnqs/nn/ops.hpp"
#include "retnqs/oracle/oracle.hpp"
#include "retnqs/sampler/sampler.hpp"
#include "retnqs/util/rng.hpp"
#include "retnqs/vmc/estimators.hpp"
#include "retnqs/vmc/train.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

using namespace retnqs;
using ansatz::Ansatz;
using ansatz::AnsatzConfig;
using ansatz::EvalMode;
using ansatz::Kind;
using ansatz::SystemInfo;
using Complex = std::complex<double>;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

auto fixture(std::string const& name) -> std::string { return std::string{RETNQS_FIXTURE_DIR} + "/" + name; }
auto config_file(std::string const& name) -> std::string { return std::string{RETNQS_CONFIG_DIR} + "/" + name; }

auto fmt(char const* pattern, double a, double b = 0.0, double c = 0.0) -> std::string
{
    char buf[256];
    std::snprintf(buf, sizeof buf, pattern, a, b, c);
    return buf;
}

auto hamiltonian_of(std::string const& name) -> std::pair<ham::MolecularIntegrals, ham::QubitHamiltonian>
{
    auto mi = ham::parse_fcidump(fixture(name));
    auto h = ham::second_quantize_jw(mi);
    return {mi, h};
}

void randomize(Ansatz& model, std::uint64_t seed, double scale)
{
    auto rng = derive_stream(seed, {0xacce});
    std::normal_distribution<double> normal{0.0, scale};
    for (std::size_t p = 0; p < model.parameters().size(); ++p) {
        for (auto& v : model.parameters().value(p).data()) { v += normal(rng); }
    }
}

// ---------------------------------------------------------------- 1

auto random_sector_config(SystemInfo const& sys, std::mt19937_64& rng) -> ansatz::SpinConfiguration
{
    std::vector<std::size_t> up(sys.n_orbitals());
    std::iota(up.begin(), up.end(), 0);
    auto down = up;
    std::shuffle(up.begin(), up.end(), rng);
    std::shuffle(down.begin(), down.end(), rng);
    ansatz::SpinConfiguration x = 0;
    for (std::size_t i = 0; i < sys.n_up; ++i) { x |= ansatz::SpinConfiguration{1} << (2 * up[i]); }
    for (std::size_t i = 0; i < sys.n_down; ++i) { x |= ansatz::SpinConfiguration{1} << (2 * down[i] + 1); }
    return x;
}

auto dual_form() -> Outcome
{
    double worst = 0.0;
    std::size_t draws = 0;
    std::mt19937_64 rng{2024};
    std::size_t const dims[] = {8, 16, 32};
    std::size_t const lengths[] = {4, 8, 16};
    while (draws < 200) {
        for (auto d : dims) {
            for (auto n_seq : lengths) {
                if (draws == 200) { break; }
                AnsatzConfig cfg;
                cfg.d_model = d;
                cfg.d_retn = d;
                cfg.d_ff = 2 * d;
                cfg.n_block = 1 + rng() % 2;
                cfg.n_heads = std::size_t{1} << (rng() % 3);
                cfg.phase_hidden = {8};
                SystemInfo sys{2 * n_seq, n_seq / 2, n_seq / 2};
                Ansatz model{cfg, sys, rng()};
                randomize(model, rng(), 0.5);
                auto const* net = model.retnet();

                // Arbitrary token inputs, not just feasible ones.
                std::size_t const batch = 3;
                std::vector<std::uint8_t> tokens(batch * n_seq);
                for (auto& t : tokens) { t = static_cast<std::uint8_t>(rng() % 4); }

                nn::Tape tape{nn::Tape::Mode::inference};
                auto params = model.bind(tape);
                auto parallel = net->logits(tape, params, tokens, batch).value();

                std::vector<ansatz::RetentionState> states(batch, net->initial_state());
                std::vector<ansatz::RetentionState*> ptrs;
                for (auto& s : states) { ptrs.push_back(&s); }
                for (std::size_t j = 0; j < n_seq; ++j) {
                    std::vector<std::size_t> inputs(batch);
                    for (std::size_t b = 0; b < batch; ++b) {
                        inputs[b] = j == 0 ? ansatz::start_token : tokens[b * n_seq + j - 1];
                    }
                    auto step = net->step(model.parameters(), ptrs, inputs);
                    for (std::size_t b = 0; b < batch; ++b) {
                        for (std::size_t t = 0; t < 4; ++t) {
                            worst = std::max(worst, std::abs(step.at(b, t) - parallel.at(b * n_seq + j, t)));
                        }
                    }
                }

                // Masked conditionals through the public evaluation paths.
                std::vector<ansatz::SpinConfiguration> some;
                for (int i = 0; i < 4; ++i) { some.push_back(random_sector_config(sys, rng)); }
                auto p = model.conditionals(some, EvalMode::parallel);
                auto r = model.conditionals(some, EvalMode::recurrent);
                for (std::size_t i = 0; i < p.size(); ++i) { worst = std::max(worst, std::abs(p[i] - r[i])); }
                ++draws;
            }
        }
    }
    return {worst <= 1e-10, fmt("%.0f draws, max |parallel - recurrent| = %.2e", static_cast<double>(draws), worst)};
}

// ---------------------------------------------------------------- 2

auto jw_correctness() -> Outcome
{
    bool ok = true;
    std::ostringstream detail;
    for (char const* name : {"h2.fcidump", "lih_cas3.fcidump"}) {
        auto [mi, h] = hamiltonian_of(name);
        auto qubit = oracle::dense_matrix(h);
        auto fermion = oracle::dense_fermionic_hamiltonian(mi);
        auto const n = h.n_qubits();
        Eigen::MatrixXd number = Eigen::MatrixXd::Zero(qubit.rows(), qubit.cols());
        for (std::size_t p = 0; p < n; ++p) {
            number += oracle::creation_matrix(p, n) * oracle::annihilation_matrix(p, n);
        }
        auto const diff = (qubit - fermion).cwiseAbs().maxCoeff();
        auto const herm = (qubit - qubit.transpose()).cwiseAbs().maxCoeff();
        auto const comm = (qubit * number - number * qubit).cwiseAbs().maxCoeff();
        ok = ok && diff <= 1e-10 && herm <= 1e-10 && comm <= 1e-10;
        detail << name << ": |JW - ladder| " << fmt("%.1e", diff) << ", |H - H^T| " << fmt("%.1e", herm)
               << ", |[H,N]| " << fmt("%.1e", comm) << "; ";
    }
    return {ok, detail.str()};
}

// ---------------------------------------------------------------- 3

auto small_config(Kind kind) -> AnsatzConfig
{
    AnsatzConfig cfg;
    cfg.kind = kind;
    cfg.phase_hidden = {16, 16};
    cfg.made_hidden = {32, 32};
    return cfg;
}

auto normalization() -> Outcome
{
    bool ok = true;
    std::ostringstream detail;
    SystemInfo sys{12, 2, 2};
    std::vector<ansatz::SpinConfiguration> all(std::size_t{1} << sys.n_qubits);
    for (std::size_t i = 0; i < all.size(); ++i) { all[i] = i; }
    for (auto kind : {Kind::retnet, Kind::transformer, Kind::made}) {
        for (std::uint64_t seed : {1U, 2U}) {
            Ansatz model{small_config(kind), sys, seed};
            randomize(model, seed + 10, 0.5);
            double total = 0.0;
            double outside = 0.0;
            for (std::size_t i = 0; i < all.size(); ++i) {
                auto a = model.log_amplitude(all[i]);
                auto p = a.feasible ? a.probability() : 0.0;
                total += p;
                if (!ansatz::in_sector(sys, all[i])) { outside += p; }
            }
            ok = ok && std::abs(total - 1.0) <= 1e-10 && outside == 0.0;
            if (seed == 1) { detail << ansatz::to_string(kind) << fmt(" |sum-1| %.1e; ", std::abs(total - 1.0)); }
        }
    }
    return {ok, detail.str() + "mass outside the sector is exactly zero"};
}

// ---------------------------------------------------------------- 4

auto central_differences(Ansatz const& model, std::function<double(Ansatz const&)> const& f) -> std::vector<double>
{
    Ansatz probe = model;
    auto flat = model.parameters().flatten();
    std::vector<double> g(flat.size());
    double const h = 1e-5;
    for (std::size_t i = 0; i < flat.size(); ++i) {
        auto x = flat;
        x[i] += h;
        probe.parameters().assign_flat(x);
        auto up = f(probe);
        x[i] -= 2 * h;
        probe.parameters().assign_flat(x);
        g[i] = (up - f(probe)) / (2 * h);
    }
    return g;
}

auto relative_error(std::vector<double> const& a, std::vector<double> const& b) -> double
{
    double diff = 0.0;
    double scale = 1e-12;
    for (std::size_t i = 0; i < a.size(); ++i) {
        diff = std::max(diff, std::abs(a[i] - b[i]));
        scale = std::max(scale, std::abs(b[i]));
    }
    return diff / scale;
}

// Exact <psi|H|psi> and sum p log p by enumeration, written independently of
// the estimator code.
auto exact_energy(ham::QubitHamiltonian const& h, Ansatz const& m) -> double
{
    auto basis = ansatz::sector_configs(m.system());
    auto amps = m.log_amplitudes(basis);
    Complex e{};
    for (std::size_t i = 0; i < basis.size(); ++i) {
        for (std::size_t j = 0; j < basis.size(); ++j) {
            auto const hij = h.matrix_element(basis[i], basis[j]);
            if (hij != 0.0) { e += std::conj(amps[i].value()) * hij * amps[j].value(); }
        }
    }
    return e.real();
}

auto neg_entropy(Ansatz const& m) -> double
{
    double s = 0.0;
    for (auto const& a : m.log_amplitudes(ansatz::sector_configs(m.system()))) {
        auto p = a.probability();
        if (p > 0.0) { s += p * std::log(p); }
    }
    return s;
}

auto gradient_oracles() -> Outcome
{
    auto [mi, h] = hamiltonian_of("lih_cas3.fcidump");
    ham::QubitHamiltonian zero{h.n_qubits(), h.n_electrons(), 0, {}};
    SystemInfo sys{h.n_qubits(), h.n_up(), h.n_down()};
    double worst_e = 0.0;
    double worst_s = 0.0;
    double worst_b = 0.0;
    for (auto kind : {Kind::retnet, Kind::transformer, Kind::made}) {
        auto cfg = small_config(kind);
        cfg.d_model = 8;
        cfg.d_retn = 8;
        cfg.d_ff = 16;
        cfg.n_heads = 2;
        cfg.phase_hidden = {8};
        cfg.made_hidden = {12};
        Ansatz model{cfg, sys, 5};
        randomize(model, 6, 0.4);
        auto configs = ansatz::sector_configs(sys);
        std::vector<double> weights;
        for (auto const& a : model.log_amplitudes(configs)) { weights.push_back(a.probability()); }
        auto amp = vmc::amplitude_fn(model);

        auto locals = vmc::local_energies(h, configs, amp);
        auto g = vmc::vna_gradient(model, configs, weights, locals, 0.0, std::nullopt);
        auto fd = central_differences(model, [&](Ansatz const& m) { return exact_energy(h, m); });
        worst_e = std::max(worst_e, relative_error(nn::flatten(g.grads), fd));
        auto shifted = vmc::vna_gradient(model, configs, weights, locals, 0.0, g.baseline + 37.5);
        auto a = nn::flatten(g.grads);
        auto b = nn::flatten(shifted.grads);
        for (std::size_t i = 0; i < a.size(); ++i) { worst_b = std::max(worst_b, std::abs(a[i] - b[i])); }

        auto zeros = vmc::local_energies(zero, configs, amp);
        auto gs = vmc::vna_gradient(model, configs, weights, zeros, 1.0, std::nullopt);
        auto fds = central_differences(model, neg_entropy);
        worst_s = std::max(worst_s, relative_error(nn::flatten(gs.grads), fds));
        auto gs_shift = vmc::vna_gradient(model, configs, weights, zeros, 1.0, -4.0);
        auto c = nn::flatten(gs_shift.grads);
        auto d = nn::flatten(gs.grads);
        for (std::size_t i = 0; i < c.size(); ++i) { worst_b = std::max(worst_b, std::abs(c[i] - d[i])); }
    }
    bool ok = worst_e <= 1e-4 && worst_s <= 1e-4 && worst_b <= 1e-10;
    return {ok, fmt("energy rel %.1e, neg-entropy rel %.1e, baseline shift %.1e", worst_e, worst_s, worst_b)};
}

// ---------------------------------------------------------------- 5

auto sampler_exactness() -> Outcome
{
    auto [mi, h] = hamiltonian_of("h2o_cas5.fcidump");
    SystemInfo sys{h.n_qubits(), h.n_up(), h.n_down()};
    bool ok = true;
    std::ostringstream detail;
    for (std::uint64_t setting = 0; setting < 3; ++setting) {
        Ansatz model{small_config(Kind::retnet), sys, 100 + setting};
        randomize(model, 200 + setting, 0.5);
        auto s = sampler::sample(model, 1000000, 300 + setting);
        auto sector = ansatz::sector_configs(sys);
        auto amps = model.log_amplitudes(sector);
        std::map<ansatz::SpinConfiguration, double> observed;
        std::size_t infeasible = 0;
        for (std::size_t i = 0; i < s.size(); ++i) {
            observed[s.configs[i]] = static_cast<double>(s.counts[i]);
            if (!ansatz::in_sector(sys, s.configs[i])) { ++infeasible; }
        }
        // Bins with expected count below 5 are pooled.
        double stat = 0.0;
        std::size_t bins = 0;
        double pooled_e = 0.0;
        double pooled_o = 0.0;
        auto const n = static_cast<double>(s.total_draws);
        for (std::size_t i = 0; i < sector.size(); ++i) {
            auto const e = amps[i].probability() * n;
            auto const o = observed[sector[i]];
            if (e < 5.0) {
                pooled_e += e;
                pooled_o += o;
                continue;
            }
            stat += (o - e) * (o - e) / e;
            ++bins;
        }
        if (pooled_e > 0.0) {
            stat += (pooled_o - pooled_e) * (pooled_o - pooled_e) / pooled_e;
            ++bins;
        }
        boost::math::chi_squared dist{static_cast<double>(bins - 1)};
        auto const p = 1.0 - boost::math::cdf(dist, stat);
        ok = ok && p > 0.01 && infeasible == 0 && s.total_draws == 1000000;
        detail << fmt("p=%.3f ", p) << "(" << bins << " bins, " << infeasible << " infeasible); ";
    }
    return {ok, detail.str()};
}

// ---------------------------------------------------------------- 6, 7

struct TrainOutcome {
    double best = 0.0;
    double exact = 0.0;
    double seconds = 0.0;
};

auto train_from(std::string const& config, std::optional<std::uint64_t> seed, bool vna) -> TrainOutcome
{
    auto cfg = cli::load_run_config(config_file(config));
    if (seed) { cfg.train.seed = *seed; }
    if (!vna) { cli::disable_vna(cfg); }
    auto h = cli::load_hamiltonian(cfg.hamiltonian);
    Ansatz model{cfg.ansatz, SystemInfo{h.n_qubits(), h.n_up(), h.n_down()}, cfg.train.seed};
    auto const every = std::max<std::uint64_t>(1, cfg.train.schedule.total_steps / 10);
    auto result = vmc::train(h, model, cfg.train, [&](vmc::StepRecord const& r) {
        if ((r.step + 1) % every == 0) {
            std::cerr << "  [" << config << (vna ? "" : " no-vna") << "] step " << r.step + 1 << " best "
                      << fmt("%.6f", r.best_energy) << '\n';
        }
    });
    auto gs = oracle::ground_state(h, oracle::Sector{h.n_up(), h.n_down()});
    return {result.best.mean, gs.energy, result.wall_seconds};
}

auto energy_target(std::string const& config, double limit_seconds) -> Outcome
{
    auto r = train_from(config, std::nullopt, true);
    auto const err = r.best - r.exact;
    bool ok = std::abs(err) <= 1.6e-3 && r.seconds < limit_seconds;
    return {ok, fmt("best %.6f, exact %.6f, ", r.best, r.exact) + fmt("error %.2e Ha in %.0f s", err, r.seconds)};
}

auto h2o_target() -> Outcome
{
    auto r = train_from("h2o.toml", std::nullopt, true);
    double const published = -75.0155;
    bool ok = std::abs(r.best - published) <= 2e-3;
    return {ok, fmt("best %.6f vs %.4f (exact %.6f)", r.best, published, r.exact) + fmt(", %.0f s", r.seconds)};
}

auto median(std::vector<double> v) -> double
{
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
}

auto vna_ablation() -> Outcome
{
    std::vector<double> with;
    std::vector<double> without;
    double exact = 0.0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        auto a = train_from("h2o.toml", seed, true);
        auto b = train_from("h2o.toml", seed, false);
        with.push_back(a.best);
        without.push_back(b.best);
        exact = a.exact;
        std::cerr << "  seed " << seed << fmt(": vna %.6f, no-vna %.6f", a.best, b.best) << '\n';
    }
    auto const m_with = median(with);
    auto const m_without = median(without);
    bool ok = m_with < m_without && m_without - exact > 5e-3;
    return {ok, fmt("median with VNA %.6f, without %.6f, exact %.6f", m_with, m_without, exact)};
}

// ---------------------------------------------------------------- 8

auto flop_model() -> Outcome
{
    std::mt19937_64 rng{8};
    std::size_t mismatches = 0;
    for (int i = 0; i < 100; ++i) {
        flops::ModelDims d{1 + rng() % 6, 1 + rng() % 256, 1 + rng() % 256, 1 + rng() % 1024, 1 + rng() % 512};
        auto const nb = static_cast<double>(d.n_block);
        auto const dm = static_cast<double>(d.d_model);
        auto const dr = static_cast<double>(d.d_retn);
        auto const df = static_cast<double>(d.d_ff);
        auto const ns = static_cast<double>(d.n_seq);
        auto const n = 2.0 * nb * dm * (2.5 * dr + df);
        auto const parallel = 2.0 * n + 4.0 * nb * ns * dr;
        auto const recurrent = 2.0 * n + 5.0 * nb * dr * dr;
        auto const transformer = parallel - 2.0 * nb * dm * dr;
        auto const crossover = (5.0 * dr * dr + 2.0 * dm * dr) / (4.0 * dr);
        mismatches += static_cast<double>(flops::param_count(d)) != n;
        mismatches += static_cast<double>(flops::flops_per_token(d, flops::Form::retnet_parallel)) != parallel;
        mismatches += static_cast<double>(flops::flops_per_token(d, flops::Form::retnet_recurrent)) != recurrent;
        mismatches += static_cast<double>(flops::flops_per_token(d, flops::Form::transformer)) != transformer;
        mismatches += std::abs(flops::crossover_seq_len(d) - crossover) > 1e-12 * crossover;
        auto square = d;
        square.d_retn = square.d_model;
        mismatches += std::abs(flops::crossover_seq_len(square) - 1.75 * dm) > 1e-12 * dm;
    }
    return {mismatches == 0, fmt("100 grid points, %.0f mismatches", static_cast<double>(mismatches))};
}

// ---------------------------------------------------------------- 9

auto zero_variance() -> Outcome
{
    bool ok = true;
    std::ostringstream detail;
    for (char const* name : {"h2.fcidump", "lih.fcidump"}) {
        auto [mi, h] = hamiltonian_of(name);
        auto gs = oracle::ground_state(h, oracle::Sector{h.n_up(), h.n_down()});
        auto const& basis = gs.state.basis;
        vmc::AmplitudeFn exact = [&](std::span<ansatz::SpinConfiguration const> xs) {
            std::vector<ansatz::LogAmplitude> out;
            for (auto x : xs) {
                auto it = std::lower_bound(basis.begin(), basis.end(), x);
                if (it == basis.end() || *it != x) {
                    out.push_back({-std::numeric_limits<double>::infinity(), 0.0, false});
                    continue;
                }
                auto a = gs.state.amplitudes[static_cast<std::size_t>(it - basis.begin())];
                out.push_back({std::log(std::abs(a)), std::arg(a), std::abs(a) > 0.0});
            }
            return out;
        };
        // Supported configurations: nonzero ground-state amplitude.
        std::vector<ansatz::SpinConfiguration> support;
        for (std::size_t i = 0; i < basis.size(); ++i) {
            if (std::abs(gs.state.amplitudes[i]) > 1e-8) { support.push_back(basis[i]); }
        }
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (auto l : vmc::local_energies(h, support, exact)) {
            lo = std::min(lo, l.real());
            hi = std::max(hi, l.real());
        }
        ok = ok && hi - lo <= 1e-8;
        detail << name << ": " << support.size() << " configs, spread " << fmt("%.1e", hi - lo) << "; ";
    }
    return {ok, detail.str()};
}

struct Criterion {
    std::string id;
    std::string title;
    std::function<Outcome()> run;
};

} // namespace

int main(int argc, char** argv)
{
    std::vector<Criterion> const criteria{
        {"1", "dual-form identity", dual_form},
        {"2", "Jordan-Wigner correctness", jw_correctness},
        {"3", "normalization and support", normalization},
        {"4", "gradient oracles", gradient_oracles},
        {"5", "sampler exactness", sampler_exactness},
        {"6a", "H2 energy", [] { return energy_target("h2.toml", 60.0); }},
        {"6b", "LiH energy", [] { return energy_target("lih.toml", 900.0); }},
        {"6c", "H2O energy", h2o_target},
        {"7", "VNA ablation", vna_ablation},
        {"8", "FLOP model", flop_model},
        {"9", "zero-variance property", zero_variance},
    };
    std::vector<std::string> wanted(argv + 1, argv + argc);
    if (wanted.empty()) { wanted = {"1", "2", "3", "4", "5", "6a", "6b", "8", "9"}; }

    int failures = 0;
    for (auto const& id : wanted) {
        auto it = std::find_if(criteria.begin(), criteria.end(), [&](Criterion const& c) { return c.id == id; });
        if (it == criteria.end()) {
            std::cerr << "unknown criterion '" << id << "'\n";
            return 2;
        }
        auto const start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = it->run();
        } catch (std::exception const& e) {
            o = {false, std::string{"exception: "} + e.what()};
        }
        auto const secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << it->id << " (" << it->title << "): " << o.detail
                  << fmt(" [%.1f s]", secs) << std::endl;
        failures += o.pass ? 0 : 1;
    }
    return failures == 0 ? 0 : 1;
}
