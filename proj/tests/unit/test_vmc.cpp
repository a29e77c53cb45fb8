#include "helpers.hpp"

#include "retnqs/hamiltonian/fcidump.hpp"
#include "retnqs/hamiltonian/jordan_wigner.hpp"
#include "retnqs/oracle/oracle.hpp"
#include "retnqs/util/errors.hpp"
#include "retnqs/vmc/estimators.hpp"
#include "retnqs/vmc/train.hpp"

#include <doctest.h>

#include <cmath>

using namespace retnqs;
using namespace retnqs::ansatz;
using namespace retnqs::vmc;
using Complex = std::complex<double>;

namespace {

auto tiny() -> AnsatzConfig
{
    AnsatzConfig cfg;
    cfg.d_model = 8;
    cfg.d_retn = 8;
    cfg.d_ff = 16;
    cfg.n_heads = 2;
    cfg.phase_hidden = {8};
    return cfg;
}

void perturb(Ansatz& model, std::uint64_t seed, double scale = 0.4)
{
    std::mt19937_64 rng{seed};
    std::normal_distribution<double> normal{0.0, scale};
    for (std::size_t p = 0; p < model.parameters().size(); ++p) {
        for (auto& v : model.parameters().value(p).data()) { v += normal(rng); }
    }
}

auto random_hamiltonian(std::size_t n, std::uint64_t seed) -> ham::QubitHamiltonian
{
    std::mt19937_64 rng{seed};
    std::uniform_int_distribution<int> pick{0, 3};
    std::normal_distribution<double> normal;
    std::vector<ham::PauliTerm> terms;
    while (terms.size() < 25) {
        std::string ops;
        int ys = 0;
        for (std::size_t q = 0; q < n; ++q) {
            ops += "IXYZ"[pick(rng)];
            ys += ops.back() == 'Y';
        }
        if (ys % 2 == 0) { terms.push_back({normal(rng), ops}); }
    }
    return {n, 2, 0, terms, -0.7};
}

auto psi_of(Ansatz const& model, SpinConfiguration x) -> Complex
{
    auto a = model.log_amplitude(x);
    return a.feasible ? a.value() : Complex{};
}

// <psi|H|psi> by direct double sum over the sector (the ansatz support).
auto expectation(ham::QubitHamiltonian const& h, Ansatz const& model) -> double
{
    auto basis = sector_configs(model.system());
    std::vector<Complex> psi;
    for (auto x : basis) { psi.push_back(psi_of(model, x)); }
    Complex e{};
    for (std::size_t i = 0; i < basis.size(); ++i) {
        for (std::size_t j = 0; j < basis.size(); ++j) {
            e += std::conj(psi[i]) * h.matrix_element(basis[i], basis[j]) * psi[j];
        }
    }
    return e.real();
}

auto neg_entropy(Ansatz const& model) -> double
{
    double s = 0.0;
    for (auto const& a : model.log_amplitudes(sector_configs(model.system()))) {
        auto p = a.probability();
        if (p > 0.0) { s += p * std::log(p); }
    }
    return s;
}

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

struct Enumerated {
    std::vector<SpinConfiguration> configs;
    std::vector<double> weights;
    std::vector<Complex> locals;
};

auto enumerate(ham::QubitHamiltonian const& h, Ansatz const& model) -> Enumerated
{
    Enumerated e;
    e.configs = sector_configs(model.system());
    for (auto const& a : model.log_amplitudes(e.configs)) { e.weights.push_back(a.probability()); }
    e.locals = local_energies(h, e.configs, amplitude_fn(model));
    return e;
}

} // namespace

TEST_CASE("local energies")
{
    SystemInfo sys{4, 1, 1};
    Ansatz model{tiny(), sys, 1};
    perturb(model, 2);
    auto amp = amplitude_fn(model);

    ham::QubitHamiltonian constant{4, 2, 0, {}, 1.75};
    for (auto x : sector_configs(sys)) { CHECK(local_energy(constant, x, amp) == Complex{1.75, 0.0}); }

    ham::QubitHamiltonian flip{1, 0, 0, {{1.0, "X"}}};
    AmplitudeFn uniform = [](std::span<SpinConfiguration const> xs) {
        return std::vector<LogAmplitude>(xs.size(), LogAmplitude{std::log(std::sqrt(0.5)), 0.0, true});
    };
    CHECK(local_energy(flip, 0, uniform).real() == doctest::Approx(1.0));
    CHECK(local_energy(flip, 1, uniform).real() == doctest::Approx(1.0));

    auto h = random_hamiltonian(4, 3);
    auto sector = sector_configs(sys);
    for (std::size_t batches : {1U, 3U, 8U}) {
        auto locals = local_energies(h, sector, amp, batches);
        for (std::size_t i = 0; i < sector.size(); ++i) {
            Complex hpsi{};
            for (SpinConfiguration y = 0; y < 16; ++y) { hpsi += h.matrix_element(sector[i], y) * psi_of(model, y); }
            auto expected = hpsi / psi_of(model, sector[i]);
            CHECK(std::abs(locals[i] - expected) < 1e-10);
        }
    }

    SpinConfiguration outside[] = {0};
    CHECK_THROWS_AS(local_energies(h, outside, amp), NumericalError);
}

TEST_CASE("energy estimates")
{
    std::uint64_t counts[] = {3, 1};
    Complex locals[] = {{-1.0, 0.0}, {3.0, 0.5}};
    auto est = energy_estimate(counts, locals);
    CHECK(est.mean == doctest::Approx(0.0));
    CHECK(est.variance == doctest::Approx(3.0));
    CHECK(est.n_eff == 4);

    Complex flat[] = {{2.5, 0.0}, {2.5, 0.0}};
    auto same = energy_estimate(counts, flat);
    CHECK(same.mean == 2.5);
    CHECK(same.variance == 0.0);

    auto mi = ham::parse_fcidump(test_support::fixture("lih_cas3.fcidump"));
    auto h = ham::second_quantize_jw(mi);
    Ansatz model{tiny(), SystemInfo{6, 1, 1}, 4};
    perturb(model, 5);
    auto exact = expectation(h, model);
    auto e = enumerate(h, model);
    double mean = 0.0;
    for (std::size_t i = 0; i < e.configs.size(); ++i) { mean += e.weights[i] * e.locals[i].real(); }
    CHECK(std::abs(mean - exact) < 1e-10);

    for (std::uint64_t draws : {1000U, 1000000U}) {
        auto s = sampler::sample(model, draws, 77);
        auto est_n = energy_estimate(s, local_energies(h, s.configs, amplitude_fn(model)));
        CHECK(std::abs(est_n.mean - exact) < 5.0 * est_n.standard_error() + 1e-12);
    }
}

TEST_CASE("gradient estimator under enumeration weights")
{
    auto mi = ham::parse_fcidump(test_support::fixture("lih_cas3.fcidump"));
    auto h = ham::second_quantize_jw(mi);
    for (auto kind : {Kind::retnet, Kind::made}) {
        CAPTURE(to_string(kind));
        auto cfg = tiny();
        cfg.kind = kind;
        cfg.made_hidden = {10};
        Ansatz model{cfg, SystemInfo{6, 1, 1}, 6};
        perturb(model, 7);
        auto e = enumerate(h, model);

        auto energy = vna_gradient(model, e.configs, e.weights, e.locals, 0.0, std::nullopt);
        auto fd = central_differences(model, [&](Ansatz const& m) { return expectation(h, m); });
        CHECK(test_support::relative_error(nn::flatten(energy.grads), fd) < 1e-4);

        auto shifted = vna_gradient(model, e.configs, e.weights, e.locals, 0.0, energy.baseline + 100.0);
        CHECK(test_support::max_abs_diff(nn::flatten(shifted.grads), nn::flatten(energy.grads)) < 1e-10);

        ham::QubitHamiltonian zero{6, 2, 0, {}};
        auto ez = enumerate(zero, model);
        auto entropy = vna_gradient(model, ez.configs, ez.weights, ez.locals, 1.0, std::nullopt);
        auto fd_s = central_differences(model, neg_entropy);
        CHECK(test_support::relative_error(nn::flatten(entropy.grads), fd_s) < 1e-4);
        CHECK(entropy.loss == doctest::Approx(neg_entropy(model)).epsilon(1e-10));

        auto with_b = vna_gradient(model, ez.configs, ez.weights, ez.locals, 1.0, 3.0);
        CHECK(test_support::max_abs_diff(nn::flatten(with_b.grads), nn::flatten(entropy.grads)) < 1e-10);
    }

    Ansatz model{tiny(), SystemInfo{4, 1, 1}, 8};
    auto configs = sector_configs(model.system());
    std::vector<double> weights(configs.size(), 1.0 / static_cast<double>(configs.size()));
    std::vector<Complex> locals(configs.size(), Complex{-1.25, 0.0});
    auto flat = vna_gradient(model, configs, weights, locals, 0.0, -1.25);
    for (auto g : nn::flatten(flat.grads)) { CHECK(g == 0.0); }
    weights[0] = std::nan("");
    CHECK_THROWS_AS(vna_gradient(model, configs, weights, locals, 0.0, std::nullopt), NumericalError);
}

TEST_CASE("baseline refresh and best-energy rules")
{
    for (std::uint64_t t = 0; t < 100; ++t) { CHECK(baseline_due(t, 1000, 1)); }
    CHECK(baseline_due(0, 1000, 10));
    for (std::uint64_t t = 1; t < 10; ++t) { CHECK_FALSE(baseline_due(t, 1000, 10)); }
    CHECK(baseline_due(10, 1000, 10));
    CHECK(baseline_due(901, 1000, 10));
    CHECK_THROWS_AS(baseline_due(1, 10, 0), ConfigError);

    std::optional<EnergyEstimate> best;
    CHECK(best_energy_update(best, EnergyEstimate{-1.0, 0.0, 0.0, 100}));
    CHECK(best_energy_update(best, EnergyEstimate{-1.1, 0.0, 0.0, 100}));
    CHECK(best->mean == -1.1);
    // 0.01 lower, SE 0.1: inside the bound.
    CHECK_FALSE(best_energy_update(best, EnergyEstimate{-1.11, 1.0, 0.0, 100}));
    CHECK(best->mean == -1.1);

    std::mt19937_64 rng{3};
    std::normal_distribution<double> noise{0.0, 0.05};
    std::optional<EnergyEstimate> running;
    double prev = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 2000; ++i) {
        auto truth = -1.0 - 0.5 * std::exp(-i / 300.0);
        best_energy_update(running, EnergyEstimate{truth + noise(rng), 0.25, 0.0, 100});
        CHECK(running->mean <= prev);
        prev = running->mean;
    }
}

TEST_CASE("zero-variance principle at the exact ground state")
{
    for (char const* name : {"h2.fcidump", "lih.fcidump"}) {
        CAPTURE(name);
        auto mi = ham::parse_fcidump(test_support::fixture(name));
        auto h = ham::second_quantize_jw(mi);
        auto gs = oracle::ground_state(h, oracle::Sector{mi.n_up(), mi.n_down()});
        AmplitudeFn exact = [&](std::span<SpinConfiguration const> xs) {
            std::vector<LogAmplitude> out;
            for (auto x : xs) {
                auto it = std::lower_bound(gs.state.basis.begin(), gs.state.basis.end(), x);
                if (it == gs.state.basis.end() || *it != x) {
                    out.push_back({-std::numeric_limits<double>::infinity(), 0.0, false});
                    continue;
                }
                auto a = gs.state.amplitudes[static_cast<std::size_t>(it - gs.state.basis.begin())];
                out.push_back({std::log(std::abs(a)), std::arg(a), std::abs(a) > 0.0});
            }
            return out;
        };
        std::vector<SpinConfiguration> support;
        for (std::size_t i = 0; i < gs.state.basis.size(); ++i) {
            if (std::abs(gs.state.amplitudes[i]) > 1e-6) { support.push_back(gs.state.basis[i]); }
        }
        for (auto l : local_energies(h, support, exact)) { CHECK(std::abs(l.real() - gs.energy) < 1e-9); }
    }
}

TEST_CASE("training loop on a constant Hamiltonian")
{
    ham::QubitHamiltonian constant{4, 2, 0, {}, -2.0};
    Ansatz model{tiny(), SystemInfo{4, 1, 1}, 1};
    auto before = model.parameters().flatten();
    TrainConfig cfg;
    cfg.schedule.total_steps = 6;
    cfg.schedule.beta0 = 0.0;
    cfg.sampling.n_start = 100;
    cfg.sampling.n_end = 200;
    std::vector<StepRecord> log;
    auto result = train(constant, model, cfg, [&](StepRecord const& r) { log.push_back(r); });
    CHECK(result.steps == 6);
    CHECK(log.size() == 6);
    for (auto const& r : log) {
        CHECK(r.energy == doctest::Approx(-2.0));
        CHECK(r.variance == doctest::Approx(0.0));
    }
    CHECK(result.best.mean == doctest::Approx(-2.0));
    CHECK(model.parameters().flatten() == before);
    CHECK(to_json_line(log[0]).find("\"energy\"") != std::string::npos);
}
