#include "retnqs/ansatz/ansatz.hpp"
#include "retnqs/ansatz/checkpoint.hpp"
#include "retnqs/cli/commands.hpp"
#include "retnqs/cli/run_config.hpp"
#include "retnqs/flops/flops.hpp"
#include "retnqs/hamiltonian/fcidump.hpp"
#include "retnqs/hamiltonian/jordan_wigner.hpp"
#include "retnqs/oracle/oracle.hpp"
#include "retnqs/sampler/sampler.hpp"
#include "retnqs/util/errors.hpp"
#include "retnqs/vmc/estimators.hpp"
#include "retnqs/vmc/train.hpp"

#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

namespace py = pybind11;
using namespace retnqs;

namespace {

using ConfigArray = py::array_t<std::uint64_t, py::array::c_style | py::array::forcecast>;

auto as_configs(ConfigArray const& xs) -> std::vector<ham::SpinConfiguration>
{
    auto v = xs.unchecked<1>();
    std::vector<ham::SpinConfiguration> out(static_cast<std::size_t>(v.shape(0)));
    for (py::ssize_t i = 0; i < v.shape(0); ++i) { out[static_cast<std::size_t>(i)] = v(i); }
    return out;
}

template <typename T>
auto to_numpy(std::vector<T> const& v) -> py::array_t<T>
{
    py::array_t<T> a(static_cast<py::ssize_t>(v.size()));
    std::copy(v.begin(), v.end(), a.mutable_data());
    return a;
}

auto make_config(std::string const& kind, std::size_t n_block, std::size_t d_model, std::optional<std::size_t> d_retn,
                 std::size_t d_ff, std::size_t n_heads, std::vector<std::size_t> phase_hidden,
                 std::vector<std::size_t> made_hidden) -> ansatz::AnsatzConfig
{
    ansatz::AnsatzConfig c;
    c.kind = ansatz::parse_kind(kind);
    c.n_block = n_block;
    c.d_model = d_model;
    c.d_retn = d_retn.value_or(d_model);
    c.d_ff = d_ff;
    c.n_heads = n_heads;
    c.phase_hidden = std::move(phase_hidden);
    c.made_hidden = std::move(made_hidden);
    c.validate();
    return c;
}

auto parse_mode(std::string const& name) -> ansatz::EvalMode
{
    if (name == "auto") { return ansatz::EvalMode::automatic; }
    if (name == "parallel") { return ansatz::EvalMode::parallel; }
    if (name == "recurrent") { return ansatz::EvalMode::recurrent; }
    throw ConfigError{"mode must be auto, parallel or recurrent"};
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Autoregressive neural quantum states for molecular ground states";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);
    py::register_exception<UsageError>(m, "UsageError", PyExc_RuntimeError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);

    py::class_<ham::MolecularIntegrals>(m, "MolecularIntegrals")
        .def_property_readonly("n_orbitals", &ham::MolecularIntegrals::n_orbitals)
        .def_property_readonly("n_electrons", &ham::MolecularIntegrals::n_electrons)
        .def_property_readonly("core_energy", &ham::MolecularIntegrals::core_energy)
        .def("h1", &ham::MolecularIntegrals::h1)
        .def("h2", &ham::MolecularIntegrals::h2);

    m.def("parse_fcidump", py::overload_cast<std::filesystem::path const&>(&ham::parse_fcidump), py::arg("path"));

    py::class_<ham::QubitHamiltonian>(m, "QubitHamiltonian")
        .def(py::init([](std::size_t n_qubits, std::size_t n_electrons, std::vector<std::pair<double, std::string>> terms,
                         double offset, int ms2) {
                 std::vector<ham::PauliTerm> pt;
                 for (auto& [c, ops] : terms) { pt.push_back({c, ops}); }
                 return ham::QubitHamiltonian{n_qubits, n_electrons, ms2, pt, offset};
             }),
             py::arg("n_qubits"), py::arg("n_electrons"), py::arg("terms"), py::arg("offset") = 0.0,
             py::arg("ms2") = 0)
        .def_static("from_integrals",
                    [](ham::MolecularIntegrals const& mi, double prune) { return ham::second_quantize_jw(mi, prune); },
                    py::arg("integrals"), py::arg("prune") = ham::default_prune_threshold)
        .def_static("load", &cli::load_hamiltonian, py::arg("path"),
                    "Load an FCIDUMP (mapped to qubits) or a Pauli text file.")
        .def("save", &ham::QubitHamiltonian::save, py::arg("path"))
        .def_property_readonly("n_qubits", &ham::QubitHamiltonian::n_qubits)
        .def_property_readonly("n_electrons", &ham::QubitHamiltonian::n_electrons)
        .def_property_readonly("n_up", &ham::QubitHamiltonian::n_up)
        .def_property_readonly("n_down", &ham::QubitHamiltonian::n_down)
        .def_property_readonly("identity_offset", &ham::QubitHamiltonian::identity_offset)
        .def_property_readonly("term_count", &ham::QubitHamiltonian::term_count)
        .def_property_readonly("flip_mask_count", &ham::QubitHamiltonian::flip_mask_count)
        .def("matrix_element",
             [](ham::QubitHamiltonian const& h, std::uint64_t x, std::uint64_t y) { return h.matrix_element(x, y); })
        .def("connected",
             [](ham::QubitHamiltonian const& h, std::uint64_t x) {
                 std::vector<std::pair<std::uint64_t, double>> out;
                 for (auto const& c : h.connected(x)) { out.emplace_back(c.config, c.value); }
                 return out;
             })
        .def("pauli_terms", [](ham::QubitHamiltonian const& h) {
            std::vector<std::pair<double, std::string>> out;
            for (auto const& t : h.to_pauli_terms()) { out.emplace_back(t.coefficient, t.ops); }
            return out;
        });

    m.def("config_from_string", &ham::config_from_string, py::arg("bits"));
    m.def("config_to_string", &ham::config_to_string, py::arg("config"), py::arg("n_qubits"));

    py::class_<ansatz::AnsatzConfig>(m, "AnsatzConfig")
        .def(py::init(&make_config), py::arg("kind") = "retnet", py::arg("n_block") = 1, py::arg("d_model") = 16,
             py::arg("d_retn") = std::nullopt, py::arg("d_ff") = 64, py::arg("n_heads") = 4,
             py::arg("phase_hidden") = std::vector<std::size_t>{64, 64},
             py::arg("made_hidden") = std::vector<std::size_t>{64, 64})
        .def_property_readonly("kind", [](ansatz::AnsatzConfig const& c) { return ansatz::to_string(c.kind); })
        .def_readonly("n_block", &ansatz::AnsatzConfig::n_block)
        .def_readonly("d_model", &ansatz::AnsatzConfig::d_model)
        .def_readonly("d_retn", &ansatz::AnsatzConfig::d_retn)
        .def_readonly("d_ff", &ansatz::AnsatzConfig::d_ff)
        .def_readonly("n_heads", &ansatz::AnsatzConfig::n_heads);

    py::class_<ansatz::Ansatz>(m, "Ansatz")
        .def(py::init([](ansatz::AnsatzConfig const& cfg, std::size_t n_qubits, std::size_t n_up, std::size_t n_down,
                         std::uint64_t seed) {
                 return ansatz::Ansatz{cfg, ansatz::SystemInfo{n_qubits, n_up, n_down}, seed};
             }),
             py::arg("config"), py::arg("n_qubits"), py::arg("n_up"), py::arg("n_down"), py::arg("seed") = 0)
        .def_property_readonly("n_params", &ansatz::Ansatz::n_params)
        .def_property_readonly("n_qubits", [](ansatz::Ansatz const& a) { return a.system().n_qubits; })
        .def_property_readonly("trunk_weight_count", &ansatz::Ansatz::trunk_weight_count)
        .def("parameters", [](ansatz::Ansatz const& a) { return to_numpy(a.parameters().flatten()); })
        .def("set_parameters",
             [](ansatz::Ansatz& a, py::array_t<double, py::array::c_style | py::array::forcecast> flat) {
                 if (static_cast<std::size_t>(flat.size()) != a.n_params()) {
                     throw DimensionError{"expected " + std::to_string(a.n_params()) + " parameters"};
                 }
                 a.parameters().assign_flat({flat.data(), static_cast<std::size_t>(flat.size())});
             })
        .def(
            "log_amplitudes",
            [](ansatz::Ansatz const& a, ConfigArray const& xs, std::string const& mode) {
                auto configs = as_configs(xs);
                std::vector<ansatz::LogAmplitude> amps;
                {
                    py::gil_scoped_release release;
                    amps = a.log_amplitudes(configs, parse_mode(mode));
                }
                std::vector<double> logmod;
                std::vector<double> phase;
                for (auto const& v : amps) {
                    logmod.push_back(v.log_modulus);
                    phase.push_back(v.phase);
                }
                return py::make_tuple(to_numpy(logmod), to_numpy(phase));
            },
            py::arg("configs"), py::arg("mode") = "auto",
            "Returns (log_modulus, phase); infeasible configurations have log_modulus = -inf.")
        .def(
            "sample",
            [](ansatz::Ansatz const& a, std::uint64_t n_draws, std::uint64_t seed, bool prune_singletons) {
                sampler::SamplerOptions opts;
                opts.prune_singletons = prune_singletons;
                sampler::SampleSet s;
                {
                    py::gil_scoped_release release;
                    s = sampler::sample(a, n_draws, seed, opts);
                }
                return py::make_tuple(to_numpy(s.configs), to_numpy(s.counts));
            },
            py::arg("n_draws"), py::arg("seed") = 0, py::arg("prune_singletons") = false)
        .def("save", [](ansatz::Ansatz const& a, std::filesystem::path const& p) { ansatz::save_checkpoint(p, a); })
        .def_static("load", [](std::filesystem::path const& p) { return ansatz::load_checkpoint(p).ansatz; });

    m.def(
        "local_energies",
        [](ham::QubitHamiltonian const& h, ansatz::Ansatz const& a, ConfigArray const& xs) {
            auto configs = as_configs(xs);
            auto locals = vmc::local_energies(h, configs, vmc::amplitude_fn(a));
            return to_numpy(locals);
        },
        py::arg("hamiltonian"), py::arg("ansatz"), py::arg("configs"));

    m.def(
        "train",
        [](ham::QubitHamiltonian const& h, ansatz::Ansatz& a, std::uint64_t steps, std::uint64_t seed, bool vna,
           std::uint64_t n_start, std::uint64_t n_end, std::size_t unique_cap,
           std::function<void(py::dict)> const& callback) {
            vmc::TrainConfig cfg;
            cfg.schedule.total_steps = steps;
            if (!vna) { cfg.schedule.beta0 = 0.0; }
            cfg.seed = seed;
            cfg.sampling.n_start = n_start;
            cfg.sampling.n_end = n_end;
            cfg.sampling.unique_cap = unique_cap;
            auto r = vmc::train(h, a, cfg, [&](vmc::StepRecord const& rec) {
                if (!callback) { return; }
                py::dict d;
                d["step"] = rec.step;
                d["energy"] = rec.energy;
                d["variance"] = rec.variance;
                d["best_energy"] = rec.best_energy;
                d["beta"] = rec.beta;
                d["lr"] = rec.lr;
                callback(d);
            });
            py::dict out;
            out["best_energy"] = r.best.mean;
            out["last_energy"] = r.last.mean;
            out["steps"] = r.steps;
            out["wall_time"] = r.wall_seconds;
            out["warnings"] = r.warnings;
            return out;
        },
        py::arg("hamiltonian"), py::arg("ansatz"), py::arg("steps"), py::arg("seed") = 0, py::arg("vna") = true,
        py::arg("n_start") = 1000, py::arg("n_end") = 100000, py::arg("unique_cap") = 8000,
        py::arg("callback") = nullptr);

    m.def(
        "ground_state_energy",
        [](ham::QubitHamiltonian const& h, bool full_space) {
            std::optional<oracle::Sector> sector;
            if (!full_space) { sector = oracle::Sector{h.n_up(), h.n_down()}; }
            return oracle::ground_state(h, sector).energy;
        },
        py::arg("hamiltonian"), py::arg("full_space") = false);
    m.def(
        "exact_energy", [](ham::QubitHamiltonian const& h, ansatz::Ansatz const& a) { return oracle::exact_expectation(h, a); },
        py::arg("hamiltonian"), py::arg("ansatz"));

    auto dims = [](std::uint64_t n_block, std::uint64_t d_model, std::optional<std::uint64_t> d_retn,
                   std::uint64_t d_ff, std::uint64_t n_seq) {
        flops::ModelDims d{n_block, d_model, d_retn.value_or(d_model), d_ff, n_seq};
        d.validate();
        return d;
    };
    m.def(
        "param_count",
        [=](std::uint64_t n_block, std::uint64_t d_model, std::optional<std::uint64_t> d_retn, std::uint64_t d_ff) {
            return flops::param_count(dims(n_block, d_model, d_retn, d_ff, 1));
        },
        py::arg("n_block") = 1, py::arg("d_model") = 16, py::arg("d_retn") = std::nullopt, py::arg("d_ff") = 64);
    m.def(
        "flops_per_token",
        [=](std::string const& form, std::uint64_t n_block, std::uint64_t d_model, std::optional<std::uint64_t> d_retn,
            std::uint64_t d_ff, std::uint64_t n_seq) {
            return flops::flops_per_token(dims(n_block, d_model, d_retn, d_ff, n_seq), flops::parse_form(form));
        },
        py::arg("form"), py::arg("n_block") = 1, py::arg("d_model") = 16, py::arg("d_retn") = std::nullopt,
        py::arg("d_ff") = 64, py::arg("n_seq") = 1);
    m.def(
        "crossover_seq_len",
        [=](std::uint64_t n_block, std::uint64_t d_model, std::optional<std::uint64_t> d_retn, std::uint64_t d_ff) {
            return flops::crossover_seq_len(dims(n_block, d_model, d_retn, d_ff, 1));
        },
        py::arg("n_block") = 1, py::arg("d_model") = 16, py::arg("d_retn") = std::nullopt, py::arg("d_ff") = 64);

    m.def(
        "cli",
        [](std::vector<std::string> const& args) {
            std::ostringstream out;
            std::ostringstream err;
            int code = 0;
            {
                py::gil_scoped_release release;
                code = cli::run(args, out, err);
            }
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Run a command-line invocation in-process; returns (exit_code, stdout, stderr).");
}
