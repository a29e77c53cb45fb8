#include "retnqs/cli/commands.hpp"

#include "retnqs/ansatz/checkpoint.hpp"
#include "retnqs/cli/run_config.hpp"
#include "retnqs/flops/flops.hpp"
#include "retnqs/hamiltonian/fcidump.hpp"
#include "retnqs/hamiltonian/jordan_wigner.hpp"
#include "retnqs/oracle/oracle.hpp"
#include "retnqs/sampler/sampler.hpp"
#include "retnqs/util/errors.hpp"
#include "retnqs/vmc/train.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>

namespace retnqs::cli {

namespace {

auto format_energy(double e) -> std::string
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10f", e);
    return buf;
}

auto parse_sector(std::string const& text) -> oracle::Sector
{
    auto comma = text.find(',');
    if (comma == std::string::npos) { throw UsageError{"--sector expects 'n_up,n_down', got '" + text + "'"}; }
    try {
        return oracle::Sector{std::stoul(text.substr(0, comma)), std::stoul(text.substr(comma + 1))};
    } catch (std::exception const&) {
        throw UsageError{"--sector expects two non-negative integers, got '" + text + "'"};
    }
}

void set_workers(std::size_t workers)
{
    if (workers > 0) { ::setenv("RETNQS_WORKERS", std::to_string(workers).c_str(), 1); }
}

struct TrainArgs {
    std::string config;
    std::string ansatz;
    std::string hamiltonian;
    std::string output_dir;
    bool no_vna = false;
    std::optional<std::uint64_t> steps;
    std::optional<std::uint64_t> seed;
    std::size_t workers = 0;
    bool quiet = false;
};

auto cmd_train(TrainArgs const& a, std::ostream& out, std::ostream& err) -> int
{
    set_workers(a.workers);
    auto cfg = load_run_config(a.config);
    if (!a.ansatz.empty()) { cfg.ansatz.kind = ansatz::parse_kind(a.ansatz); }
    if (!a.hamiltonian.empty()) { cfg.hamiltonian = a.hamiltonian; }
    if (!a.output_dir.empty()) { cfg.output_dir = a.output_dir; }
    if (a.no_vna) { disable_vna(cfg); }
    if (a.steps) { cfg.train.schedule.total_steps = *a.steps; }
    if (a.seed) { cfg.train.seed = *a.seed; }
    for (auto const& w : cfg.validate()) { err << "warning: " << w << '\n'; }

    auto h = load_hamiltonian(cfg.hamiltonian);
    std::filesystem::create_directories(cfg.output_dir);
    cfg.train.checkpoint_path = cfg.output_dir / "checkpoint.json";

    ansatz::Ansatz model{cfg.ansatz, {h.n_qubits(), h.n_up(), h.n_down()}, cfg.train.seed};
    std::ofstream log{cfg.output_dir / "train_log.jsonl"};
    if (!log) { throw std::runtime_error{"cannot write training log in " + cfg.output_dir.string()}; }
    auto const report_every = std::max<std::uint64_t>(1, cfg.train.schedule.total_steps / 20);
    auto result = vmc::train(h, model, cfg.train, [&](vmc::StepRecord const& r) {
        log << vmc::to_json_line(r) << '\n';
        if (!a.quiet && (r.step % report_every == 0 || r.step + 1 == cfg.train.schedule.total_steps)) {
            out << "step " << r.step << "  energy " << format_energy(r.energy) << "  best "
                << format_energy(r.best_energy) << "  beta " << r.beta << '\n';
        }
    });
    for (auto const& w : result.warnings) { err << "warning: " << w << '\n'; }

    nlohmann::json summary{{"best_energy", result.best.mean},
                           {"n_params", model.n_params()},
                           {"wall_time", result.wall_seconds},
                           {"steps", result.steps},
                           {"ansatz", ansatz::to_string(cfg.ansatz.kind)},
                           {"vna", cfg.train.schedule.beta0 > 0.0}};
    if (cfg.oracle && h.n_qubits() <= 20) {
        auto gs = oracle::ground_state(h, oracle::Sector{h.n_up(), h.n_down()});
        summary["oracle_energy"] = gs.energy;
    }
    std::ofstream{cfg.output_dir / "summary.json"} << summary.dump(2) << '\n';
    out << "best energy " << format_energy(result.best.mean);
    if (summary.contains("oracle_energy")) {
        out << "  (exact " << format_energy(summary["oracle_energy"].get<double>()) << ")";
    }
    out << '\n';
    return exit_ok;
}

auto cmd_diag(std::string const& path, std::string const& sector_text, bool full, std::string const& solver_name,
              std::ostream& out) -> int
{
    auto h = load_hamiltonian(path);
    std::optional<oracle::Sector> sector;
    if (!full) { sector = sector_text.empty() ? oracle::Sector{h.n_up(), h.n_down()} : parse_sector(sector_text); }
    auto solver = oracle::Solver::automatic;
    if (solver_name == "dense") { solver = oracle::Solver::dense; }
    else if (solver_name == "lanczos") { solver = oracle::Solver::lanczos; }
    else if (solver_name != "auto") { throw UsageError{"--solver must be auto, dense or lanczos"}; }
    auto gs = oracle::ground_state(h, sector, solver);
    out << "qubits " << h.n_qubits();
    if (sector) { out << "  sector " << sector->n_up << "," << sector->n_down; }
    out << "  basis " << gs.state.basis.size() << "  solver " << (gs.solver == oracle::Solver::dense ? "dense" : "lanczos")
        << '\n';
    out << "ground_energy " << format_energy(gs.energy) << '\n';
    return exit_ok;
}

auto cmd_flops(flops::ModelDims dims, bool json, std::ostream& out) -> int
{
    dims.validate();
    auto const n = flops::param_count(dims);
    auto const par = flops::flops_per_token(dims, flops::Form::retnet_parallel);
    auto const rec = flops::flops_per_token(dims, flops::Form::retnet_recurrent);
    auto const tra = flops::flops_per_token(dims, flops::Form::transformer);
    auto const cross = flops::crossover_seq_len(dims);
    if (json) {
        out << nlohmann::json{{"params", n},
                              {"retnet_parallel", par},
                              {"retnet_recurrent", rec},
                              {"transformer", tra},
                              {"crossover_n_seq", cross}}
                   .dump()
            << '\n';
        return exit_ok;
    }
    out << "n_block " << dims.n_block << "  d_model " << dims.d_model << "  d_retn " << dims.d_retn << "  d_ff "
        << dims.d_ff << "  n_seq " << dims.n_seq << '\n';
    out << std::left << std::setw(28) << "parameters" << n << '\n';
    out << std::setw(28) << "retnet parallel / token" << par << '\n';
    out << std::setw(28) << "retnet recurrent / token" << rec << '\n';
    out << std::setw(28) << "transformer / token" << tra << '\n';
    out << std::setw(28) << "recurrent cheaper if n_seq >" << cross << '\n';
    return exit_ok;
}

auto cmd_sample(std::string const& checkpoint, std::uint64_t draws, std::uint64_t seed, bool prune,
                std::string const& output, std::ostream& out, std::ostream& err) -> int
{
    auto ck = ansatz::load_checkpoint(std::filesystem::path{checkpoint});
    sampler::SamplerOptions opts;
    opts.prune_singletons = prune;
    std::vector<std::string> warnings;
    auto s = sampler::sample(ck.ansatz, draws, seed, opts, &warnings);
    for (auto const& w : warnings) { err << "warning: " << w << '\n'; }
    if (output.empty() || output == "-") {
        sampler::write_samples(out, s, ck.ansatz.system().n_qubits);
    } else {
        std::ofstream file{output};
        if (!file) { throw std::runtime_error{"cannot write '" + output + "'"}; }
        sampler::write_samples(file, s, ck.ansatz.system().n_qubits);
    }
    return exit_ok;
}

auto cmd_convert(std::string const& input, std::string const& output, double prune, std::ostream& out) -> int
{
    auto h = ham::second_quantize_jw(ham::parse_fcidump(std::filesystem::path{input}), prune);
    h.save(output);
    out << "wrote " << h.term_count() << " Pauli terms on " << h.n_qubits() << " qubits to " << output << '\n';
    return exit_ok;
}

} // namespace

auto run(std::vector<std::string> const& args, std::ostream& out, std::ostream& err) -> int
{
    CLI::App app{"Neural quantum state VMC for molecular Hamiltonians", "retnqs"};
    app.require_subcommand(1);

    TrainArgs train;
    auto* train_cmd = app.add_subcommand("train", "Train an ansatz from a TOML run configuration");
    train_cmd->add_option("--config", train.config, "Run configuration file")->required();
    train_cmd->add_option("--ansatz", train.ansatz, "Override the ansatz kind")
        ->check(CLI::IsMember({"retnet", "transformer", "made"}));
    train_cmd->add_option("--hamiltonian", train.hamiltonian, "Override the Hamiltonian file");
    train_cmd->add_option("--output-dir", train.output_dir, "Override the output directory");
    train_cmd->add_flag("--no-vna", train.no_vna, "Disable variational annealing (beta = 0)");
    train_cmd->add_option("--steps", train.steps, "Override the number of steps");
    train_cmd->add_option("--seed", train.seed, "Override the seed");
    train_cmd->add_option("--workers", train.workers, "Worker threads (default: RETNQS_WORKERS or 1)");
    train_cmd->add_flag("--quiet", train.quiet, "Only print the final summary line");

    std::string diag_path;
    std::string diag_sector;
    std::string diag_solver = "auto";
    bool diag_full = false;
    auto* diag_cmd = app.add_subcommand("diag", "Exact ground-state energy");
    diag_cmd->add_option("--hamiltonian", diag_path, "FCIDUMP or Pauli text file")->required();
    diag_cmd->add_option("--sector", diag_sector, "Electron counts 'n_up,n_down' (default: from the file)");
    diag_cmd->add_flag("--full-space", diag_full, "Diagonalize over all configurations");
    diag_cmd->add_option("--solver", diag_solver, "auto, dense or lanczos");

    flops::ModelDims dims{1, 16, 0, 64, 1};
    bool flops_json = false;
    auto* flops_cmd = app.add_subcommand("flops", "Parameter and FLOP-per-token estimates");
    flops_cmd->add_option("--n-block", dims.n_block);
    flops_cmd->add_option("--d-model", dims.d_model);
    flops_cmd->add_option("--d-retn", dims.d_retn, "Defaults to d_model");
    flops_cmd->add_option("--d-ff", dims.d_ff);
    flops_cmd->add_option("--n-seq", dims.n_seq);
    flops_cmd->add_flag("--json", flops_json);

    std::string sample_ck;
    std::string sample_out;
    std::uint64_t sample_draws = 100000;
    std::uint64_t sample_seed = 0;
    bool sample_prune = false;
    auto* sample_cmd = app.add_subcommand("sample", "Draw configurations from a checkpoint");
    sample_cmd->add_option("--checkpoint", sample_ck)->required();
    sample_cmd->add_option("--draws", sample_draws);
    sample_cmd->add_option("--seed", sample_seed);
    sample_cmd->add_flag("--prune-singletons", sample_prune);
    sample_cmd->add_option("--output", sample_out, "Output file (default: stdout)");

    std::string conv_in;
    std::string conv_out;
    double conv_prune = ham::default_prune_threshold;
    auto* convert_cmd = app.add_subcommand("convert", "Map an FCIDUMP file to a Pauli text file");
    convert_cmd->add_option("input", conv_in)->required();
    convert_cmd->add_option("output", conv_out)->required();
    convert_cmd->add_option("--prune", conv_prune, "Drop Pauli coefficients below this magnitude");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (CLI::CallForHelp const&) {
        out << app.help();
        return exit_ok;
    } catch (CLI::CallForAllHelp const&) {
        out << app.help("", CLI::AppFormatMode::All);
        return exit_ok;
    } catch (CLI::ParseError const& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    }

    try {
        if (*train_cmd) { return cmd_train(train, out, err); }
        if (*diag_cmd) { return cmd_diag(diag_path, diag_sector, diag_full, diag_solver, out); }
        if (*flops_cmd) {
            if (dims.d_retn == 0) { dims.d_retn = dims.d_model; }
            return cmd_flops(dims, flops_json, out);
        }
        if (*sample_cmd) { return cmd_sample(sample_ck, sample_draws, sample_seed, sample_prune, sample_out, out, err); }
        if (*convert_cmd) { return cmd_convert(conv_in, conv_out, conv_prune, out); }
    } catch (UsageError const& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (std::exception const& e) {
        err << "error: " << e.what() << '\n';
        return exit_runtime;
    }
    return exit_usage;
}

} // namespace retnqs::cli
