#include "retnqs/cli/run_config.hpp"

#include "retnqs/hamiltonian/fcidump.hpp"
#include "retnqs/hamiltonian/jordan_wigner.hpp"
#include "retnqs/util/errors.hpp"

#include <toml.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace retnqs::cli {

namespace {

void reject_unknown(toml::table const& t, std::set<std::string> const& known, std::string const& where)
{
    for (auto const& [key, _] : t) {
        if (known.count(std::string{key.str()}) == 0) {
            throw ConfigError{"unknown key '" + std::string{key.str()} + "' in " + where};
        }
    }
}

template <typename T>
void read(toml::table const& t, char const* key, T& dst, std::string const& where)
{
    auto const* node = t.get(key);
    if (node == nullptr) { return; }
    if constexpr (std::is_same_v<T, bool>) {
        auto v = node->value<bool>();
        if (!v) { throw ConfigError{where + "." + key + " must be a boolean"}; }
        dst = *v;
    } else if constexpr (std::is_same_v<T, std::string>) {
        auto v = node->value<std::string>();
        if (!v) { throw ConfigError{where + "." + key + " must be a string"}; }
        dst = *v;
    } else if constexpr (std::is_floating_point_v<T>) {
        auto v = node->value<double>();
        if (!v) { throw ConfigError{where + "." + key + " must be a number"}; }
        dst = *v;
    } else {
        auto v = node->value<std::int64_t>();
        if (!v || *v < 0) { throw ConfigError{where + "." + key + " must be a non-negative integer"}; }
        dst = static_cast<T>(*v);
    }
}

void read_sizes(toml::table const& t, char const* key, std::vector<std::size_t>& dst, std::string const& where)
{
    auto const* node = t.get(key);
    if (node == nullptr) { return; }
    auto const* arr = node->as_array();
    if (arr == nullptr) { throw ConfigError{where + "." + key + " must be an array of integers"}; }
    dst.clear();
    for (auto const& e : *arr) {
        auto v = e.value<std::int64_t>();
        if (!v || *v <= 0) { throw ConfigError{where + "." + key + " entries must be positive integers"}; }
        dst.push_back(static_cast<std::size_t>(*v));
    }
}

auto sub_table(toml::table const& root, char const* key) -> toml::table const*
{
    auto const* node = root.get(key);
    if (node == nullptr) { return nullptr; }
    if (!node->is_table()) { throw ConfigError{std::string{"["} + key + "] must be a table"}; }
    return node->as_table();
}

} // namespace

auto RunConfig::validate() const -> std::vector<std::string>
{
    if (hamiltonian.empty()) { throw ConfigError{"no hamiltonian file given"}; }
    if (!std::filesystem::exists(hamiltonian)) {
        throw ConfigError{"hamiltonian file '" + hamiltonian.string() + "' does not exist"};
    }
    ansatz.validate();
    return train.validate();
}

auto parse_run_config(std::string const& text, std::filesystem::path const& base_dir) -> RunConfig
{
    toml::table root;
    try {
        root = toml::parse(text);
    } catch (toml::parse_error const& e) {
        throw ParseError{std::string{e.description()}, e.source().begin.line};
    }
    reject_unknown(root, {"hamiltonian", "output_dir", "seed", "oracle", "ansatz", "train", "sampling"}, "run config");

    RunConfig cfg;
    std::string path;
    read(root, "hamiltonian", path, "run config");
    if (!path.empty()) { cfg.hamiltonian = base_dir / path; }
    std::string out;
    read(root, "output_dir", out, "run config");
    if (!out.empty()) { cfg.output_dir = base_dir / out; }
    read(root, "seed", cfg.train.seed, "run config");
    read(root, "oracle", cfg.oracle, "run config");

    if (auto const* a = sub_table(root, "ansatz")) {
        reject_unknown(*a, {"kind", "n_block", "d_model", "d_retn", "d_ff", "n_heads", "phase_hidden", "made_hidden"},
                       "[ansatz]");
        std::string kind = ansatz::to_string(cfg.ansatz.kind);
        read(*a, "kind", kind, "ansatz");
        cfg.ansatz.kind = ansatz::parse_kind(kind);
        read(*a, "n_block", cfg.ansatz.n_block, "ansatz");
        read(*a, "d_model", cfg.ansatz.d_model, "ansatz");
        cfg.ansatz.d_retn = cfg.ansatz.d_model;
        read(*a, "d_retn", cfg.ansatz.d_retn, "ansatz");
        read(*a, "d_ff", cfg.ansatz.d_ff, "ansatz");
        read(*a, "n_heads", cfg.ansatz.n_heads, "ansatz");
        read_sizes(*a, "phase_hidden", cfg.ansatz.phase_hidden, "ansatz");
        read_sizes(*a, "made_hidden", cfg.ansatz.made_hidden, "ansatz");
    }

    auto& sched = cfg.train.schedule;
    if (auto const* t = sub_table(root, "train")) {
        reject_unknown(*t,
                       {"steps", "base_lr", "min_lr", "warmup_frac", "anneal_exponent", "anneal_start_frac", "beta0",
                        "vna", "flip_batch_count", "baseline_interval", "checkpoint_every"},
                       "[train]");
        read(*t, "steps", sched.total_steps, "train");
        read(*t, "base_lr", sched.base_lr, "train");
        read(*t, "min_lr", sched.min_lr, "train");
        read(*t, "warmup_frac", sched.warmup_frac, "train");
        read(*t, "anneal_exponent", sched.anneal_exponent, "train");
        read(*t, "anneal_start_frac", sched.anneal_start_frac, "train");
        read(*t, "beta0", sched.beta0, "train");
        bool vna = true;
        read(*t, "vna", vna, "train");
        if (!vna) { sched.beta0 = 0.0; }
        read(*t, "flip_batch_count", cfg.train.flip_batch_count, "train");
        read(*t, "baseline_interval", cfg.train.baseline_interval, "train");
        read(*t, "checkpoint_every", cfg.train.checkpoint_every, "train");
    }

    if (auto const* s = sub_table(root, "sampling")) {
        reject_unknown(*s, {"n_start", "n_end", "unique_cap", "prune_singletons"}, "[sampling]");
        read(*s, "n_start", cfg.train.sampling.n_start, "sampling");
        read(*s, "n_end", cfg.train.sampling.n_end, "sampling");
        read(*s, "unique_cap", cfg.train.sampling.unique_cap, "sampling");
        read(*s, "prune_singletons", cfg.train.sampling.prune_singletons, "sampling");
    }
    return cfg;
}

auto load_run_config(std::filesystem::path const& path) -> RunConfig
{
    std::ifstream in{path};
    if (!in) { throw ConfigError{"cannot open run config '" + path.string() + "'"}; }
    std::ostringstream text;
    text << in.rdbuf();
    return parse_run_config(text.str(), path.parent_path());
}

void disable_vna(RunConfig& cfg) { cfg.train.schedule.beta0 = 0.0; }

auto is_fcidump(std::filesystem::path const& path) -> bool
{
    std::ifstream in{path};
    if (!in) { throw ConfigError{"cannot open '" + path.string() + "'"}; }
    std::string word;
    in >> word;
    for (auto& c : word) { c = static_cast<char>(std::toupper(static_cast<unsigned char>(c))); }
    return word.rfind("&FCI", 0) == 0;
}

auto load_hamiltonian(std::filesystem::path const& path) -> ham::QubitHamiltonian
{
    if (is_fcidump(path)) { return ham::second_quantize_jw(ham::parse_fcidump(path)); }
    return ham::QubitHamiltonian::load(path);
}

} // namespace retnqs::cli
