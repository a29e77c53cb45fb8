#include "retnqs/ansatz/checkpoint.hpp"

#include "retnqs/util/errors.hpp"

#include <json.hpp>

#include <fstream>

namespace retnqs::ansatz {

namespace {

using nlohmann::json;

constexpr auto format_tag = "retnqs-checkpoint";
constexpr int format_version = 1;

auto config_to_json(AnsatzConfig const& c) -> json
{
    return json{{"kind", to_string(c.kind)},  {"n_block", c.n_block}, {"d_model", c.d_model},
                {"d_retn", c.d_retn},         {"d_ff", c.d_ff},       {"n_heads", c.n_heads},
                {"phase_hidden", c.phase_hidden}, {"made_hidden", c.made_hidden}};
}

auto config_from_json(json const& j) -> AnsatzConfig
{
    AnsatzConfig c;
    c.kind = parse_kind(j.at("kind").get<std::string>());
    c.n_block = j.at("n_block").get<std::size_t>();
    c.d_model = j.at("d_model").get<std::size_t>();
    c.d_retn = j.at("d_retn").get<std::size_t>();
    c.d_ff = j.at("d_ff").get<std::size_t>();
    c.n_heads = j.at("n_heads").get<std::size_t>();
    c.phase_hidden = j.at("phase_hidden").get<std::vector<std::size_t>>();
    c.made_hidden = j.at("made_hidden").get<std::vector<std::size_t>>();
    return c;
}

void read_array(json const& j, char const* key, nn::Tensor& dst, std::string const& name)
{
    auto values = j.at(key).get<std::vector<double>>();
    if (values.size() != dst.size()) {
        throw DimensionError{"checkpoint parameter '" + name + "' field '" + key + "' has "
                             + std::to_string(values.size()) + " values, expected " + std::to_string(dst.size())};
    }
    std::copy(values.begin(), values.end(), dst.data().begin());
}

} // namespace

void save_checkpoint(std::ostream& out, Ansatz const& ansatz, CheckpointMeta const& meta)
{
    auto const& store = ansatz.parameters();
    json params = json::array();
    for (std::size_t i = 0; i < store.size(); ++i) {
        auto const& e = store.entry(i);
        params.push_back(json{{"name", e.name},
                              {"shape", e.value.shape()},
                              {"value", std::vector<double>(e.value.data().begin(), e.value.data().end())},
                              {"adam_m", std::vector<double>(e.m.data().begin(), e.m.data().end())},
                              {"adam_v", std::vector<double>(e.v.data().begin(), e.v.data().end())}});
    }
    auto const& sys = ansatz.system();
    json doc{{"format", format_tag},
             {"version", format_version},
             {"config", config_to_json(ansatz.config())},
             {"system", {{"n_qubits", sys.n_qubits}, {"n_up", sys.n_up}, {"n_down", sys.n_down}}},
             {"optimizer_step", store.step()},
             {"meta",
              {{"step", meta.step},
               {"baseline", meta.baseline},
               {"best_energy", meta.has_best ? json(meta.best_energy) : json(nullptr)}}},
             {"parameters", std::move(params)}};
    out << doc.dump() << '\n';
    if (!out) { throw std::runtime_error{"failed to write checkpoint"}; }
}

void save_checkpoint(std::filesystem::path const& path, Ansatz const& ansatz, CheckpointMeta const& meta)
{
    // Write to a sibling file first so an interrupted save keeps the old checkpoint.
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out{tmp};
        if (!out) { throw std::runtime_error{"cannot open checkpoint '" + tmp.string() + "' for writing"}; }
        save_checkpoint(out, ansatz, meta);
    }
    std::filesystem::rename(tmp, path);
}

auto load_checkpoint(std::istream& in) -> Checkpoint
{
    json doc;
    try {
        doc = json::parse(in);
    } catch (json::parse_error const& e) {
        throw ParseError{std::string{"checkpoint is not valid JSON: "} + e.what(), 0};
    }
    try {
        if (doc.at("format").get<std::string>() != format_tag) { throw ParseError{"not a retnqs checkpoint", 0}; }
        if (doc.at("version").get<int>() != format_version) {
            throw ParseError{"unsupported checkpoint version " + doc.at("version").dump(), 0};
        }
        SystemInfo sys{doc.at("system").at("n_qubits").get<std::size_t>(),
                       doc.at("system").at("n_up").get<std::size_t>(),
                       doc.at("system").at("n_down").get<std::size_t>()};
        Ansatz ansatz{config_from_json(doc.at("config")), sys, 0};
        auto& store = ansatz.parameters();
        auto const& params = doc.at("parameters");
        if (params.size() != store.size()) {
            throw DimensionError{"checkpoint has " + std::to_string(params.size()) + " parameter arrays, config implies "
                                 + std::to_string(store.size())};
        }
        for (auto const& p : params) {
            auto const name = p.at("name").get<std::string>();
            auto& e = store.entry(store.index_of(name));
            if (p.at("shape").get<std::vector<std::size_t>>() != e.value.shape()) {
                throw DimensionError{"checkpoint parameter '" + name + "' has shape " + p.at("shape").dump()
                                     + ", expected " + e.value.shape_string()};
            }
            read_array(p, "value", e.value, name);
            if (p.contains("adam_m")) { read_array(p, "adam_m", e.m, name); }
            if (p.contains("adam_v")) { read_array(p, "adam_v", e.v, name); }
            if (!e.value.all_finite()) { throw NumericalError{"checkpoint parameter '" + name + "' is not finite"}; }
        }
        store.set_step(doc.value("optimizer_step", std::uint64_t{0}));
        CheckpointMeta meta;
        if (doc.contains("meta")) {
            auto const& m = doc.at("meta");
            meta.step = m.value("step", std::uint64_t{0});
            meta.baseline = m.value("baseline", 0.0);
            if (m.contains("best_energy") && !m.at("best_energy").is_null()) {
                meta.best_energy = m.at("best_energy").get<double>();
                meta.has_best = true;
            }
        }
        return Checkpoint{std::move(ansatz), meta};
    } catch (json::exception const& e) {
        throw ParseError{std::string{"malformed checkpoint: "} + e.what(), 0};
    }
}

auto load_checkpoint(std::filesystem::path const& path) -> Checkpoint
{
    std::ifstream in{path};
    if (!in) { throw std::runtime_error{"cannot open checkpoint '" + path.string() + "'"}; }
    return load_checkpoint(in);
}

} // namespace retnqs::ansatz
