#include "retnqs/nn/parameters.hpp"

#include "retnqs/util/errors.hpp"

#include <algorithm>
#include <cmath>

namespace retnqs::nn {

auto ParameterStore::add(std::string name, Tensor init) -> std::size_t
{
    if (contains(name)) { throw ConfigError{"duplicate parameter name '" + name + "'"}; }
    auto m = Tensor{init.shape()};
    auto v = Tensor{init.shape()};
    entries_.push_back({std::move(name), std::move(init), std::move(m), std::move(v)});
    return entries_.size() - 1;
}

auto ParameterStore::index_of(std::string_view name) const -> std::size_t
{
    auto const it = std::find_if(entries_.begin(), entries_.end(),
                                 [&](Entry const& e) { return e.name == name; });
    if (it == entries_.end()) { throw ConfigError{"unknown parameter '" + std::string{name} + "'"}; }
    return static_cast<std::size_t>(it - entries_.begin());
}

auto ParameterStore::contains(std::string_view name) const -> bool
{
    return std::any_of(entries_.begin(), entries_.end(), [&](Entry const& e) { return e.name == name; });
}

auto ParameterStore::count() const noexcept -> std::size_t
{
    std::size_t n = 0;
    for (auto const& e : entries_) { n += e.value.size(); }
    return n;
}

auto ParameterStore::flatten() const -> std::vector<double>
{
    std::vector<double> flat;
    flat.reserve(count());
    for (auto const& e : entries_) {
        auto const d = e.value.data();
        flat.insert(flat.end(), d.begin(), d.end());
    }
    return flat;
}

void ParameterStore::assign_flat(std::span<double const> flat)
{
    if (flat.size() != count()) {
        throw DimensionError{"flat parameter vector has " + std::to_string(flat.size())
                             + " entries, expected " + std::to_string(count())};
    }
    std::size_t offset = 0;
    for (auto& e : entries_) {
        auto d = e.value.data();
        std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(offset), d.size(), d.begin());
        offset += d.size();
    }
}

auto zero_gradients(ParameterStore const& store) -> Gradients
{
    Gradients grads;
    grads.reserve(store.size());
    for (std::size_t i = 0; i < store.size(); ++i) { grads.emplace_back(store.value(i).shape()); }
    return grads;
}

auto flatten(Gradients const& grads) -> std::vector<double>
{
    std::vector<double> flat;
    for (auto const& g : grads) {
        auto const d = g.data();
        flat.insert(flat.end(), d.begin(), d.end());
    }
    return flat;
}

auto xavier_uniform(std::size_t fan_in, std::size_t fan_out, std::mt19937_64& rng) -> Tensor
{
    auto const limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    std::uniform_real_distribution<double> dist{-limit, limit};
    Tensor t{{fan_in, fan_out}};
    for (auto& x : t.data()) { x = dist(rng); }
    return t;
}

} // namespace retnqs::nn
