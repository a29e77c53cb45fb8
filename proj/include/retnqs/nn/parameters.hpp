#pragma once

#include "retnqs/nn/tensor.hpp"

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace retnqs::nn {

/// Named trainable tensors together with their Adam moments.
class ParameterStore {
  public:
    struct Entry {
        std::string name;
        Tensor value;
        Tensor m;
        Tensor v;
    };

    auto add(std::string name, Tensor init) -> std::size_t;

    auto size() const noexcept -> std::size_t { return entries_.size(); }
    auto entry(std::size_t i) const -> Entry const& { return entries_[i]; }
    auto entry(std::size_t i) -> Entry& { return entries_[i]; }
    auto value(std::size_t i) const -> Tensor const& { return entries_[i].value; }
    auto value(std::size_t i) -> Tensor& { return entries_[i].value; }
    auto name(std::size_t i) const -> std::string const& { return entries_[i].name; }
    /// Throws ConfigError when no parameter has this name.
    auto index_of(std::string_view name) const -> std::size_t;
    auto contains(std::string_view name) const -> bool;

    /// Total number of scalar parameters.
    auto count() const noexcept -> std::size_t;
    auto flatten() const -> std::vector<double>;
    void assign_flat(std::span<double const> flat);

    auto step() const noexcept -> std::uint64_t { return step_; }
    void set_step(std::uint64_t s) noexcept { step_ = s; }

  private:
    std::vector<Entry> entries_;
    std::uint64_t step_ = 0;
};

/// One gradient tensor per parameter, aligned with ParameterStore indices.
using Gradients = std::vector<Tensor>;

auto zero_gradients(ParameterStore const& store) -> Gradients;
auto flatten(Gradients const& grads) -> std::vector<double>;

/// Xavier-uniform initialization for a [fan_in x fan_out] matrix.
auto xavier_uniform(std::size_t fan_in, std::size_t fan_out, std::mt19937_64& rng) -> Tensor;

} // namespace retnqs::nn
