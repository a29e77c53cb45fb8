#include "retnqs/nn/tape.hpp"

#include "retnqs/util/errors.hpp"

namespace retnqs::nn {

auto Var::value() const -> Tensor const& { return tape->value(*this); }

auto Tape::constant(Tensor value) -> Var
{
    nodes_.push_back(Node{std::move(value), {}, {}, std::nullopt, false});
    return Var{this, nodes_.size() - 1};
}

auto Tape::parameter(ParameterStore const& store, std::size_t index) -> Var
{
    nodes_.push_back(Node{store.value(index), {}, {}, index, differentiable()});
    return Var{this, nodes_.size() - 1};
}

auto Tape::record(Tensor value, std::initializer_list<Var> parents, BackwardFn fn) -> Var
{
    return record(std::move(value), std::span<Var const>{parents.begin(), parents.size()}, std::move(fn));
}

auto Tape::record(Tensor value, std::span<Var const> parents, BackwardFn fn) -> Var
{
    bool needs = false;
    if (differentiable()) {
        for (auto const& p : parents) {
            if (p.tape != this) { throw UsageError{"tape op mixes values from different tapes"}; }
            needs = needs || nodes_[p.id].needs_grad;
        }
    }
    nodes_.push_back(Node{std::move(value), {}, needs ? std::move(fn) : BackwardFn{}, std::nullopt, needs});
    return Var{this, nodes_.size() - 1};
}

auto Tape::grad(std::size_t id) -> Tensor&
{
    auto& node = nodes_[id];
    if (node.grad.empty()) { node.grad = Tensor{node.value.shape()}; }
    return node.grad;
}

auto Tape::grad_sink(std::size_t id) -> Tensor*
{
    return nodes_[id].needs_grad ? &grad(id) : nullptr;
}

void Tape::backward(std::span<std::pair<Var, Tensor> const> seeds, Gradients& grads)
{
    if (!differentiable()) {
        throw UsageError{"backward called on an inference-mode trace; record the forward pass "
                         "in differentiable (parallel) mode"};
    }
    for (auto& node : nodes_) { node.grad = Tensor{}; }
    std::size_t top = 0;
    for (auto const& [var, seed] : seeds) {
        if (var.tape != this) { throw UsageError{"backward seed belongs to another tape"}; }
        if (!seed.same_shape(value(var))) {
            throw DimensionError{"backward seed " + seed.shape_string() + " does not match output "
                                 + value(var).shape_string()};
        }
        if (!nodes_[var.id].needs_grad) { continue; }
        auto& g = grad(var.id);
        for (std::size_t i = 0; i < g.size(); ++i) { g[i] += seed[i]; }
        top = std::max(top, var.id + 1);
    }
    for (std::size_t id = top; id-- > 0;) {
        auto& node = nodes_[id];
        if (!node.needs_grad || node.grad.empty()) { continue; }
        if (node.param_index) {
            auto& dst = grads.at(*node.param_index);
            if (!dst.same_shape(node.grad)) {
                throw DimensionError{"gradient buffer shape mismatch for parameter "
                                     + std::to_string(*node.param_index)};
            }
            for (std::size_t i = 0; i < dst.size(); ++i) { dst[i] += node.grad[i]; }
        } else if (node.backward) {
            node.backward(*this, id);
        }
    }
}

} // namespace retnqs::nn
