#pragma once

#include "retnqs/nn/parameters.hpp"
#include "retnqs/nn/tensor.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace retnqs::nn {

class Tape;

/// Handle to a value recorded on a Tape.
struct Var {
    Tape* tape = nullptr;
    std::size_t id = 0;

    auto value() const -> Tensor const&;
};

/// Records a forward computation so it can be differentiated in reverse.
///
/// In inference mode the tape keeps values only; `backward` is a usage error.
class Tape {
  public:
    enum class Mode { differentiable, inference };
    using BackwardFn = std::function<void(Tape&, std::size_t)>;

    explicit Tape(Mode mode = Mode::differentiable) : mode_{mode} {}
    Tape(Tape const&) = delete;
    auto operator=(Tape const&) -> Tape& = delete;

    auto differentiable() const noexcept -> bool { return mode_ == Mode::differentiable; }

    auto constant(Tensor value) -> Var;
    /// Leaf bound to parameter `index` of `store`; gradients flow back to it.
    auto parameter(ParameterStore const& store, std::size_t index) -> Var;

    auto value(Var v) const -> Tensor const& { return nodes_[v.id].value; }
    auto value(std::size_t id) const -> Tensor const& { return nodes_[id].value; }
    auto size() const noexcept -> std::size_t { return nodes_.size(); }

    /// Accumulates d(sum_k <seed_k, out_k>)/d(theta) into `grads`.
    void backward(std::span<std::pair<Var, Tensor> const> seeds, Gradients& grads);

    // Used by op implementations.
    auto record(Tensor value, std::initializer_list<Var> parents, BackwardFn fn) -> Var;
    auto record(Tensor value, std::span<Var const> parents, BackwardFn fn) -> Var;
    auto needs_grad(std::size_t id) const -> bool { return nodes_[id].needs_grad; }
    auto grad(std::size_t id) -> Tensor&;
    /// Gradient buffer of `id`, or nullptr when that node does not need one.
    auto grad_sink(std::size_t id) -> Tensor*;

  private:
    struct Node {
        Tensor value;
        Tensor grad;
        BackwardFn backward;
        std::optional<std::size_t> param_index;
        bool needs_grad = false;
    };

    Mode mode_;
    std::vector<Node> nodes_;
};

} // namespace retnqs::nn
