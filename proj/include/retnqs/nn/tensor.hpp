#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace retnqs::nn {

/// Dense row-major tensor of doubles.
///
/// Most of the library treats tensors as matrices: `rows()` is the product of
/// all leading extents and `cols()` is the last extent.
class Tensor {
  public:
    Tensor() = default;
    explicit Tensor(std::vector<std::size_t> shape, double fill = 0.0);
    Tensor(std::vector<std::size_t> shape, std::vector<double> data);

    static auto matrix(std::initializer_list<std::initializer_list<double>> rows) -> Tensor;
    static auto vector(std::initializer_list<double> values) -> Tensor;

    auto shape() const noexcept -> std::vector<std::size_t> const& { return shape_; }
    auto rank() const noexcept -> std::size_t { return shape_.size(); }
    auto size() const noexcept -> std::size_t { return data_.size(); }
    auto empty() const noexcept -> bool { return data_.empty(); }
    auto rows() const noexcept -> std::size_t;
    auto cols() const noexcept -> std::size_t;

    auto data() noexcept -> std::span<double> { return data_; }
    auto data() const noexcept -> std::span<double const> { return data_; }
    auto raw() noexcept -> double* { return data_.data(); }
    auto raw() const noexcept -> double const* { return data_.data(); }

    auto operator[](std::size_t i) -> double& { return data_[i]; }
    auto operator[](std::size_t i) const -> double { return data_[i]; }
    auto at(std::size_t r, std::size_t c) -> double& { return data_[r * cols() + c]; }
    auto at(std::size_t r, std::size_t c) const -> double { return data_[r * cols() + c]; }

    auto row(std::size_t r) -> std::span<double> { return {data_.data() + r * cols(), cols()}; }
    auto row(std::size_t r) const -> std::span<double const>
    {
        return {data_.data() + r * cols(), cols()};
    }

    void fill(double value);
    auto reshaped(std::vector<std::size_t> shape) const -> Tensor;
    auto all_finite() const noexcept -> bool;
    auto same_shape(Tensor const& other) const noexcept -> bool { return shape_ == other.shape_; }
    auto shape_string() const -> std::string;

  private:
    std::vector<std::size_t> shape_;
    std::vector<double> data_;
};

auto element_count(std::vector<std::size_t> const& shape) -> std::size_t;

} // namespace retnqs::nn
