#include "retnqs/nn/tensor.hpp"

#include "retnqs/util/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace retnqs::nn {

auto element_count(std::vector<std::size_t> const& shape) -> std::size_t
{
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>{});
}

Tensor::Tensor(std::vector<std::size_t> shape, double fill)
    : shape_{std::move(shape)}
    , data_(element_count(shape_), fill)
{
    if (std::any_of(shape_.begin(), shape_.end(), [](auto e) { return e == 0; })) {
        throw DimensionError{"tensor extents must be positive, got " + shape_string()};
    }
}

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> data)
    : shape_{std::move(shape)}
    , data_{std::move(data)}
{
    if (element_count(shape_) != data_.size()) {
        throw DimensionError{"tensor data length " + std::to_string(data_.size())
                             + " does not match shape " + shape_string()};
    }
}

auto Tensor::matrix(std::initializer_list<std::initializer_list<double>> rows) -> Tensor
{
    auto const n_rows = rows.size();
    auto const n_cols = n_rows == 0 ? 0 : rows.begin()->size();
    std::vector<double> data;
    data.reserve(n_rows * n_cols);
    for (auto const& r : rows) {
        if (r.size() != n_cols) { throw DimensionError{"ragged matrix literal"}; }
        data.insert(data.end(), r.begin(), r.end());
    }
    return Tensor{{n_rows, n_cols}, std::move(data)};
}

auto Tensor::vector(std::initializer_list<double> values) -> Tensor
{
    return Tensor{{values.size()}, std::vector<double>(values)};
}

auto Tensor::rows() const noexcept -> std::size_t
{
    if (shape_.empty()) { return 0; }
    return data_.size() / shape_.back();
}

auto Tensor::cols() const noexcept -> std::size_t { return shape_.empty() ? 0 : shape_.back(); }

void Tensor::fill(double value) { std::fill(data_.begin(), data_.end(), value); }

auto Tensor::reshaped(std::vector<std::size_t> shape) const -> Tensor
{
    return Tensor{std::move(shape), data_};
}

auto Tensor::all_finite() const noexcept -> bool
{
    return std::all_of(data_.begin(), data_.end(), [](double x) { return std::isfinite(x); });
}

auto Tensor::shape_string() const -> std::string
{
    std::string s = "[";
    for (std::size_t i = 0; i < shape_.size(); ++i) {
        if (i != 0) { s += "x"; }
        s += std::to_string(shape_[i]);
    }
    return s + "]";
}

} // namespace retnqs::nn
