#include "retnqs/flops/flops.hpp"

#include "retnqs/util/errors.hpp"

namespace retnqs::flops {

void ModelDims::validate() const
{
    if (n_block == 0 || d_model == 0 || d_retn == 0 || d_ff == 0 || n_seq == 0) {
        throw ConfigError{"model dimensions must all be positive"};
    }
}

auto parse_form(std::string_view name) -> Form
{
    if (name == "retnet_parallel" || name == "parallel") { return Form::retnet_parallel; }
    if (name == "retnet_recurrent" || name == "recurrent") { return Form::retnet_recurrent; }
    if (name == "transformer") { return Form::transformer; }
    throw ConfigError{"unknown FLOP form '" + std::string{name} + "'"};
}

auto to_string(Form form) -> std::string
{
    switch (form) {
    case Form::retnet_parallel: return "retnet_parallel";
    case Form::retnet_recurrent: return "retnet_recurrent";
    case Form::transformer: return "transformer";
    }
    return "unknown";
}

auto param_count(ModelDims const& d) -> std::uint64_t
{
    // 2 n_block d_model (2.5 d_retn + d_ff), kept in integers.
    return d.n_block * d.d_model * (5 * d.d_retn + 2 * d.d_ff);
}

auto flops_per_token(ModelDims const& d, Form form) -> std::uint64_t
{
    auto const n = param_count(d);
    switch (form) {
    case Form::retnet_parallel: return 2 * n + 4 * d.n_block * d.n_seq * d.d_retn;
    case Form::retnet_recurrent: return 2 * n + 5 * d.n_block * d.d_retn * d.d_retn;
    case Form::transformer:
        return 2 * n + 4 * d.n_block * d.n_seq * d.d_retn - 2 * d.n_block * d.d_model * d.d_retn;
    }
    return 0;
}

auto crossover_seq_len(ModelDims const& d) -> double
{
    auto const retn = static_cast<double>(d.d_retn);
    auto const model = static_cast<double>(d.d_model);
    return (5.0 * retn * retn + 2.0 * model * retn) / (4.0 * retn);
}

} // namespace retnqs::flops
