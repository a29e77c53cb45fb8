#include "helpers.hpp"

#include "retnqs/nn/kernels.hpp"
#include "retnqs/nn/ops.hpp"
#include "retnqs/nn/optim.hpp"
#include "retnqs/util/errors.hpp"

#include <doctest.h>

#include <numbers>

using namespace retnqs;
using namespace retnqs::nn;
using test_support::gradient_check;
using test_support::random_tensor;

namespace {

auto store_of(std::vector<Tensor> inputs) -> ParameterStore
{
    ParameterStore s;
    for (std::size_t i = 0; i < inputs.size(); ++i) { s.add("p" + std::to_string(i), std::move(inputs[i])); }
    return s;
}

auto eval(std::vector<Tensor> inputs, test_support::OpFn const& f) -> Tensor
{
    auto store = store_of(std::move(inputs));
    Tape tape{Tape::Mode::inference};
    std::vector<Var> in;
    for (std::size_t i = 0; i < store.size(); ++i) { in.push_back(tape.parameter(store, i)); }
    return f(tape, in).value();
}

} // namespace

TEST_CASE("tensor construction validates shapes")
{
    CHECK_THROWS_AS(Tensor({2, 0}), DimensionError);
    CHECK_THROWS_AS(Tensor({2, 2}, std::vector<double>{1, 2, 3}), DimensionError);
    auto t = Tensor::matrix({{1, 2, 3}, {4, 5, 6}});
    CHECK(t.rows() == 2);
    CHECK(t.cols() == 3);
    CHECK(t.at(1, 2) == 6);
    CHECK(t.reshaped({3, 2}).at(2, 1) == 6);
}

TEST_CASE("linear layer")
{
    auto id = eval({Tensor::matrix({{1, 2}}), Tensor::matrix({{1, 0}, {0, 1}})},
                   [](Tape&, auto const& v) { return linear(v[0], v[1]); });
    CHECK(id[0] == 1);
    CHECK(id[1] == 2);

    auto with_bias = eval({Tensor::matrix({{1, 1}}), Tensor::matrix({{2}, {3}}), Tensor::vector({1})},
                          [](Tape&, auto const& v) { return linear(v[0], v[1], v[2]); });
    CHECK(with_bias[0] == 6);

    std::mt19937_64 rng{1};
    auto x = random_tensor({3, 4}, rng);
    auto w = random_tensor({4, 2}, rng);
    auto y = eval({x, w}, [](Tape&, auto const& v) { return linear(v[0], v[1]); });
    for (std::size_t r = 0; r < 3; ++r) {
        for (std::size_t c = 0; c < 2; ++c) {
            double s = 0.0;
            for (std::size_t k = 0; k < 4; ++k) { s += x.at(r, k) * w.at(k, c); }
            CHECK(std::abs(y.at(r, c) - s) < 1e-12);
        }
    }
    CHECK_THROWS_AS(eval({x, x}, [](Tape&, auto const& v) { return linear(v[0], v[1]); }), DimensionError);
}

TEST_CASE("activations and normalizations")
{
    auto sm = eval({Tensor::matrix({{0, 0}})}, [](Tape&, auto const& v) { return softmax(v[0]); });
    CHECK(sm[0] == doctest::Approx(0.5));
    CHECK(kernels::swish(0.0) == 0.0);

    std::mt19937_64 rng{2};
    auto rows = random_tensor({5, 7}, rng, 3.0);
    auto probs = eval({rows}, [](Tape&, auto const& v) { return softmax(v[0]); });
    for (std::size_t r = 0; r < 5; ++r) {
        double s = 0.0;
        for (auto p : probs.row(r)) {
            CHECK(p >= 0.0);
            s += p;
        }
        CHECK(std::abs(s - 1.0) < 1e-12);
    }

    auto row = random_tensor({1, 16}, rng, 4.0);
    auto ln = eval({row, Tensor{{16}, 1.0}, Tensor{{16}, 0.0}},
                   [](Tape&, auto const& v) { return layer_norm(v[0], v[1], v[2]); });
    double mean = 0.0;
    for (auto v : ln.data()) { mean += v; }
    mean /= 16.0;
    double var = 0.0;
    for (auto v : ln.data()) { var += (v - mean) * (v - mean); }
    var /= 16.0;
    CHECK(std::abs(mean) < 1e-10);
    CHECK(std::abs(var - 1.0) < 1e-8);

    auto gn = eval({random_tensor({2, 8}, rng, 2.0)}, [](Tape&, auto const& v) { return group_norm(v[0], 4); });
    for (std::size_t g = 0; g < 4; ++g) {
        CHECK(std::abs(gn.at(0, 2 * g) + gn.at(0, 2 * g + 1)) < 1e-10);
    }
    CHECK_THROWS_AS(eval({random_tensor({2, 6}, rng)}, [](Tape&, auto const& v) { return group_norm(v[0], 4); }),
                    DimensionError);
}

TEST_CASE("every differentiable op matches central differences")
{
    std::mt19937_64 rng{3};
    auto const n_seq = std::size_t{3};
    struct Case {
        char const* name;
        std::vector<Tensor> inputs;
        test_support::OpFn f;
    };
    std::vector<Case> cases;
    cases.push_back({"linear", {random_tensor({4, 3}, rng), random_tensor({3, 2}, rng), random_tensor({2}, rng)},
                     [](Tape&, auto const& v) { return linear(v[0], v[1], v[2]); }});
    cases.push_back({"add", {random_tensor({2, 3}, rng), random_tensor({2, 3}, rng)},
                     [](Tape&, auto const& v) { return add(v[0], v[1]); }});
    cases.push_back({"mul", {random_tensor({2, 3}, rng), random_tensor({2, 3}, rng)},
                     [](Tape&, auto const& v) { return mul(v[0], v[1]); }});
    cases.push_back({"reshape", {random_tensor({2, 3}, rng)},
                     [](Tape&, auto const& v) { return reshape(v[0], {3, 2}); }});
    cases.push_back({"swish", {random_tensor({2, 3}, rng)}, [](Tape&, auto const& v) { return swish(v[0]); }});
    cases.push_back({"gelu", {random_tensor({2, 3}, rng)}, [](Tape&, auto const& v) { return gelu(v[0]); }});
    cases.push_back({"scaled_tanh", {random_tensor({2, 3}, rng)},
                     [](Tape&, auto const& v) { return scaled_tanh(v[0], std::numbers::pi); }});
    cases.push_back({"softmax", {random_tensor({2, 4}, rng)}, [](Tape&, auto const& v) { return softmax(v[0]); }});
    cases.push_back({"layer_norm", {random_tensor({3, 5}, rng), random_tensor({5}, rng), random_tensor({5}, rng)},
                     [](Tape&, auto const& v) { return layer_norm(v[0], v[1], v[2]); }});
    cases.push_back({"group_norm", {random_tensor({3, 6}, rng)},
                     [](Tape&, auto const& v) { return group_norm(v[0], 2); }});
    cases.push_back({"rotary", {random_tensor({2 * n_seq, 4}, rng)},
                     [=](Tape&, auto const& v) { return rotary(v[0], n_seq, 4); }});
    cases.push_back({"retention",
                     {random_tensor({2 * n_seq, 2}, rng), random_tensor({2 * n_seq, 2}, rng),
                      random_tensor({2 * n_seq, 2}, rng)},
                     [=](Tape&, auto const& v) { return retention(v[0], v[1], v[2], n_seq, 0.9); }});
    cases.push_back({"causal_attention",
                     {random_tensor({2 * n_seq, 2}, rng), random_tensor({2 * n_seq, 2}, rng),
                      random_tensor({2 * n_seq, 3}, rng)},
                     [=](Tape&, auto const& v) { return causal_attention(v[0], v[1], v[2], n_seq); }});
    cases.push_back({"embedding", {random_tensor({5, 3}, rng)},
                     [](Tape&, auto const& v) { return embedding(v[0], {4, 0, 4, 2}); }});
    cases.push_back({"add_positional", {random_tensor({2 * n_seq, 3}, rng), random_tensor({n_seq, 3}, rng)},
                     [=](Tape&, auto const& v) { return add_positional(v[0], v[1], n_seq); }});
    cases.push_back({"slice_concat", {random_tensor({2, 5}, rng), random_tensor({2, 2}, rng)},
                     [](Tape&, auto const& v) {
                         Var parts[] = {slice_cols(v[0], 1, 3), v[1]};
                         return concat_cols(parts);
                     }});
    cases.push_back({"sequence_log_prob", {random_tensor({2 * n_seq, 4}, rng)}, [=](Tape&, auto const& v) {
                         std::vector<std::uint8_t> feasible(2 * n_seq * 4, 1);
                         feasible[1] = 0;
                         feasible[4 * 4 + 3] = 0;
                         return sequence_log_prob(v[0], feasible, {0, 2, 3, 1, 0, 2}, n_seq);
                     }});
    for (auto const& c : cases) {
        CAPTURE(c.name);
        CHECK(gradient_check(store_of(c.inputs), c.f, rng) < 1e-4);
    }
}

TEST_CASE("gradient bookkeeping")
{
    SUBCASE("linear weight gradient is the input outer product")
    {
        ParameterStore store;
        store.add("w", Tensor::matrix({{0.5, -1.0}, {2.0, 0.25}, {1.0, 1.0}}));
        Tape tape;
        auto x = tape.constant(Tensor::matrix({{1.0, 2.0, 3.0}}));
        auto y = linear(x, tape.parameter(store, 0));
        auto grads = zero_gradients(store);
        std::pair<Var, Tensor> seeds[] = {{y, Tensor{{1, 2}, 1.0}}};
        tape.backward(seeds, grads);
        for (std::size_t i = 0; i < 3; ++i) {
            CHECK(grads[0].at(i, 0) == doctest::Approx(static_cast<double>(i + 1)));
            CHECK(grads[0].at(i, 1) == doctest::Approx(static_cast<double>(i + 1)));
        }
    }
    SUBCASE("zero seed gives zero gradient")
    {
        ParameterStore store;
        store.add("w", Tensor::matrix({{1.0, 2.0}}));
        Tape tape;
        auto y = swish(tape.parameter(store, 0));
        auto grads = zero_gradients(store);
        std::pair<Var, Tensor> seeds[] = {{y, Tensor{{1, 2}, 0.0}}};
        tape.backward(seeds, grads);
        CHECK(grads[0][0] == 0.0);
        CHECK(grads[0][1] == 0.0);
    }
    SUBCASE("inference tapes refuse backward")
    {
        ParameterStore store;
        store.add("w", Tensor::matrix({{1.0}}));
        Tape tape{Tape::Mode::inference};
        auto y = gelu(tape.parameter(store, 0));
        auto grads = zero_gradients(store);
        std::pair<Var, Tensor> seeds[] = {{y, Tensor{{1, 1}, 1.0}}};
        CHECK_THROWS_AS(tape.backward(seeds, grads), UsageError);
    }
}

TEST_CASE("adam")
{
    SUBCASE("zero gradient from fresh moments leaves parameters")
    {
        ParameterStore store;
        store.add("w", Tensor::vector({1.0, -2.0}));
        auto grads = zero_gradients(store);
        adam_step(store, grads, 0.1);
        CHECK(store.value(0)[0] == 1.0);
        CHECK(store.value(0)[1] == -2.0);
        CHECK(store.step() == 1);
    }
    SUBCASE("first step moves by lr against the gradient sign")
    {
        ParameterStore store;
        store.add("w", Tensor::vector({1.0, 1.0, 1.0}));
        auto grads = zero_gradients(store);
        grads[0] = Tensor::vector({3.0, -0.2, 1e3});
        adam_step(store, grads, 0.01);
        CHECK(store.value(0)[0] == doctest::Approx(0.99).epsilon(1e-9));
        CHECK(store.value(0)[1] == doctest::Approx(1.01).epsilon(1e-9));
        CHECK(store.value(0)[2] == doctest::Approx(0.99).epsilon(1e-9));
    }
    SUBCASE("constant gradient approaches steps of size lr")
    {
        ParameterStore store;
        store.add("w", Tensor::vector({0.0}));
        auto grads = zero_gradients(store);
        grads[0] = Tensor::vector({0.7});
        double last = 0.0;
        for (int i = 0; i < 5000; ++i) {
            auto before = store.value(0)[0];
            adam_step(store, grads, 1e-3);
            last = before - store.value(0)[0];
        }
        CHECK(last == doctest::Approx(1e-3).epsilon(1e-6));
    }
    SUBCASE("non-finite gradients abort without touching the store")
    {
        ParameterStore store;
        store.add("w", Tensor::vector({1.0, 2.0}));
        auto grads = zero_gradients(store);
        grads[0][1] = std::numeric_limits<double>::quiet_NaN();
        CHECK_THROWS_AS(adam_step(store, grads, 0.1), NumericalError);
        CHECK(store.value(0)[0] == 1.0);
        CHECK(store.step() == 0);
    }
}

TEST_CASE("learning-rate and annealing schedules")
{
    ScheduleConfig cfg;
    cfg.total_steps = 10000;
    auto const warm = static_cast<std::uint64_t>(cfg.warmup_frac * 10000);
    CHECK(lr_at(cfg, 0) == 0.0);
    CHECK(lr_at(cfg, warm) == doctest::Approx(2.5e-3));
    CHECK(lr_at(cfg, 10000) == doctest::Approx(5e-8));
    auto const mid = warm + (10000 - warm) / 2;
    CHECK(lr_at(cfg, mid) == doctest::Approx((2.5e-3 + 5e-8) / 2).epsilon(1e-9));
    CHECK(std::abs(lr_at(cfg, warm + 1) - lr_at(cfg, warm)) < 1e-8);

    auto const start = static_cast<std::uint64_t>(cfg.anneal_start_frac * 10000);
    CHECK(beta_at(cfg, 0) == 1.0);
    CHECK(beta_at(cfg, start) == doctest::Approx(1.0));
    CHECK(beta_at(cfg, start + (10000 - start) / 2) == doctest::Approx(0.0625));
    CHECK(beta_at(cfg, 10000) == 0.0);
    double prev = 2.0;
    for (std::uint64_t t = start; t <= 10000; t += 37) {
        CHECK(beta_at(cfg, t) <= prev);
        prev = beta_at(cfg, t);
    }

    cfg.anneal_exponent = 1.0;
    CHECK_FALSE(cfg.validate().empty());
    cfg.min_lr = 1.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}
