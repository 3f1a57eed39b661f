#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "mph/adam.hpp"
#include "mph/checkpoint.hpp"
#include "mph/mlp.hpp"
#include "mph/rng.hpp"
#include "mph/tensor.hpp"
#include "test_util.hpp"

using namespace mph;

namespace {

Tensor random_input(int rows, int cols, std::uint64_t seed) {
    Rng rng(seed);
    Tensor t({rows, cols});
    for (double& x : t.data) x = rng.uniform(-1.0, 1.0);
    return t;
}

bool params_equal(const MLPParams& a, const MLPParams& b) {
    if (a.layers.size() != b.layers.size()) return false;
    for (size_t l = 0; l < a.layers.size(); ++l) {
        if (a.layers[l].weight.data != b.layers[l].weight.data) return false;
        if (a.layers[l].bias.data != b.layers[l].bias.data) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("tensor shape/data invariant") {
    Tensor t({2, 3});
    CHECK(t.numel() == 6);
    CHECK_THROWS_AS(Tensor({2, 3}, {1.0, 2.0}), ShapeError);
    CHECK_THROWS_AS(check_finite(std::vector<double>{1.0, NAN}, "test"), DomainError);
}

TEST_CASE("mlp_forward zero net gives zero output") {
    MLPParams params = init_params({4, 8, 8, 2}, 7);
    for (DenseLayer& layer : params.layers) layer.weight.fill(0.0);
    Tensor out = mlp_forward(params, random_input(3, 4, 1));
    for (double x : out.data) CHECK(x == 0.0);
}

TEST_CASE("mlp_forward analytic tanh on 1x1 net") {
    MLPParams params = init_params({1, 1, 1}, 0);
    params.layers[0].weight[0] = 1.0;
    params.layers[0].bias[0] = 0.0;
    params.layers[1].weight[0] = 1.0;
    params.layers[1].bias[0] = 0.0;
    Tensor out = mlp_forward(params, Tensor({1, 1}, {0.5}));
    CHECK(out[0] == doctest::Approx(0.46211715726).epsilon(1e-9));
}

TEST_CASE("mlp_forward matches scalar-loop oracle") {
    MLPParams params = init_params({4, 6, 6, 3}, 99);
    Tensor input = random_input(3, 4, 2);
    Tensor out = mlp_forward(params, input);
    for (int b = 0; b < 3; ++b) {
        std::vector<double> row(input.data.begin() + b * 4,
                                input.data.begin() + (b + 1) * 4);
        std::vector<double> expect = testutil::scalar_loop_forward(params, row);
        for (int j = 0; j < 3; ++j) {
            CHECK(out.at(b, j) == doctest::Approx(expect[j]).epsilon(1e-12));
        }
    }
}

TEST_CASE("mlp_forward rejects shape mismatch") {
    MLPParams params = init_params({4, 8, 2}, 7);
    CHECK_THROWS_AS(mlp_forward(params, random_input(3, 5, 1)), ShapeError);
}

TEST_CASE("mlp_backward zero upstream gives zero grads") {
    MLPParams params = init_params({3, 5, 2}, 11);
    Tensor input = random_input(4, 3, 3);
    Tensor upstream({4, 2});
    MLPBackward back = mlp_backward(params, input, upstream);
    for (const DenseLayer& layer : back.grads.layers) {
        for (double g : layer.weight.data) CHECK(g == 0.0);
        for (double g : layer.bias.data) CHECK(g == 0.0);
    }
    for (double g : back.input_grad.data) CHECK(g == 0.0);
}

TEST_CASE("mlp_backward analytic scalar derivative") {
    // f(x) = tanh(w*x) with w=1, built as {1,1,1} net with identity output layer
    MLPParams params = init_params({1, 1, 1}, 0);
    params.layers[0].weight[0] = 1.0;
    params.layers[0].bias[0] = 0.0;
    params.layers[1].weight[0] = 1.0;
    params.layers[1].bias[0] = 0.0;
    Tensor input({1, 1}, {0.0});
    Tensor upstream({1, 1}, {1.0});
    MLPBackward back = mlp_backward(params, input, upstream);
    CHECK(back.grads.layers[0].weight[0] == doctest::Approx(0.0));  // x*(1-tanh^2(0))
    CHECK(back.input_grad[0] == doctest::Approx(1.0));
}

TEST_CASE("mlp_backward matches finite differences") {
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
        MLPParams params = init_params({4, 8, 8, 2}, seed);
        Tensor input = random_input(3, 4, seed + 100);
        Tensor upstream = random_input(3, 2, seed + 200);

        MLPBackward back = mlp_backward(params, input, upstream);

        auto loss = [&]() {
            Tensor out = mlp_forward(params, input);
            double acc = 0.0;
            for (int i = 0; i < out.numel(); ++i) acc += upstream[i] * out[i];
            return acc;
        };
        auto report = testutil::fd_check(loss, param_entries(params),
                                         grad_entries(back.grads));
        CHECK(report.checked > 100);
        CHECK(report.max_rel_err < 1e-6);

        // input gradient too
        std::vector<double*> in_entries;
        std::vector<const double*> in_analytic;
        for (int i = 0; i < input.numel(); ++i) {
            in_entries.push_back(&input.data[i]);
            in_analytic.push_back(&back.input_grad.data[i]);
        }
        auto in_report = testutil::fd_check(loss, in_entries, in_analytic);
        CHECK(in_report.max_rel_err < 1e-6);
    }
}

TEST_CASE("adam zero grads leave params unchanged") {
    MLPParams params = init_params({3, 4, 2}, 5);
    MLPParams before = params;
    AdamState state = make_adam(params, 0.1);
    MLPGrads grads = zero_grads_like(params);
    adam_step(params, grads, state);
    CHECK(params_equal(params, before));
    CHECK(state.step == 1);
}

TEST_CASE("adam first step magnitude on scalar param") {
    // single scalar parameter held in a 1x1 "net" with no hidden layer
    MLPParams params = init_params({1, 1}, 3);
    params.layers[0].weight[0] = 2.0;
    params.layers[0].bias[0] = 0.0;
    AdamState state = make_adam(params, 0.1);
    MLPGrads grads = zero_grads_like(params);
    grads.layers[0].weight[0] = 1.0;
    adam_step(params, grads, state);
    // bias-corrected first step: m_hat = 1, v_hat = 1 -> update = lr/(1+eps)
    CHECK(params.layers[0].weight[0] == doctest::Approx(2.0 - 0.1).epsilon(1e-6));
}

TEST_CASE("adam moments follow closed-form recursion over two updates") {
    MLPParams params = init_params({1, 1}, 3);
    AdamState state = make_adam(params, 0.01);
    MLPGrads grads = zero_grads_like(params);
    const double g = 0.7;
    grads.layers[0].weight[0] = g;
    adam_step(params, grads, state);
    adam_step(params, grads, state);
    CHECK(state.step == 2);
    const double m2 = (1.0 - 0.9) * (0.9 * g + g);
    const double v2 = (1.0 - 0.999) * (0.999 * g * g + g * g);
    CHECK(state.m[0][0] == doctest::Approx(m2).epsilon(1e-12));
    CHECK(state.v[0][0] == doctest::Approx(v2).epsilon(1e-12));
}

TEST_CASE("init_params determinism and shapes") {
    MLPParams a = init_params({4, 64, 64, 2}, 42);
    MLPParams b = init_params({4, 64, 64, 2}, 42);
    MLPParams c = init_params({4, 64, 64, 2}, 43);
    CHECK(params_equal(a, b));
    CHECK(!params_equal(a, c));
    REQUIRE(a.layers.size() == 3);
    CHECK(a.layers[0].weight.shape == std::vector<int>{4, 64});
    CHECK(a.layers[1].weight.shape == std::vector<int>{64, 64});
    CHECK(a.layers[2].weight.shape == std::vector<int>{64, 2});
    for (double b0 : a.layers[0].bias.data) CHECK(b0 == 0.0);
}

TEST_CASE("default net is 2 hidden layers of 64") {
    MLPParams net = make_default_net(10, 3, 1);
    REQUIRE(net.layers.size() == 3);
    CHECK(net.hidden_layer_count() == 2);
    CHECK(net.layers[0].weight.shape[1] == 64);
    CHECK(net.layers[1].weight.shape[1] == 64);
    CHECK(net.output_dim() == 3);
}

TEST_CASE("seeded update sequences are bit-identical") {
    auto run = [] {
        MLPParams params = init_params({3, 8, 2}, 77);
        AdamState state = make_adam(params, 0.01);
        Rng rng(5);
        for (int step = 0; step < 20; ++step) {
            Tensor input = Tensor({2, 3});
            for (double& x : input.data) x = rng.uniform(-1.0, 1.0);
            Tensor upstream({2, 2});
            for (double& x : upstream.data) x = rng.uniform(-1.0, 1.0);
            MLPBackward back = mlp_backward(params, input, upstream);
            adam_step(params, back.grads, state);
        }
        return params;
    };
    CHECK(params_equal(run(), run()));
}

TEST_CASE("checkpoint round-trip is bit-exact") {
    MLPParams net = make_default_net(5, 3, 9);
    Tensor extra({3}, {0.1, -0.25, 1e-17});
    Checkpoint ckpt;
    ckpt.add_net("policy", net);
    ckpt.add("log_std", extra);

    const auto path = std::filesystem::temp_directory_path() / "mph_ckpt_test.bin";
    ckpt.save(path);
    Checkpoint loaded = Checkpoint::load(path);
    std::filesystem::remove(path);

    MLPParams net2 = loaded.get_net("policy");
    CHECK(params_equal(net, net2));
    CHECK(loaded.get("log_std").data == extra.data);
    CHECK(loaded.get("log_std").shape == extra.shape);
    CHECK_THROWS_AS(loaded.get("missing"), UsageError);
}
