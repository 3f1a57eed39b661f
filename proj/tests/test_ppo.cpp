#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mph/ppo.hpp"
#include "mph/rng.hpp"

using namespace mph;

namespace {

// Exhaustive non-recursive GAE oracle: A_t = sum_l (gamma*lambda)^l delta_{t+l},
// stopping the sum at the first done.
GaeResult gae_bruteforce(const std::vector<double>& rewards,
                         const std::vector<double>& values,
                         const std::vector<std::uint8_t>& dones, double gamma, double lam) {
    const size_t T = rewards.size();
    GaeResult result;
    result.advantages.resize(T);
    result.returns.resize(T);
    for (size_t t = 0; t < T; ++t) {
        double acc = 0.0;
        double weight = 1.0;
        for (size_t l = t; l < T; ++l) {
            const double not_done = dones[l] ? 0.0 : 1.0;
            const double delta = rewards[l] + gamma * not_done * values[l + 1] - values[l];
            acc += weight * delta;
            if (dones[l]) break;
            weight *= gamma * lam;
        }
        result.advantages[t] = acc;
        result.returns[t] = acc + values[t];
    }
    return result;
}

AdvantageBatch bandit_batch(const Policy& policy, const std::vector<int>& actions,
                            const std::vector<double>& advantages) {
    const int n = static_cast<int>(actions.size());
    AdvantageBatch batch;
    batch.observations = Tensor({n, 1});
    for (int i = 0; i < n; ++i) batch.observations.at(i, 0) = 1.0;
    for (int i = 0; i < n; ++i) {
        const Action a = {static_cast<double>(actions[i])};
        batch.actions.push_back(a);
        batch.old_log_probs.push_back(log_prob(policy.dist({1.0}), a));
        batch.advantages.push_back(advantages[i]);
        batch.returns.push_back(0.0);
    }
    return batch;
}

}  // namespace

TEST_CASE("gae zero rewards and values give zero advantages") {
    std::vector<double> rewards(5, 0.0), values(6, 0.0);
    std::vector<std::uint8_t> dones(5, false);
    GaeResult r = gae(rewards, values, dones, 0.985, 0.95);
    for (double a : r.advantages) CHECK(a == 0.0);
    for (double ret : r.returns) CHECK(ret == 0.0);
}

TEST_CASE("gae single terminal step") {
    std::vector<double> rewards = {1.0};
    std::vector<double> values = {0.0, 0.0};
    std::vector<std::uint8_t> dones = {true};
    GaeResult r = gae(rewards, values, dones, 0.985, 0.95);
    CHECK(r.advantages[0] == doctest::Approx(1.0));
    CHECK(r.returns[0] == doctest::Approx(1.0));
}

TEST_CASE("gae matches the brute-force delta sum") {
    Rng rng(1);
    for (int trial = 0; trial < 100; ++trial) {
        const size_t T = 4 + rng.uniform_int(8);
        std::vector<double> rewards(T), values(T + 1);
        std::vector<std::uint8_t> dones(T, false);
        for (double& x : rewards) x = rng.uniform(-1, 1);
        for (double& x : values) x = rng.uniform(-1, 1);
        if (rng.uniform() < 0.5) dones[T - 1] = true;
        if (rng.uniform() < 0.3) dones[rng.uniform_int(static_cast<int>(T))] = true;

        GaeResult fast = gae(rewards, values, dones, 0.985, 0.95);
        GaeResult slow = gae_bruteforce(rewards, values, dones, 0.985, 0.95);
        for (size_t t = 0; t < T; ++t) {
            CHECK(fast.advantages[t] == doctest::Approx(slow.advantages[t]).epsilon(1e-12));
            CHECK(fast.returns[t] == doctest::Approx(slow.returns[t]).epsilon(1e-12));
        }
    }
}

TEST_CASE("gae with lambda=1 equals discounted monte carlo") {
    Rng rng(2);
    const size_t T = 10;
    std::vector<double> rewards(T), values(T + 1);
    std::vector<std::uint8_t> dones(T, false);
    for (double& x : rewards) x = rng.uniform(0, 1);
    for (double& x : values) x = rng.uniform(-1, 1);
    values[T] = 0.0;
    dones[T - 1] = true;
    const double gamma = 0.985;

    GaeResult r = gae(rewards, values, dones, gamma, 1.0);
    for (size_t t = 0; t < T; ++t) {
        double mc = 0.0;
        double g = 1.0;
        for (size_t l = t; l < T; ++l) {
            mc += g * rewards[l];
            g *= gamma;
        }
        CHECK(r.advantages[t] == doctest::Approx(mc - values[t]).epsilon(1e-10));
    }
}

TEST_CASE("gae shape mismatch") {
    std::vector<double> rewards(5, 0.0), values(5, 0.0);
    std::vector<std::uint8_t> dones(5, false);
    CHECK_THROWS_AS(gae(rewards, values, dones, 0.99, 0.95), ShapeError);
}

TEST_CASE("advantage normalization has the degenerate guard") {
    std::vector<double> zeros(8, 0.0);
    normalize_advantages(zeros);
    for (double a : zeros) CHECK(a == 0.0);

    std::vector<double> mixed = {1.0, 2.0, 3.0, 4.0};
    normalize_advantages(mixed);
    double mean = 0.0, var = 0.0;
    for (double a : mixed) mean += a;
    mean /= mixed.size();
    for (double a : mixed) var += (a - mean) * (a - mean);
    CHECK(std::abs(mean) < 1e-12);
    CHECK(std::sqrt(var / mixed.size()) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("ppo: zero advantages leave the policy unchanged") {
    Policy policy = make_policy(HeadKind::categorical, 1, 2, 3);
    const MLPParams before = policy.net;
    MLPParams value_net = make_default_net(1, 1, 4);
    PPOLevelConfig config;
    config.epochs = 5;
    PolicyAdam padam = make_policy_adam(policy, config.lr_policy);
    AdamState vadam = make_adam(value_net, config.lr_value);

    AdvantageBatch batch = bandit_batch(policy, {0, 1, 0, 1}, {0, 0, 0, 0});
    PPOStats stats = ppo_update(policy, value_net, batch, config, padam, vadam);
    CHECK(stats.mean_kl == doctest::Approx(0.0).epsilon(1e-12));
    for (size_t l = 0; l < before.layers.size(); ++l) {
        CHECK(policy.net.layers[l].weight.data == before.layers[l].weight.data);
    }
}

TEST_CASE("ppo: delta=0 is a degenerate no-op for the policy") {
    Policy policy = make_policy(HeadKind::categorical, 1, 2, 5);
    const MLPParams before = policy.net;
    MLPParams value_net = make_default_net(1, 1, 6);
    PPOLevelConfig config;
    config.delta = 0.0;
    config.epochs = 5;
    PolicyAdam padam = make_policy_adam(policy, config.lr_policy);
    AdamState vadam = make_adam(value_net, config.lr_value);

    AdvantageBatch batch = bandit_batch(policy, {0, 1, 1, 0}, {1.0, -1.0, 0.5, 0.2});
    PPOStats stats = ppo_update(policy, value_net, batch, config, padam, vadam);
    CHECK(stats.policy_epochs == 0);
    CHECK(stats.mean_kl == 0.0);
    for (size_t l = 0; l < before.layers.size(); ++l) {
        CHECK(policy.net.layers[l].weight.data == before.layers[l].weight.data);
    }
}

TEST_CASE("ppo: positive advantage raises that action's probability") {
    // two-action bandit with advantage only on action 0
    Policy policy = make_policy(HeadKind::categorical, 1, 2, 7);
    MLPParams value_net = make_default_net(1, 1, 8);
    PPOLevelConfig config;
    config.epochs = 10;
    config.delta = 0.01;
    PolicyAdam padam = make_policy_adam(policy, config.lr_policy);
    AdamState vadam = make_adam(value_net, config.lr_value);

    const Categorical before = std::get<Categorical>(policy.dist({1.0}));
    AdvantageBatch batch = bandit_batch(policy, {0, 0, 1, 1}, {1.0, 1.0, -1.0, -1.0});
    ppo_update(policy, value_net, batch, config, padam, vadam);
    const Categorical after = std::get<Categorical>(policy.dist({1.0}));
    CHECK(after.probs[0] > before.probs[0]);
}

TEST_CASE("ppo: mean kl stays within 1.5 delta across aggressive updates") {
    Rng rng(9);
    for (int trial = 0; trial < 10; ++trial) {
        Policy policy = make_policy(HeadKind::bernoulli, 3, 2, 100 + trial);
        MLPParams value_net = make_default_net(3, 1, 200 + trial);
        PPOLevelConfig config;
        config.delta = 0.001;
        config.epochs = 40;
        config.lr_policy = 1e-2;  // deliberately oversized steps
        PolicyAdam padam = make_policy_adam(policy, config.lr_policy);
        AdamState vadam = make_adam(value_net, config.lr_value);

        const int n = 32;
        AdvantageBatch batch;
        batch.observations = Tensor({n, 3});
        for (double& x : batch.observations.data) x = rng.uniform(-1, 1);
        for (int i = 0; i < n; ++i) {
            const PolicyDist d = policy.dist({batch.observations.at(i, 0),
                                              batch.observations.at(i, 1),
                                              batch.observations.at(i, 2)});
            Action a = sample(d, rng);
            batch.old_log_probs.push_back(log_prob(d, a));
            batch.actions.push_back(std::move(a));
            batch.advantages.push_back(rng.uniform(-2, 2));
            batch.returns.push_back(rng.uniform(-1, 1));
        }
        normalize_advantages(batch.advantages);
        PPOStats stats = ppo_update(policy, value_net, batch, config, padam, vadam);
        CHECK(stats.mean_kl <= 1.5 * config.delta + 1e-12);
    }
}

TEST_CASE("ppo: nan loss aborts and restores the snapshot") {
    Policy policy = make_policy(HeadKind::categorical, 1, 2, 11);
    const MLPParams before = policy.net;
    MLPParams value_net = make_default_net(1, 1, 12);
    PPOLevelConfig config;
    config.epochs = 5;
    PolicyAdam padam = make_policy_adam(policy, config.lr_policy);
    AdamState vadam = make_adam(value_net, config.lr_value);

    AdvantageBatch batch = bandit_batch(policy, {0, 1}, {std::nan(""), 1.0});
    PPOStats stats = ppo_update(policy, value_net, batch, config, padam, vadam);
    CHECK(stats.aborted);
    for (size_t l = 0; l < before.layers.size(); ++l) {
        CHECK(policy.net.layers[l].weight.data == before.layers[l].weight.data);
    }
}

TEST_CASE("mean_kl agrees with a scalar loop and is zero on identical nets") {
    Policy a = make_policy(HeadKind::bernoulli, 4, 3, 21);
    Policy b = make_policy(HeadKind::bernoulli, 4, 3, 22);
    Rng rng(23);
    Tensor obs({16, 4});
    for (double& x : obs.data) x = rng.uniform(-1, 1);

    CHECK(mean_kl(a, a, obs) == doctest::Approx(0.0).epsilon(1e-15));

    double manual = 0.0;
    for (int i = 0; i < 16; ++i) {
        std::vector<double> row(obs.data.begin() + i * 4, obs.data.begin() + (i + 1) * 4);
        manual += kl(a.dist(row), b.dist(row));
    }
    manual /= 16.0;
    CHECK(mean_kl(a, b, obs) == doctest::Approx(manual).epsilon(1e-12));
}

TEST_CASE("value regression reduces value loss") {
    Policy policy = make_policy(HeadKind::categorical, 2, 2, 31);
    MLPParams value_net = make_default_net(2, 1, 32);
    PPOLevelConfig config;
    config.epochs = 40;
    config.delta = 0.0;  // isolate the value path
    PolicyAdam padam = make_policy_adam(policy, config.lr_policy);
    AdamState vadam = make_adam(value_net, config.lr_value);

    Rng rng(33);
    const int n = 64;
    AdvantageBatch batch;
    batch.observations = Tensor({n, 2});
    for (int i = 0; i < n; ++i) {
        batch.observations.at(i, 0) = rng.uniform(-1, 1);
        batch.observations.at(i, 1) = rng.uniform(-1, 1);
        batch.actions.push_back({0.0});
        batch.old_log_probs.push_back(-0.7);
        batch.advantages.push_back(0.0);
        batch.returns.push_back(batch.observations.at(i, 0) + 0.5);
    }
    const std::vector<double> before = predict_values(value_net, batch.observations);
    double loss_before = 0.0;
    for (int i = 0; i < n; ++i) {
        loss_before += (before[i] - batch.returns[i]) * (before[i] - batch.returns[i]) / n;
    }
    PPOStats stats = ppo_update(policy, value_net, batch, config, padam, vadam);
    CHECK(stats.value_loss < loss_before);
    CHECK(stats.value_epochs == 40);
}
