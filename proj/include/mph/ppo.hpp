#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mph/adam.hpp"
#include "mph/policy.hpp"
#include "mph/tensor.hpp"

namespace mph {

struct PPOLevelConfig {
    double gamma = 0.985;
    double gae_lambda = 0.95;
    double delta = 0.002;  // max mean KL per update round
    int epochs = 40;       // cap; KL early stopping usually ends sooner
    double lr_policy = 1e-4;
    double lr_value = 1e-2;
    double clip_ratio = 0.2;
};

struct GaeResult {
    std::vector<double> advantages;
    std::vector<double> returns;
};

// Standard recursive GAE. values has length T+1: values[T] is the bootstrap
// (0 at terminal, V(s_T) at truncation); dones[t] masks the next value.
GaeResult gae(std::span<const double> rewards, std::span<const double> values,
              std::span<const std::uint8_t> dones, double gamma, double gae_lambda);

// In-place normalization to mean 0 / std 1 with a 1e-8 floor on the std.
void normalize_advantages(std::vector<double>& advantages);

// One level's update batch. Rows live on that level's clock.
struct AdvantageBatch {
    Tensor observations;  // [N x obs_dim]
    std::vector<Action> actions;
    std::vector<double> old_log_probs;
    std::vector<double> advantages;
    std::vector<double> returns;

    int size() const { return observations.rows(); }
};

struct PolicyAdam {
    AdamState net;
    AdamState log_std;  // used by gaussian heads only
};
PolicyAdam make_policy_adam(const Policy& policy, double lr);

struct PPOStats {
    double mean_kl = 0.0;
    double policy_objective = 0.0;  // clipped surrogate at the last epoch
    double value_loss = 0.0;
    double clip_fraction = 0.0;
    int policy_epochs = 0;
    int value_epochs = 0;
    bool aborted = false;  // non-finite loss: params restored to the snapshot
};

// Clipped-surrogate PPO with KL early stopping: epochs full-batch ascent
// steps, stopping the first time batch mean KL(old||new) exceeds delta and
// rolling back to the last accepted parameters if it overshoots 1.5*delta.
// The value net regresses to the return targets for the full epoch budget.
PPOStats ppo_update(Policy& policy, MLPParams& value_net, const AdvantageBatch& batch,
                    const PPOLevelConfig& config, PolicyAdam& policy_adam,
                    AdamState& value_adam);

// The two halves, separable so the options baseline can update each skill
// policy on its own slice of the batch while sharing one value net.
PPOStats ppo_update_policy(Policy& policy, const AdvantageBatch& batch,
                           const PPOLevelConfig& config, PolicyAdam& policy_adam);
PPOStats ppo_update_value(MLPParams& value_net, const AdvantageBatch& batch,
                          const PPOLevelConfig& config, AdamState& value_adam);

// Batch mean of the closed-form per-state KL between the two policies.
double mean_kl(const Policy& policy_old, const Policy& policy_new,
               const Tensor& observations);

// Value predictions [N] for a batch of observations.
std::vector<double> predict_values(const MLPParams& value_net, const Tensor& observations);

}  // namespace mph
