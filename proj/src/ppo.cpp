#include "mph/ppo.hpp"

#include <algorithm>
#include <cmath>

#include "mph/common.hpp"
#include "mph/distributions.hpp"

namespace mph {

GaeResult gae(std::span<const double> rewards, std::span<const double> values,
              std::span<const std::uint8_t> dones, double gamma, double gae_lambda) {
    const size_t T = rewards.size();
    if (values.size() != T + 1 || dones.size() != T) {
        throw ShapeError("gae: rewards[T], values[T+1], dones[T] required");
    }
    GaeResult result;
    result.advantages.resize(T);
    result.returns.resize(T);
    double last_adv = 0.0;
    for (size_t t = T; t-- > 0;) {
        const double not_done = dones[t] ? 0.0 : 1.0;
        const double delta = rewards[t] + gamma * not_done * values[t + 1] - values[t];
        last_adv = delta + gamma * gae_lambda * not_done * last_adv;
        result.advantages[t] = last_adv;
        result.returns[t] = last_adv + values[t];
    }
    return result;
}

void normalize_advantages(std::vector<double>& advantages) {
    if (advantages.empty()) return;
    double mean = 0.0;
    for (double a : advantages) mean += a;
    mean /= advantages.size();
    double var = 0.0;
    for (double a : advantages) var += (a - mean) * (a - mean);
    const double stddev = std::sqrt(var / advantages.size());
    const double denom = std::max(stddev, 1e-8);
    for (double& a : advantages) a = (a - mean) / denom;
}

PolicyAdam make_policy_adam(const Policy& policy, double lr) {
    PolicyAdam adam;
    adam.net = make_adam(policy.net, lr);
    if (policy.head == HeadKind::gaussian) {
        adam.log_std = make_adam(policy.log_std, lr);
    }
    return adam;
}

std::vector<double> predict_values(const MLPParams& value_net, const Tensor& observations) {
    Tensor out = mlp_forward(value_net, observations);
    std::vector<double> values(out.rows());
    for (int i = 0; i < out.rows(); ++i) values[i] = out.at(i, 0);
    return values;
}

namespace {

std::vector<PolicyDist> batch_dists(const Policy& policy, const Tensor& observations) {
    Tensor outs = mlp_forward(policy.net, observations);
    std::vector<PolicyDist> dists;
    dists.reserve(outs.rows());
    for (int i = 0; i < outs.rows(); ++i) {
        dists.push_back(policy.dist_from_outputs(&outs.data[static_cast<size_t>(i) * outs.cols()]));
    }
    return dists;
}

struct PolicySnapshot {
    MLPParams net;
    Tensor log_std;
};

PolicySnapshot snapshot_of(const Policy& policy) {
    return {policy.net, policy.log_std};
}

void restore(Policy& policy, const PolicySnapshot& snap) {
    policy.net = snap.net;
    policy.log_std = snap.log_std;
}

double mean_kl_cached(const std::vector<PolicyDist>& old_dists, const Policy& policy_new,
                      const Tensor& observations) {
    Tensor outs = mlp_forward(policy_new.net, observations);
    double acc = 0.0;
    for (size_t i = 0; i < old_dists.size(); ++i) {
        acc += kl(old_dists[i],
                  policy_new.dist_from_outputs(&outs.data[i * outs.cols()]));
    }
    return acc / static_cast<double>(old_dists.size());
}

}  // namespace

double mean_kl(const Policy& policy_old, const Policy& policy_new,
               const Tensor& observations) {
    const std::vector<PolicyDist> old_dists = batch_dists(policy_old, observations);
    const std::vector<PolicyDist> new_dists = batch_dists(policy_new, observations);
    double acc = 0.0;
    for (size_t i = 0; i < old_dists.size(); ++i) acc += kl(old_dists[i], new_dists[i]);
    return acc / static_cast<double>(old_dists.size());
}

PPOStats ppo_update_policy(Policy& policy, const AdvantageBatch& batch,
                           const PPOLevelConfig& config, PolicyAdam& policy_adam) {
    const int n = batch.size();
    if (n < 1) throw UsageError("ppo_update: empty batch");
    if (static_cast<int>(batch.actions.size()) != n ||
        static_cast<int>(batch.old_log_probs.size()) != n ||
        static_cast<int>(batch.advantages.size()) != n ||
        static_cast<int>(batch.returns.size()) != n) {
        throw ShapeError("ppo_update: batch column lengths disagree");
    }

    PPOStats stats;
    const PolicySnapshot initial = snapshot_of(policy);
    const std::vector<PolicyDist> old_dists = batch_dists(policy, batch.observations);
    const double inv_n = 1.0 / n;
    const double clip = config.clip_ratio;
    const int head_dim = policy.net.output_dim();

    // --- policy: clipped surrogate ascent under the KL cap ---
    if (config.delta > 0.0) {
        PolicySnapshot accepted = initial;
        try {
            // one forward per epoch: the post-step forward doubles as the
            // KL check and the next epoch's gradient input
            ForwardCache cache = mlp_forward_cached(policy.net, batch.observations);
            for (int epoch = 0; epoch < config.epochs; ++epoch) {
                const Tensor& outs = cache.output();
                Tensor upstream({n, head_dim});
                Tensor log_std_grad = policy.head == HeadKind::gaussian
                                          ? Tensor(policy.log_std.shape)
                                          : Tensor();
                double objective = 0.0;
                int clipped_rows = 0;

                for (int i = 0; i < n; ++i) {
                    const double* out_row = &outs.data[static_cast<size_t>(i) * head_dim];
                    const std::vector<double> head_row(out_row, out_row + head_dim);
                    const PolicyDist dist = policy.dist_from_outputs(out_row);
                    const double lp = log_prob(dist, batch.actions[i]);
                    const double ratio = std::exp(lp - batch.old_log_probs[i]);
                    const double adv = batch.advantages[i];
                    const bool outside = ratio > 1.0 + clip || ratio < 1.0 - clip;
                    if (outside) ++clipped_rows;
                    objective += inv_n * std::min(ratio * adv,
                                                  std::clamp(ratio, 1.0 - clip, 1.0 + clip) * adv);

                    // subgradient of min(r*A, clip(r)*A): zero once the
                    // clipped branch is active
                    const bool active = !((adv >= 0.0 && ratio >= 1.0 + clip) ||
                                          (adv < 0.0 && ratio <= 1.0 - clip));
                    const double scale = active ? inv_n * ratio * adv : 0.0;
                    double* up_row = &upstream.data[static_cast<size_t>(i) * head_dim];
                    if (scale == 0.0) {
                        std::fill(up_row, up_row + head_dim, 0.0);
                        continue;
                    }
                    switch (policy.head) {
                        case HeadKind::bernoulli: {
                            const std::vector<double> g =
                                bernoulli_logprob_grad_logits(head_row, batch.actions[i]);
                            // ascent: negate for the Adam minimizer
                            for (int j = 0; j < head_dim; ++j) up_row[j] = -scale * g[j];
                            break;
                        }
                        case HeadKind::categorical: {
                            const std::vector<double> g =
                                categorical_logprob_grad_logits(head_row, batch.actions[i]);
                            for (int j = 0; j < head_dim; ++j) up_row[j] = -scale * g[j];
                            break;
                        }
                        case HeadKind::gaussian: {
                            const GaussianGrad g = gaussian_logprob_grad(
                                head_row, policy.log_std.data, batch.actions[i]);
                            for (int j = 0; j < head_dim; ++j) up_row[j] = -scale * g.d_mean[j];
                            for (int j = 0; j < head_dim; ++j) {
                                log_std_grad[j] += -scale * g.d_log_std[j];
                            }
                            break;
                        }
                    }
                }
                if (!std::isfinite(objective)) throw DomainError("ppo: non-finite objective");

                MLPBackward back = mlp_backward_cached(policy.net, cache, upstream);
                adam_step(policy.net, back.grads, policy_adam.net);
                if (policy.head == HeadKind::gaussian) {
                    adam_step(policy.log_std, log_std_grad, policy_adam.log_std);
                }
                stats.policy_objective = objective;
                stats.clip_fraction = static_cast<double>(clipped_rows) / n;
                ++stats.policy_epochs;

                cache = mlp_forward_cached(policy.net, batch.observations);
                double kl_now = 0.0;
                {
                    const Tensor& new_outs = cache.output();
                    for (int i = 0; i < n; ++i) {
                        kl_now += inv_n * kl(old_dists[i],
                                             policy.dist_from_outputs(
                                                 &new_outs.data[static_cast<size_t>(i) * head_dim]));
                    }
                }
                if (!std::isfinite(kl_now)) throw DomainError("ppo: non-finite kl");

                if (kl_now > config.delta) {
                    // keep the step only if it stays within the hard cap;
                    // otherwise the final restore drops it
                    if (kl_now <= 1.5 * config.delta) accepted = snapshot_of(policy);
                    break;
                }
                accepted = snapshot_of(policy);
            }
        } catch (const DomainError&) {
            restore(policy, initial);
            stats.aborted = true;
        }
        if (!stats.aborted) restore(policy, accepted);
        stats.mean_kl = mean_kl_cached(old_dists, policy, batch.observations);
    }
    return stats;
}

PPOStats ppo_update_value(MLPParams& value_net, const AdvantageBatch& batch,
                          const PPOLevelConfig& config, AdamState& value_adam) {
    const int n = batch.size();
    if (n < 1) throw UsageError("ppo_update: empty batch");
    PPOStats stats;
    const double inv_n = 1.0 / n;
    const MLPParams value_initial = value_net;
    try {
        for (int epoch = 0; epoch < config.epochs; ++epoch) {
            const ForwardCache cache = mlp_forward_cached(value_net, batch.observations);
            const Tensor& preds = cache.output();
            Tensor upstream({n, 1});
            double loss = 0.0;
            for (int i = 0; i < n; ++i) {
                const double err = preds.at(i, 0) - batch.returns[i];
                loss += inv_n * err * err;
                upstream.at(i, 0) = inv_n * 2.0 * err;
            }
            if (!std::isfinite(loss)) throw DomainError("ppo: non-finite value loss");
            MLPBackward back = mlp_backward_cached(value_net, cache, upstream);
            adam_step(value_net, back.grads, value_adam);
            stats.value_loss = loss;
            ++stats.value_epochs;
        }
    } catch (const DomainError&) {
        value_net = value_initial;
        stats.aborted = true;
    }
    return stats;
}

PPOStats ppo_update(Policy& policy, MLPParams& value_net, const AdvantageBatch& batch,
                    const PPOLevelConfig& config, PolicyAdam& policy_adam,
                    AdamState& value_adam) {
    PPOStats stats = ppo_update_policy(policy, batch, config, policy_adam);
    const PPOStats value_stats = ppo_update_value(value_net, batch, config, value_adam);
    stats.value_loss = value_stats.value_loss;
    stats.value_epochs = value_stats.value_epochs;
    stats.aborted = stats.aborted || value_stats.aborted;
    return stats;
}

}  // namespace mph
