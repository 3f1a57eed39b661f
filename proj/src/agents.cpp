#include "mph/agents.hpp"

#include <algorithm>
#include <cmath>

#include "mph/checkpoint.hpp"

namespace mph {

AgentKind agent_kind_from_string(const std::string& name) {
    if (name == "flat") return AgentKind::flat;
    if (name == "options") return AgentKind::options;
    if (name == "onehot") return AgentKind::onehot;
    if (name == "mph") return AgentKind::mph;
    throw UsageError("unknown agent kind: " + name);
}

std::string to_string(AgentKind kind) {
    switch (kind) {
        case AgentKind::flat: return "flat";
        case AgentKind::options: return "options";
        case AgentKind::onehot: return "onehot";
        case AgentKind::mph: return "mph";
    }
    return "?";
}

namespace {

HeadKind worker_head(const EnvSpec& env_spec) {
    return env_spec.discrete ? HeadKind::categorical : HeadKind::gaussian;
}

int worker_out_dim(const EnvSpec& env_spec) {
    return env_spec.discrete ? env_spec.action_count : env_spec.action_dim;
}

std::vector<double> onehot(int index, int width) {
    std::vector<double> v(width, 0.0);
    v[index] = 1.0;
    return v;
}

}  // namespace

Agent build_agent(const AgentConfig& config, const EnvSpec& env_spec) {
    Agent agent;
    agent.kind = config.kind;
    agent.env_spec = env_spec;

    const int env_dim = env_spec.observation_dim;
    switch (config.kind) {
        case AgentKind::flat:
            agent.hspec = HierarchySpec::flat(env_dim);
            break;
        case AgentKind::options:
            agent.hspec = HierarchySpec::two_level(env_dim, config.master_time_scale,
                                                   config.signal_width, /*appended=*/false);
            break;
        case AgentKind::onehot:
        case AgentKind::mph:
            agent.hspec = HierarchySpec::two_level(env_dim, config.master_time_scale,
                                                   config.signal_width, /*appended=*/true);
            break;
    }

    // worker level
    {
        LevelNets worker;
        worker.head = worker_head(env_spec);
        worker.ppo = config.worker_ppo;
        worker.curiosity_config = config.worker_curiosity;
        worker.model_epochs = config.model_epochs;
        const int obs_dim = agent.hspec.obs_dim(1);
        const int out_dim = worker_out_dim(env_spec);
        const int skill_count = config.kind == AgentKind::options ? config.signal_width : 1;
        for (int i = 0; i < skill_count; ++i) {
            worker.policies.push_back(
                make_policy(worker.head, obs_dim, out_dim, derive_seed(config.seed, 10 + i)));
            worker.policy_adams.push_back(
                make_policy_adam(worker.policies.back(), worker.ppo.lr_policy));
        }
        worker.value_net = make_default_net(obs_dim, 1, derive_seed(config.seed, 2));
        worker.value_adam = make_adam(worker.value_net, worker.ppo.lr_value);
        worker.curiosity = make_curiosity(obs_dim, curiosity_action_dim(worker.head, out_dim),
                                          config.emb_dim, derive_seed(config.seed, 3));
        worker.curiosity_adam = make_curiosity_adam(worker.curiosity, config.lr_models);
        agent.levels.push_back(std::move(worker));
    }

    if (config.kind != AgentKind::flat) {
        LevelNets master;
        master.head = config.kind == AgentKind::mph ? HeadKind::bernoulli : HeadKind::categorical;
        master.ppo = config.master_ppo;
        master.curiosity_config = config.master_curiosity;
        master.model_epochs = config.model_epochs;
        const int obs_dim = agent.hspec.obs_dim(2);
        const int out_dim = config.signal_width;
        master.policies.push_back(
            make_policy(master.head, obs_dim, out_dim, derive_seed(config.seed, 1)));
        master.policy_adams.push_back(
            make_policy_adam(master.policies.back(), master.ppo.lr_policy));
        master.value_net = make_default_net(obs_dim, 1, derive_seed(config.seed, 4));
        master.value_adam = make_adam(master.value_net, master.ppo.lr_value);
        master.curiosity = make_curiosity(obs_dim, curiosity_action_dim(master.head, out_dim),
                                          config.emb_dim, derive_seed(config.seed, 5));
        master.curiosity_adam = make_curiosity_adam(master.curiosity, config.lr_models);
        agent.levels.push_back(std::move(master));
    }
    return agent;
}

CollectedEpisode collect_episode(const Agent& agent, Env& env, Rng& rng) {
    CollectedEpisode episode;
    Env local = env;  // envs are values; keep the caller's instance untouched
    std::vector<double> env_state = local.reset(rng);
    ModulationState mod;
    mod.reset(agent.hspec);
    int current_skill = 0;
    const int horizon = agent.env_spec.horizon;
    bool terminated = false;

    for (int t = 0; t < horizon; ++t) {
        TraceStep step;

        if (agent.has_master() && t % agent.hspec.levels[1].time_scale == 0) {
            LevelDecision d;
            d.level = 2;
            d.obs = assemble_obs(agent.hspec, 2, env_state, mod);
            const PolicyDist dist = agent.levels[1].policies[0].dist(d.obs);
            d.action = sample(dist, rng);
            d.log_prob = log_prob(dist, d.action);
            if (agent.levels[1].head == HeadKind::categorical) {
                current_skill = static_cast<int>(d.action[0]);
                mod.held[0] = onehot(current_skill, agent.hspec.levels[1].signal_width);
            } else {
                mod.held[0] = d.action;
            }
            mod.last_activation[0] = t;
            step.decisions.push_back(std::move(d));
        }

        LevelDecision worker;
        worker.level = 1;
        worker.skill_index = agent.kind == AgentKind::options ? current_skill : 0;
        worker.obs = assemble_obs(agent.hspec, 1, env_state, mod);
        const Policy& policy = agent.levels[0].policies[worker.skill_index];
        const PolicyDist dist = policy.dist(worker.obs);
        worker.action = sample(dist, rng);
        worker.log_prob = log_prob(dist, worker.action);
        const Action env_action = worker.action;
        step.decisions.push_back(std::move(worker));

        const StepResult result = local.step(env_action);
        step.env_reward = result.reward;
        episode.env_return += result.reward;
        episode.trace.steps.push_back(std::move(step));
        env_state = result.observation;
        ++episode.steps;
        if (result.done) {
            terminated = result.success;
            episode.success = result.success;
            break;
        }
    }

    episode.trace.terminated = terminated;
    episode.trace.final_obs_per_level.push_back(assemble_obs(agent.hspec, 1, env_state, mod));
    if (agent.has_master()) {
        episode.trace.final_obs_per_level.push_back(assemble_obs(agent.hspec, 2, env_state, mod));
    }
    return episode;
}

namespace {

Tensor rows_to_tensor(const std::vector<const std::vector<double>*>& rows) {
    const int n = static_cast<int>(rows.size());
    const int dim = static_cast<int>(rows.front()->size());
    Tensor t({n, dim});
    for (int i = 0; i < n; ++i) {
        std::copy(rows[i]->begin(), rows[i]->end(),
                  t.data.begin() + static_cast<size_t>(i) * dim);
    }
    return t;
}

}  // namespace

RoundStats update_agent(Agent& agent, const std::vector<CollectedEpisode>& episodes) {
    if (episodes.empty()) throw UsageError("update_agent: no episodes");
    RoundStats stats;
    stats.levels.resize(agent.level_count());
    for (const CollectedEpisode& e : episodes) stats.env_steps += e.steps;

    // per-level rollouts for every episode
    std::vector<std::vector<LevelRollout>> per_episode;
    per_episode.reserve(episodes.size());
    for (const CollectedEpisode& e : episodes) {
        per_episode.push_back(slice_rollouts(agent.hspec, e.trace));
    }

    for (int k = 1; k <= agent.level_count(); ++k) {
        LevelNets& level = agent.levels[k - 1];
        LevelRoundStats& lstats = stats.levels[k - 1];
        const int out_dim = level.policies[0].net.output_dim();

        // intrinsic rewards and the curiosity transition set
        TransitionBatch transitions;
        double intrinsic_sum = 0.0;
        long intrinsic_count = 0;
        for (std::vector<LevelRollout>& rollouts : per_episode) {
            LevelRollout& r = rollouts[k - 1];
            for (size_t i = 0; i < r.steps.size(); ++i) {
                const std::vector<double>& next_obs =
                    i + 1 < r.steps.size() ? r.steps[i + 1].obs : r.final_obs;
                Transition t;
                t.state = r.steps[i].obs;
                t.action = encode_curiosity_action(level.head, out_dim, r.steps[i].action);
                t.next_state = next_obs;
                if (level.curiosity_config.enabled) {
                    r.steps[i].intrinsic_reward = intrinsic_reward(
                        level.curiosity, level.curiosity_config, t.state, t.action, t.next_state);
                }
                intrinsic_sum += r.steps[i].intrinsic_reward;
                ++intrinsic_count;
                transitions.push_back(std::move(t));
            }
        }
        lstats.mean_intrinsic = intrinsic_sum / static_cast<double>(intrinsic_count);

        // GAE per episode on this level's clock, concatenated into one batch
        AdvantageBatch batch;
        std::vector<int> row_skill;
        std::vector<const std::vector<double>*> obs_rows;
        for (const std::vector<LevelRollout>& rollouts : per_episode) {
            const LevelRollout& r = rollouts[k - 1];
            const size_t T = r.steps.size();
            if (T == 0) continue;

            std::vector<const std::vector<double>*> episode_obs;
            for (const LevelStepRecord& rec : r.steps) episode_obs.push_back(&rec.obs);
            episode_obs.push_back(&r.final_obs);
            const std::vector<double> values =
                predict_values(level.value_net, rows_to_tensor(episode_obs));

            std::vector<double> rewards(T);
            std::vector<double> value_seq(T + 1);
            std::vector<std::uint8_t> dones(T, 0);
            for (size_t i = 0; i < T; ++i) {
                rewards[i] = r.steps[i].env_reward + r.steps[i].intrinsic_reward;
                value_seq[i] = values[i];
            }
            value_seq[T] = r.terminated ? 0.0 : values[T];
            dones[T - 1] = r.terminated ? 1 : 0;

            const GaeResult g = gae(rewards, value_seq, dones, level.ppo.gamma,
                                    level.ppo.gae_lambda);
            for (size_t i = 0; i < T; ++i) {
                obs_rows.push_back(&r.steps[i].obs);
                batch.actions.push_back(r.steps[i].action);
                batch.old_log_probs.push_back(r.steps[i].log_prob);
                batch.advantages.push_back(g.advantages[i]);
                batch.returns.push_back(g.returns[i]);
                row_skill.push_back(k == 1 ? r.steps[i].skill_index : 0);
            }
        }
        batch.observations = rows_to_tensor(obs_rows);
        normalize_advantages(batch.advantages);

        // PPO: every policy net on its own rows, one shared value regression
        if (level.policies.size() == 1) {
            const PPOStats p = ppo_update_policy(level.policies[0], batch, level.ppo,
                                                 level.policy_adams[0]);
            lstats.mean_kl = p.mean_kl;
            lstats.policy_objective = p.policy_objective;
            stats.aborted = stats.aborted || p.aborted;
        } else {
            double weighted_kl = 0.0;
            double weighted_obj = 0.0;
            int covered = 0;
            for (size_t s = 0; s < level.policies.size(); ++s) {
                AdvantageBatch sub;
                std::vector<const std::vector<double>*> sub_obs;
                for (int i = 0; i < batch.size(); ++i) {
                    if (row_skill[i] != static_cast<int>(s)) continue;
                    sub_obs.push_back(obs_rows[i]);
                    sub.actions.push_back(batch.actions[i]);
                    sub.old_log_probs.push_back(batch.old_log_probs[i]);
                    sub.advantages.push_back(batch.advantages[i]);
                    sub.returns.push_back(batch.returns[i]);
                }
                if (sub.actions.empty()) continue;  // skill never selected this round
                sub.observations = rows_to_tensor(sub_obs);
                const PPOStats p = ppo_update_policy(level.policies[s], sub, level.ppo,
                                                     level.policy_adams[s]);
                weighted_kl += p.mean_kl * sub.size();
                weighted_obj += p.policy_objective * sub.size();
                covered += sub.size();
                stats.aborted = stats.aborted || p.aborted;
            }
            lstats.mean_kl = covered > 0 ? weighted_kl / covered : 0.0;
            lstats.policy_objective = covered > 0 ? weighted_obj / covered : 0.0;
        }
        {
            const PPOStats v = ppo_update_value(level.value_net, batch, level.ppo,
                                                level.value_adam);
            lstats.value_loss = v.value_loss;
            stats.aborted = stats.aborted || v.aborted;
        }

        // curiosity training happens after the policy update of the round
        if (level.curiosity_config.enabled) {
            CuriosityLoss last{};
            for (int epoch = 0; epoch < level.model_epochs; ++epoch) {
                last = update_curiosity(level.curiosity, transitions, level.curiosity_config,
                                        level.curiosity_adam);
            }
            lstats.curiosity_loss = last.loss;
        }
    }
    return stats;
}

EvalResult evaluate(const Agent& agent, Env& env, int episodes, std::uint64_t seed) {
    if (episodes < 1) throw UsageError("evaluate: episode count must be >= 1");
    Rng rng(derive_seed(seed, 9001));
    EvalResult result;
    for (int e = 0; e < episodes; ++e) {
        const CollectedEpisode episode = collect_episode(agent, env, rng);
        result.success_rate += episode.success ? 1.0 : 0.0;
        result.mean_return += episode.env_return;
    }
    result.success_rate /= episodes;
    result.mean_return /= episodes;
    return result;
}

namespace {

std::string level_prefix(int k) { return "level" + std::to_string(k); }

}  // namespace

void save_agent(const Agent& agent, const std::filesystem::path& path) {
    Checkpoint ckpt;
    Tensor meta({3}, {static_cast<double>(static_cast<int>(agent.kind)),
                      static_cast<double>(agent.level_count()),
                      static_cast<double>(agent.levels[0].policies.size())});
    ckpt.add("meta", meta);
    for (int k = 1; k <= agent.level_count(); ++k) {
        const LevelNets& level = agent.levels[k - 1];
        const std::string prefix = level_prefix(k);
        for (size_t i = 0; i < level.policies.size(); ++i) {
            ckpt.add_net(prefix + ".policy" + std::to_string(i), level.policies[i].net);
            if (level.policies[i].head == HeadKind::gaussian) {
                ckpt.add(prefix + ".log_std" + std::to_string(i), level.policies[i].log_std);
            }
        }
        ckpt.add_net(prefix + ".value", level.value_net);
        ckpt.add_net(prefix + ".curiosity.emb", level.curiosity.embedding);
        ckpt.add_net(prefix + ".curiosity.fwd", level.curiosity.forward_net);
        ckpt.add_net(prefix + ".curiosity.rev", level.curiosity.reverse_net);
    }
    ckpt.save(path);
}

void load_agent(Agent& agent, const std::filesystem::path& path) {
    const Checkpoint ckpt = Checkpoint::load(path);
    const Tensor& meta = ckpt.get("meta");
    if (static_cast<int>(meta[0]) != static_cast<int>(agent.kind) ||
        static_cast<int>(meta[1]) != agent.level_count() ||
        static_cast<int>(meta[2]) != static_cast<int>(agent.levels[0].policies.size())) {
        throw UsageError("load_agent: checkpoint does not match the agent configuration");
    }
    for (int k = 1; k <= agent.level_count(); ++k) {
        LevelNets& level = agent.levels[k - 1];
        const std::string prefix = level_prefix(k);
        for (size_t i = 0; i < level.policies.size(); ++i) {
            level.policies[i].net = ckpt.get_net(prefix + ".policy" + std::to_string(i));
            if (level.policies[i].head == HeadKind::gaussian) {
                level.policies[i].log_std = ckpt.get(prefix + ".log_std" + std::to_string(i));
            }
        }
        level.value_net = ckpt.get_net(prefix + ".value");
        level.curiosity.embedding = ckpt.get_net(prefix + ".curiosity.emb");
        level.curiosity.forward_net = ckpt.get_net(prefix + ".curiosity.fwd");
        level.curiosity.reverse_net = ckpt.get_net(prefix + ".curiosity.rev");
    }
}

}  // namespace mph
