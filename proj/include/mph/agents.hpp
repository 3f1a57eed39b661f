#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "mph/curiosity.hpp"
#include "mph/envs/env.hpp"
#include "mph/hierarchy.hpp"
#include "mph/policy.hpp"
#include "mph/ppo.hpp"

namespace mph {

enum class AgentKind { flat, options, onehot, mph };

AgentKind agent_kind_from_string(const std::string& name);
std::string to_string(AgentKind kind);

struct AgentConfig {
    AgentKind kind = AgentKind::mph;
    int master_time_scale = 4;  // options default to 8 (grid-searched value)
    int signal_width = 3;       // m_2 for mph; skill count for options/onehot
    int emb_dim = 16;
    PPOLevelConfig worker_ppo;
    PPOLevelConfig master_ppo;
    CuriosityConfig worker_curiosity;
    CuriosityConfig master_curiosity;
    double lr_models = 0.005;
    int model_epochs = 5;
    std::uint64_t seed = 0;

    AgentConfig() {
        master_ppo.delta = 0.001;
        worker_ppo.delta = 0.002;
        master_ppo.lr_policy = 1e-4;
        worker_ppo.lr_policy = 1e-4;
        master_ppo.lr_value = 1e-2;
        worker_ppo.lr_value = 1e-2;
    }
};

// One hierarchy level's networks and optimizer state. Single policy net for
// every kind except the options worker, which holds K independent skills
// sharing one value net.
struct LevelNets {
    std::vector<Policy> policies;
    MLPParams value_net;
    std::vector<PolicyAdam> policy_adams;
    AdamState value_adam;
    CuriosityModels curiosity;
    CuriosityConfig curiosity_config;
    CuriosityAdam curiosity_adam;
    PPOLevelConfig ppo;
    HeadKind head = HeadKind::categorical;
    int model_epochs = 10;
};

struct Agent {
    AgentKind kind = AgentKind::mph;
    EnvSpec env_spec;
    HierarchySpec hspec;
    std::vector<LevelNets> levels;  // [0] worker, [1] master when present

    int level_count() const { return static_cast<int>(levels.size()); }
    bool has_master() const { return levels.size() > 1; }
};

Agent build_agent(const AgentConfig& config, const EnvSpec& env_spec);

struct CollectedEpisode {
    EpisodeTrace trace;
    double env_return = 0.0;
    bool success = false;
    int steps = 0;
};

// Runs one episode with frozen parameters; all stochasticity comes from rng.
CollectedEpisode collect_episode(const Agent& agent, Env& env, Rng& rng);

struct LevelRoundStats {
    double mean_kl = 0.0;
    double policy_objective = 0.0;
    double value_loss = 0.0;
    double curiosity_loss = 0.0;
    double mean_intrinsic = 0.0;
};

struct RoundStats {
    std::vector<LevelRoundStats> levels;
    int env_steps = 0;
    bool aborted = false;
};

// One training round over a batch of collected episodes: per-level reward
// assembly (env + intrinsic), GAE, PPO on every level, then curiosity
// updates. Options skills are updated on their own step subsets only.
RoundStats update_agent(Agent& agent, const std::vector<CollectedEpisode>& episodes);

struct EvalResult {
    double success_rate = 0.0;
    double mean_return = 0.0;
};

// Stochastic-policy evaluation under a dedicated RNG stream.
EvalResult evaluate(const Agent& agent, Env& env, int episodes, std::uint64_t seed);

void save_agent(const Agent& agent, const std::filesystem::path& path);
void load_agent(Agent& agent, const std::filesystem::path& path);

}  // namespace mph
