#pragma once

#include <filesystem>
#include <string>

#include "mph/agents.hpp"

namespace mph {

// Full run configuration. Flat key=value text files with dotted sections;
// defaults are baked per environment (stacking analog / pushing analog).
struct RunConfig {
    std::string env_name = "keydoor";
    AgentKind agent = AgentKind::mph;
    std::uint64_t seed = 1;
    int rounds = 50;
    int rollouts_per_round = 50;
    int workers = 10;
    int eval_episodes = 32;
    int eval_every = 5;
    int horizon = 0;  // 0 = environment default
    AgentConfig agent_config;

    EnvSpec env_spec() const;
    void validate() const;
};

// Paper-default hyperparameters for the named environment and agent kind.
RunConfig default_run_config(const std::string& env_name, AgentKind kind);

// Applies one dotted key. Unknown keys raise UsageError.
void apply_config_entry(RunConfig& config, const std::string& key, const std::string& value);

// key = value lines, '#' comments. Applied on top of the given config.
void load_config_file(RunConfig& config, const std::filesystem::path& path);

// Round-trippable dump of every setting, written next to run outputs.
std::string serialize_config(const RunConfig& config);

}  // namespace mph
