#pragma once

#include <span>
#include <vector>

#include "mph/policy.hpp"
#include "mph/rng.hpp"

namespace mph {

// One level of the hierarchy. Level 1 is the worker (acts every step,
// emits environment actions); levels 2..n emit modulation signals on
// slower clocks, held constant between activations.
struct LevelSpec {
    int index = 1;         // 1-based, 1 = worker, n = master
    int time_scale = 1;    // T_k; strictly increasing in k, T_1 == 1
    int signal_width = 0;  // m_k for k >= 2 (bit count or skill count)
    bool appended = true;  // whether the signal joins lower observations
};

struct HierarchySpec {
    int env_obs_dim = 0;
    std::vector<LevelSpec> levels;  // levels[k-1] holds level k

    static HierarchySpec flat(int env_obs_dim);
    static HierarchySpec two_level(int env_obs_dim, int t2, int m2, bool appended = true);

    int level_count() const { return static_cast<int>(levels.size()); }
    // env dim plus the widths of all appended signals from levels above k
    int obs_dim(int level) const;
    void validate() const;
};

// Held modulation signals between activations, in observation form
// (bit vector for MPH, one-hot for categorical masters).
struct ModulationState {
    std::vector<std::vector<double>> held;  // held[k-2] = signal of level k
    std::vector<int> last_activation;

    void reset(const HierarchySpec& spec);
    bool initialized(int level) const {
        return !held[level - 2].empty();
    }
};

// [env_state, a^{k+1}, ..., a^n] with bits passed as 0/1 floats. The master
// receives the bare env state.
std::vector<double> assemble_obs(const HierarchySpec& spec, int level,
                                 const std::vector<double>& env_state,
                                 const ModulationState& mod);

// One decision by one level at one timestep.
struct LevelDecision {
    int level = 1;
    std::vector<double> obs;
    Action action;
    double log_prob = 0.0;
    int skill_index = 0;  // which net acted (options baseline; 0 elsewhere)
};

// Advances the MPH hierarchy at timestep t: levels n..2 refresh their held
// bits when t mod T_k == 0 (masters sample before lower levels observe),
// the worker acts every step. Returns the decisions made this step; the
// worker's is always last and its action is the environment action.
std::vector<LevelDecision> hierarchy_step(const HierarchySpec& spec, int t,
                                          const std::vector<double>& env_state,
                                          std::span<const Policy> policies,
                                          ModulationState& mod, Rng& rng);

// Undiscounted sum of the env rewards accumulated over a master's hold
// interval (truncated at episode end).
double aggregate_master_reward(std::span<const double> interval_rewards);

// --- per-level experience ---

struct LevelStepRecord {
    std::vector<double> obs;
    Action action;
    double log_prob = 0.0;
    double env_reward = 0.0;        // worker: single step; master: interval sum
    double intrinsic_reward = 0.0;  // filled by the curiosity stage
    bool done = false;              // last record of the episode on this clock
    int skill_index = 0;
};

struct LevelRollout {
    int level = 1;
    std::vector<LevelStepRecord> steps;
    std::vector<double> final_obs;  // bootstrap state on this level's clock
    bool terminated = false;        // env terminal (vs horizon truncation)
};

// Raw per-step episode record; agnostic to agent wiring.
struct TraceStep {
    std::vector<LevelDecision> decisions;
    double env_reward = 0.0;
};

struct EpisodeTrace {
    std::vector<TraceStep> steps;
    std::vector<std::vector<double>> final_obs_per_level;  // [level-1]
    bool terminated = false;
};

// Splits an episode onto each level's own clock: workers get one record per
// step, masters one per activation with interval-summed env rewards.
std::vector<LevelRollout> slice_rollouts(const HierarchySpec& spec,
                                         const EpisodeTrace& trace);

}  // namespace mph
