#include "mph/hierarchy.hpp"

#include <string>

#include "mph/common.hpp"

namespace mph {

HierarchySpec HierarchySpec::flat(int env_obs_dim) {
    HierarchySpec spec;
    spec.env_obs_dim = env_obs_dim;
    spec.levels.push_back(LevelSpec{1, 1, 0, true});
    return spec;
}

HierarchySpec HierarchySpec::two_level(int env_obs_dim, int t2, int m2, bool appended) {
    HierarchySpec spec;
    spec.env_obs_dim = env_obs_dim;
    spec.levels.push_back(LevelSpec{1, 1, 0, true});
    spec.levels.push_back(LevelSpec{2, t2, m2, appended});
    spec.validate();
    return spec;
}

int HierarchySpec::obs_dim(int level) const {
    int dim = env_obs_dim;
    for (int k = level + 1; k <= level_count(); ++k) {
        if (levels[k - 1].appended) dim += levels[k - 1].signal_width;
    }
    return dim;
}

void HierarchySpec::validate() const {
    if (env_obs_dim < 1) throw DomainError("hierarchy: env_obs_dim must be >= 1");
    if (levels.empty()) throw DomainError("hierarchy: needs at least one level");
    if (levels[0].time_scale != 1) throw DomainError("hierarchy: worker time scale must be 1");
    for (int k = 1; k <= level_count(); ++k) {
        const LevelSpec& spec = levels[k - 1];
        if (spec.index != k) throw DomainError("hierarchy: level indices must be 1..n in order");
        if (k >= 2) {
            if (spec.signal_width < 1) {
                throw DomainError("hierarchy: signal width must be >= 1 at level " +
                                  std::to_string(k));
            }
            if (spec.time_scale <= levels[k - 2].time_scale) {
                throw DomainError("hierarchy: time scales must be strictly increasing");
            }
        }
    }
}

void ModulationState::reset(const HierarchySpec& spec) {
    const int n = spec.level_count();
    held.assign(n >= 2 ? n - 1 : 0, {});
    last_activation.assign(n >= 2 ? n - 1 : 0, -1);
}

std::vector<double> assemble_obs(const HierarchySpec& spec, int level,
                                 const std::vector<double>& env_state,
                                 const ModulationState& mod) {
    if (static_cast<int>(env_state.size()) != spec.env_obs_dim) {
        throw ShapeError("assemble_obs: env state width mismatch");
    }
    std::vector<double> obs = env_state;
    for (int k = level + 1; k <= spec.level_count(); ++k) {
        if (!spec.levels[k - 1].appended) continue;
        const std::vector<double>& signal = mod.held[k - 2];
        if (static_cast<int>(signal.size()) != spec.levels[k - 1].signal_width) {
            throw UsageError("assemble_obs: level " + std::to_string(k) +
                             " has no held signal");
        }
        obs.insert(obs.end(), signal.begin(), signal.end());
    }
    return obs;
}

std::vector<LevelDecision> hierarchy_step(const HierarchySpec& spec, int t,
                                          const std::vector<double>& env_state,
                                          std::span<const Policy> policies,
                                          ModulationState& mod, Rng& rng) {
    if (t < 0) throw DomainError("hierarchy_step: t must be >= 0");
    if (static_cast<int>(policies.size()) != spec.level_count()) {
        throw ShapeError("hierarchy_step: one policy per level required");
    }
    std::vector<LevelDecision> decisions;

    for (int k = spec.level_count(); k >= 2; --k) {
        if (t % spec.levels[k - 1].time_scale != 0) continue;  // hold
        LevelDecision d;
        d.level = k;
        d.obs = assemble_obs(spec, k, env_state, mod);
        const PolicyDist dist = policies[k - 1].dist(d.obs);
        d.action = sample(dist, rng);
        d.log_prob = log_prob(dist, d.action);
        mod.held[k - 2] = d.action;
        mod.last_activation[k - 2] = t;
        decisions.push_back(std::move(d));
    }

    LevelDecision worker;
    worker.level = 1;
    worker.obs = assemble_obs(spec, 1, env_state, mod);
    const PolicyDist dist = policies[0].dist(worker.obs);
    worker.action = sample(dist, rng);
    worker.log_prob = log_prob(dist, worker.action);
    decisions.push_back(std::move(worker));
    return decisions;
}

double aggregate_master_reward(std::span<const double> interval_rewards) {
    double total = 0.0;
    for (double r : interval_rewards) total += r;
    return total;
}

std::vector<LevelRollout> slice_rollouts(const HierarchySpec& spec,
                                         const EpisodeTrace& trace) {
    const int n = spec.level_count();
    if (static_cast<int>(trace.final_obs_per_level.size()) != n) {
        throw ShapeError("slice_rollouts: final obs per level missing");
    }
    std::vector<LevelRollout> rollouts(n);
    for (int k = 1; k <= n; ++k) {
        rollouts[k - 1].level = k;
        rollouts[k - 1].final_obs = trace.final_obs_per_level[k - 1];
        rollouts[k - 1].terminated = trace.terminated;
    }

    for (const TraceStep& step : trace.steps) {
        bool worker_seen = false;
        for (const LevelDecision& d : step.decisions) {
            LevelRollout& r = rollouts[d.level - 1];
            LevelStepRecord rec;
            rec.obs = d.obs;
            rec.action = d.action;
            rec.log_prob = d.log_prob;
            rec.skill_index = d.skill_index;
            r.steps.push_back(std::move(rec));
            if (d.level == 1) worker_seen = true;
        }
        if (!worker_seen) throw ShapeError("slice_rollouts: step without worker decision");
        // env reward: full amount to the worker step, and accumulated into the
        // open interval of every higher level
        rollouts[0].steps.back().env_reward += step.env_reward;
        for (int k = 2; k <= n; ++k) {
            if (rollouts[k - 1].steps.empty()) {
                throw ShapeError("slice_rollouts: master reward before first activation");
            }
            rollouts[k - 1].steps.back().env_reward += step.env_reward;
        }
    }

    for (LevelRollout& r : rollouts) {
        if (!r.steps.empty()) r.steps.back().done = true;
    }
    return rollouts;
}

}  // namespace mph
