#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mph/envs/tabular.hpp"
#include "mph/rng.hpp"

namespace mph {

// Finite level-state layout for the tabular hierarchy: the level-k state is
// the env state joined with the held actions of all levels above k, so a
// level-k table row is indexed by (env_state, a_{k+1}, ..., a_n).
struct BoundsSpec {
    int env_states = 0;
    std::vector<int> action_counts;  // A_1 (env) .. A_n (top signal alphabet)

    int level_count() const { return static_cast<int>(action_counts.size()); }
    // product of the action alphabets above level k
    int ctx_count(int level) const;
    int rows(int level) const { return env_states * ctx_count(level); }
    int row_index(int level, int env_state, int ctx) const {
        return env_state * ctx_count(level) + ctx;
    }
    void validate() const;
};

// Stochastic policy over level-k states: [rows(k) x A_k].
struct PolicyTable {
    int level = 1;
    int num_rows = 0;
    int num_actions = 0;
    std::vector<double> probs;

    double at(int row, int action) const {
        return probs[static_cast<size_t>(row) * num_actions + action];
    }
    double& at(int row, int action) {
        return probs[static_cast<size_t>(row) * num_actions + action];
    }
};

// Transition table over level-k states/actions; the upper context is held,
// so the outcome distribution ranges over env states only.
struct LevelKernel {
    int level = 1;
    int num_rows = 0;
    int num_actions = 0;
    int num_env_states = 0;
    int time_scale = 1;
    std::vector<double> probs;  // [rows x actions x env_states]

    double at(int row, int action, int next) const {
        return probs[(static_cast<size_t>(row) * num_actions + action) * num_env_states + next];
    }
    double& at(int row, int action, int next) {
        return probs[(static_cast<size_t>(row) * num_actions + action) * num_env_states + next];
    }
};

PolicyTable make_random_policy(const BoundsSpec& spec, int level, std::uint64_t seed);

// Level-1 kernel: the env kernel replicated across contexts.
LevelKernel lift_env_kernel(const BoundsSpec& spec, const TabularMDP& env);

// p_k(s'|s,a) = sum_b p_{k-1}(s'|s,b) pi_{k-1}(b|s), where the level-(k-1)
// state is the level-k state joined with the level-k action.
LevelKernel marginalize_kernel(const BoundsSpec& spec, const LevelKernel& lower,
                               const PolicyTable& lower_policy);

// First step with the given action, then T-1 steps of the pi_k-induced
// state chain, contexts held throughout.
LevelKernel timescale_kernel(const BoundsSpec& spec, const LevelKernel& kernel,
                             const PolicyTable& policy, int time_scale);

// Row-wise logit-space perturbation, scaled by bisection until the maximum
// per-state KL(pi || pi') lands in [0.9*delta, delta].
PolicyTable kl_projected_perturbation(const PolicyTable& policy, double delta,
                                      std::uint64_t seed);

double max_row_kl(const PolicyTable& p, const PolicyTable& q);

struct LevelDrift {
    int level = 2;
    double drift = 0.0;      // max |p_k - p'_k| over (s, ctx, a, s')
    double bound = 0.0;      // sum_{i<k} sqrt(delta_i / 2)
    double slack = 0.0;      // bound - drift
    double holder_l1 = 0.0;  // max row ||pi_{k-1} - pi'_{k-1}||_1 (diagnostic)
    bool pass = false;
};

struct DriftReport {
    std::vector<LevelDrift> levels;  // levels 2..n
    bool pass = false;
};

// Checks the Appendix-A-style drift bound for one instance. Policies and
// their perturbations are supplied; per-state KL(pi_i || pi'_i) <= delta_i
// is a precondition (DomainError otherwise, not a bound failure).
DriftReport verify_drift_bound(const BoundsSpec& spec, const TabularMDP& env,
                               std::span<const PolicyTable> policies,
                               std::span<const PolicyTable> perturbed,
                               std::span<const double> deltas);

struct CampaignConfig {
    int instances = 1000;
    int max_levels = 3;       // n sampled in [2, max_levels]
    int max_states = 6;
    int max_actions = 4;
    std::vector<double> deltas = {0.001, 0.002, 0.01};  // sampled per level
    std::uint64_t seed = 0;
};

struct CampaignInstance {
    std::uint64_t seed = 0;
    int env_states = 0;
    std::vector<int> action_counts;
    std::vector<double> deltas;
    DriftReport report;
};

struct CampaignResult {
    std::vector<CampaignInstance> instances;
    int violations = 0;
    double min_slack = 0.0;
    double max_drift_ratio = 0.0;  // drift / bound
};

CampaignResult run_bounds_campaign(const CampaignConfig& config);

}  // namespace mph
