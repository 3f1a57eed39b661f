#include "mph/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mph/common.hpp"

namespace mph {

int BoundsSpec::ctx_count(int level) const {
    int count = 1;
    for (int j = level + 1; j <= level_count(); ++j) count *= action_counts[j - 1];
    return count;
}

void BoundsSpec::validate() const {
    if (env_states < 2) throw DomainError("bounds: need at least 2 env states");
    if (action_counts.empty()) throw DomainError("bounds: need at least one level");
    for (int a : action_counts) {
        if (a < 2) throw DomainError("bounds: action alphabets must have >= 2 entries");
    }
}

PolicyTable make_random_policy(const BoundsSpec& spec, int level, std::uint64_t seed) {
    PolicyTable table;
    table.level = level;
    table.num_rows = spec.rows(level);
    table.num_actions = spec.action_counts[level - 1];
    table.probs.resize(static_cast<size_t>(table.num_rows) * table.num_actions);
    Rng rng(seed);
    for (int row = 0; row < table.num_rows; ++row) {
        double total = 0.0;
        for (int a = 0; a < table.num_actions; ++a) {
            table.at(row, a) = rng.exponential() + 1e-3;  // keep rows off the simplex edge
            total += table.at(row, a);
        }
        for (int a = 0; a < table.num_actions; ++a) table.at(row, a) /= total;
    }
    return table;
}

LevelKernel lift_env_kernel(const BoundsSpec& spec, const TabularMDP& env) {
    if (env.num_states != spec.env_states || env.num_actions != spec.action_counts[0]) {
        throw ShapeError("lift_env_kernel: env does not match the bounds spec");
    }
    LevelKernel kernel;
    kernel.level = 1;
    kernel.num_rows = spec.rows(1);
    kernel.num_actions = spec.action_counts[0];
    kernel.num_env_states = spec.env_states;
    kernel.probs.resize(static_cast<size_t>(kernel.num_rows) * kernel.num_actions *
                        kernel.num_env_states);
    const int ctx = spec.ctx_count(1);
    for (int s = 0; s < spec.env_states; ++s) {
        for (int c = 0; c < ctx; ++c) {
            const int row = spec.row_index(1, s, c);
            for (int a = 0; a < kernel.num_actions; ++a) {
                for (int next = 0; next < spec.env_states; ++next) {
                    kernel.at(row, a, next) = env.at(s, a, next);
                }
            }
        }
    }
    return kernel;
}

LevelKernel marginalize_kernel(const BoundsSpec& spec, const LevelKernel& lower,
                               const PolicyTable& lower_policy) {
    const int k = lower.level + 1;
    if (k > spec.level_count()) throw ShapeError("marginalize_kernel: no level above");
    if (lower_policy.level != lower.level) {
        throw ShapeError("marginalize_kernel: policy level does not match kernel");
    }
    if (lower_policy.num_rows != lower.num_rows ||
        lower_policy.num_actions != lower.num_actions) {
        throw ShapeError("marginalize_kernel: policy shape does not match kernel");
    }

    LevelKernel upper;
    upper.level = k;
    upper.num_rows = spec.rows(k);
    upper.num_actions = spec.action_counts[k - 1];
    upper.num_env_states = spec.env_states;
    upper.probs.resize(static_cast<size_t>(upper.num_rows) * upper.num_actions *
                       upper.num_env_states);

    const int upper_ctx = spec.ctx_count(k);
    for (int s = 0; s < spec.env_states; ++s) {
        for (int c = 0; c < upper_ctx; ++c) {
            const int row = spec.row_index(k, s, c);
            for (int a = 0; a < upper.num_actions; ++a) {
                // the level-(k-1) state appends a_k as the most significant
                // context digit
                const int lower_row = spec.row_index(k - 1, s, a * upper_ctx + c);
                for (int next = 0; next < spec.env_states; ++next) {
                    double acc = 0.0;
                    for (int b = 0; b < lower.num_actions; ++b) {
                        acc += lower.at(lower_row, b, next) * lower_policy.at(lower_row, b);
                    }
                    upper.at(row, a, next) = acc;
                }
            }
        }
    }
    return upper;
}

LevelKernel timescale_kernel(const BoundsSpec& spec, const LevelKernel& kernel,
                             const PolicyTable& policy, int time_scale) {
    if (time_scale < 1) throw DomainError("timescale_kernel: T must be >= 1");
    if (policy.num_rows != kernel.num_rows || policy.num_actions != kernel.num_actions) {
        throw ShapeError("timescale_kernel: policy shape does not match kernel");
    }
    LevelKernel scaled = kernel;
    scaled.time_scale = time_scale;
    if (time_scale == 1) return scaled;

    const int S = kernel.num_env_states;
    const int ctx = spec.ctx_count(kernel.level);

    // state chain induced by the policy, one per held context
    std::vector<double> chain(static_cast<size_t>(ctx) * S * S);
    for (int c = 0; c < ctx; ++c) {
        for (int s = 0; s < S; ++s) {
            const int row = spec.row_index(kernel.level, s, c);
            for (int next = 0; next < S; ++next) {
                double acc = 0.0;
                for (int a = 0; a < kernel.num_actions; ++a) {
                    acc += kernel.at(row, a, next) * policy.at(row, a);
                }
                chain[(static_cast<size_t>(c) * S + s) * S + next] = acc;
            }
        }
    }

    for (int step = 1; step < time_scale; ++step) {
        std::vector<double> next_probs(scaled.probs.size(), 0.0);
        for (int c = 0; c < ctx; ++c) {
            for (int s = 0; s < S; ++s) {
                const int row = spec.row_index(kernel.level, s, c);
                for (int a = 0; a < scaled.num_actions; ++a) {
                    for (int mid = 0; mid < S; ++mid) {
                        const double p_mid = scaled.at(row, a, mid);
                        if (p_mid == 0.0) continue;
                        const double* chain_row = &chain[(static_cast<size_t>(c) * S + mid) * S];
                        for (int next = 0; next < S; ++next) {
                            next_probs[(static_cast<size_t>(row) * scaled.num_actions + a) * S +
                                       next] += p_mid * chain_row[next];
                        }
                    }
                }
            }
        }
        scaled.probs = std::move(next_probs);
    }
    return scaled;
}

namespace {

double row_kl(const double* p, const double* q, int n) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        acc += p[i] * std::log(p[i] / q[i]);
    }
    return std::max(acc, 0.0);
}

PolicyTable apply_scale(const PolicyTable& policy, const std::vector<double>& noise,
                        double scale) {
    PolicyTable out = policy;
    for (int row = 0; row < policy.num_rows; ++row) {
        double total = 0.0;
        for (int a = 0; a < policy.num_actions; ++a) {
            const size_t idx = static_cast<size_t>(row) * policy.num_actions + a;
            out.at(row, a) = policy.at(row, a) * std::exp(scale * noise[idx]);
            total += out.at(row, a);
        }
        for (int a = 0; a < policy.num_actions; ++a) out.at(row, a) /= total;
    }
    return out;
}

}  // namespace

double max_row_kl(const PolicyTable& p, const PolicyTable& q) {
    if (p.num_rows != q.num_rows || p.num_actions != q.num_actions) {
        throw ShapeError("max_row_kl: table shapes disagree");
    }
    double worst = 0.0;
    for (int row = 0; row < p.num_rows; ++row) {
        worst = std::max(worst, row_kl(&p.probs[static_cast<size_t>(row) * p.num_actions],
                                       &q.probs[static_cast<size_t>(row) * q.num_actions],
                                       p.num_actions));
    }
    return worst;
}

PolicyTable kl_projected_perturbation(const PolicyTable& policy, double delta,
                                      std::uint64_t seed) {
    if (!(delta > 0.0)) throw DomainError("kl_projected_perturbation: delta must be > 0");
    Rng rng(seed);
    std::vector<double> noise(policy.probs.size());
    for (double& x : noise) x = rng.normal();

    double lo = 0.0;
    double hi = 1.0;
    double kl_hi = max_row_kl(policy, apply_scale(policy, noise, hi));
    int grow = 0;
    while (kl_hi < 0.9 * delta && grow < 60) {
        hi *= 2.0;
        kl_hi = max_row_kl(policy, apply_scale(policy, noise, hi));
        ++grow;
    }
    if (kl_hi < 0.9 * delta) {
        throw DomainError("kl_projected_perturbation: noise direction too weak");
    }
    if (kl_hi <= delta) return apply_scale(policy, noise, hi);

    for (int iter = 0; iter < 100; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const double kl_mid = max_row_kl(policy, apply_scale(policy, noise, mid));
        if (kl_mid >= 0.9 * delta && kl_mid <= delta) {
            return apply_scale(policy, noise, mid);
        }
        if (kl_mid > delta) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    throw DomainError("kl_projected_perturbation: bisection did not converge");
}

DriftReport verify_drift_bound(const BoundsSpec& spec, const TabularMDP& env,
                               std::span<const PolicyTable> policies,
                               std::span<const PolicyTable> perturbed,
                               std::span<const double> deltas) {
    spec.validate();
    const int n = spec.level_count();
    if (static_cast<int>(policies.size()) != n - 1 ||
        static_cast<int>(perturbed.size()) != n - 1 ||
        static_cast<int>(deltas.size()) != n - 1) {
        throw ShapeError("verify_drift_bound: need policies/perturbations/deltas for levels 1..n-1");
    }
    // precondition: per-state KL within the per-level budget
    for (int i = 0; i < n - 1; ++i) {
        const double kl = max_row_kl(policies[i], perturbed[i]);
        if (kl > deltas[i] * (1.0 + 1e-9)) {
            throw DomainError("verify_drift_bound: perturbation exceeds the KL budget at level " +
                              std::to_string(i + 1));
        }
    }

    DriftReport report;
    report.pass = true;
    LevelKernel base = lift_env_kernel(spec, env);
    LevelKernel perturbed_kernel = base;  // p'_1 == p_1 == p_env
    double bound = 0.0;
    for (int k = 2; k <= n; ++k) {
        base = marginalize_kernel(spec, base, policies[k - 2]);
        perturbed_kernel = marginalize_kernel(spec, perturbed_kernel, perturbed[k - 2]);
        bound += std::sqrt(deltas[k - 2] / 2.0);

        LevelDrift entry;
        entry.level = k;
        entry.bound = bound;
        for (size_t i = 0; i < base.probs.size(); ++i) {
            entry.drift = std::max(entry.drift,
                                   std::abs(base.probs[i] - perturbed_kernel.probs[i]));
        }
        // Hölder diagnostic: worst row L1 distance of the policy one level down
        const PolicyTable& p = policies[k - 2];
        const PolicyTable& q = perturbed[k - 2];
        for (int row = 0; row < p.num_rows; ++row) {
            double l1 = 0.0;
            for (int a = 0; a < p.num_actions; ++a) l1 += std::abs(p.at(row, a) - q.at(row, a));
            entry.holder_l1 = std::max(entry.holder_l1, l1);
        }
        entry.slack = entry.bound - entry.drift;
        entry.pass = entry.drift <= entry.bound + 1e-12;
        report.pass = report.pass && entry.pass;
        report.levels.push_back(entry);
    }
    return report;
}

CampaignResult run_bounds_campaign(const CampaignConfig& config) {
    CampaignResult result;
    result.min_slack = 1e300;
    Rng meta(config.seed);
    for (int i = 0; i < config.instances; ++i) {
        CampaignInstance instance;
        instance.seed = derive_seed(config.seed, static_cast<std::uint64_t>(i) + 1);
        Rng inst(instance.seed);

        const int n = 2 + inst.uniform_int(config.max_levels - 1);
        instance.env_states = 2 + inst.uniform_int(config.max_states - 1);
        instance.action_counts.resize(n);
        for (int& a : instance.action_counts) a = 2 + inst.uniform_int(config.max_actions - 1);
        for (int k = 0; k < n - 1; ++k) {
            instance.deltas.push_back(
                config.deltas[inst.uniform_int(static_cast<int>(config.deltas.size()))]);
        }

        BoundsSpec spec;
        spec.env_states = instance.env_states;
        spec.action_counts = instance.action_counts;

        const TabularMDP env =
            random_tabular(spec.env_states, spec.action_counts[0], inst.next_u64(), 0.01);
        std::vector<PolicyTable> policies, perturbed;
        for (int k = 1; k < n; ++k) {
            policies.push_back(make_random_policy(spec, k, inst.next_u64()));
            perturbed.push_back(
                kl_projected_perturbation(policies.back(), instance.deltas[k - 1],
                                          inst.next_u64()));
        }
        instance.report = verify_drift_bound(spec, env, policies, perturbed, instance.deltas);
        if (!instance.report.pass) ++result.violations;
        for (const LevelDrift& entry : instance.report.levels) {
            result.min_slack = std::min(result.min_slack, entry.slack);
            if (entry.bound > 0.0) {
                result.max_drift_ratio = std::max(result.max_drift_ratio,
                                                  entry.drift / entry.bound);
            }
        }
        result.instances.push_back(std::move(instance));
    }
    return result;
}

}  // namespace mph
