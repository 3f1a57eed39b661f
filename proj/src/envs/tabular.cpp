#include "mph/envs/tabular.hpp"

#include <cmath>

#include "mph/common.hpp"

namespace mph {

TabularMDP random_tabular(int num_states, int num_actions, std::uint64_t seed,
                          double eps_erg) {
    if (num_states < 2 || num_actions < 2) {
        throw DomainError("random_tabular: need S >= 2 and A >= 2");
    }
    if (!(eps_erg > 0.0) || !(eps_erg < 1.0 / num_states)) {
        throw DomainError("random_tabular: eps_erg must lie in (0, 1/S)");
    }
    Rng rng(seed);
    TabularMDP mdp;
    mdp.num_states = num_states;
    mdp.num_actions = num_actions;
    mdp.kernel.resize(static_cast<size_t>(num_states) * num_actions * num_states);
    mdp.ergodic = true;

    const double slack = 1.0 - num_states * eps_erg;
    std::vector<double> raw(num_states);
    for (int s = 0; s < num_states; ++s) {
        for (int a = 0; a < num_actions; ++a) {
            double total = 0.0;
            for (double& x : raw) {
                x = rng.exponential();  // Dirichlet(1,...,1) via normalized Exp(1)
                total += x;
            }
            for (int next = 0; next < num_states; ++next) {
                mdp.at(s, a, next) = eps_erg + slack * raw[next] / total;
            }
        }
    }
    return mdp;
}

std::vector<double> stationary_uniform_policy(const TabularMDP& mdp, int max_iters,
                                              double tol) {
    const int S = mdp.num_states;
    const int A = mdp.num_actions;
    // state-to-state chain under the uniform policy
    std::vector<double> chain(static_cast<size_t>(S) * S, 0.0);
    for (int s = 0; s < S; ++s) {
        for (int a = 0; a < A; ++a) {
            for (int next = 0; next < S; ++next) {
                chain[static_cast<size_t>(s) * S + next] += mdp.at(s, a, next) / A;
            }
        }
    }
    std::vector<double> pi(S, 1.0 / S), next(S);
    for (int iter = 0; iter < max_iters; ++iter) {
        double delta = 0.0;
        for (int j = 0; j < S; ++j) {
            double acc = 0.0;
            for (int s = 0; s < S; ++s) acc += pi[s] * chain[static_cast<size_t>(s) * S + j];
            next[j] = acc;
        }
        for (int j = 0; j < S; ++j) {
            delta = std::max(delta, std::abs(next[j] - pi[j]));
            pi[j] = next[j];
        }
        if (delta < tol) break;
    }
    return pi;
}

}  // namespace mph
