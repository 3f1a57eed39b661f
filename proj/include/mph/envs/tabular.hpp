#pragma once

#include <cstdint>
#include <vector>

#include "mph/rng.hpp"

namespace mph {

// Exact finite MDP transition kernel. Rows (s, a) sum to 1; when the
// ergodic flag is set every entry is >= the floor used at generation.
struct TabularMDP {
    int num_states = 0;
    int num_actions = 0;
    std::vector<double> kernel;  // [S * A * S], row-major over (s, a, s')
    bool ergodic = false;

    double at(int s, int a, int next) const {
        return kernel[(static_cast<size_t>(s) * num_actions + a) * num_states + next];
    }
    double& at(int s, int a, int next) {
        return kernel[(static_cast<size_t>(s) * num_actions + a) * num_states + next];
    }
};

// Rows drawn from a symmetric Dirichlet, floored at eps_erg with the
// remainder renormalized, so every entry is >= eps_erg exactly.
TabularMDP random_tabular(int num_states, int num_actions, std::uint64_t seed,
                          double eps_erg);

// Stationary distribution of the state chain induced by the uniform policy;
// exists and is unique for ergodic kernels. Used by tests and the bounds lab.
std::vector<double> stationary_uniform_policy(const TabularMDP& mdp,
                                              int max_iters = 10000,
                                              double tol = 1e-13);

}  // namespace mph
