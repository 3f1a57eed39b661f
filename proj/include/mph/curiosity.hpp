#pragma once

#include <cstdint>
#include <vector>

#include "mph/adam.hpp"
#include "mph/distributions.hpp"
#include "mph/mlp.hpp"
#include "mph/policy.hpp"

namespace mph {

// Per-level intrinsic-motivation models: a learned embedding (tanh-bounded
// output), a forward model predicting the next embedding from (embedding,
// action), and a reverse model predicting the previous embedding from
// (next embedding, action).
struct CuriosityModels {
    MLPParams embedding;    // obs -> emb_dim (tanh applied to the output)
    MLPParams forward_net;  // [emb, action] -> emb_dim
    MLPParams reverse_net;  // [next emb, action] -> emb_dim
    int emb_dim = 0;
    int action_dim = 0;  // width of the encoded action
};

struct CuriosityConfig {
    bool enabled = true;
    double beta = 0.2;    // reverse-vs-forward weight, must be in (0,1)
    double lambda = 1e-3; // L1 anti-collapse scale
    double eta = 0.1;     // intrinsic reward scale
};

CuriosityModels make_curiosity(int obs_dim, int action_dim, int emb_dim,
                               std::uint64_t seed, int hidden = 64);

// Curiosity inputs encode discrete choices one-hot; bit vectors and
// continuous actions pass through unchanged.
int curiosity_action_dim(HeadKind head, int policy_out_dim);
std::vector<double> encode_curiosity_action(HeadKind head, int policy_out_dim,
                                            const Action& action);

struct Transition {
    std::vector<double> state;
    std::vector<double> action;  // already encoded
    std::vector<double> next_state;
};
using TransitionBatch = std::vector<Transition>;

// Tanh-bounded embedding of a batch of states, [N x emb_dim].
Tensor embed_states(const CuriosityModels& models, const Tensor& states);

// eta * ||forward([emb(s), a]) - emb(s')||_2, detached (no gradient path).
double intrinsic_reward(const CuriosityModels& models, const CuriosityConfig& config,
                        const std::vector<double>& state, const std::vector<double>& action,
                        const std::vector<double>& next_state);

struct CuriosityLoss {
    double loss = 0.0;           // batch mean of the joint objective
    double forward_error = 0.0;  // batch mean ||f - emb(s')||
    double reverse_error = 0.0;  // batch mean ||r - emb(s)||
    MLPGrads embedding_grads;
    MLPGrads forward_grads;
    MLPGrads reverse_grads;
};

// Joint objective: beta * ||f - emb(s')|| + (1-beta) * ||r - emb(s)||
//                  - lambda * (||emb(s)||_1 + ||emb(s')||_1),
// batch-averaged, with gradients flowing into all three nets (the embedding
// receives gradient through the model inputs, the targets, and the L1 term).
CuriosityLoss curiosity_loss(const CuriosityModels& models, const TransitionBatch& batch,
                             const CuriosityConfig& config);

struct CuriosityAdam {
    AdamState embedding;
    AdamState forward_net;
    AdamState reverse_net;
};
CuriosityAdam make_curiosity_adam(const CuriosityModels& models, double lr);

// One Adam step on the joint loss; returns the loss evaluated before the step.
CuriosityLoss update_curiosity(CuriosityModels& models, const TransitionBatch& batch,
                               const CuriosityConfig& config, CuriosityAdam& adam);

}  // namespace mph
