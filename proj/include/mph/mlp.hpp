#pragma once

#include <cstdint>
#include <vector>

#include "mph/tensor.hpp"

namespace mph {

struct DenseLayer {
    Tensor weight;  // [in x out]
    Tensor bias;    // [out]
};

// Fully connected network, tanh on hidden layers, identity on the output
// layer. Heads (sigmoid, softmax, ...) are applied by the caller.
struct MLPParams {
    std::vector<DenseLayer> layers;

    int input_dim() const { return layers.front().weight.shape[0]; }
    int output_dim() const { return layers.back().weight.shape[1]; }
    int hidden_layer_count() const { return static_cast<int>(layers.size()) - 1; }
};

// Gradient accumulators, shape-congruent with their MLPParams.
struct MLPGrads {
    std::vector<DenseLayer> layers;
};

// Deterministic scaled-uniform fan-in init: weights ~ U(-1/sqrt(in), 1/sqrt(in)),
// biases zero. dims = {input, hidden..., output}, each >= 1.
MLPParams init_params(const std::vector<int>& dims, std::uint64_t seed);

// The default architecture used by every network in the project:
// 2 hidden layers of 64 tanh units.
MLPParams make_default_net(int input_dim, int output_dim, std::uint64_t seed);

// input [batch x in] -> pre-activation outputs [batch x out].
Tensor mlp_forward(const MLPParams& params, const Tensor& input);

// Forward pass keeping every layer's post-activation values, so a backward
// pass does not have to recompute them. acts[0] is the input, acts.back()
// the network output.
struct ForwardCache {
    std::vector<Tensor> acts;
    const Tensor& output() const { return acts.back(); }
};
ForwardCache mlp_forward_cached(const MLPParams& params, const Tensor& input);

struct MLPBackward {
    MLPGrads grads;
    Tensor input_grad;  // [batch x in]
};

// Exact gradients of sum(upstream ⊙ forward(input)) w.r.t. params and input.
MLPBackward mlp_backward(const MLPParams& params, const Tensor& input,
                         const Tensor& upstream_grad);
MLPBackward mlp_backward_cached(const MLPParams& params, const ForwardCache& cache,
                                const Tensor& upstream_grad);

MLPGrads zero_grads_like(const MLPParams& params);
void accumulate(MLPGrads& into, const MLPGrads& from, double scale = 1.0);
void scale_grads(MLPGrads& grads, double scale);

// Flat views over every parameter, in layer order (W1, b1, W2, b2, ...).
// Used by finite-difference oracles and the checkpoint writer.
std::vector<double*> param_entries(MLPParams& params);
std::vector<const double*> param_entries(const MLPParams& params);
std::vector<const double*> grad_entries(const MLPGrads& grads);

}  // namespace mph
