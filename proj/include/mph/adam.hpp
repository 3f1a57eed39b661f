#pragma once

#include <vector>

#include "mph/mlp.hpp"
#include "mph/tensor.hpp"

namespace mph {

// Bias-corrected Adam. Moments are shape-congruent with the parameter list
// they were built for; step increments by exactly 1 per adam_step call.
struct AdamState {
    std::vector<Tensor> m;
    std::vector<Tensor> v;
    long step = 0;
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

AdamState make_adam(const MLPParams& params, double lr);
AdamState make_adam(const Tensor& param, double lr);

// params <- params - lr * m_hat / (sqrt(v_hat) + eps)
void adam_step(MLPParams& params, const MLPGrads& grads, AdamState& state);
void adam_step(Tensor& param, const Tensor& grad, AdamState& state);

}  // namespace mph
