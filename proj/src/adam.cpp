#include "mph/adam.hpp"

#include <cmath>

namespace mph {

namespace {

void apply(std::vector<double>& p, const std::vector<double>& g, Tensor& m,
           Tensor& v, const AdamState& state) {
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
    for (size_t i = 0; i < p.size(); ++i) {
        m.data[i] = state.beta1 * m.data[i] + (1.0 - state.beta1) * g[i];
        v.data[i] = state.beta2 * v.data[i] + (1.0 - state.beta2) * g[i] * g[i];
        const double m_hat = m.data[i] / bc1;
        const double v_hat = v.data[i] / bc2;
        p[i] -= state.lr * m_hat / (std::sqrt(v_hat) + state.eps);
    }
}

}  // namespace

AdamState make_adam(const MLPParams& params, double lr) {
    AdamState state;
    state.lr = lr;
    for (const DenseLayer& layer : params.layers) {
        state.m.push_back(Tensor(layer.weight.shape));
        state.v.push_back(Tensor(layer.weight.shape));
        state.m.push_back(Tensor(layer.bias.shape));
        state.v.push_back(Tensor(layer.bias.shape));
    }
    return state;
}

AdamState make_adam(const Tensor& param, double lr) {
    AdamState state;
    state.lr = lr;
    state.m.push_back(Tensor(param.shape));
    state.v.push_back(Tensor(param.shape));
    return state;
}

void adam_step(MLPParams& params, const MLPGrads& grads, AdamState& state) {
    if (grads.layers.size() != params.layers.size() ||
        state.m.size() != 2 * params.layers.size()) {
        throw ShapeError("adam_step: state/grads not congruent with params");
    }
    state.step += 1;
    for (size_t l = 0; l < params.layers.size(); ++l) {
        apply(params.layers[l].weight.data, grads.layers[l].weight.data,
              state.m[2 * l], state.v[2 * l], state);
        apply(params.layers[l].bias.data, grads.layers[l].bias.data,
              state.m[2 * l + 1], state.v[2 * l + 1], state);
    }
}

void adam_step(Tensor& param, const Tensor& grad, AdamState& state) {
    if (state.m.size() != 1 || !param.same_shape(grad)) {
        throw ShapeError("adam_step: state/grad not congruent with tensor param");
    }
    state.step += 1;
    apply(param.data, grad.data, state.m[0], state.v[0], state);
}

}  // namespace mph
