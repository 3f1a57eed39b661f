#include "mph/mlp.hpp"

#include <cmath>
#include <string>

#include "mph/rng.hpp"

namespace mph {

namespace {

// out[B x n] = in[B x m] * w[m x n] + bias
void affine(const Tensor& in, const DenseLayer& layer, Tensor& out) {
    const int batch = in.rows();
    const int m = layer.weight.shape[0];
    const int n = layer.weight.shape[1];
    out = Tensor({batch, n});
    for (int b = 0; b < batch; ++b) {
        const double* row = &in.data[static_cast<size_t>(b) * m];
        double* dst = &out.data[static_cast<size_t>(b) * n];
        for (int j = 0; j < n; ++j) dst[j] = layer.bias[j];
        for (int i = 0; i < m; ++i) {
            const double x = row[i];
            if (x == 0.0) continue;
            const double* wrow = &layer.weight.data[static_cast<size_t>(i) * n];
            for (int j = 0; j < n; ++j) dst[j] += x * wrow[j];
        }
    }
}

void check_input(const MLPParams& params, const Tensor& input) {
    if (input.ndim() != 2) {
        throw ShapeError("mlp input must be 2-D [batch x in]");
    }
    if (input.cols() != params.input_dim()) {
        throw ShapeError("mlp input width " + std::to_string(input.cols()) +
                         " does not match first layer in-dim " +
                         std::to_string(params.input_dim()));
    }
}

}  // namespace

MLPParams init_params(const std::vector<int>& dims, std::uint64_t seed) {
    if (dims.size() < 2) throw ShapeError("init_params needs at least [in, out]");
    for (int d : dims) {
        if (d < 1) throw ShapeError("init_params dims must be >= 1");
    }
    Rng rng(seed);
    MLPParams params;
    for (size_t l = 0; l + 1 < dims.size(); ++l) {
        DenseLayer layer;
        layer.weight = Tensor({dims[l], dims[l + 1]});
        layer.bias = Tensor({dims[l + 1]});
        const double bound = 1.0 / std::sqrt(static_cast<double>(dims[l]));
        for (double& w : layer.weight.data) w = rng.uniform(-bound, bound);
        params.layers.push_back(std::move(layer));
    }
    return params;
}

MLPParams make_default_net(int input_dim, int output_dim, std::uint64_t seed) {
    return init_params({input_dim, 64, 64, output_dim}, seed);
}

Tensor mlp_forward(const MLPParams& params, const Tensor& input) {
    check_input(params, input);
    Tensor current = input;
    Tensor next;
    const size_t last = params.layers.size() - 1;
    for (size_t l = 0; l < params.layers.size(); ++l) {
        affine(current, params.layers[l], next);
        if (l != last) {
            for (double& x : next.data) x = std::tanh(x);
        }
        current = std::move(next);
    }
    check_finite(current, "mlp_forward output");
    return current;
}

ForwardCache mlp_forward_cached(const MLPParams& params, const Tensor& input) {
    check_input(params, input);
    const size_t n_layers = params.layers.size();
    ForwardCache cache;
    cache.acts.reserve(n_layers + 1);
    cache.acts.push_back(input);
    Tensor next;
    for (size_t l = 0; l < n_layers; ++l) {
        affine(cache.acts.back(), params.layers[l], next);
        if (l + 1 != n_layers) {
            for (double& x : next.data) x = std::tanh(x);
        }
        cache.acts.push_back(std::move(next));
    }
    check_finite(cache.acts.back(), "mlp_forward output");
    return cache;
}

MLPBackward mlp_backward(const MLPParams& params, const Tensor& input,
                         const Tensor& upstream_grad) {
    return mlp_backward_cached(params, mlp_forward_cached(params, input), upstream_grad);
}

MLPBackward mlp_backward_cached(const MLPParams& params, const ForwardCache& cache,
                                const Tensor& upstream_grad) {
    const size_t n_layers = params.layers.size();
    const std::vector<Tensor>& acts = cache.acts;
    if (acts.size() != n_layers + 1) {
        throw ShapeError("mlp_backward: cache does not match the network");
    }
    if (!upstream_grad.same_shape(acts.back())) {
        throw ShapeError("upstream grad shape does not match forward output");
    }
    const Tensor& input = acts.front();

    MLPBackward result;
    result.grads = zero_grads_like(params);

    const int batch = input.rows();
    Tensor delta = upstream_grad;  // gradient w.r.t. layer pre-activation
    for (size_t l = n_layers; l-- > 0;) {
        const DenseLayer& layer = params.layers[l];
        DenseLayer& grad = result.grads.layers[l];
        const Tensor& in_act = acts[l];
        const int m = layer.weight.shape[0];
        const int n = layer.weight.shape[1];

        for (int b = 0; b < batch; ++b) {
            const double* x = &in_act.data[static_cast<size_t>(b) * m];
            const double* d = &delta.data[static_cast<size_t>(b) * n];
            for (int j = 0; j < n; ++j) grad.bias[j] += d[j];
            for (int i = 0; i < m; ++i) {
                const double xi = x[i];
                if (xi == 0.0) continue;
                double* grow = &grad.weight.data[static_cast<size_t>(i) * n];
                for (int j = 0; j < n; ++j) grow[j] += xi * d[j];
            }
        }

        Tensor prev_delta({batch, m});
        for (int b = 0; b < batch; ++b) {
            const double* d = &delta.data[static_cast<size_t>(b) * n];
            double* pd = &prev_delta.data[static_cast<size_t>(b) * m];
            for (int i = 0; i < m; ++i) {
                const double* wrow = &layer.weight.data[static_cast<size_t>(i) * n];
                double acc = 0.0;
                for (int j = 0; j < n; ++j) acc += wrow[j] * d[j];
                pd[i] = acc;
            }
        }
        if (l > 0) {
            // chain through the tanh that produced acts[l]
            for (int idx = 0; idx < prev_delta.numel(); ++idx) {
                const double a = acts[l].data[idx];
                prev_delta.data[idx] *= (1.0 - a * a);
            }
        }
        delta = std::move(prev_delta);
    }
    result.input_grad = std::move(delta);
    check_finite(result.input_grad, "mlp_backward input grad");
    return result;
}

MLPGrads zero_grads_like(const MLPParams& params) {
    MLPGrads grads;
    grads.layers.reserve(params.layers.size());
    for (const DenseLayer& layer : params.layers) {
        DenseLayer g;
        g.weight = Tensor(layer.weight.shape);
        g.bias = Tensor(layer.bias.shape);
        grads.layers.push_back(std::move(g));
    }
    return grads;
}

void accumulate(MLPGrads& into, const MLPGrads& from, double scale) {
    if (into.layers.size() != from.layers.size()) {
        throw ShapeError("grad accumulate: layer count mismatch");
    }
    for (size_t l = 0; l < into.layers.size(); ++l) {
        for (int i = 0; i < into.layers[l].weight.numel(); ++i) {
            into.layers[l].weight[i] += scale * from.layers[l].weight[i];
        }
        for (int i = 0; i < into.layers[l].bias.numel(); ++i) {
            into.layers[l].bias[i] += scale * from.layers[l].bias[i];
        }
    }
}

void scale_grads(MLPGrads& grads, double scale) {
    for (DenseLayer& layer : grads.layers) {
        for (double& w : layer.weight.data) w *= scale;
        for (double& b : layer.bias.data) b *= scale;
    }
}

namespace {

template <typename Params, typename Ptr>
std::vector<Ptr> entries_impl(Params& params) {
    std::vector<Ptr> out;
    for (auto& layer : params.layers) {
        for (auto& w : layer.weight.data) out.push_back(&w);
        for (auto& b : layer.bias.data) out.push_back(&b);
    }
    return out;
}

}  // namespace

std::vector<double*> param_entries(MLPParams& params) {
    return entries_impl<MLPParams, double*>(params);
}

std::vector<const double*> param_entries(const MLPParams& params) {
    return entries_impl<const MLPParams, const double*>(params);
}

std::vector<const double*> grad_entries(const MLPGrads& grads) {
    return entries_impl<const MLPGrads, const double*>(grads);
}

}  // namespace mph
