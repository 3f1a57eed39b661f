#include "mph/curiosity.hpp"

#include <cmath>

#include "mph/common.hpp"

namespace mph {

namespace {

double sign_of(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

Tensor stack_rows(const TransitionBatch& batch, bool next) {
    const int n = static_cast<int>(batch.size());
    const int dim = static_cast<int>(batch.front().state.size());
    Tensor t({n, dim});
    for (int i = 0; i < n; ++i) {
        const std::vector<double>& src = next ? batch[i].next_state : batch[i].state;
        if (static_cast<int>(src.size()) != dim) {
            throw ShapeError("curiosity batch: inconsistent state widths");
        }
        std::copy(src.begin(), src.end(), t.data.begin() + static_cast<size_t>(i) * dim);
    }
    return t;
}

// [emb | action] rows for the forward/reverse model inputs
Tensor join_emb_action(const Tensor& emb, const TransitionBatch& batch, int action_dim) {
    const int n = emb.rows();
    const int d = emb.cols();
    Tensor t({n, d + action_dim});
    for (int i = 0; i < n; ++i) {
        if (static_cast<int>(batch[i].action.size()) != action_dim) {
            throw ShapeError("curiosity batch: inconsistent action widths");
        }
        double* row = &t.data[static_cast<size_t>(i) * (d + action_dim)];
        for (int j = 0; j < d; ++j) row[j] = emb.at(i, j);
        for (int j = 0; j < action_dim; ++j) row[d + j] = batch[i].action[j];
    }
    return t;
}

}  // namespace

CuriosityModels make_curiosity(int obs_dim, int action_dim, int emb_dim,
                               std::uint64_t seed, int hidden) {
    CuriosityModels m;
    m.emb_dim = emb_dim;
    m.action_dim = action_dim;
    m.embedding = init_params({obs_dim, hidden, hidden, emb_dim}, seed);
    m.forward_net = init_params({emb_dim + action_dim, hidden, hidden, emb_dim}, seed + 1);
    m.reverse_net = init_params({emb_dim + action_dim, hidden, hidden, emb_dim}, seed + 2);
    return m;
}

int curiosity_action_dim(HeadKind head, int policy_out_dim) {
    // one-hot width for categorical equals K; bit vectors and continuous
    // actions keep their own width
    (void)head;
    return policy_out_dim;
}

std::vector<double> encode_curiosity_action(HeadKind head, int policy_out_dim,
                                            const Action& action) {
    if (head == HeadKind::categorical) {
        std::vector<double> onehot(policy_out_dim, 0.0);
        const int idx = static_cast<int>(action.at(0));
        if (idx < 0 || idx >= policy_out_dim) {
            throw DomainError("encode_curiosity_action: index out of range");
        }
        onehot[idx] = 1.0;
        return onehot;
    }
    return action;
}

Tensor embed_states(const CuriosityModels& models, const Tensor& states) {
    Tensor z = mlp_forward(models.embedding, states);
    for (double& x : z.data) x = std::tanh(x);
    return z;
}

double intrinsic_reward(const CuriosityModels& models, const CuriosityConfig& config,
                        const std::vector<double>& state, const std::vector<double>& action,
                        const std::vector<double>& next_state) {
    if (config.eta == 0.0) return 0.0;
    Transition t{state, action, next_state};
    const TransitionBatch batch{t};
    const Tensor z = embed_states(models, stack_rows(batch, false));
    const Tensor z_next = embed_states(models, stack_rows(batch, true));
    const Tensor pred = mlp_forward(models.forward_net,
                                    join_emb_action(z, batch, models.action_dim));
    double sq = 0.0;
    for (int j = 0; j < models.emb_dim; ++j) {
        const double e = pred.at(0, j) - z_next.at(0, j);
        sq += e * e;
    }
    return config.eta * std::sqrt(sq);
}

CuriosityLoss curiosity_loss(const CuriosityModels& models, const TransitionBatch& batch,
                             const CuriosityConfig& config) {
    if (batch.empty()) throw UsageError("curiosity_loss: empty batch");
    if (!(config.beta > 0.0) || !(config.beta < 1.0)) {
        throw DomainError("curiosity_loss: beta must lie in (0,1)");
    }
    const int n = static_cast<int>(batch.size());
    const int d = models.emb_dim;
    const double inv_n = 1.0 / n;
    const double beta = config.beta;
    const double lambda = config.lambda;

    const Tensor states = stack_rows(batch, false);
    const Tensor next_states = stack_rows(batch, true);
    const ForwardCache emb_cache = mlp_forward_cached(models.embedding, states);
    const ForwardCache emb_next_cache = mlp_forward_cached(models.embedding, next_states);
    Tensor z = emb_cache.output(), zn = emb_next_cache.output();
    for (double& x : z.data) x = std::tanh(x);
    for (double& x : zn.data) x = std::tanh(x);

    const Tensor fwd_in = join_emb_action(z, batch, models.action_dim);
    const Tensor rev_in = join_emb_action(zn, batch, models.action_dim);
    const ForwardCache fwd_cache = mlp_forward_cached(models.forward_net, fwd_in);
    const ForwardCache rev_cache = mlp_forward_cached(models.reverse_net, rev_in);
    const Tensor& pred_next = fwd_cache.output();
    const Tensor& pred_prev = rev_cache.output();

    CuriosityLoss result;
    Tensor d_pred_next({n, d});  // upstream into the forward net output
    Tensor d_pred_prev({n, d});
    Tensor dz({n, d});   // direct gradient into z (targets + L1)
    Tensor dzn({n, d});

    for (int i = 0; i < n; ++i) {
        double sq_f = 0.0, sq_r = 0.0, l1 = 0.0;
        for (int j = 0; j < d; ++j) {
            const double ef = pred_next.at(i, j) - zn.at(i, j);
            const double er = pred_prev.at(i, j) - z.at(i, j);
            sq_f += ef * ef;
            sq_r += er * er;
            l1 += std::abs(z.at(i, j)) + std::abs(zn.at(i, j));
        }
        const double nf = std::sqrt(sq_f);
        const double nr = std::sqrt(sq_r);
        result.forward_error += inv_n * nf;
        result.reverse_error += inv_n * nr;
        result.loss += inv_n * (beta * nf + (1.0 - beta) * nr - lambda * l1);

        for (int j = 0; j < d; ++j) {
            const double ef = pred_next.at(i, j) - zn.at(i, j);
            const double er = pred_prev.at(i, j) - z.at(i, j);
            const double gf = nf > 0.0 ? inv_n * beta * ef / nf : 0.0;
            const double gr = nr > 0.0 ? inv_n * (1.0 - beta) * er / nr : 0.0;
            d_pred_next.at(i, j) = gf;
            d_pred_prev.at(i, j) = gr;
            dzn.at(i, j) = -gf - inv_n * lambda * sign_of(zn.at(i, j));
            dz.at(i, j) = -gr - inv_n * lambda * sign_of(z.at(i, j));
        }
    }

    // model nets: parameter grads plus gradient into their embedding inputs
    MLPBackward fwd_back = mlp_backward_cached(models.forward_net, fwd_cache, d_pred_next);
    MLPBackward rev_back = mlp_backward_cached(models.reverse_net, rev_cache, d_pred_prev);
    result.forward_grads = std::move(fwd_back.grads);
    result.reverse_grads = std::move(rev_back.grads);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < d; ++j) {
            dz.at(i, j) += fwd_back.input_grad.at(i, j);
            dzn.at(i, j) += rev_back.input_grad.at(i, j);
        }
    }

    // through the output tanh, then the embedding net on both state batches
    for (int idx = 0; idx < dz.numel(); ++idx) {
        dz.data[idx] *= 1.0 - z.data[idx] * z.data[idx];
        dzn.data[idx] *= 1.0 - zn.data[idx] * zn.data[idx];
    }
    MLPBackward emb_back_s = mlp_backward_cached(models.embedding, emb_cache, dz);
    MLPBackward emb_back_next = mlp_backward_cached(models.embedding, emb_next_cache, dzn);
    result.embedding_grads = std::move(emb_back_s.grads);
    accumulate(result.embedding_grads, emb_back_next.grads);
    return result;
}

CuriosityAdam make_curiosity_adam(const CuriosityModels& models, double lr) {
    return CuriosityAdam{make_adam(models.embedding, lr),
                         make_adam(models.forward_net, lr),
                         make_adam(models.reverse_net, lr)};
}

CuriosityLoss update_curiosity(CuriosityModels& models, const TransitionBatch& batch,
                               const CuriosityConfig& config, CuriosityAdam& adam) {
    CuriosityLoss result = curiosity_loss(models, batch, config);
    adam_step(models.embedding, result.embedding_grads, adam.embedding);
    adam_step(models.forward_net, result.forward_grads, adam.forward_net);
    adam_step(models.reverse_net, result.reverse_grads, adam.reverse_net);
    return result;
}

}  // namespace mph
