#pragma once

#include <cstdint>

#include "mph/distributions.hpp"
#include "mph/mlp.hpp"

namespace mph {

enum class HeadKind { bernoulli, categorical, gaussian };

// A stochastic policy: an MLP producing head outputs (bit logits, choice
// logits, or the Gaussian mean) plus, for Gaussian heads, a learned
// state-independent log-std vector.
struct Policy {
    HeadKind head = HeadKind::categorical;
    MLPParams net;
    Tensor log_std;  // gaussian only; empty otherwise

    int action_dim() const { return net.output_dim(); }

    PolicyDist dist_from_outputs(const double* outputs) const {
        const int d = net.output_dim();
        std::vector<double> row(outputs, outputs + d);
        switch (head) {
            case HeadKind::bernoulli:
                return BernoulliVector::from_logits(row);
            case HeadKind::categorical:
                return Categorical::from_logits(std::move(row));
            case HeadKind::gaussian:
                return DiagGaussian::make(std::move(row), log_std.data);
        }
        throw DomainError("policy: unknown head kind");
    }

    PolicyDist dist(const std::vector<double>& obs) const {
        Tensor input({1, static_cast<int>(obs.size())}, obs);
        Tensor out = mlp_forward(net, input);
        return dist_from_outputs(out.data.data());
    }
};

inline Policy make_policy(HeadKind head, int obs_dim, int out_dim, std::uint64_t seed) {
    Policy p;
    p.head = head;
    p.net = make_default_net(obs_dim, out_dim, seed);
    if (head == HeadKind::gaussian) {
        p.log_std = Tensor({out_dim});
        p.log_std.fill(-0.5);
    }
    return p;
}

}  // namespace mph
